#include "w2s/homophone.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "w2s/errors.hpp"

namespace w2s {

const std::string* SimilarityTable::shared_class(const std::string& a,
                                                 const std::string& b) const {
    const std::string sa = strip_stress(a);
    const std::string sb = strip_stress(b);
    for (const SimilarityClass& cls : classes) {
        const auto has = [&](const std::string& s) {
            return std::find(cls.phonemes.begin(), cls.phonemes.end(), s) != cls.phonemes.end();
        };
        if (has(sa) && has(sb)) return &cls.name;
    }
    return nullptr;
}

const SimilarityTable& default_similarity_table() {
    static const SimilarityTable table = {{
        {"vowel-iy-ih", {"IY", "IH"}},
        {"vowel-uw-uh", {"UW", "UH"}},
        {"vowel-eh-ae", {"EH", "AE"}},
        {"vowel-aa-ao", {"AA", "AO"}},
        {"voicing-td", {"T", "D"}},
        {"voicing-kg", {"K", "G"}},
        {"voicing-pb", {"P", "B"}},
        {"voicing-sz", {"S", "Z"}},
        {"voicing-fv", {"F", "V"}},
        {"voicing-th", {"TH", "DH"}},
        {"voicing-sh", {"SH", "ZH"}},
        {"voicing-ch", {"CH", "JH"}},
        {"unvoiced-stops", {"P", "T", "K"}},
        {"nasals", {"M", "N", "NG"}},
    }};
    return table;
}

SimilarityTable parse_similarity_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open similarity table '" + path.string() + "'");

    SimilarityTable table;
    std::set<std::string> seen_names;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        const std::string where = path.string() + " line " + std::to_string(line_no);
        const std::size_t colon = line.find(':');
        if (colon == std::string::npos) {
            throw FormatError(where + ": expected 'name: PH PH ...'");
        }

        SimilarityClass cls;
        {
            std::istringstream name_part(line.substr(0, colon));
            name_part >> cls.name;
            std::string extra;
            if (cls.name.empty() || (name_part >> extra)) {
                throw FormatError(where + ": class name must be a single token");
            }
        }
        if (!seen_names.insert(cls.name).second) {
            throw FormatError(where + ": duplicate class name '" + cls.name + "'");
        }

        std::istringstream members(line.substr(colon + 1));
        std::string symbol;
        while (members >> symbol) {
            if (!is_arpabet_phoneme(symbol)) {
                throw FormatError(where + ": unknown phoneme '" + symbol + "'");
            }
            if (std::find(cls.phonemes.begin(), cls.phonemes.end(), symbol) !=
                cls.phonemes.end()) {
                throw FormatError(where + ": repeated phoneme '" + symbol + "'");
            }
            cls.phonemes.push_back(symbol);
        }
        if (cls.phonemes.size() < 2) {
            throw FormatError(where + ": class '" + cls.name + "' needs at least two phonemes");
        }
        table.classes.push_back(std::move(cls));
    }
    return table;
}

std::string format_similarity_table(const SimilarityTable& table) {
    std::string out = "# phoneme similarity classes\n";
    for (const SimilarityClass& cls : table.classes) {
        out += cls.name + ":";
        for (const std::string& p : cls.phonemes) out += " " + p;
        out += "\n";
    }
    return out;
}

namespace {

// Checks one pronunciation combination. Sequences must have equal length
// and differ nowhere (homophone) or in exactly one position whose symbols
// share a class. Fills script and cls on success.
bool qualifies(const std::vector<std::string>& a, const std::vector<std::string>& b,
               const SimilarityTable& table, std::string& script, std::string& cls) {
    if (a.size() != b.size()) return false;
    std::size_t diff_at = a.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) continue;
        if (diff_at != a.size()) return false;
        diff_at = i;
    }
    if (diff_at == a.size()) {
        script.clear();
        cls = "homophone";
        return true;
    }
    const std::string* name = table.shared_class(a[diff_at], b[diff_at]);
    if (name == nullptr) return false;
    script = a[diff_at] + ">" + b[diff_at] + "@" + std::to_string(diff_at);
    cls = *name;
    return true;
}

}  // namespace

std::vector<NearHomophonePair> mine_pairs(const std::vector<WordPronunciation>& entries,
                                          const SimilarityTable& table) {
    // Group stress-free pronunciations by word, keeping entry order so the
    // primary variant is tried first.
    std::map<std::string, std::vector<std::vector<std::string>>> by_word;
    for (const WordPronunciation& entry : entries) {
        by_word[entry.word].push_back(strip_stress(entry.phonemes));
    }

    std::vector<NearHomophonePair> pairs;
    for (auto it_a = by_word.begin(); it_a != by_word.end(); ++it_a) {
        for (auto it_b = std::next(it_a); it_b != by_word.end(); ++it_b) {
            NearHomophonePair pair;
            bool found = false;
            for (const auto& prons_a : it_a->second) {
                for (const auto& prons_b : it_b->second) {
                    if (qualifies(prons_a, prons_b, table, pair.edit_script,
                                  pair.similarity_class)) {
                        found = true;
                        break;
                    }
                }
                if (found) break;
            }
            if (!found) continue;
            pair.word_a = it_a->first;
            pair.word_b = it_b->first;
            pairs.push_back(std::move(pair));
        }
    }
    // The word map iterates in sorted order, so pairs already come out
    // ordered by (word_a, word_b).
    return pairs;
}

std::vector<std::pair<std::string, std::string>> parse_pair_list(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open pair list '" + path.string() + "'");

    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        std::istringstream fields(line);
        std::string a;
        std::string b;
        std::string extra;
        fields >> a >> b;
        if (b.empty() || (fields >> extra)) {
            throw FormatError(path.string() + " line " + std::to_string(line_no) +
                              ": expected exactly two words");
        }
        const auto upper = [](std::string& s) {
            std::transform(s.begin(), s.end(), s.begin(),
                           [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        };
        upper(a);
        upper(b);
        if (a == b) {
            throw FormatError(path.string() + " line " + std::to_string(line_no) +
                              ": a pair needs two distinct words");
        }
        if (b < a) std::swap(a, b);
        pairs.emplace_back(std::move(a), std::move(b));
    }
    return pairs;
}

std::vector<NearHomophonePair> apply_pair_overrides(
    std::vector<NearHomophonePair> pairs,
    const std::vector<std::pair<std::string, std::string>>& include,
    const std::vector<std::pair<std::string, std::string>>& exclude) {
    const auto key = [](const NearHomophonePair& p) { return std::make_pair(p.word_a, p.word_b); };

    for (const auto& add : include) {
        const bool present = std::any_of(pairs.begin(), pairs.end(),
                                         [&](const NearHomophonePair& p) { return key(p) == add; });
        if (!present) pairs.push_back({add.first, add.second, "", "manual"});
    }
    std::erase_if(pairs, [&](const NearHomophonePair& p) {
        return std::find(exclude.begin(), exclude.end(), key(p)) != exclude.end();
    });
    std::sort(pairs.begin(), pairs.end(), [](const NearHomophonePair& a, const NearHomophonePair& b) {
        return std::tie(a.word_a, a.word_b) < std::tie(b.word_a, b.word_b);
    });
    return pairs;
}

}  // namespace w2s
