#include "w2s/cmudict.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "w2s/errors.hpp"

namespace w2s {

namespace {

constexpr std::array<const char*, 15> kVowels = {
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER",
    "EY", "IH", "IY", "OW", "OY", "UH", "UW",
};

constexpr std::array<const char*, 24> kConsonants = {
    "B", "CH", "D", "DH", "F", "G", "HH", "JH", "K", "L", "M", "N",
    "NG", "P", "R", "S", "SH", "T", "TH", "V", "W", "Y", "Z", "ZH",
};

bool contains(const char* const* begin, const char* const* end, const std::string& s) {
    return std::find_if(begin, end, [&](const char* c) { return s == c; }) != end;
}

// Splits "WORD(2)" into the word and its variant number. A bare word is
// variant 0. Anything else with parentheses is malformed.
void split_variant(const std::string& token, std::string& word, int& variant,
                   const std::string& where) {
    const std::size_t open = token.find('(');
    if (open == std::string::npos) {
        if (token.find(')') != std::string::npos) {
            throw FormatError(where + ": stray ')' in word token '" + token + "'");
        }
        word = token;
        variant = 0;
        return;
    }
    if (open == 0 || token.back() != ')' || token.size() < open + 3) {
        throw FormatError(where + ": malformed variant marker in '" + token + "'");
    }
    const std::string digits = token.substr(open + 1, token.size() - open - 2);
    for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw FormatError(where + ": malformed variant marker in '" + token + "'");
        }
    }
    const long value = std::stol(digits);
    if (value < 1) {
        throw FormatError(where + ": variant number must be at least 1 in '" + token + "'");
    }
    word = token.substr(0, open);
    variant = static_cast<int>(value);
}

void check_phoneme(const std::string& symbol, const std::string& where) {
    const std::string base = strip_stress(symbol);
    if (!is_arpabet_phoneme(base)) {
        throw FormatError(where + ": unknown phoneme '" + symbol + "'");
    }
    if (base != symbol && !is_arpabet_vowel(base)) {
        throw FormatError(where + ": stress digit on consonant '" + symbol + "'");
    }
}

}  // namespace

bool is_arpabet_phoneme(const std::string& symbol) {
    return contains(kVowels.begin(), kVowels.end(), symbol) ||
           contains(kConsonants.begin(), kConsonants.end(), symbol);
}

bool is_arpabet_vowel(const std::string& symbol) {
    return contains(kVowels.begin(), kVowels.end(), symbol);
}

std::string strip_stress(const std::string& symbol) {
    if (symbol.size() < 2) return symbol;
    const char last = symbol.back();
    if (last < '0' || last > '2') return symbol;
    return symbol.substr(0, symbol.size() - 1);
}

std::vector<std::string> strip_stress(const std::vector<std::string>& phonemes) {
    std::vector<std::string> out;
    out.reserve(phonemes.size());
    for (const std::string& p : phonemes) out.push_back(strip_stress(p));
    return out;
}

std::vector<WordPronunciation> parse_cmudict(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open pronunciation dictionary '" + path.string() + "'");

    std::vector<WordPronunciation> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind(";;;", 0) == 0) continue;
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        const std::string where = path.string() + " line " + std::to_string(line_no);
        std::istringstream fields(line);
        std::string token;
        fields >> token;

        WordPronunciation entry;
        split_variant(token, entry.word, entry.variant, where);
        std::transform(entry.word.begin(), entry.word.end(), entry.word.begin(),
                       [](unsigned char c) { return static_cast<char>(std::toupper(c)); });

        std::string symbol;
        while (fields >> symbol) {
            check_phoneme(symbol, where);
            entry.phonemes.push_back(symbol);
        }
        if (entry.phonemes.empty()) {
            throw FormatError(where + ": entry '" + entry.word + "' has no phonemes");
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

}  // namespace w2s
