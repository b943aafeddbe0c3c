#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"
#include "w2s/analysis.hpp"
#include "w2s/cmudict.hpp"
#include "w2s/errors.hpp"
#include "w2s/fixtures.hpp"
#include "w2s/homophone.hpp"
#include "w2s/rng.hpp"

using namespace w2s;
using testutil::TempDir;
using testutil::write_text;

namespace {

// Phoneme-level Levenshtein distance, coded from the textbook recurrence
// so the miner's shortcut logic has an independent check.
std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                            std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
        }
    }
    return d[a.size()][b.size()];
}

bool oracle_qualifies(const std::vector<std::string>& prons_a,
                      const std::vector<std::string>& prons_b, const SimilarityTable& table) {
    const std::vector<std::string> a = strip_stress(prons_a);
    const std::vector<std::string> b = strip_stress(prons_b);
    const std::size_t dist = edit_distance(a, b);
    if (dist == 0) return true;
    if (dist != 1 || a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return table.shared_class(a[i], b[i]) != nullptr;
    }
    return false;
}

// Every qualifying unordered word pair, by exhaustive comparison of all
// pronunciation combinations.
std::set<std::pair<std::string, std::string>> oracle_pairs(
    const std::vector<WordPronunciation>& entries, const SimilarityTable& table) {
    std::map<std::string, std::vector<std::vector<std::string>>> by_word;
    for (const WordPronunciation& e : entries) by_word[e.word].push_back(e.phonemes);

    std::set<std::pair<std::string, std::string>> found;
    for (const auto& [word_a, prons_a] : by_word) {
        for (const auto& [word_b, prons_b] : by_word) {
            if (word_a >= word_b) continue;
            for (const auto& pa : prons_a) {
                for (const auto& pb : prons_b) {
                    if (oracle_qualifies(pa, pb, table)) found.insert({word_a, word_b});
                }
            }
        }
    }
    return found;
}

// The corpus vocabulary, uppercased, as dictionary entries.
std::vector<WordPronunciation> vocabulary_entries(const std::filesystem::path& dict_path) {
    std::set<std::string> vocab;
    for (const FixtureUtterance& u : fixture_utterances()) {
        std::istringstream words(u.transcript);
        std::string word;
        while (words >> word) {
            std::transform(word.begin(), word.end(), word.begin(),
                           [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
            vocab.insert(word);
        }
    }
    std::vector<WordPronunciation> kept;
    for (WordPronunciation& e : parse_cmudict(dict_path)) {
        if (vocab.count(e.word) != 0) kept.push_back(std::move(e));
    }
    return kept;
}

}  // namespace

TEST_CASE("dictionary parsing keeps entry order and variant markers") {
    TempDir tmp;
    const auto dict_path = write_fixture_cmudict(tmp.path);
    const std::vector<WordPronunciation> entries = parse_cmudict(dict_path);

    CHECK(entries.size() == 46);

    const auto find = [&](const std::string& word, int variant) -> const WordPronunciation* {
        for (const WordPronunciation& e : entries) {
            if (e.word == word && e.variant == variant) return &e;
        }
        return nullptr;
    };

    const WordPronunciation* ship = find("SHIP", 0);
    REQUIRE(ship != nullptr);
    CHECK(ship->phonemes == std::vector<std::string>{"SH", "IH1", "P"});

    const WordPronunciation* read_alt = find("READ", 2);
    REQUIRE(read_alt != nullptr);
    CHECK(read_alt->phonemes == std::vector<std::string>{"R", "EH1", "D"});
    REQUIRE(find("READ", 0) != nullptr);
    CHECK(find("READ", 0)->phonemes == std::vector<std::string>{"R", "IY1", "D"});

    CHECK(find("EITHER", 0) != nullptr);
    CHECK(find("EITHER", 2) != nullptr);

    // Comment lines counted: 46 entries from a 50-line file.
    std::ifstream in(dict_path);
    std::size_t lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 50);
}

TEST_CASE("dictionary parsing normalizes case and tolerates blank lines") {
    TempDir tmp;
    const auto path = tmp.file("small.dict");
    write_text(path,
               "ship  SH IH1 P\n"
               "\n"
               "Mixed  M IH1 K S T\r\n");
    const std::vector<WordPronunciation> entries = parse_cmudict(path);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].word == "SHIP");
    CHECK(entries[1].word == "MIXED");
    CHECK(entries[1].phonemes.back() == "T");
}

TEST_CASE("dictionary parsing rejects bad symbols and markers with a line number") {
    TempDir tmp;
    const auto expect_bad = [&](const std::string& content, const char* tag) {
        const auto path = tmp.file(std::string("bad_") + tag + ".dict");
        write_text(path, "OK  K EY1\n" + content);
        try {
            parse_cmudict(path);
            FAIL_CHECK("expected a parse failure for ", tag);
        } catch (const FormatError& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    };

    expect_bad("SHIP  SH IQ P\n", "unknown-phoneme");
    expect_bad("SEAT  S1 IY T\n", "stress-on-consonant");
    expect_bad("READ(  R IY1 D\n", "unclosed-variant");
    expect_bad("READ(X)  R IY1 D\n", "non-numeric-variant");
    expect_bad("READ(0)  R IY1 D\n", "zero-variant");
    expect_bad("(2)  R IY1 D\n", "empty-word");
    expect_bad("READ)  R IY1 D\n", "stray-paren");
    expect_bad("EMPTY\n", "no-phonemes");

    CHECK_THROWS_AS(parse_cmudict(tmp.file("absent.dict")), FileError);
}

TEST_CASE("stress digits strip cleanly and the phoneme inventory is closed") {
    CHECK(strip_stress(std::string("IH1")) == "IH");
    CHECK(strip_stress(std::string("AO0")) == "AO");
    CHECK(strip_stress(std::string("IY2")) == "IY");
    CHECK(strip_stress(std::string("IH")) == "IH");
    CHECK(strip_stress(std::string("NG")) == "NG");
    CHECK(strip_stress(std::string("T")) == "T");

    const std::vector<std::string> stressed = {"SH", "IY1", "P"};
    CHECK(strip_stress(stressed) == std::vector<std::string>{"SH", "IY", "P"});

    CHECK(is_arpabet_phoneme("ZH"));
    CHECK(is_arpabet_phoneme("AW"));
    CHECK_FALSE(is_arpabet_phoneme("IH1"));
    CHECK_FALSE(is_arpabet_phoneme("Q"));
    CHECK_FALSE(is_arpabet_phoneme(""));
    CHECK(is_arpabet_vowel("IY"));
    CHECK(is_arpabet_vowel("ER"));
    CHECK_FALSE(is_arpabet_vowel("T"));
    CHECK_FALSE(is_arpabet_vowel("HH"));
}

TEST_CASE("the built-in similarity table licenses the intended substitutions") {
    const SimilarityTable& table = default_similarity_table();

    REQUIRE(table.shared_class("IY", "IH") != nullptr);
    CHECK(*table.shared_class("IY", "IH") == "vowel-iy-ih");
    // Stress digits on the query symbols are ignored.
    REQUIRE(table.shared_class("IY1", "IH0") != nullptr);
    CHECK(*table.shared_class("UH", "UW") == "vowel-uw-uh");
    CHECK(*table.shared_class("T", "D") == "voicing-td");
    CHECK(*table.shared_class("T", "K") == "unvoiced-stops");
    CHECK(*table.shared_class("M", "NG") == "nasals");

    // Different place or manner stays unlicensed.
    CHECK(table.shared_class("S", "SH") == nullptr);
    CHECK(table.shared_class("D", "G") == nullptr);
    CHECK(table.shared_class("IH", "EH") == nullptr);
    CHECK(table.shared_class("B", "K") == nullptr);
}

TEST_CASE("similarity tables round-trip through their text format") {
    TempDir tmp;
    const auto path = tmp.file("classes.txt");
    write_text(path, format_similarity_table(default_similarity_table()));
    const SimilarityTable parsed = parse_similarity_table(path);

    const SimilarityTable& expect = default_similarity_table();
    REQUIRE(parsed.classes.size() == expect.classes.size());
    for (std::size_t i = 0; i < parsed.classes.size(); ++i) {
        CHECK(parsed.classes[i].name == expect.classes[i].name);
        CHECK(parsed.classes[i].phonemes == expect.classes[i].phonemes);
    }
}

TEST_CASE("similarity table parsing rejects malformed class lines") {
    TempDir tmp;
    const auto expect_bad = [&](const std::string& content, const char* tag) {
        const auto path = tmp.file(std::string("bad_") + tag + ".txt");
        write_text(path, content);
        CHECK_THROWS_AS(parse_similarity_table(path), FormatError);
    };

    expect_bad("vowels IY IH\n", "missing-colon");
    expect_bad("vowels: IY IQ\n", "unknown-phoneme");
    expect_bad("lonely: IY\n", "single-phoneme");
    expect_bad("a: IY IH\na: UW UH\n", "duplicate-name");
    expect_bad("a: IY IY\n", "repeated-phoneme");
    expect_bad("two words: IY IH\n", "spaced-name");
    expect_bad(":\n", "empty-line-with-colon");

    // Comments and blank lines pass through.
    const auto ok = tmp.file("ok.txt");
    write_text(ok, "# voicing\n\nstops: T D  # trailing note\n");
    const SimilarityTable table = parse_similarity_table(ok);
    REQUIRE(table.classes.size() == 1);
    CHECK(table.classes[0].phonemes == std::vector<std::string>{"T", "D"});

    CHECK_THROWS_AS(parse_similarity_table(tmp.file("absent.txt")), FileError);
}

TEST_CASE("the corpus vocabulary mines to its six expected pairs") {
    TempDir tmp;
    const std::vector<WordPronunciation> vocab = vocabulary_entries(write_fixture_cmudict(tmp.path));
    CHECK(vocab.size() == 12);

    const std::vector<NearHomophonePair> pairs = mine_pairs(vocab, default_similarity_table());
    REQUIRE(pairs.size() == 6);

    const auto check_pair = [&](std::size_t i, const char* a, const char* b, const char* script,
                                const char* cls) {
        CHECK(pairs[i].word_a == a);
        CHECK(pairs[i].word_b == b);
        CHECK(pairs[i].edit_script == script);
        CHECK(pairs[i].similarity_class == cls);
    };
    check_pair(0, "BARE", "BEAR", "", "homophone");
    check_pair(1, "BLOT", "PLOT", "B>P@0", "voicing-pb");
    check_pair(2, "LOOK", "LUKE", "UH>UW@1", "vowel-uw-uh");
    check_pair(3, "MITTS", "MIX", "T>K@2", "unvoiced-stops");
    check_pair(4, "SEAT", "SEED", "T>D@2", "voicing-td");
    check_pair(5, "SHEEP", "SHIP", "IY>IH@1", "vowel-iy-ih");
}

TEST_CASE("mining the full dictionary matches the exhaustive oracle") {
    TempDir tmp;
    const std::vector<WordPronunciation> entries = parse_cmudict(write_fixture_cmudict(tmp.path));
    const SimilarityTable& table = default_similarity_table();

    const std::vector<NearHomophonePair> mined = mine_pairs(entries, table);
    std::set<std::pair<std::string, std::string>> mined_set;
    for (const NearHomophonePair& p : mined) {
        CHECK(p.word_a < p.word_b);
        CHECK(mined_set.insert({p.word_a, p.word_b}).second);
    }
    CHECK(mined_set == oracle_pairs(entries, table));

    // The fillers contribute four more pairs on top of the vocabulary six.
    CHECK(mined.size() == 10);
    CHECK(mined_set.count({"BAT", "BET"}) == 1);
    CHECK(mined_set.count({"CAB", "CAP"}) == 1);
    CHECK(mined_set.count({"COAT", "CODE"}) == 1);
    CHECK(mined_set.count({"COAT", "GOAT"}) == 1);

    // Variants of one word never pair with themselves.
    for (const NearHomophonePair& p : mined) CHECK(p.word_a != p.word_b);

    // Two runs agree exactly.
    const std::vector<NearHomophonePair> again = mine_pairs(entries, table);
    REQUIRE(again.size() == mined.size());
    for (std::size_t i = 0; i < mined.size(); ++i) {
        CHECK(again[i].word_a == mined[i].word_a);
        CHECK(again[i].word_b == mined[i].word_b);
        CHECK(again[i].edit_script == mined[i].edit_script);
        CHECK(again[i].similarity_class == mined[i].similarity_class);
    }
}

TEST_CASE("mining reaches alternate pronunciations and ignores stress") {
    SUBCASE("a pair only the second variant licenses") {
        std::vector<WordPronunciation> entries;
        entries.push_back({"ALPHA", 0, {"T", "IY1"}});
        entries.push_back({"ALPHA", 2, {"T", "UW1"}});
        entries.push_back({"BETA", 0, {"T", "UH1"}});
        const std::vector<NearHomophonePair> pairs =
            mine_pairs(entries, default_similarity_table());
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0].word_a == "ALPHA");
        CHECK(pairs[0].word_b == "BETA");
        CHECK(pairs[0].edit_script == "UW>UH@1");
        CHECK(pairs[0].similarity_class == "vowel-uw-uh");
    }
    SUBCASE("stress placement does not block a homophone") {
        std::vector<WordPronunciation> entries;
        entries.push_back({"RECORD", 0, {"R", "EH1", "K", "ER0", "D"}});
        entries.push_back({"RECCORD", 0, {"R", "EH0", "K", "ER1", "D"}});
        const std::vector<NearHomophonePair> pairs =
            mine_pairs(entries, default_similarity_table());
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0].similarity_class == "homophone");
        CHECK(pairs[0].edit_script.empty());
    }
    SUBCASE("insertions are never licensed even at distance one") {
        std::vector<WordPronunciation> entries;
        entries.push_back({"EAT", 0, {"IY1", "T"}});
        entries.push_back({"SEAT", 0, {"S", "IY1", "T"}});
        CHECK(mine_pairs(entries, default_similarity_table()).empty());
    }
}

TEST_CASE("manual pair lists adjust the mined output") {
    TempDir tmp;
    const auto list_path = tmp.file("pairs.txt");
    write_text(list_path,
               "# curated additions\n"
               "\n"
               "night knight\n"
               "SEAT  SEED   # already mined\n");
    const std::vector<std::pair<std::string, std::string>> parsed = parse_pair_list(list_path);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0] == std::pair<std::string, std::string>{"KNIGHT", "NIGHT"});
    CHECK(parsed[1] == std::pair<std::string, std::string>{"SEAT", "SEED"});

    SUBCASE("includes append only missing pairs, excludes always win") {
        std::vector<NearHomophonePair> mined;
        mined.push_back({"SEAT", "SEED", "T>D@2", "voicing-td"});
        mined.push_back({"SHEEP", "SHIP", "IY>IH@1", "vowel-iy-ih"});

        const std::vector<NearHomophonePair> curated =
            apply_pair_overrides(mined, parsed, {{"SHEEP", "SHIP"}});
        REQUIRE(curated.size() == 2);
        CHECK(curated[0].word_a == "KNIGHT");
        CHECK(curated[0].similarity_class == "manual");
        CHECK(curated[0].edit_script.empty());
        // The mined SEAT/SEED entry keeps its class over the include.
        CHECK(curated[1].word_a == "SEAT");
        CHECK(curated[1].similarity_class == "voicing-td");

        // Excluding an included pair removes it too.
        const std::vector<NearHomophonePair> none = apply_pair_overrides(
            {}, {{"KNIGHT", "NIGHT"}}, {{"KNIGHT", "NIGHT"}});
        CHECK(none.empty());
    }

    SUBCASE("malformed pair lines are rejected") {
        const auto bad = tmp.file("bad.txt");
        write_text(bad, "ONLYONE\n");
        CHECK_THROWS_AS(parse_pair_list(bad), FormatError);
        write_text(bad, "A B C\n");
        CHECK_THROWS_AS(parse_pair_list(bad), FormatError);
        write_text(bad, "same SAME\n");
        CHECK_THROWS_AS(parse_pair_list(bad), FormatError);
        CHECK_THROWS_AS(parse_pair_list(tmp.file("absent.txt")), FileError);
    }
}

TEST_CASE("pair distance reports carry per-pair values and their means") {
    std::vector<NearHomophonePair> pairs;
    pairs.push_back({"SEAT", "SEED", "T>D@2", "voicing-td"});

    WordFeatures raw;
    raw["SEAT"] = {1.0, 2.0};
    raw["SEED"] = {1.0, 2.0};
    WordFeatures fused;
    fused["SEAT"] = {0.0, 0.0};
    fused["SEED"] = {3.0, 4.0};

    const DecouplingReport report = decoupling_report(pairs, raw, fused, "unit-test");
    CHECK(report.encoder == "unit-test");
    REQUIRE(report.pairs.size() == 1);
    CHECK(report.pairs[0].raw_distance == 0.0);
    CHECK(report.pairs[0].fused_distance == 5.0);
    CHECK(report.raw_mean == 0.0);
    CHECK(report.fused_mean == 5.0);
}

TEST_CASE("report means do not depend on pair order") {
    std::vector<NearHomophonePair> pairs;
    pairs.push_back({"A", "B", "", "homophone"});
    pairs.push_back({"C", "D", "", "homophone"});
    pairs.push_back({"E", "F", "", "homophone"});

    Rng rng(31);
    WordFeatures raw;
    WordFeatures fused;
    for (const char* w : {"A", "B", "C", "D", "E", "F"}) {
        std::vector<double> r(8);
        std::vector<double> f(8);
        for (double& v : r) v = rng.next_normal();
        for (double& v : f) v = rng.next_normal();
        raw[w] = r;
        fused[w] = f;
    }

    const DecouplingReport forward = decoupling_report(pairs, raw, fused, "x");
    std::reverse(pairs.begin(), pairs.end());
    const DecouplingReport backward = decoupling_report(pairs, raw, fused, "x");
    CHECK(forward.raw_mean == doctest::Approx(backward.raw_mean).epsilon(1e-12));
    CHECK(forward.fused_mean == doctest::Approx(backward.fused_mean).epsilon(1e-12));
}

TEST_CASE("reports fail cleanly on missing words, bad widths, and no pairs") {
    std::vector<NearHomophonePair> pairs;
    pairs.push_back({"SEAT", "SEED", "T>D@2", "voicing-td"});
    WordFeatures both;
    both["SEAT"] = {1.0};
    both["SEED"] = {2.0};

    SUBCASE("word absent from the plain features") {
        WordFeatures missing = both;
        missing.erase("SEED");
        try {
            decoupling_report(pairs, missing, both, "x");
            FAIL_CHECK("expected a missing-word failure");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("SEED") != std::string::npos);
        }
    }
    SUBCASE("word absent from the fused features") {
        WordFeatures missing = both;
        missing.erase("SEAT");
        CHECK_THROWS_AS(decoupling_report(pairs, both, missing, "x"), ConfigError);
    }
    SUBCASE("width mismatch inside a pair") {
        WordFeatures uneven = both;
        uneven["SEED"] = {1.0, 2.0};
        CHECK_THROWS_AS(decoupling_report(pairs, uneven, both, "x"), ShapeError);
    }
    SUBCASE("no pairs at all") {
        CHECK_THROWS_AS(decoupling_report({}, both, both, "x"), ConfigError);
    }
}

TEST_CASE("record files hold one JSON object per pair plus a summary") {
    std::vector<NearHomophonePair> pairs;
    pairs.push_back({"LOOK", "LUKE", "UH>UW@1", "vowel-uw-uh"});
    pairs.push_back({"SEAT", "SEED", "T>D@2", "voicing-td"});
    WordFeatures raw;
    raw["LOOK"] = {0.0};
    raw["LUKE"] = {1.0};
    raw["SEAT"] = {0.0};
    raw["SEED"] = {3.0};
    const DecouplingReport report = decoupling_report(pairs, raw, raw, "ckpt-final");

    TempDir tmp;
    const auto path = tmp.file("pairs.jsonl");
    write_decoupling_records(path, report);

    std::ifstream in(path);
    std::vector<nlohmann::json> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(nlohmann::json::parse(line));
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].at("record") == "pair");
    CHECK(lines[0].at("word_a") == "LOOK");
    CHECK(lines[0].at("raw") == 1.0);
    CHECK(lines[1].at("word_b") == "SEED");
    CHECK(lines[2].at("record") == "summary");
    CHECK(lines[2].at("encoder") == "ckpt-final");
    CHECK(lines[2].at("pairs") == 2);
    CHECK(lines[2].at("raw_mean") == 2.0);
    CHECK(lines[2].at("fused_mean") == 2.0);
}

TEST_CASE("the plain-text table names the pairs and cites reference numbers") {
    std::vector<NearHomophonePair> pairs;
    pairs.push_back({"SHEEP", "SHIP", "IY>IH@1", "vowel-iy-ih"});
    WordFeatures raw;
    raw["SHEEP"] = {0.0, 3.0};
    raw["SHIP"] = {4.0, 0.0};
    const DecouplingReport report = decoupling_report(pairs, raw, raw, "demo");

    const std::string table = format_decoupling_table(report);
    CHECK(table.find("SHEEP") != std::string::npos);
    CHECK(table.find("demo") != std::string::npos);
    CHECK(table.find("5.0000") != std::string::npos);
    CHECK(table.find("mean over 1 pairs") != std::string::npos);
    CHECK(table.find("0.0397 -> 0.0701") != std::string::npos);
    CHECK(table.find("0.2689 -> 0.2909") != std::string::npos);
}

TEST_CASE("projection onto two components preserves full-rank 2D geometry") {
    // Generic 2D data: projecting onto both principal axes is a rotation
    // or reflection, so distances and centered norms survive.
    std::vector<LabeledVector> features;
    features.push_back({"a", {0.0, 0.0}});
    features.push_back({"b", {2.0, 1.0}});
    features.push_back({"c", {-1.0, 3.0}});
    features.push_back({"d", {1.5, -2.0}});

    const std::vector<ProjectedPoint> out = project_2d(features);
    REQUIRE(out.size() == 4);

    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i].label == features[i].label);
        for (std::size_t j = i + 1; j < out.size(); ++j) {
            const double orig = std::hypot(features[i].values[0] - features[j].values[0],
                                           features[i].values[1] - features[j].values[1]);
            const double proj = std::hypot(out[i].x - out[j].x, out[i].y - out[j].y);
            CHECK(proj == doctest::Approx(orig).epsilon(1e-9));
        }
    }
}

TEST_CASE("collinear points collapse onto the first component") {
    // Points at positions 0, 1, 3, 6 along one 10-wide direction.
    std::vector<double> direction(10);
    Rng rng(37);
    for (double& d : direction) d = rng.next_normal();

    std::vector<LabeledVector> features;
    for (double t : {0.0, 1.0, 3.0, 6.0}) {
        LabeledVector f;
        f.label = "t" + std::to_string(t);
        for (double d : direction) f.values.push_back(t * d + 0.25);
        features.push_back(std::move(f));
    }

    const std::vector<ProjectedPoint> out = project_2d(features);
    double mean_y = 0.0;
    for (const ProjectedPoint& p : out) mean_y += p.y;
    mean_y /= static_cast<double>(out.size());
    double var_y = 0.0;
    double spread_x = 0.0;
    for (const ProjectedPoint& p : out) {
        var_y += (p.y - mean_y) * (p.y - mean_y);
        spread_x = std::max(spread_x, std::abs(p.x));
    }
    var_y /= static_cast<double>(out.size());
    CHECK(var_y < 1e-12);
    CHECK(spread_x > 1.0);
}

TEST_CASE("projected distances never exceed the original distances") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        Rng rng(seed);
        // One wide and one tall arrangement, exercising both product paths.
        for (const auto& [n, dim] : {std::pair<std::size_t, std::size_t>{8, 5}, {3, 10}}) {
            std::vector<LabeledVector> features;
            for (std::size_t i = 0; i < n; ++i) {
                LabeledVector f;
                f.label = std::to_string(i);
                for (std::size_t d = 0; d < dim; ++d) f.values.push_back(rng.uniform(-1.0, 1.0));
                features.push_back(std::move(f));
            }
            const std::vector<ProjectedPoint> out = project_2d(features);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    double orig_sq = 0.0;
                    for (std::size_t d = 0; d < dim; ++d) {
                        const double diff = features[i].values[d] - features[j].values[d];
                        orig_sq += diff * diff;
                    }
                    const double proj = std::hypot(out[i].x - out[j].x, out[i].y - out[j].y);
                    CHECK(proj <= std::sqrt(orig_sq) + 1e-9);
                }
            }
        }
    }
}

TEST_CASE("rank-2 data in a wide space projects without loss") {
    // Points spanning exactly two directions: the top two components
    // capture everything, so pairwise geometry survives the projection.
    Rng rng(41);
    std::vector<double> u(7);
    std::vector<double> v(7);
    for (double& x : u) x = rng.next_normal();
    for (double& x : v) x = rng.next_normal();

    std::vector<LabeledVector> features;
    for (int i = 0; i < 5; ++i) {
        const double a = rng.uniform(-2.0, 2.0);
        const double b = rng.uniform(-2.0, 2.0);
        LabeledVector f;
        f.label = "p" + std::to_string(i);
        for (std::size_t d = 0; d < 7; ++d) f.values.push_back(a * u[d] + b * v[d]);
        features.push_back(std::move(f));
    }

    const std::vector<ProjectedPoint> out = project_2d(features);
    for (std::size_t i = 0; i < features.size(); ++i) {
        for (std::size_t j = i + 1; j < features.size(); ++j) {
            double orig_sq = 0.0;
            for (std::size_t d = 0; d < 7; ++d) {
                const double diff = features[i].values[d] - features[j].values[d];
                orig_sq += diff * diff;
            }
            const double proj = std::hypot(out[i].x - out[j].x, out[i].y - out[j].y);
            CHECK(proj == doctest::Approx(std::sqrt(orig_sq)).epsilon(1e-9));
        }
    }
}

TEST_CASE("the sign convention pins each component's direction") {
    // Data varying along (2, 1): the dominant loading is positive already,
    // so the first coordinate must increase with the parameter.
    std::vector<LabeledVector> along;
    for (double t : {-1.0, 0.0, 1.0}) {
        along.push_back({"t", {2.0 * t, t}});
    }
    const std::vector<ProjectedPoint> up = project_2d(along);
    CHECK(up[0].x < up[1].x);
    CHECK(up[1].x < up[2].x);

    // Along (-2, 1) the dominant loading starts negative and the component
    // flips, so the first coordinate must decrease instead.
    std::vector<LabeledVector> against;
    for (double t : {-1.0, 0.0, 1.0}) {
        against.push_back({"t", {-2.0 * t, t}});
    }
    const std::vector<ProjectedPoint> down = project_2d(against);
    CHECK(down[0].x > down[1].x);
    CHECK(down[1].x > down[2].x);
}

TEST_CASE("projection output does not depend on input order") {
    Rng rng(43);
    std::vector<LabeledVector> features;
    for (int i = 0; i < 6; ++i) {
        LabeledVector f;
        f.label = "w" + std::to_string(i);
        for (int d = 0; d < 4; ++d) f.values.push_back(rng.uniform(-1.0, 1.0));
        features.push_back(std::move(f));
    }

    const std::vector<ProjectedPoint> base = project_2d(features);
    std::map<std::string, std::pair<double, double>> by_label;
    for (const ProjectedPoint& p : base) by_label[p.label] = {p.x, p.y};

    std::vector<LabeledVector> shuffled = features;
    std::reverse(shuffled.begin(), shuffled.end());
    std::swap(shuffled[1], shuffled[4]);
    for (const ProjectedPoint& p : project_2d(shuffled)) {
        const auto& [x, y] = by_label.at(p.label);
        CHECK(p.x == doctest::Approx(x).epsilon(1e-9));
        CHECK(p.y == doctest::Approx(y).epsilon(1e-9));
    }
}

TEST_CASE("one-dimensional features keep the second coordinate at zero") {
    std::vector<LabeledVector> features;
    features.push_back({"lo", {1.0}});
    features.push_back({"mid", {2.0}});
    features.push_back({"hi", {6.0}});
    const std::vector<ProjectedPoint> out = project_2d(features);
    // Mean is 3, loadings reduce to the identity.
    CHECK(out[0].x == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(out[1].x == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(out[2].x == doctest::Approx(3.0).epsilon(1e-12));
    for (const ProjectedPoint& p : out) CHECK(p.y == 0.0);
}

TEST_CASE("projection rejects degenerate and malformed inputs") {
    SUBCASE("fewer than two vectors") {
        CHECK_THROWS_AS(project_2d({{"only", {1.0, 2.0}}}), ConfigError);
        CHECK_THROWS_AS(project_2d({}), ConfigError);
    }
    SUBCASE("width mismatch") {
        CHECK_THROWS_AS(project_2d({{"a", {1.0, 2.0}}, {"b", {1.0}}}), ShapeError);
    }
    SUBCASE("zero-width vectors") {
        CHECK_THROWS_AS(project_2d({{"a", {}}, {"b", {}}}), ShapeError);
    }
    SUBCASE("all vectors identical") {
        std::vector<LabeledVector> same(4, {"x", {0.5, -1.5, 2.0}});
        CHECK_THROWS_AS(project_2d(same), RangeError);
    }
    SUBCASE("non-finite value") {
        std::vector<LabeledVector> bad;
        bad.push_back({"a", {1.0, 2.0}});
        bad.push_back({"b", {std::numeric_limits<double>::quiet_NaN(), 0.0}});
        CHECK_THROWS_AS(project_2d(bad), NonFiniteError);
    }
}

TEST_CASE("projection CSV escapes labels and round-trips coordinates") {
    TempDir tmp;
    std::vector<ProjectedPoint> points;
    points.push_back({"plain", 1.5, -2.25});
    points.push_back({"with,comma", 0.1234567890123456789, 0.0});
    points.push_back({"with\"quote", -0.0, 3.0});

    const auto path = tmp.file("proj.csv");
    write_projection_csv(path, points);

    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "label,x,y");
    REQUIRE(std::getline(in, line));
    CHECK(line == "plain,1.5,-2.25");
    REQUIRE(std::getline(in, line));
    const std::string quoted = "\"with,comma\",";
    CHECK(line.rfind(quoted, 0) == 0);
    // The printed precision reproduces the double exactly.
    CHECK(std::stod(line.substr(quoted.size())) == 0.1234567890123456789);
    REQUIRE(std::getline(in, line));
    CHECK(line.rfind("\"with\"\"quote\",", 0) == 0);
    CHECK_FALSE(std::getline(in, line));
}
