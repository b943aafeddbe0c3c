#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "w2s/cmudict.hpp"

namespace w2s {

// A named set of phonemes considered interchangeable for near-homophone
// mining, such as a voiced/unvoiced consonant pair.
struct SimilarityClass {
    std::string name;
    std::vector<std::string> phonemes;  // stress-free ARPAbet symbols
};

struct SimilarityTable {
    std::vector<SimilarityClass> classes;

    // Name of the first class containing both symbols, or nullptr when no
    // class does. Symbols are compared stress-free.
    const std::string* shared_class(const std::string& a, const std::string& b) const;
};

// The built-in table: long/short vowel neighbors, voiced/unvoiced
// consonant pairs, the unvoiced stop set, and the nasal set.
const SimilarityTable& default_similarity_table();

// Table file format: one class per line, "name: PH PH PH". '#' starts a
// comment and blank lines are skipped. Each class needs at least two
// known stress-free phonemes and class names must be unique.
SimilarityTable parse_similarity_table(const std::filesystem::path& path);
std::string format_similarity_table(const SimilarityTable& table);

// Two words whose pronunciations are identical or one licensed
// substitution apart.
struct NearHomophonePair {
    std::string word_a;  // lexicographically first
    std::string word_b;
    std::string edit_script;       // "" for homophones, else "X>Y@pos"
    std::string similarity_class;  // "homophone" or the licensing class
};

// All unordered word pairs whose stress-free phoneme sequences are equal
// or differ in exactly one position whose two symbols share a similarity
// class. Words with several pronunciations pair when any combination
// qualifies; the first qualifying combination, in entry order, supplies
// the edit script. Output is sorted by (word_a, word_b).
std::vector<NearHomophonePair> mine_pairs(const std::vector<WordPronunciation>& entries,
                                          const SimilarityTable& table);

// Word pair list file: two words per line, '#' comments and blank lines
// skipped. Words are uppercased and each returned pair is ordered.
// A line without exactly two distinct words raises FormatError.
std::vector<std::pair<std::string, std::string>> parse_pair_list(
    const std::filesystem::path& path);

// Manual curation on top of the miner: includes are appended with class
// "manual" when missing, then excludes are dropped, so an exclude beats
// an include of the same pair. The result is re-sorted.
std::vector<NearHomophonePair> apply_pair_overrides(
    std::vector<NearHomophonePair> pairs,
    const std::vector<std::pair<std::string, std::string>>& include,
    const std::vector<std::pair<std::string, std::string>>& exclude);

}  // namespace w2s
