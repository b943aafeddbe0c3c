#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace w2s {

// One pronunciation line from a CMU-style dictionary. A word can carry
// several pronunciations; the first uses variant 0 and alternates are
// numbered by the "(n)" marker on the word.
struct WordPronunciation {
    std::string word;                   // uppercase
    int variant = 0;                    // 0 = primary
    std::vector<std::string> phonemes;  // ARPAbet, vowels may carry a stress digit
};

// True when symbol is one of the 39 ARPAbet base phonemes.
bool is_arpabet_phoneme(const std::string& symbol);

// True when symbol is a vowel phoneme (the only ones that take stress).
bool is_arpabet_vowel(const std::string& symbol);

// Drops a trailing stress digit, so "IH1" becomes "IH". Non-vowels and
// unstressed symbols pass through unchanged.
std::string strip_stress(const std::string& symbol);
std::vector<std::string> strip_stress(const std::vector<std::string>& phonemes);

// Parses dictionary text: one "WORD  PH PH PH" entry per line, ";;;"
// starting a comment line, "WORD(2)" marking an alternate pronunciation.
// Entries keep file order. Unknown symbols, stress on a consonant, a
// malformed variant marker, or an empty phoneme list raise FormatError
// naming the line; a missing file raises FileError.
std::vector<WordPronunciation> parse_cmudict(const std::filesystem::path& path);

}  // namespace w2s
