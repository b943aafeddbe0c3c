#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace w2s {

// A word with its [start_s, end_s) position inside the clip.
struct WordSpan {
    std::string word;
    double start_s = 0.0;
    double end_s = 0.0;
};

struct ManifestEntry {
    std::filesystem::path audio_path;      // resolved against the manifest directory
    std::filesystem::path embedding_path;  // resolved against the manifest directory
    std::string transcript;
    std::vector<WordSpan> words;
    std::size_t line = 0;  // 1-based line number in the manifest file
};

// Loads a dataset manifest: UTF-8 text, one JSON object per non-empty line
// with keys audio_path, embedding_path, transcript and optional words (a
// list of [word, start_s, end_s] triples). Referenced files are opened and
// parsed, and word spans are checked against the clip duration and each
// other. Any bad line fails the whole load with the line number attached.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

}  // namespace w2s
