#include "w2s/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "w2s/audio.hpp"
#include "w2s/embedding.hpp"
#include "w2s/errors.hpp"

namespace w2s {

namespace {

using nlohmann::json;

std::string at_line(std::size_t line) { return "manifest line " + std::to_string(line) + ": "; }

std::string require_string(const json& record, const char* key, std::size_t line) {
    if (!record.contains(key)) throw FormatError(at_line(line) + "missing field '" + key + "'");
    if (!record[key].is_string()) throw FormatError(at_line(line) + "field '" + key + "' is not a string");
    return record[key].get<std::string>();
}

std::vector<WordSpan> parse_words(const json& record, std::size_t line) {
    std::vector<WordSpan> words;
    if (!record.contains("words")) return words;
    const json& list = record["words"];
    if (!list.is_array()) throw FormatError(at_line(line) + "field 'words' is not a list");
    for (const json& item : list) {
        if (!item.is_array() || item.size() != 3 || !item[0].is_string() || !item[1].is_number() ||
            !item[2].is_number()) {
            throw FormatError(at_line(line) + "each words item must be [word, start_s, end_s]");
        }
        WordSpan span;
        span.word = item[0].get<std::string>();
        span.start_s = item[1].get<double>();
        span.end_s = item[2].get<double>();
        if (span.start_s < 0.0) {
            throw FormatError(at_line(line) + "word '" + span.word + "' starts before 0");
        }
        if (!(span.end_s > span.start_s)) {
            throw FormatError(at_line(line) + "word '" + span.word + "' span end " +
                              std::to_string(span.end_s) + " is not after start " + std::to_string(span.start_s));
        }
        words.push_back(std::move(span));
    }
    return words;
}

void check_spans_fit(const ManifestEntry& entry, double duration) {
    for (const WordSpan& span : entry.words) {
        if (span.end_s > duration) {
            throw FormatError(at_line(entry.line) + "word '" + span.word + "' span ends at " +
                              std::to_string(span.end_s) + " s but the clip lasts " + std::to_string(duration) +
                              " s");
        }
    }
    std::vector<WordSpan> sorted = entry.words;
    std::sort(sorted.begin(), sorted.end(),
              [](const WordSpan& a, const WordSpan& b) { return a.start_s < b.start_s; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].start_s < sorted[i - 1].end_s) {
            throw FormatError(at_line(entry.line) + "words '" + sorted[i - 1].word + "' and '" +
                              sorted[i].word + "' overlap");
        }
    }
}

}  // namespace

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open manifest '" + path.string() + "'");
    const std::filesystem::path base = path.parent_path();

    std::vector<ManifestEntry> entries;
    std::string text;
    std::size_t line_no = 0;
    while (std::getline(in, text)) {
        ++line_no;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;

        json record;
        try {
            record = json::parse(text);
        } catch (const json::parse_error& e) {
            throw FormatError(at_line(line_no) + "not a valid record: " + e.what());
        }
        if (!record.is_object()) throw FormatError(at_line(line_no) + "record is not an object");

        ManifestEntry entry;
        entry.line = line_no;
        const std::string audio = require_string(record, "audio_path", line_no);
        const std::string embedding = require_string(record, "embedding_path", line_no);
        const std::filesystem::path audio_raw(audio);
        const std::filesystem::path embedding_raw(embedding);
        entry.audio_path = audio_raw.is_absolute() ? audio_raw : base / audio_raw;
        entry.embedding_path = embedding_raw.is_absolute() ? embedding_raw : base / embedding_raw;
        entry.transcript = require_string(record, "transcript", line_no);
        entry.words = parse_words(record, line_no);

        if (!std::filesystem::exists(entry.audio_path)) {
            throw FileError(at_line(line_no) + "audio file '" + entry.audio_path.string() + "' not found");
        }
        if (!std::filesystem::exists(entry.embedding_path)) {
            throw FileError(at_line(line_no) + "embedding file '" + entry.embedding_path.string() +
                            "' not found");
        }
        // Open both referenced files so a bad reference fails the load here,
        // with the line number, rather than deep inside a training run.
        const AudioClip clip = read_wav(entry.audio_path);
        read_embedding(entry.embedding_path);
        check_spans_fit(entry, clip.duration());

        entries.push_back(std::move(entry));
    }
    return entries;
}

}  // namespace w2s
