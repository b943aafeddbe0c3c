#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "w2s/audio.hpp"
#include "w2s/embedding.hpp"
#include "w2s/manifest.hpp"

namespace w2s {

// One synthetic utterance: a transcript over the shared test vocabulary
// with word timings partitioning a 50 ms clip.
struct FixtureUtterance {
    std::string name;        // file stem, e.g. "clip_000"
    std::string transcript;  // lowercase words, space separated
    std::vector<WordSpan> words;
};

// The eight utterances every fixture corpus contains. Deterministic:
// contents never depend on time, environment, or call order.
const std::vector<FixtureUtterance>& fixture_utterances();

// Pseudo-speech for an utterance: per-word tone stacks whose frequencies
// derive from the word's hash, plus low-level seeded noise. 16 kHz mono,
// 800 samples.
AudioClip fixture_clip(const FixtureUtterance& utterance);

// A 32-wide target embedding derived from the transcript text alone, so
// identical transcripts always share a target.
SemanticEmbedding fixture_embedding(const std::string& transcript);

// Writes the corpus under dir: one WAV and one embedding file per
// utterance plus manifest.jsonl referencing them by relative path.
// Returns the manifest path.
std::filesystem::path write_fixture_corpus(const std::filesystem::path& dir);

// Writes a small pronunciation dictionary covering the corpus vocabulary
// plus filler entries, comment lines, and alternate pronunciations, in
// the classic "WORD  PH PH" text format. Returns the file path.
std::filesystem::path write_fixture_cmudict(const std::filesystem::path& dir);

// Writes a deterministic animation pair with differing motion under dir:
// gt.vtx and pred.vtx (five frames, six vertices) plus lip.mask and
// upper.mask selecting two vertices each.
void write_fixture_animation(const std::filesystem::path& dir);

}  // namespace w2s
