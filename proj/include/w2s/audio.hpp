#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace w2s {

// A mono audio signal with samples scaled to [-1, 1].
struct AudioClip {
    std::vector<double> samples;
    std::uint32_t sample_rate = 16000;

    double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

// Reads a RIFF/WAVE file. Only uncompressed PCM, 16-bit, mono is accepted;
// anything else is rejected with an error naming the offending header field.
// Samples are scaled by 1/32768.
AudioClip read_wav(const std::filesystem::path& path);

// Writes the clip as PCM16 mono. Samples are scaled by 32768, rounded to
// nearest and clamped to the 16-bit range, so values that originated from
// read_wav round-trip exactly.
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

// Slice [start_s, end_s) of the clip. The start rounds down and the end
// rounds up to sample boundaries. The span must satisfy
// 0 <= start_s < end_s <= duration.
AudioClip crop_clip(const AudioClip& clip, double start_s, double end_s);

}  // namespace w2s
