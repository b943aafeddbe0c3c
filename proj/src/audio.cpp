#include "w2s/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "w2s/binio.hpp"
#include "w2s/errors.hpp"

namespace w2s {

AudioClip read_wav(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    const std::string ctx = "'" + path.string() + "'";
    ByteReader r(bytes, ctx);

    if (r.chars(4, "RIFF tag") != "RIFF") throw FormatError(ctx + ": missing RIFF tag");
    r.u32le("RIFF size");
    if (r.chars(4, "WAVE tag") != "WAVE") throw FormatError(ctx + ": missing WAVE tag");

    bool have_fmt = false;
    std::uint16_t audio_format = 0, channels = 0, bits = 0;
    std::uint32_t sample_rate = 0;
    std::size_t data_offset = 0, data_size = 0;
    bool have_data = false;

    while (r.remaining() >= 8) {
        const std::string chunk_id = r.chars(4, "chunk id");
        const std::uint32_t chunk_size = r.u32le("chunk size");
        if (chunk_id == "fmt ") {
            if (chunk_size < 16) throw FormatError(ctx + ": fmt chunk shorter than 16 bytes");
            const std::size_t chunk_start = r.pos();
            audio_format = r.u16le("audio format");
            channels = r.u16le("channel count");
            sample_rate = r.u32le("sample rate");
            r.u32le("byte rate");
            r.u16le("block align");
            bits = r.u16le("bits per sample");
            have_fmt = true;
            r.seek(chunk_start);
        } else if (chunk_id == "data") {
            data_offset = r.pos();
            data_size = chunk_size;
            have_data = true;
        }
        if (chunk_size > r.remaining()) {
            throw FormatError(ctx + ": " + chunk_id + " chunk truncated, declares " +
                              std::to_string(chunk_size) + " bytes but " + std::to_string(r.remaining()) +
                              " remain");
        }
        // Chunks are word-aligned; odd sizes carry one pad byte.
        r.skip(chunk_size + (chunk_size % 2 == 1 && r.remaining() > chunk_size ? 1 : 0));
    }

    if (!have_fmt) throw FormatError(ctx + ": no fmt chunk");
    if (!have_data) throw FormatError(ctx + ": no data chunk");
    if (audio_format != 1) {
        throw FormatError(ctx + ": compression code " + std::to_string(audio_format) + ", only PCM (1) is supported");
    }
    if (channels != 1) {
        throw FormatError(ctx + ": " + std::to_string(channels) + " channels, only mono is supported");
    }
    if (bits != 16) {
        throw FormatError(ctx + ": " + std::to_string(bits) + " bits per sample, only 16 is supported");
    }
    if (sample_rate == 0) throw FormatError(ctx + ": sample rate is zero");
    if (data_size % 2 != 0) {
        throw FormatError(ctx + ": data chunk holds " + std::to_string(data_size) +
                          " bytes, not a whole number of 16-bit samples");
    }

    AudioClip clip;
    clip.sample_rate = sample_rate;
    clip.samples.resize(data_size / 2);
    for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        const std::size_t at = data_offset + 2 * i;
        const auto raw = static_cast<std::uint16_t>(bytes[at] | (bytes[at + 1] << 8));
        const auto value = static_cast<std::int16_t>(raw);
        clip.samples[i] = static_cast<double>(value) / 32768.0;
    }
    return clip;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
    if (clip.sample_rate == 0) throw ConfigError("write_wav: sample rate is zero");
    const std::uint32_t data_size = static_cast<std::uint32_t>(clip.samples.size() * 2);

    ByteWriter w;
    w.chars("RIFF");
    w.u32le(36 + data_size);
    w.chars("WAVE");
    w.chars("fmt ");
    w.u32le(16);
    w.u16le(1);  // PCM
    w.u16le(1);  // mono
    w.u32le(clip.sample_rate);
    w.u32le(clip.sample_rate * 2);  // byte rate
    w.u16le(2);                     // block align
    w.u16le(16);                    // bits per sample
    w.chars("data");
    w.u32le(data_size);
    for (double s : clip.samples) {
        const double scaled = std::round(s * 32768.0);
        const auto clamped = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
        w.u16le(static_cast<std::uint16_t>(clamped));
    }
    write_file_bytes(path, w.bytes());
}

AudioClip crop_clip(const AudioClip& clip, double start_s, double end_s) {
    const double duration = clip.duration();
    if (!(start_s >= 0.0 && start_s < end_s && end_s <= duration)) {
        throw RangeError("span [" + std::to_string(start_s) + ", " + std::to_string(end_s) +
                         ") is not inside a clip of " + std::to_string(duration) + " s");
    }
    auto begin = static_cast<std::size_t>(std::floor(start_s * clip.sample_rate));
    auto end = static_cast<std::size_t>(std::ceil(end_s * clip.sample_rate));
    end = std::min(end, clip.samples.size());
    begin = std::min(begin, end);

    AudioClip out;
    out.sample_rate = clip.sample_rate;
    out.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                       clip.samples.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
}

}  // namespace w2s
