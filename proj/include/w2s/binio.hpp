#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "w2s/errors.hpp"

namespace w2s {

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

// Cursor over a byte buffer with bounds-checked little-endian reads. The
// context string names the file being parsed so underflow errors locate
// themselves without the caller wrapping every read.
class ByteReader {
  public:
    ByteReader(const std::vector<std::uint8_t>& data, std::string context)
        : data_(data), context_(std::move(context)) {}

    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }

    void seek(std::size_t pos) {
        if (pos > data_.size()) throw FormatError(context_ + ": seek past end of file");
        pos_ = pos;
    }
    void skip(std::size_t n) { need(n, "skip"); pos_ += n; }

    std::uint8_t u8(const char* field) {
        need(1, field);
        return data_[pos_++];
    }
    std::uint16_t u16le(const char* field) {
        need(2, field);
        std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t u32le(const char* field) {
        need(4, field);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | data_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 4;
        return v;
    }
    std::uint64_t u64le(const char* field) {
        need(8, field);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | data_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 8;
        return v;
    }
    float f32le(const char* field) { return std::bit_cast<float>(u32le(field)); }
    double f64le(const char* field) { return std::bit_cast<double>(u64le(field)); }

    std::string chars(std::size_t n, const char* field) {
        need(n, field);
        std::string s(reinterpret_cast<const char*>(data_.data()) + pos_, n);
        pos_ += n;
        return s;
    }

    // Compares the next 8 bytes against a NUL-padded magic string.
    void magic(const char* expected) {
        const std::string got = chars(8, "magic");
        if (got != std::string(expected, 8)) {
            throw FormatError(context_ + ": bad magic, expected '" + std::string(expected) + "'");
        }
    }

    void require_done() {
        if (pos_ != data_.size()) {
            throw FormatError(context_ + ": " + std::to_string(remaining()) + " trailing bytes after payload");
        }
    }

  private:
    void need(std::size_t n, const char* field) {
        if (remaining() < n) {
            throw FormatError(context_ + ": truncated while reading " + field);
        }
    }

    const std::vector<std::uint8_t>& data_;
    std::string context_;
    std::size_t pos_ = 0;
};

class ByteWriter {
  public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16le(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v));
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
    }
    void u32le(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64le(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32le(float v) { u32le(std::bit_cast<std::uint32_t>(v)); }
    void f64le(double v) { u64le(std::bit_cast<std::uint64_t>(v)); }
    void chars(const std::string& s) { out_.insert(out_.end(), s.begin(), s.end()); }

    // Writes a magic string NUL-padded to 8 bytes.
    void magic(const char* m) {
        std::string s(m);
        s.resize(8, '\0');
        chars(s);
    }

    const std::vector<std::uint8_t>& bytes() const { return out_; }
    std::size_t size() const { return out_.size(); }

    // Patches a previously written 32-bit length field.
    void patch_u32le(std::size_t at, std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_[at + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> (8 * i));
    }

  private:
    std::vector<std::uint8_t> out_;
};

}  // namespace w2s
