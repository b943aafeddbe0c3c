#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace w2s {

// Base for all library errors. `exit_code` is the process exit status the
// CLI maps this error to: 2 for usage/input problems, 1 for runtime failures.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message, int exit_code = 1)
        : std::runtime_error(category + ": " + message),
          category_(std::move(category)),
          exit_code_(exit_code) {}

    const std::string& category() const { return category_; }
    int exit_code() const { return exit_code_; }

private:
    std::string category_;
    int exit_code_;
};

// Tensor shape mismatch; message names the offending axes.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& message) : Error("shape", message, 1) {}
};

// Invalid model/op configuration (head divisibility, dim mismatch, bad preset).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config", message, 2) {}
};

// Malformed input file. Messages carry the violated field and, where the
// format is line-oriented, the line number.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& message) : Error("format", message, 2) {}
};

// Input signal shorter than the receptive field of a conv stack.
class InputTooShortError : public Error {
public:
    InputTooShortError(std::size_t got, std::size_t required)
        : Error("input-too-short",
                "input has " + std::to_string(got) + " samples, minimum is " +
                    std::to_string(required),
                2),
          got_(got),
          required_(required) {}

    std::size_t got() const { return got_; }
    std::size_t required() const { return required_; }

private:
    std::size_t got_;
    std::size_t required_;
};

// Out-of-range span (clip cropping, word spans).
class RangeError : public Error {
public:
    explicit RangeError(const std::string& message) : Error("range", message, 2) {}
};

// Parameter mutation attempted on a frozen model.
class FrozenModelError : public Error {
public:
    explicit FrozenModelError(const std::string& message) : Error("frozen-model", message, 1) {}
};

// Checkpoint load/save failure. Exits 1: the run was already underway.
class CheckpointError : public Error {
public:
    explicit CheckpointError(const std::string& message) : Error("checkpoint", message, 1) {}
};

// Optimizer asked to update a parameter that has no gradient.
class MissingGradientError : public Error {
public:
    explicit MissingGradientError(const std::string& message) : Error("missing-gradient", message, 1) {}
};

// Non-finite value surfaced where the pipeline requires finite math.
class NonFiniteError : public Error {
public:
    explicit NonFiniteError(const std::string& message) : Error("non-finite", message, 1) {}
};

// Missing file or unreadable path.
class FileError : public Error {
public:
    explicit FileError(const std::string& message) : Error("file", message, 2) {}
};

}  // namespace w2s
