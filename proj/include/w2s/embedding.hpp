#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace w2s {

// How the sentence embedding was pooled from its source text encoder.
enum class EmbeddingKind : std::uint8_t { cls = 0, mean = 1 };

struct SemanticEmbedding {
    std::vector<double> values;
    EmbeddingKind kind = EmbeddingKind::cls;

    std::size_t dim() const { return values.size(); }
    bool all_finite() const;
};

// Binary container, little-endian throughout:
//   bytes 0-7   magic "W2SEMB1" NUL-padded
//   byte  8     kind (0 = cls, 1 = mean)
//   bytes 9-12  dim, unsigned 32-bit
//   payload     dim 64-bit IEEE-754 values
SemanticEmbedding read_embedding(const std::filesystem::path& path);
void write_embedding(const std::filesystem::path& path, const SemanticEmbedding& embedding);

}  // namespace w2s
