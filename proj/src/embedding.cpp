#include "w2s/embedding.hpp"

#include <cmath>
#include <string>

#include "w2s/binio.hpp"
#include "w2s/errors.hpp"

namespace w2s {

bool SemanticEmbedding::all_finite() const {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

SemanticEmbedding read_embedding(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    ByteReader r(bytes, "embedding file '" + path.string() + "'");
    r.magic("W2SEMB1");

    SemanticEmbedding e;
    const std::uint8_t kind = r.u8("kind");
    if (kind > 1) {
        throw FormatError("embedding file '" + path.string() + "': unknown kind byte " + std::to_string(kind));
    }
    e.kind = static_cast<EmbeddingKind>(kind);

    const std::uint32_t dim = r.u32le("dim");
    if (dim == 0) throw FormatError("embedding file '" + path.string() + "': dim is zero");
    e.values.reserve(dim);
    for (std::uint32_t i = 0; i < dim; ++i) e.values.push_back(r.f64le("value"));
    r.require_done();

    if (!e.all_finite()) {
        throw FormatError("embedding file '" + path.string() + "': non-finite value in payload");
    }
    return e;
}

void write_embedding(const std::filesystem::path& path, const SemanticEmbedding& embedding) {
    if (embedding.dim() == 0) throw ConfigError("write_embedding: embedding has no values");
    if (!embedding.all_finite()) throw NonFiniteError("write_embedding: embedding holds a non-finite value");

    ByteWriter w;
    w.magic("W2SEMB1");
    w.u8(static_cast<std::uint8_t>(embedding.kind));
    w.u32le(static_cast<std::uint32_t>(embedding.dim()));
    for (double v : embedding.values) w.f64le(v);
    write_file_bytes(path, w.bytes());
}

}  // namespace w2s
