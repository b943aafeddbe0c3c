#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace w2s {

// A facial animation clip: per-frame 3D positions for a fixed vertex set,
// laid out frame-major as [frame][vertex][xyz].
struct VertexSequence {
    std::size_t frames = 0;
    std::size_t vertices = 0;
    float fps = 0.0f;
    std::vector<double> positions;

    double at(std::size_t frame, std::size_t vertex, std::size_t axis) const {
        return positions[(frame * vertices + vertex) * 3 + axis];
    }
    double& at(std::size_t frame, std::size_t vertex, std::size_t axis) {
        return positions[(frame * vertices + vertex) * 3 + axis];
    }

    // Shape consistency, positive dimensions, finite values. The frame rate
    // is metadata and only checked when a sequence is written to disk.
    void validate() const;
};

// A named set of mesh vertex indices (lip region, upper face, ...).
// Indices are kept sorted and unique.
struct RegionMask {
    std::string name;
    std::vector<std::size_t> indices;

    // Non-empty, strictly increasing, all below vertex_count.
    void validate(std::size_t vertex_count) const;
};

// Mean over frames of the L2 norm of the flattened per-frame difference
// restricted to the lip vertices.
double lve(const VertexSequence& gt, const VertexSequence& pred, const RegionMask& lip);

// Same construction over every vertex.
double mve(const VertexSequence& gt, const VertexSequence& pred);

// Mean over the masked vertices of the difference in temporal dynamics,
// where a vertex's dynamics is the population standard deviation across
// frames of its position norm. Signed: positive when the reference moves
// more than the prediction. Needs at least two frames.
double fdd(const VertexSequence& gt, const VertexSequence& pred, const RegionMask& upper);

// Animation file: magic "W2SVTX1\0", u32 LE frames, u32 LE vertices,
// f32 LE fps, then frame-major 64-bit LE coordinates.
void write_vertex_sequence(const std::filesystem::path& path, const VertexSequence& sequence);
VertexSequence read_vertex_sequence(const std::filesystem::path& path);

// Mask file: one vertex index per line, '#' starts a comment, blank lines
// ignored. Duplicates collapse and order does not matter.
RegionMask read_region_mask(const std::filesystem::path& path, std::string name);
void write_region_mask(const std::filesystem::path& path, const RegionMask& mask);

}  // namespace w2s
