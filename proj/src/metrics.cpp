#include "w2s/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "w2s/binio.hpp"
#include "w2s/errors.hpp"

namespace w2s {

namespace {

void require_same_layout(const VertexSequence& gt, const VertexSequence& pred) {
    gt.validate();
    pred.validate();
    if (gt.frames != pred.frames || gt.vertices != pred.vertices) {
        throw ShapeError("vertex sequences disagree: [" + std::to_string(gt.frames) + ", " +
                         std::to_string(gt.vertices) + "] vs [" + std::to_string(pred.frames) +
                         ", " + std::to_string(pred.vertices) + "]");
    }
}

// Mean over frames of the L2 norm of the difference restricted to the
// given vertices; both metrics reduce to this.
double mean_frame_error(const VertexSequence& gt, const VertexSequence& pred,
                        const std::vector<std::size_t>& indices) {
    double total = 0.0;
    for (std::size_t t = 0; t < gt.frames; ++t) {
        double sq = 0.0;
        for (std::size_t v : indices) {
            for (std::size_t axis = 0; axis < 3; ++axis) {
                const double d = gt.at(t, v, axis) - pred.at(t, v, axis);
                sq += d * d;
            }
        }
        total += std::sqrt(sq);
    }
    return total / static_cast<double>(gt.frames);
}

// Population standard deviation across frames of one vertex's position norm.
double dynamics(const VertexSequence& seq, std::size_t vertex) {
    std::vector<double> norms(seq.frames);
    for (std::size_t t = 0; t < seq.frames; ++t) {
        double sq = 0.0;
        for (std::size_t axis = 0; axis < 3; ++axis) {
            const double p = seq.at(t, vertex, axis);
            sq += p * p;
        }
        norms[t] = std::sqrt(sq);
    }
    const double mean = std::accumulate(norms.begin(), norms.end(), 0.0) /
                        static_cast<double>(seq.frames);
    double var = 0.0;
    for (double n : norms) var += (n - mean) * (n - mean);
    return std::sqrt(var / static_cast<double>(seq.frames));
}

}  // namespace

void VertexSequence::validate() const {
    if (frames < 1 || vertices < 1) {
        throw ShapeError("vertex sequence needs at least one frame and one vertex, got " +
                         std::to_string(frames) + " x " + std::to_string(vertices));
    }
    if (positions.size() != frames * vertices * 3) {
        throw ShapeError("vertex sequence holds " + std::to_string(positions.size()) +
                         " values, expected " + std::to_string(frames * vertices * 3));
    }
    for (double p : positions) {
        if (!std::isfinite(p)) throw NonFiniteError("vertex sequence contains a non-finite position");
    }
}

void RegionMask::validate(std::size_t vertex_count) const {
    if (indices.empty()) throw ConfigError("region mask '" + name + "' is empty");
    for (std::size_t i = 1; i < indices.size(); ++i) {
        if (indices[i] <= indices[i - 1]) {
            throw ConfigError("region mask '" + name + "' is not sorted and unique at position " +
                              std::to_string(i));
        }
    }
    if (indices.back() >= vertex_count) {
        throw RangeError("region mask '" + name + "' index " + std::to_string(indices.back()) +
                         " out of range for " + std::to_string(vertex_count) + " vertices");
    }
}

double lve(const VertexSequence& gt, const VertexSequence& pred, const RegionMask& lip) {
    require_same_layout(gt, pred);
    lip.validate(gt.vertices);
    return mean_frame_error(gt, pred, lip.indices);
}

double mve(const VertexSequence& gt, const VertexSequence& pred) {
    require_same_layout(gt, pred);
    std::vector<std::size_t> all(gt.vertices);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return mean_frame_error(gt, pred, all);
}

double fdd(const VertexSequence& gt, const VertexSequence& pred, const RegionMask& upper) {
    require_same_layout(gt, pred);
    upper.validate(gt.vertices);
    if (gt.frames < 2) {
        throw RangeError("temporal dynamics need at least 2 frames, got " +
                         std::to_string(gt.frames));
    }
    double total = 0.0;
    for (std::size_t v : upper.indices) total += dynamics(gt, v) - dynamics(pred, v);
    return total / static_cast<double>(upper.indices.size());
}

void write_vertex_sequence(const std::filesystem::path& path, const VertexSequence& sequence) {
    sequence.validate();
    if (!(sequence.fps > 0.0f) || !std::isfinite(sequence.fps)) {
        throw ConfigError("vertex sequence frame rate must be positive to be written");
    }
    ByteWriter w;
    w.magic("W2SVTX1");
    w.u32le(static_cast<std::uint32_t>(sequence.frames));
    w.u32le(static_cast<std::uint32_t>(sequence.vertices));
    w.f32le(sequence.fps);
    for (double p : sequence.positions) w.f64le(p);
    write_file_bytes(path, w.bytes());
}

VertexSequence read_vertex_sequence(const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    ByteReader r(bytes, path.string());
    r.magic("W2SVTX1");
    VertexSequence seq;
    seq.frames = r.u32le("frame count");
    seq.vertices = r.u32le("vertex count");
    seq.fps = r.f32le("frame rate");
    if (seq.frames == 0 || seq.vertices == 0) {
        throw FormatError(path.string() + ": vertex sequence has a zero dimension");
    }
    if (!(seq.fps > 0.0f) || !std::isfinite(seq.fps)) {
        throw FormatError(path.string() + ": vertex sequence frame rate must be positive");
    }
    seq.positions.resize(seq.frames * seq.vertices * 3);
    for (double& p : seq.positions) p = r.f64le("position");
    r.require_done();
    try {
        seq.validate();
    } catch (const Error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return seq;
}

RegionMask read_region_mask(const std::filesystem::path& path, std::string name) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open region mask '" + path.string() + "'");

    RegionMask mask;
    mask.name = std::move(name);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::size_t begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const std::size_t end = line.find_last_not_of(" \t\r");
        const std::string token = line.substr(begin, end - begin + 1);

        std::size_t parsed = 0;
        try {
            std::size_t consumed = 0;
            const long long value = std::stoll(token, &consumed);
            if (consumed != token.size() || value < 0) throw std::invalid_argument(token);
            parsed = static_cast<std::size_t>(value);
        } catch (const std::exception&) {
            throw FormatError(path.string() + " line " + std::to_string(line_no) + ": '" + token +
                              "' is not a vertex index");
        }
        mask.indices.push_back(parsed);
    }
    std::sort(mask.indices.begin(), mask.indices.end());
    mask.indices.erase(std::unique(mask.indices.begin(), mask.indices.end()), mask.indices.end());
    return mask;
}

void write_region_mask(const std::filesystem::path& path, const RegionMask& mask) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FileError("cannot write region mask '" + path.string() + "'");
    out << "# " << mask.name << "\n";
    for (std::size_t index : mask.indices) out << index << "\n";
}

}  // namespace w2s
