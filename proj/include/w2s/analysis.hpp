#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "w2s/homophone.hpp"

namespace w2s {

// Euclidean distances between the two words of one mined pair, measured
// in the plain feature space and in the semantically fused space.
struct PairDistance {
    std::string word_a;
    std::string word_b;
    double raw_distance = 0.0;
    double fused_distance = 0.0;
};

struct DecouplingReport {
    std::string encoder;  // identifies the feature source, e.g. a checkpoint name
    std::vector<PairDistance> pairs;
    double raw_mean = 0.0;
    double fused_mean = 0.0;
};

using WordFeatures = std::map<std::string, std::vector<double>>;

// Distances for every mined pair plus their arithmetic means. A word
// missing from either feature map raises ConfigError naming it; length
// mismatches within a lookup raise ShapeError; an empty pair list raises
// ConfigError because the means would be meaningless.
DecouplingReport decoupling_report(const std::vector<NearHomophonePair>& pairs,
                                   const WordFeatures& raw, const WordFeatures& fused,
                                   std::string encoder);

// One JSON object per line: a "pair" record per entry and one trailing
// "summary" record with the means.
void write_decoupling_records(const std::filesystem::path& path, const DecouplingReport& report);

// Plain-text table with per-pair rows, the means, and a block of
// published distances for well-known audio encoders to compare against.
std::string format_decoupling_table(const DecouplingReport& report);

struct LabeledVector {
    std::string label;
    std::vector<double> values;
};

struct ProjectedPoint {
    std::string label;
    double x = 0.0;
    double y = 0.0;
};

// Projects the vectors onto the top two principal components of their
// centered arrangement. Deterministic: each component is flipped so its
// largest-magnitude loading is positive. Needs at least two vectors of a
// shared width (ConfigError / ShapeError otherwise); all-identical input
// has no spread to project and raises RangeError; one-dimensional input
// keeps y at zero.
std::vector<ProjectedPoint> project_2d(const std::vector<LabeledVector>& features);

// CSV with a "label,x,y" header. Labels are quoted only when they need it.
void write_projection_csv(const std::filesystem::path& path,
                          const std::vector<ProjectedPoint>& points);

}  // namespace w2s
