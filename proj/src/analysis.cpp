#include "w2s/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "w2s/errors.hpp"
#include "w2s/linalg.hpp"

namespace w2s {

namespace {

const std::vector<double>& lookup_features(const WordFeatures& features, const std::string& word,
                                           const char* which) {
    const auto it = features.find(word);
    if (it == features.end()) {
        throw ConfigError(std::string(which) + " features are missing for word '" + word + "'");
    }
    return it->second;
}

double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b,
                          const std::string& word_a, const std::string& word_b) {
    if (a.size() != b.size()) {
        throw ShapeError("feature widths disagree for pair " + word_a + "/" + word_b + ": " +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sq += d * d;
    }
    return std::sqrt(sq);
}

std::string fixed4(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", value);
    return buf;
}

}  // namespace

DecouplingReport decoupling_report(const std::vector<NearHomophonePair>& pairs,
                                   const WordFeatures& raw, const WordFeatures& fused,
                                   std::string encoder) {
    if (pairs.empty()) {
        throw ConfigError("no near-homophone pairs to report on");
    }
    DecouplingReport report;
    report.encoder = std::move(encoder);
    for (const NearHomophonePair& pair : pairs) {
        PairDistance row;
        row.word_a = pair.word_a;
        row.word_b = pair.word_b;
        row.raw_distance = euclidean_distance(lookup_features(raw, pair.word_a, "plain"),
                                              lookup_features(raw, pair.word_b, "plain"),
                                              pair.word_a, pair.word_b);
        row.fused_distance = euclidean_distance(lookup_features(fused, pair.word_a, "fused"),
                                                lookup_features(fused, pair.word_b, "fused"),
                                                pair.word_a, pair.word_b);
        report.raw_mean += row.raw_distance;
        report.fused_mean += row.fused_distance;
        report.pairs.push_back(std::move(row));
    }
    report.raw_mean /= static_cast<double>(report.pairs.size());
    report.fused_mean /= static_cast<double>(report.pairs.size());
    return report;
}

void write_decoupling_records(const std::filesystem::path& path, const DecouplingReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FileError("cannot write decoupling records '" + path.string() + "'");
    for (const PairDistance& row : report.pairs) {
        const nlohmann::json record = {{"record", "pair"},
                                       {"word_a", row.word_a},
                                       {"word_b", row.word_b},
                                       {"raw", row.raw_distance},
                                       {"fused", row.fused_distance}};
        out << record.dump() << "\n";
    }
    const nlohmann::json summary = {{"record", "summary"},
                                    {"encoder", report.encoder},
                                    {"pairs", report.pairs.size()},
                                    {"raw_mean", report.raw_mean},
                                    {"fused_mean", report.fused_mean}};
    out << summary.dump() << "\n";
    if (!out) throw FileError("failed writing decoupling records '" + path.string() + "'");
}

std::string format_decoupling_table(const DecouplingReport& report) {
    std::size_t width = 6;
    for (const PairDistance& row : report.pairs) {
        width = std::max({width, row.word_a.size(), row.word_b.size()});
    }

    const auto pad = [width](const std::string& s) {
        return s + std::string(width + 2 - s.size(), ' ');
    };

    std::string out = "near-homophone feature distances (encoder: " + report.encoder + ")\n\n";
    out += pad("word_a") + pad("word_b") + "plain    fused\n";
    for (const PairDistance& row : report.pairs) {
        out += pad(row.word_a) + pad(row.word_b) + fixed4(row.raw_distance) + "   " +
               fixed4(row.fused_distance) + "\n";
    }
    out += "\nmean over " + std::to_string(report.pairs.size()) + " pairs: plain " +
           fixed4(report.raw_mean) + ", fused " + fixed4(report.fused_mean) + "\n";
    out +=
        "\npublished mean pair distances for reference (plain -> fused):\n"
        "  wav2vec2  0.0397 -> 0.0701\n"
        "  hubert    0.2689 -> 0.2909\n";
    return out;
}

namespace {

// Unit directions of the two largest-variance axes of the centered data.
// Works from whichever of the feature-by-feature or point-by-point product
// matrix is smaller; both share their nonzero eigenvalues.
std::vector<std::vector<double>> principal_directions(const std::vector<double>& centered,
                                                      std::size_t n, std::size_t dim) {
    std::vector<std::vector<double>> dirs(2, std::vector<double>(dim, 0.0));
    if (dim <= n) {
        std::vector<double> cov(dim * dim, 0.0);
        for (std::size_t a = 0; a < dim; ++a) {
            for (std::size_t b = a; b < dim; ++b) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    s += centered[i * dim + a] * centered[i * dim + b];
                }
                cov[a * dim + b] = s;
                cov[b * dim + a] = s;
            }
        }
        const SymmetricEigen eig = symmetric_eigendecomposition(cov, dim);
        for (std::size_t k = 0; k < 2 && k < dim; ++k) {
            dirs[k] = eig.eigenvector(dim - 1 - k);
        }
        return dirs;
    }

    std::vector<double> gram(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                s += centered[i * dim + d] * centered[j * dim + d];
            }
            gram[i * n + j] = s;
            gram[j * n + i] = s;
        }
    }
    const SymmetricEigen eig = symmetric_eigendecomposition(gram, n);
    const double top = eig.values.back();
    for (std::size_t k = 0; k < 2; ++k) {
        // Mapping a point-space eigenvector back through the data recovers
        // the feature-space direction, up to scale sqrt(eigenvalue).
        const std::vector<double> u = eig.eigenvector(n - 1 - k);
        double norm_sq = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += u[i] * centered[i * dim + d];
            dirs[k][d] = s;
            norm_sq += s * s;
        }
        // A direction paired with a numerically zero eigenvalue carries no
        // variance; keep it at zero instead of normalizing noise.
        if (norm_sq <= 1e-24 * std::max(1.0, top)) {
            std::fill(dirs[k].begin(), dirs[k].end(), 0.0);
        } else {
            const double inv = 1.0 / std::sqrt(norm_sq);
            for (double& d : dirs[k]) d *= inv;
        }
    }
    return dirs;
}

void fix_sign(std::vector<double>& direction) {
    std::size_t peak = 0;
    for (std::size_t d = 1; d < direction.size(); ++d) {
        if (std::abs(direction[d]) > std::abs(direction[peak])) peak = d;
    }
    if (direction[peak] < 0.0) {
        for (double& v : direction) v = -v;
    }
}

}  // namespace

std::vector<ProjectedPoint> project_2d(const std::vector<LabeledVector>& features) {
    const std::size_t n = features.size();
    if (n < 2) {
        throw ConfigError("projection needs at least two feature vectors, got " +
                          std::to_string(n));
    }
    const std::size_t dim = features[0].values.size();
    if (dim == 0) throw ShapeError("projection features must have at least one value");
    for (const LabeledVector& f : features) {
        if (f.values.size() != dim) {
            throw ShapeError("feature width mismatch for '" + f.label + "': expected " +
                             std::to_string(dim) + ", got " + std::to_string(f.values.size()));
        }
        for (double v : f.values) {
            if (!std::isfinite(v)) {
                throw NonFiniteError("non-finite feature value for '" + f.label + "'");
            }
        }
    }

    std::vector<double> mean(dim, 0.0);
    for (const LabeledVector& f : features) {
        for (std::size_t d = 0; d < dim; ++d) mean[d] += f.values[d];
    }
    for (double& m : mean) m /= static_cast<double>(n);

    std::vector<double> centered(n * dim);
    double max_abs = 0.0;
    double max_centered = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < dim; ++d) {
            const double v = features[i].values[d];
            centered[i * dim + d] = v - mean[d];
            max_abs = std::max(max_abs, std::abs(v));
            max_centered = std::max(max_centered, std::abs(centered[i * dim + d]));
        }
    }
    if (max_centered <= 1e-12 * std::max(1.0, max_abs)) {
        throw RangeError("all feature vectors are identical; nothing to project");
    }

    std::vector<std::vector<double>> dirs = principal_directions(centered, n, dim);
    fix_sign(dirs[0]);
    fix_sign(dirs[1]);

    std::vector<ProjectedPoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ProjectedPoint p;
        p.label = features[i].label;
        for (std::size_t d = 0; d < dim; ++d) {
            p.x += centered[i * dim + d] * dirs[0][d];
            p.y += centered[i * dim + d] * dirs[1][d];
        }
        out.push_back(std::move(p));
    }
    return out;
}

void write_projection_csv(const std::filesystem::path& path,
                          const std::vector<ProjectedPoint>& points) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FileError("cannot write projection '" + path.string() + "'");

    const auto field = [](const std::string& label) {
        if (label.find_first_of(",\"\n") == std::string::npos) return label;
        std::string quoted = "\"";
        for (char c : label) {
            if (c == '"') quoted += '"';
            quoted += c;
        }
        quoted += '"';
        return quoted;
    };

    out << "label,x,y\n";
    char buf[64];
    for (const ProjectedPoint& p : points) {
        std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", p.x, p.y);
        out << field(p.label) << buf;
    }
    if (!out) throw FileError("failed writing projection '" + path.string() + "'");
}

}  // namespace w2s
