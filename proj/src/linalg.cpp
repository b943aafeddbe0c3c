#include "w2s/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "w2s/errors.hpp"

namespace w2s {

std::vector<double> SymmetricEigen::eigenvector(std::size_t k) const {
    if (k >= n) {
        throw RangeError("eigenvector index " + std::to_string(k) + " out of range for " +
                         std::to_string(n) + " eigenpairs");
    }
    return std::vector<double>(vectors.begin() + static_cast<long>(k * n),
                               vectors.begin() + static_cast<long>((k + 1) * n));
}

SymmetricEigen symmetric_eigendecomposition(const std::vector<double>& matrix, std::size_t n) {
    if (n == 0 || matrix.size() != n * n) {
        throw ShapeError("symmetric eigendecomposition needs an n x n matrix, got " +
                         std::to_string(matrix.size()) + " values for n = " + std::to_string(n));
    }

    double scale = 0.0;
    for (double v : matrix) scale = std::max(scale, std::fabs(v));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::fabs(matrix[i * n + j] - matrix[j * n + i]) > 1e-9 * std::max(scale, 1.0)) {
                throw ConfigError("matrix is not symmetric at (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ")");
            }
        }
    }

    // Work on a copy; v accumulates the rotations with eigenvectors as columns.
    std::vector<double> a = matrix;
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    const double stop = 1e-14 * std::max(scale, 1.0);
    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += std::fabs(a[p * n + q]);
        }
        if (off <= stop) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::fabs(apq) <= stop / static_cast<double>(n * n)) continue;

                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p];
                    const double vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&a, n](std::size_t x, std::size_t y) { return a[x * n + x] < a[y * n + y]; });

    SymmetricEigen out;
    out.n = n;
    out.values.resize(n);
    out.vectors.resize(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t col = order[k];
        out.values[k] = a[col * n + col];
        for (std::size_t j = 0; j < n; ++j) out.vectors[k * n + j] = v[j * n + col];
    }
    return out;
}

}  // namespace w2s
