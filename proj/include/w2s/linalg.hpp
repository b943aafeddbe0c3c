#pragma once

#include <cstddef>
#include <vector>

namespace w2s {

// Result of a dense symmetric eigendecomposition. Eigenvalues are sorted
// ascending; row k of `vectors` (length n, row-major [n, n]) is the unit
// eigenvector paired with values[k].
struct SymmetricEigen {
    std::size_t n = 0;
    std::vector<double> values;
    std::vector<double> vectors;

    // Row k as a standalone vector.
    std::vector<double> eigenvector(std::size_t k) const;
};

// Eigendecomposition of a symmetric matrix (row-major, n x n) by cyclic
// Jacobi rotations. Intended for the small matrices this project meets
// (feature covariances, head weight products); cost is O(n^3) per sweep.
// Throws a shape error if the input length is not n*n, and a configuration
// error if the matrix is not symmetric within 1e-9 of its scale.
SymmetricEigen symmetric_eigendecomposition(const std::vector<double>& matrix, std::size_t n);

}  // namespace w2s
