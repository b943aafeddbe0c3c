#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "w2s/tensor.hpp"

namespace w2s {

// Result of comparing reverse-mode gradients against central finite
// differences. The relative error for one leaf tensor is
//   l2(analytic - numeric) / (l2(analytic) + l2(numeric)),
// which stays meaningful when individual coordinates are near zero. When
// both norms sit below finite-difference resolution the error is reported
// as zero, since the ratio carries no signal there.
struct GradCheckReport {
    std::string op_name;
    std::vector<double> per_input;
    double max_rel_error = 0.0;
    bool finite = true;

    bool passed(double threshold) const { return finite && max_rel_error < threshold; }
    std::string describe() const;
};

// Builds a scalar loss from the leaves. Called repeatedly with the same
// tensors while their values are perturbed, so it must rebuild the graph
// from current values on every call.
using LossBuilder = std::function<Tensor(std::vector<Tensor>&)>;

// Checks gradients at a point drawn from a seeded normal distribution.
GradCheckReport check_gradients(const std::string& op_name, const LossBuilder& build_loss,
                                const std::vector<Tensor::Shape>& input_shapes, std::uint64_t seed,
                                double step = 1e-5);

// Checks gradients at the leaves' current values. The leaves must require
// grad; their values are perturbed in place and restored before returning.
GradCheckReport check_gradients_at(const std::string& op_name, const LossBuilder& build_loss,
                                   std::vector<Tensor> leaves, double step = 1e-5);

}  // namespace w2s
