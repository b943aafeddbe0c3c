#pragma once

#include <cstddef>
#include <vector>

#include "w2s/tensor.hpp"

namespace w2s {

// Snapshot of the optimizer's moment buffers, for interrupting and
// resuming a run without disturbing the parameter trajectory.
struct AdamState {
    std::size_t steps = 0;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
};

// Adam optimizer over a fixed list of parameter tensors. Moment buffers are
// keyed by position, so the parameter list must stay stable across steps.
class Adam {
  public:
    explicit Adam(std::vector<Tensor> params, double lr, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8);

    // Applies one update using the gradients currently stored on the
    // parameters. Throws MissingGradientError if any parameter has none.
    void step();

    // Clears the gradient buffers of all tracked parameters.
    void zero_grad();

    AdamState state() const;
    // Restores a snapshot taken from an optimizer over the same parameter
    // list; buffer count or length mismatches throw a configuration error.
    void set_state(const AdamState& state);

    double lr() const { return lr_; }
    std::size_t step_count() const { return step_count_; }
    const std::vector<Tensor>& params() const { return params_; }

  private:
    std::vector<Tensor> params_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    double lr_;
    double beta1_;
    double beta2_;
    double eps_;
    std::size_t step_count_ = 0;
};

}  // namespace w2s
