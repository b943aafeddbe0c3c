#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace w2s {

// Dense row-major tensor of 64-bit floats with an optional gradient buffer
// and a reverse-mode graph link. Copies share storage; ops never mutate an
// input, so a tensor's values are stable once the producing op returns.
// Training mutates leaf values in place between graph builds.
class Tensor {
public:
    using Shape = std::vector<std::size_t>;

    Tensor() : impl_(nullptr) {}
    explicit Tensor(Shape shape, bool requires_grad = false);
    Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double value, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);

    bool defined() const { return impl_ != nullptr; }
    const Shape& shape() const;
    std::size_t rank() const { return shape().size(); }
    std::size_t size() const;
    std::size_t dim(std::size_t axis) const;

    std::vector<double>& values();
    const std::vector<double>& values() const;
    double item() const;  // scalar tensors only

    bool requires_grad() const;
    // Disabling releases any gradient buffer.
    void set_requires_grad(bool requires_grad);
    bool has_grad() const;
    std::vector<double>& grad();
    const std::vector<double>& grad() const;
    void zero_grad();

    // Detached view: same storage, no grad, no graph link.
    Tensor detached() const;

    bool all_finite() const;

    // Seeds grad with ones at this tensor and propagates in reverse
    // topological order. The tensor must require grad.
    void backward();

    std::string shape_str() const;
    static std::string shape_str(const Shape& s);
    static std::size_t numel(const Shape& s);

    // Graph wiring, used by op implementations.
    struct Impl {
        Shape shape;
        std::vector<double> values;
        std::vector<double> grad;  // empty until first written; full-size after
        bool requires_grad = false;
        std::vector<Tensor> parents;
        std::function<void(const Tensor& out)> backward_fn;
    };
    Impl* impl() { return impl_.get(); }
    const Impl* impl() const { return impl_.get(); }
    void set_parents(std::vector<Tensor> parents, std::function<void(const Tensor&)> fn);

private:
    std::shared_ptr<Impl> impl_;
};

// When false, ops skip graph construction even for grad-requiring inputs.
// Scoped guard for inference paths (encode on a trained model, analysis).
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool previous_;
};

bool grad_enabled();

}  // namespace w2s
