#include "w2s/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "w2s/errors.hpp"

namespace w2s {

namespace {
thread_local bool g_grad_enabled = true;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

std::size_t Tensor::numel(const Shape& s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
}

Tensor::Tensor(Shape shape, bool requires_grad) {
    impl_ = std::make_shared<Impl>();
    impl_->shape = std::move(shape);
    for (std::size_t d : impl_->shape) {
        if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(impl_->shape));
    }
    impl_->values.assign(numel(impl_->shape), 0.0);
    impl_->requires_grad = requires_grad;
}

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad) {
    impl_ = std::make_shared<Impl>();
    impl_->shape = std::move(shape);
    for (std::size_t d : impl_->shape) {
        if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(impl_->shape));
    }
    if (values.size() != numel(impl_->shape)) {
        throw ShapeError("value count " + std::to_string(values.size()) + " does not match shape " +
                         shape_str(impl_->shape));
    }
    impl_->values = std::move(values);
    impl_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return Tensor(std::move(shape), requires_grad); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
    Tensor t(std::move(shape), requires_grad);
    std::fill(t.values().begin(), t.values().end(), value);
    return t;
}

Tensor Tensor::scalar(double value, bool requires_grad) {
    return Tensor(Shape{1}, std::vector<double>{value}, requires_grad);
}

const Tensor::Shape& Tensor::shape() const {
    if (!impl_) throw ShapeError("use of default-constructed tensor");
    return impl_->shape;
}

std::size_t Tensor::size() const { return impl_ ? impl_->values.size() : 0; }

std::size_t Tensor::dim(std::size_t axis) const {
    const Shape& s = shape();
    if (axis >= s.size()) {
        throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " + shape_str(s));
    }
    return s[axis];
}

std::vector<double>& Tensor::values() {
    if (!impl_) throw ShapeError("use of default-constructed tensor");
    return impl_->values;
}

const std::vector<double>& Tensor::values() const {
    if (!impl_) throw ShapeError("use of default-constructed tensor");
    return impl_->values;
}

double Tensor::item() const {
    if (size() != 1) throw ShapeError("item() requires a scalar tensor, shape is " + shape_str());
    return values()[0];
}

bool Tensor::requires_grad() const { return impl_ && impl_->requires_grad; }

void Tensor::set_requires_grad(bool requires_grad) {
    if (!impl_) throw ShapeError("use of default-constructed tensor");
    impl_->requires_grad = requires_grad;
    if (!requires_grad) {
        impl_->grad.clear();
        impl_->grad.shrink_to_fit();
    }
}

bool Tensor::has_grad() const { return impl_ && !impl_->grad.empty(); }

std::vector<double>& Tensor::grad() {
    if (!requires_grad()) {
        throw MissingGradientError("tensor of shape " + shape_str() + " does not require grad");
    }
    // Buffers materialize on first write so untouched parameters stay cheap
    // and remain detectable as never-differentiated.
    if (impl_->grad.empty()) impl_->grad.assign(impl_->values.size(), 0.0);
    return impl_->grad;
}

const std::vector<double>& Tensor::grad() const {
    if (!has_grad()) throw MissingGradientError("tensor of shape " + shape_str() + " has no gradient buffer");
    return impl_->grad;
}

void Tensor::zero_grad() {
    if (requires_grad()) grad().assign(impl_->values.size(), 0.0);
}

Tensor Tensor::detached() const {
    Tensor t;
    t.impl_ = std::make_shared<Impl>();
    t.impl_->shape = shape();
    t.impl_->values = values();  // copy: detached tensors are value snapshots
    t.impl_->requires_grad = false;
    return t;
}

bool Tensor::all_finite() const {
    for (double v : values()) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Tensor::set_parents(std::vector<Tensor> parents, std::function<void(const Tensor&)> fn) {
    if (!impl_) throw ShapeError("use of default-constructed tensor");
    impl_->parents = std::move(parents);
    impl_->backward_fn = std::move(fn);
}

void Tensor::backward() {
    if (!requires_grad()) {
        throw MissingGradientError("backward() called on a tensor that does not require grad");
    }
    // Post-order DFS over the parent DAG, iterative to keep deep graphs safe.
    std::vector<Tensor> topo;
    std::unordered_set<const Impl*> seen;
    struct Frame {
        Tensor t;
        std::size_t next_parent;
    };
    std::vector<Frame> stack;
    stack.push_back({*this, 0});
    seen.insert(impl());
    while (!stack.empty()) {
        Frame& f = stack.back();
        auto& parents = f.t.impl()->parents;
        if (f.next_parent < parents.size()) {
            Tensor p = parents[f.next_parent++];
            if (p.defined() && seen.insert(p.impl()).second) stack.push_back({p, 0});
        } else {
            topo.push_back(f.t);
            stack.pop_back();
        }
    }

    std::fill(grad().begin(), grad().end(), 1.0);
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        const Impl* node = it->impl();
        if (node->backward_fn) node->backward_fn(*it);
    }
}

std::string Tensor::shape_str(const Shape& s) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) os << ", ";
        os << s[i];
    }
    os << "]";
    return os.str();
}

std::string Tensor::shape_str() const { return shape_str(shape()); }

}  // namespace w2s
