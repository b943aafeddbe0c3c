#include "w2s/adam.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "w2s/errors.hpp"

namespace w2s {

Adam::Adam(std::vector<Tensor> params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    if (lr_ <= 0.0) throw ConfigError("adam: learning rate must be positive");
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const Tensor& p : params_) {
        m_.emplace_back(p.size(), 0.0);
        v_.emplace_back(p.size(), 0.0);
    }
}

void Adam::step() {
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (!params_[i].has_grad()) {
            throw MissingGradientError("adam: parameter " + std::to_string(i) +
                                       " has no gradient; run backward before step");
        }
    }
    ++step_count_;
    const double t = static_cast<double>(step_count_);
    const double bc1 = 1.0 - std::pow(beta1_, t);
    const double bc2 = 1.0 - std::pow(beta2_, t);
    for (std::size_t i = 0; i < params_.size(); ++i) {
        auto& p = params_[i].values();
        const auto& g = params_[i].grad();
        auto& m = m_[i];
        auto& v = v_[i];
        for (std::size_t j = 0; j < p.size(); ++j) {
            m[j] = beta1_ * m[j] + (1.0 - beta1_) * g[j];
            v[j] = beta2_ * v[j] + (1.0 - beta2_) * g[j] * g[j];
            const double m_hat = m[j] / bc1;
            const double v_hat = v[j] / bc2;
            p[j] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
        }
    }
}

void Adam::zero_grad() {
    for (Tensor& p : params_) p.zero_grad();
}

AdamState Adam::state() const { return AdamState{step_count_, m_, v_}; }

void Adam::set_state(const AdamState& state) {
    if (state.m.size() != params_.size() || state.v.size() != params_.size()) {
        throw ConfigError("adam: state holds " + std::to_string(state.m.size()) +
                          " moment buffers for " + std::to_string(params_.size()) + " parameters");
    }
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (state.m[i].size() != params_[i].size() || state.v[i].size() != params_[i].size()) {
            throw ConfigError("adam: moment buffer " + std::to_string(i) + " has length " +
                              std::to_string(state.m[i].size()) + ", parameter has " +
                              std::to_string(params_[i].size()));
        }
    }
    m_ = state.m;
    v_ = state.v;
    step_count_ = state.steps;
}

}  // namespace w2s
