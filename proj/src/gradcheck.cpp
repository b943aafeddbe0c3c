#include "w2s/gradcheck.hpp"

#include <cmath>
#include <sstream>

#include "w2s/errors.hpp"
#include "w2s/rng.hpp"

namespace w2s {

namespace {

double l2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

std::string GradCheckReport::describe() const {
    std::ostringstream os;
    os << op_name << ": max rel error " << max_rel_error;
    if (!finite) os << " (non-finite gradient encountered)";
    return os.str();
}

GradCheckReport check_gradients(const std::string& op_name, const LossBuilder& build_loss,
                                const std::vector<Tensor::Shape>& input_shapes, std::uint64_t seed,
                                double step) {
    Rng rng(seed);
    std::vector<Tensor> leaves;
    leaves.reserve(input_shapes.size());
    for (const auto& shape : input_shapes) {
        Tensor t(shape, /*requires_grad=*/true);
        for (double& v : t.values()) v = rng.next_normal();
        leaves.push_back(t);
    }
    return check_gradients_at(op_name, build_loss, std::move(leaves), step);
}

GradCheckReport check_gradients_at(const std::string& op_name, const LossBuilder& build_loss,
                                   std::vector<Tensor> leaves, double step) {
    GradCheckReport report;
    report.op_name = op_name;

    for (Tensor& leaf : leaves) {
        if (!leaf.requires_grad()) {
            throw MissingGradientError("check_gradients(" + op_name + "): leaf of shape " + leaf.shape_str() +
                                       " does not require grad");
        }
        leaf.zero_grad();
    }

    Tensor loss = build_loss(leaves);
    if (loss.size() != 1) {
        throw ShapeError("check_gradients(" + op_name + "): loss must be scalar, got " + loss.shape_str());
    }
    if (!std::isfinite(loss.item())) {
        report.finite = false;
        return report;
    }
    loss.backward();

    std::vector<std::vector<double>> analytic;
    analytic.reserve(leaves.size());
    for (const Tensor& leaf : leaves) {
        analytic.push_back(leaf.grad());
        if (!all_finite(analytic.back())) report.finite = false;
    }
    if (!report.finite) return report;

    NoGradGuard inference_only;
    for (std::size_t li = 0; li < leaves.size(); ++li) {
        auto& values = leaves[li].values();
        std::vector<double> numeric(values.size(), 0.0);
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double original = values[i];
            values[i] = original + step;
            const double f_plus = build_loss(leaves).item();
            values[i] = original - step;
            const double f_minus = build_loss(leaves).item();
            values[i] = original;
            numeric[i] = (f_plus - f_minus) / (2.0 * step);
        }
        if (!all_finite(numeric)) {
            report.finite = false;
            return report;
        }
        std::vector<double> diff(values.size());
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = analytic[li][i] - numeric[i];
        const double denom = l2(analytic[li]) + l2(numeric);
        // Below the floor both gradients are zero up to finite-difference
        // noise (roundoff / 2h), which a ratio test cannot distinguish.
        const double rel = denom < 1e-8 ? 0.0 : l2(diff) / denom;
        report.per_input.push_back(rel);
        report.max_rel_error = std::max(report.max_rel_error, rel);
    }
    return report;
}

}  // namespace w2s
