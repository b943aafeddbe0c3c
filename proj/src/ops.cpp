#include "w2s/ops.hpp"

#include <cmath>
#include <string>

#include "w2s/errors.hpp"

namespace w2s {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

bool track(std::initializer_list<const Tensor*> inputs) {
    if (!grad_enabled()) return false;
    for (const Tensor* t : inputs) {
        if (t->requires_grad()) return true;
    }
    return false;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(op) + ": shapes " + a.shape_str() + " and " + b.shape_str() +
                         " do not match");
    }
}

void require_rank2(const Tensor& t, const char* op, const char* name) {
    if (t.rank() != 2) {
        throw ShapeError(std::string(op) + ": " + name + " must be rank 2, got " + t.shape_str());
    }
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor out(a.shape(), track({&a, &b}));
    const auto& av = a.values();
    const auto& bv = b.values();
    auto& ov = out.values();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] + bv[i];
    if (out.requires_grad()) {
        out.set_parents({a, b}, [](const Tensor& o) {
            const auto& go = o.grad();
            Tensor pa = o.impl()->parents[0];
            Tensor pb = o.impl()->parents[1];
            if (pa.requires_grad()) {
                auto& g = pa.grad();
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += go[i];
            }
            if (pb.requires_grad()) {
                auto& g = pb.grad();
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += go[i];
            }
        });
    }
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Tensor out(a.shape(), track({&a, &b}));
    const auto& av = a.values();
    const auto& bv = b.values();
    auto& ov = out.values();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] - bv[i];
    if (out.requires_grad()) {
        out.set_parents({a, b}, [](const Tensor& o) {
            const auto& go = o.grad();
            Tensor pa = o.impl()->parents[0];
            Tensor pb = o.impl()->parents[1];
            if (pa.requires_grad()) {
                auto& g = pa.grad();
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += go[i];
            }
            if (pb.requires_grad()) {
                auto& g = pb.grad();
                for (std::size_t i = 0; i < g.size(); ++i) g[i] -= go[i];
            }
        });
    }
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    Tensor out(a.shape(), track({&a, &b}));
    const auto& av = a.values();
    const auto& bv = b.values();
    auto& ov = out.values();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * bv[i];
    if (out.requires_grad()) {
        out.set_parents({a, b}, [](const Tensor& o) {
            const auto& go = o.grad();
            Tensor pa = o.impl()->parents[0];
            Tensor pb = o.impl()->parents[1];
            if (pa.requires_grad()) {
                auto& g = pa.grad();
                const auto& bv2 = pb.values();
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += go[i] * bv2[i];
            }
            if (pb.requires_grad()) {
                auto& g = pb.grad();
                const auto& av2 = pa.values();
                for (std::size_t i = 0; i < g.size(); ++i) g[i] += go[i] * av2[i];
            }
        });
    }
    return out;
}

Tensor scale(const Tensor& a, double s) {
    Tensor out(a.shape(), track({&a}));
    const auto& av = a.values();
    auto& ov = out.values();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = av[i] * s;
    if (out.requires_grad()) {
        out.set_parents({a}, [s](const Tensor& o) {
            const auto& go = o.grad();
            Tensor pa = o.impl()->parents[0];
            auto& g = pa.grad();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += go[i] * s;
        });
    }
    return out;
}

Tensor abs(const Tensor& a) {
    Tensor out(a.shape(), track({&a}));
    const auto& av = a.values();
    auto& ov = out.values();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = std::fabs(av[i]);
    if (out.requires_grad()) {
        // Subgradient at zero taken as 0.
        out.set_parents({a}, [](const Tensor& o) {
            const auto& go = o.grad();
            Tensor pa = o.impl()->parents[0];
            auto& g = pa.grad();
            const auto& av2 = pa.values();
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (av2[i] > 0.0) g[i] += go[i];
                else if (av2[i] < 0.0) g[i] -= go[i];
            }
        });
    }
    return out;
}

Tensor sum_all(const Tensor& a) {
    Tensor out(Tensor::Shape{1}, track({&a}));
    double s = 0.0;
    for (double v : a.values()) s += v;
    out.values()[0] = s;
    if (out.requires_grad()) {
        out.set_parents({a}, [](const Tensor& o) {
            const double go = o.grad()[0];
            Tensor pa = o.impl()->parents[0];
            auto& g = pa.grad();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += go;
        });
    }
    return out;
}

Tensor gelu(const Tensor& a) {
    Tensor out(a.shape(), track({&a}));
    const auto& av = a.values();
    auto& ov = out.values();
    for (std::size_t i = 0; i < ov.size(); ++i) {
        ov[i] = 0.5 * av[i] * (1.0 + std::erf(av[i] * kInvSqrt2));
    }
    if (out.requires_grad()) {
        out.set_parents({a}, [](const Tensor& o) {
            const auto& go = o.grad();
            Tensor pa = o.impl()->parents[0];
            auto& g = pa.grad();
            const auto& av2 = pa.values();
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double x = av2[i];
                const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
                const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
                g[i] += go[i] * (cdf + x * pdf);
            }
        });
    }
    return out;
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
    require_rank2(weight, "linear", "weight");
    if (x.rank() < 1) throw ShapeError("linear: x must have at least one axis");
    const std::size_t in_dim = weight.dim(0);
    const std::size_t out_dim = weight.dim(1);
    if (x.shape().back() != in_dim) {
        throw ShapeError("linear: x trailing dimension " + std::to_string(x.shape().back()) +
                         " does not match weight input dimension " + std::to_string(in_dim));
    }
    if (bias.rank() != 1 || bias.dim(0) != out_dim) {
        throw ShapeError("linear: bias shape " + bias.shape_str() + " does not match weight output dimension " +
                         std::to_string(out_dim));
    }

    Tensor::Shape out_shape = x.shape();
    out_shape.back() = out_dim;
    const std::size_t rows = x.size() / in_dim;

    Tensor out(out_shape, track({&x, &weight, &bias}));
    const auto& xv = x.values();
    const auto& wv = weight.values();
    const auto& bv = bias.values();
    auto& ov = out.values();
    for (std::size_t r = 0; r < rows; ++r) {
        double* orow = ov.data() + r * out_dim;
        const double* xrow = xv.data() + r * in_dim;
        for (std::size_t o = 0; o < out_dim; ++o) orow[o] = bv[o];
        for (std::size_t i = 0; i < in_dim; ++i) {
            const double xi = xrow[i];
            const double* wrow = wv.data() + i * out_dim;
            for (std::size_t o = 0; o < out_dim; ++o) orow[o] += xi * wrow[o];
        }
    }
    if (out.requires_grad()) {
        out.set_parents({x, weight, bias}, [rows, in_dim, out_dim](const Tensor& o) {
            const auto& go = o.grad();
            Tensor px = o.impl()->parents[0];
            Tensor pw = o.impl()->parents[1];
            Tensor pb = o.impl()->parents[2];
            if (px.requires_grad()) {
                auto& gx = px.grad();
                const auto& wv2 = pw.values();
                for (std::size_t r = 0; r < rows; ++r) {
                    const double* grow = go.data() + r * out_dim;
                    double* gxrow = gx.data() + r * in_dim;
                    for (std::size_t i = 0; i < in_dim; ++i) {
                        const double* wrow = wv2.data() + i * out_dim;
                        double acc = 0.0;
                        for (std::size_t o = 0; o < out_dim; ++o) acc += grow[o] * wrow[o];
                        gxrow[i] += acc;
                    }
                }
            }
            if (pw.requires_grad()) {
                auto& gw = pw.grad();
                const auto& xv2 = px.values();
                for (std::size_t r = 0; r < rows; ++r) {
                    const double* grow = go.data() + r * out_dim;
                    const double* xrow = xv2.data() + r * in_dim;
                    for (std::size_t i = 0; i < in_dim; ++i) {
                        double* gwrow = gw.data() + i * out_dim;
                        const double xi = xrow[i];
                        for (std::size_t o = 0; o < out_dim; ++o) gwrow[o] += xi * grow[o];
                    }
                }
            }
            if (pb.requires_grad()) {
                auto& gb = pb.grad();
                for (std::size_t r = 0; r < rows; ++r) {
                    const double* grow = go.data() + r * out_dim;
                    for (std::size_t o = 0; o < out_dim; ++o) gb[o] += grow[o];
                }
            }
        });
    }
    return out;
}

std::size_t conv1d_output_length(std::size_t length, std::size_t kernel, std::size_t stride) {
    if (length < kernel) {
        throw InputTooShortError(length, kernel);
    }
    return (length - kernel) / stride + 1;
}

Tensor conv1d(const Tensor& x, const Tensor& weight, std::size_t stride) {
    require_rank2(x, "conv1d", "x");
    if (weight.rank() != 3) {
        throw ShapeError("conv1d: weight must be rank 3 [out, in, kernel], got " + weight.shape_str());
    }
    if (stride < 1) throw ConfigError("conv1d: stride must be >= 1");
    const std::size_t c_in = x.dim(0);
    const std::size_t length = x.dim(1);
    const std::size_t c_out = weight.dim(0);
    const std::size_t kernel = weight.dim(2);
    if (weight.dim(1) != c_in) {
        throw ShapeError("conv1d: weight input-channel dimension " + std::to_string(weight.dim(1)) +
                         " does not match x channel dimension " + std::to_string(c_in));
    }
    const std::size_t out_len = conv1d_output_length(length, kernel, stride);

    Tensor out(Tensor::Shape{c_out, out_len}, track({&x, &weight}));
    const auto& xv = x.values();
    const auto& wv = weight.values();
    auto& ov = out.values();
    for (std::size_t o = 0; o < c_out; ++o) {
        const double* wo = wv.data() + o * c_in * kernel;
        double* orow = ov.data() + o * out_len;
        for (std::size_t t = 0; t < out_len; ++t) {
            const std::size_t base = t * stride;
            double acc = 0.0;
            for (std::size_t i = 0; i < c_in; ++i) {
                const double* xrow = xv.data() + i * length + base;
                const double* wrow = wo + i * kernel;
                for (std::size_t k = 0; k < kernel; ++k) acc += xrow[k] * wrow[k];
            }
            orow[t] = acc;
        }
    }
    if (out.requires_grad()) {
        out.set_parents({x, weight}, [c_in, length, c_out, kernel, stride, out_len](const Tensor& o) {
            const auto& go = o.grad();
            Tensor px = o.impl()->parents[0];
            Tensor pw = o.impl()->parents[1];
            if (px.requires_grad()) {
                auto& gx = px.grad();
                const auto& wv2 = pw.values();
                for (std::size_t oc = 0; oc < c_out; ++oc) {
                    const double* wo = wv2.data() + oc * c_in * kernel;
                    const double* grow = go.data() + oc * out_len;
                    for (std::size_t t = 0; t < out_len; ++t) {
                        const double g = grow[t];
                        const std::size_t base = t * stride;
                        for (std::size_t i = 0; i < c_in; ++i) {
                            double* gxrow = gx.data() + i * length + base;
                            const double* wrow = wo + i * kernel;
                            for (std::size_t k = 0; k < kernel; ++k) gxrow[k] += g * wrow[k];
                        }
                    }
                }
            }
            if (pw.requires_grad()) {
                auto& gw = pw.grad();
                const auto& xv2 = px.values();
                for (std::size_t oc = 0; oc < c_out; ++oc) {
                    double* gwo = gw.data() + oc * c_in * kernel;
                    const double* grow = go.data() + oc * out_len;
                    for (std::size_t t = 0; t < out_len; ++t) {
                        const double g = grow[t];
                        const std::size_t base = t * stride;
                        for (std::size_t i = 0; i < c_in; ++i) {
                            const double* xrow = xv2.data() + i * length + base;
                            double* gwrow = gwo + i * kernel;
                            for (std::size_t k = 0; k < kernel; ++k) gwrow[k] += g * xrow[k];
                        }
                    }
                }
            }
        });
    }
    return out;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift, double eps) {
    if (x.rank() < 1) throw ShapeError("layer_norm: x must have at least one axis");
    if (eps <= 0.0) throw ConfigError("layer_norm: eps must be positive");
    const std::size_t c = x.shape().back();
    if (gain.rank() != 1 || gain.dim(0) != c) {
        throw ShapeError("layer_norm: gain shape " + gain.shape_str() + " does not match trailing dimension " +
                         std::to_string(c));
    }
    require_same_shape(gain, shift, "layer_norm gain/shift");
    const std::size_t rows = x.size() / c;

    Tensor out(x.shape(), track({&x, &gain, &shift}));
    const auto& xv = x.values();
    const auto& gv = gain.values();
    const auto& sv = shift.values();
    auto& ov = out.values();
    // Normalized values and inverse stddevs are recomputed in backward from
    // the saved inputs; only forward results are produced here.
    for (std::size_t r = 0; r < rows; ++r) {
        const double* xrow = xv.data() + r * c;
        double* orow = ov.data() + r * c;
        double mean = 0.0;
        for (std::size_t i = 0; i < c; ++i) mean += xrow[i];
        mean /= static_cast<double>(c);
        double var = 0.0;
        for (std::size_t i = 0; i < c; ++i) {
            const double d = xrow[i] - mean;
            var += d * d;
        }
        var /= static_cast<double>(c);
        const double inv_std = 1.0 / std::sqrt(var + eps);
        for (std::size_t i = 0; i < c; ++i) {
            orow[i] = gv[i] * ((xrow[i] - mean) * inv_std) + sv[i];
        }
    }
    if (out.requires_grad()) {
        out.set_parents({x, gain, shift}, [rows, c, eps](const Tensor& o) {
            const auto& go = o.grad();
            Tensor px = o.impl()->parents[0];
            Tensor pg = o.impl()->parents[1];
            Tensor ps = o.impl()->parents[2];
            const auto& xv2 = px.values();
            const auto& gv2 = pg.values();
            std::vector<double> xhat(c), dxhat(c);
            for (std::size_t r = 0; r < rows; ++r) {
                const double* xrow = xv2.data() + r * c;
                const double* grow = go.data() + r * c;
                double mean = 0.0;
                for (std::size_t i = 0; i < c; ++i) mean += xrow[i];
                mean /= static_cast<double>(c);
                double var = 0.0;
                for (std::size_t i = 0; i < c; ++i) {
                    const double d = xrow[i] - mean;
                    var += d * d;
                }
                var /= static_cast<double>(c);
                const double inv_std = 1.0 / std::sqrt(var + eps);
                for (std::size_t i = 0; i < c; ++i) {
                    xhat[i] = (xrow[i] - mean) * inv_std;
                    dxhat[i] = grow[i] * gv2[i];
                }
                if (pg.requires_grad()) {
                    auto& gg = pg.grad();
                    for (std::size_t i = 0; i < c; ++i) gg[i] += grow[i] * xhat[i];
                }
                if (ps.requires_grad()) {
                    auto& gs = ps.grad();
                    for (std::size_t i = 0; i < c; ++i) gs[i] += grow[i];
                }
                if (px.requires_grad()) {
                    double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
                    for (std::size_t i = 0; i < c; ++i) {
                        mean_dxhat += dxhat[i];
                        mean_dxhat_xhat += dxhat[i] * xhat[i];
                    }
                    mean_dxhat /= static_cast<double>(c);
                    mean_dxhat_xhat /= static_cast<double>(c);
                    auto& gx = px.grad();
                    double* gxrow = gx.data() + r * c;
                    for (std::size_t i = 0; i < c; ++i) {
                        gxrow[i] += inv_std * (dxhat[i] - mean_dxhat - xhat[i] * mean_dxhat_xhat);
                    }
                }
            }
        });
    }
    return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_rank2(a, "matmul", "a");
    require_rank2(b, "matmul", "b");
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    if (b.dim(0) != k) {
        throw ShapeError("matmul: inner dimensions " + std::to_string(k) + " and " + std::to_string(b.dim(0)) +
                         " do not match");
    }
    Tensor out(Tensor::Shape{m, n}, track({&a, &b}));
    const auto& av = a.values();
    const auto& bv = b.values();
    auto& ov = out.values();
    for (std::size_t i = 0; i < m; ++i) {
        double* orow = ov.data() + i * n;
        const double* arow = av.data() + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double aval = arow[p];
            const double* brow = bv.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) orow[j] += aval * brow[j];
        }
    }
    if (out.requires_grad()) {
        out.set_parents({a, b}, [m, k, n](const Tensor& o) {
            const auto& go = o.grad();
            Tensor pa = o.impl()->parents[0];
            Tensor pb = o.impl()->parents[1];
            if (pa.requires_grad()) {
                auto& ga = pa.grad();
                const auto& bv2 = pb.values();
                for (std::size_t i = 0; i < m; ++i) {
                    const double* grow = go.data() + i * n;
                    double* garow = ga.data() + i * k;
                    for (std::size_t p = 0; p < k; ++p) {
                        const double* brow = bv2.data() + p * n;
                        double acc = 0.0;
                        for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
                        garow[p] += acc;
                    }
                }
            }
            if (pb.requires_grad()) {
                auto& gb = pb.grad();
                const auto& av2 = pa.values();
                for (std::size_t i = 0; i < m; ++i) {
                    const double* grow = go.data() + i * n;
                    const double* arow = av2.data() + i * k;
                    for (std::size_t p = 0; p < k; ++p) {
                        double* gbrow = gb.data() + p * n;
                        const double aval = arow[p];
                        for (std::size_t j = 0; j < n; ++j) gbrow[j] += aval * grow[j];
                    }
                }
            }
        });
    }
    return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    require_rank2(a, "matmul_nt", "a");
    require_rank2(b, "matmul_nt", "b");
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(0);
    if (b.dim(1) != k) {
        throw ShapeError("matmul_nt: inner dimensions " + std::to_string(k) + " and " + std::to_string(b.dim(1)) +
                         " do not match");
    }
    Tensor out(Tensor::Shape{m, n}, track({&a, &b}));
    const auto& av = a.values();
    const auto& bv = b.values();
    auto& ov = out.values();
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = av.data() + i * k;
        double* orow = ov.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = bv.data() + j * k;
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
            orow[j] = acc;
        }
    }
    if (out.requires_grad()) {
        out.set_parents({a, b}, [m, k, n](const Tensor& o) {
            const auto& go = o.grad();
            Tensor pa = o.impl()->parents[0];
            Tensor pb = o.impl()->parents[1];
            if (pa.requires_grad()) {
                auto& ga = pa.grad();
                const auto& bv2 = pb.values();
                for (std::size_t i = 0; i < m; ++i) {
                    const double* grow = go.data() + i * n;
                    double* garow = ga.data() + i * k;
                    for (std::size_t j = 0; j < n; ++j) {
                        const double* brow = bv2.data() + j * k;
                        const double g = grow[j];
                        for (std::size_t p = 0; p < k; ++p) garow[p] += g * brow[p];
                    }
                }
            }
            if (pb.requires_grad()) {
                auto& gb = pb.grad();
                const auto& av2 = pa.values();
                for (std::size_t i = 0; i < m; ++i) {
                    const double* grow = go.data() + i * n;
                    const double* arow = av2.data() + i * k;
                    for (std::size_t j = 0; j < n; ++j) {
                        double* gbrow = gb.data() + j * k;
                        const double g = grow[j];
                        for (std::size_t p = 0; p < k; ++p) gbrow[p] += g * arow[p];
                    }
                }
            }
        });
    }
    return out;
}

Tensor softmax_rows(const Tensor& x) {
    require_rank2(x, "softmax_rows", "x");
    const std::size_t rows = x.dim(0), cols = x.dim(1);
    Tensor out(x.shape(), track({&x}));
    const auto& xv = x.values();
    auto& ov = out.values();
    for (std::size_t r = 0; r < rows; ++r) {
        const double* xrow = xv.data() + r * cols;
        double* orow = ov.data() + r * cols;
        double mx = xrow[0];
        for (std::size_t i = 1; i < cols; ++i) mx = std::max(mx, xrow[i]);
        double sum = 0.0;
        for (std::size_t i = 0; i < cols; ++i) {
            orow[i] = std::exp(xrow[i] - mx);
            sum += orow[i];
        }
        const double inv = 1.0 / sum;
        for (std::size_t i = 0; i < cols; ++i) orow[i] *= inv;
    }
    if (out.requires_grad()) {
        out.set_parents({x}, [rows, cols](const Tensor& o) {
            const auto& go = o.grad();
            const auto& ov2 = o.values();
            Tensor px = o.impl()->parents[0];
            auto& gx = px.grad();
            for (std::size_t r = 0; r < rows; ++r) {
                const double* yrow = ov2.data() + r * cols;
                const double* grow = go.data() + r * cols;
                double dot = 0.0;
                for (std::size_t i = 0; i < cols; ++i) dot += grow[i] * yrow[i];
                double* gxrow = gx.data() + r * cols;
                for (std::size_t i = 0; i < cols; ++i) gxrow[i] += yrow[i] * (grow[i] - dot);
            }
        });
    }
    return out;
}

Tensor slice_cols(const Tensor& x, std::size_t start, std::size_t count) {
    require_rank2(x, "slice_cols", "x");
    const std::size_t rows = x.dim(0), cols = x.dim(1);
    if (count == 0 || start + count > cols) {
        throw ShapeError("slice_cols: range [" + std::to_string(start) + ", " + std::to_string(start + count) +
                         ") out of bounds for " + std::to_string(cols) + " columns");
    }
    Tensor out(Tensor::Shape{rows, count}, track({&x}));
    const auto& xv = x.values();
    auto& ov = out.values();
    for (std::size_t r = 0; r < rows; ++r) {
        const double* xrow = xv.data() + r * cols + start;
        double* orow = ov.data() + r * count;
        for (std::size_t i = 0; i < count; ++i) orow[i] = xrow[i];
    }
    if (out.requires_grad()) {
        out.set_parents({x}, [rows, cols, start, count](const Tensor& o) {
            const auto& go = o.grad();
            Tensor px = o.impl()->parents[0];
            auto& gx = px.grad();
            for (std::size_t r = 0; r < rows; ++r) {
                double* gxrow = gx.data() + r * cols + start;
                const double* grow = go.data() + r * count;
                for (std::size_t i = 0; i < count; ++i) gxrow[i] += grow[i];
            }
        });
    }
    return out;
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ShapeError("concat_cols: no inputs");
    const std::size_t rows = parts[0].dim(0);
    std::size_t total = 0;
    bool rg = false;
    for (const Tensor& p : parts) {
        require_rank2(p, "concat_cols", "input");
        if (p.dim(0) != rows) {
            throw ShapeError("concat_cols: row counts " + std::to_string(rows) + " and " +
                             std::to_string(p.dim(0)) + " do not match");
        }
        total += p.dim(1);
        rg = rg || p.requires_grad();
    }
    Tensor out(Tensor::Shape{rows, total}, grad_enabled() && rg);
    auto& ov = out.values();
    std::size_t offset = 0;
    for (const Tensor& p : parts) {
        const std::size_t w = p.dim(1);
        const auto& pv = p.values();
        for (std::size_t r = 0; r < rows; ++r) {
            const double* prow = pv.data() + r * w;
            double* orow = ov.data() + r * total + offset;
            for (std::size_t i = 0; i < w; ++i) orow[i] = prow[i];
        }
        offset += w;
    }
    if (out.requires_grad()) {
        out.set_parents(parts, [rows, total](const Tensor& o) {
            const auto& go = o.grad();
            std::size_t off = 0;
            for (Tensor p : o.impl()->parents) {
                const std::size_t w = p.dim(1);
                if (p.requires_grad()) {
                    auto& gp = p.grad();
                    for (std::size_t r = 0; r < rows; ++r) {
                        const double* grow = go.data() + r * total + off;
                        double* gprow = gp.data() + r * w;
                        for (std::size_t i = 0; i < w; ++i) gprow[i] += grow[i];
                    }
                }
                off += w;
            }
        });
    }
    return out;
}

Tensor transpose2d(const Tensor& x) {
    require_rank2(x, "transpose2d", "x");
    const std::size_t rows = x.dim(0), cols = x.dim(1);
    Tensor out(Tensor::Shape{cols, rows}, track({&x}));
    const auto& xv = x.values();
    auto& ov = out.values();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) ov[c * rows + r] = xv[r * cols + c];
    }
    if (out.requires_grad()) {
        out.set_parents({x}, [rows, cols](const Tensor& o) {
            const auto& go = o.grad();
            Tensor px = o.impl()->parents[0];
            auto& gx = px.grad();
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t c = 0; c < cols; ++c) gx[r * cols + c] += go[c * rows + r];
            }
        });
    }
    return out;
}

Tensor mean_rows(const Tensor& x) {
    require_rank2(x, "mean_rows", "x");
    const std::size_t rows = x.dim(0), cols = x.dim(1);
    Tensor out(Tensor::Shape{cols}, track({&x}));
    const auto& xv = x.values();
    auto& ov = out.values();
    for (std::size_t r = 0; r < rows; ++r) {
        const double* xrow = xv.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) ov[c] += xrow[c];
    }
    const double inv = 1.0 / static_cast<double>(rows);
    for (std::size_t c = 0; c < cols; ++c) ov[c] *= inv;
    if (out.requires_grad()) {
        out.set_parents({x}, [rows, cols, inv](const Tensor& o) {
            const auto& go = o.grad();
            Tensor px = o.impl()->parents[0];
            auto& gx = px.grad();
            for (std::size_t r = 0; r < rows; ++r) {
                double* gxrow = gx.data() + r * cols;
                for (std::size_t c = 0; c < cols; ++c) gxrow[c] += go[c] * inv;
            }
        });
    }
    return out;
}

Tensor add_row_bias(const Tensor& x, const Tensor& bias) {
    require_rank2(x, "add_row_bias", "x");
    const std::size_t rows = x.dim(0), cols = x.dim(1);
    if (bias.rank() != 1 || bias.dim(0) != rows) {
        throw ShapeError("add_row_bias: bias shape " + bias.shape_str() + " does not match row count " +
                         std::to_string(rows));
    }
    Tensor out(x.shape(), track({&x, &bias}));
    const auto& xv = x.values();
    const auto& bv = bias.values();
    auto& ov = out.values();
    for (std::size_t r = 0; r < rows; ++r) {
        const double b = bv[r];
        const double* xrow = xv.data() + r * cols;
        double* orow = ov.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) orow[c] = xrow[c] + b;
    }
    if (out.requires_grad()) {
        out.set_parents({x, bias}, [rows, cols](const Tensor& o) {
            const auto& go = o.grad();
            Tensor px = o.impl()->parents[0];
            Tensor pb = o.impl()->parents[1];
            if (px.requires_grad()) {
                auto& gx = px.grad();
                for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += go[i];
            }
            if (pb.requires_grad()) {
                auto& gb = pb.grad();
                for (std::size_t r = 0; r < rows; ++r) {
                    const double* grow = go.data() + r * cols;
                    double acc = 0.0;
                    for (std::size_t c = 0; c < cols; ++c) acc += grow[c];
                    gb[r] += acc;
                }
            }
        });
    }
    return out;
}

Tensor add_broadcast_row(const Tensor& x, const Tensor& row) {
    require_rank2(x, "add_broadcast_row", "x");
    require_rank2(row, "add_broadcast_row", "row");
    const std::size_t rows = x.dim(0), cols = x.dim(1);
    if (row.dim(0) != 1 || row.dim(1) != cols) {
        throw ShapeError("add_broadcast_row: row shape " + row.shape_str() + " does not broadcast over " +
                         x.shape_str());
    }
    Tensor out(x.shape(), track({&x, &row}));
    const auto& xv = x.values();
    const auto& rv = row.values();
    auto& ov = out.values();
    for (std::size_t r = 0; r < rows; ++r) {
        const double* xrow = xv.data() + r * cols;
        double* orow = ov.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) orow[c] = xrow[c] + rv[c];
    }
    if (out.requires_grad()) {
        out.set_parents({x, row}, [rows, cols](const Tensor& o) {
            const auto& go = o.grad();
            Tensor px = o.impl()->parents[0];
            Tensor pr = o.impl()->parents[1];
            if (px.requires_grad()) {
                auto& gx = px.grad();
                for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += go[i];
            }
            if (pr.requires_grad()) {
                auto& gr = pr.grad();
                for (std::size_t r = 0; r < rows; ++r) {
                    const double* grow = go.data() + r * cols;
                    for (std::size_t c = 0; c < cols; ++c) gr[c] += grow[c];
                }
            }
        });
    }
    return out;
}

Tensor multi_head_self_attention(const Tensor& x, std::size_t heads, const AttentionParams& params) {
    require_rank2(x, "multi_head_self_attention", "x");
    const std::size_t c = x.dim(1);
    if (heads == 0 || c % heads != 0) {
        throw ConfigError("multi_head_self_attention: model dimension " + std::to_string(c) +
                          " is not divisible by " + std::to_string(heads) + " heads");
    }
    const std::size_t head_dim = c / heads;
    const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(head_dim));

    Tensor q = linear(x, params.wq, params.bq);
    Tensor k = linear(x, params.wk, params.bk);
    Tensor v = linear(x, params.wv, params.bv);

    std::vector<Tensor> contexts;
    contexts.reserve(heads);
    for (std::size_t h = 0; h < heads; ++h) {
        Tensor qh = slice_cols(q, h * head_dim, head_dim);
        Tensor kh = slice_cols(k, h * head_dim, head_dim);
        Tensor vh = slice_cols(v, h * head_dim, head_dim);
        Tensor scores = scale(matmul_nt(qh, kh), inv_sqrt_dh);
        Tensor attn = softmax_rows(scores);
        contexts.push_back(matmul(attn, vh));
    }
    Tensor merged = heads == 1 ? contexts[0] : concat_cols(contexts);
    return linear(merged, params.wo, params.bo);
}

}  // namespace w2s
