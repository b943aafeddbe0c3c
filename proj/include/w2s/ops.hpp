#pragma once

#include <cstddef>
#include <vector>

#include "w2s/tensor.hpp"

namespace w2s {

// Differentiable ops over Tensor. Every op builds the reverse-mode graph when
// grad tracking is on and any input requires grad. Inputs are never mutated.

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor abs(const Tensor& a);
Tensor sum_all(const Tensor& a);
Tensor gelu(const Tensor& a);

// y = x W + b over the trailing axis. x: [..., in], W: [in, out], b: [out].
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

// Valid (no padding) 1-D convolution. x: [C_in, L], w: [C_out, C_in, K].
// Output length floor((L - K)/stride) + 1.
Tensor conv1d(const Tensor& x, const Tensor& weight, std::size_t stride);

std::size_t conv1d_output_length(std::size_t length, std::size_t kernel, std::size_t stride);

// Per-position normalization over the trailing axis (population variance),
// then the affine map gain * x + shift.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift, double eps);

Tensor matmul(const Tensor& a, const Tensor& b);     // [M,K] x [K,N]
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // [M,K] x [N,K]^T

Tensor softmax_rows(const Tensor& x);
Tensor slice_cols(const Tensor& x, std::size_t start, std::size_t count);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor transpose2d(const Tensor& x);
Tensor mean_rows(const Tensor& x);  // [N,C] -> [C]

// Broadcast adds: b per row-channel of x [R,C] (b: [R]), or one row across
// all rows of x (row: [1,C]).
Tensor add_row_bias(const Tensor& x, const Tensor& bias);
Tensor add_broadcast_row(const Tensor& x, const Tensor& row);

struct AttentionParams {
    Tensor wq, bq;
    Tensor wk, bk;
    Tensor wv, bv;
    Tensor wo, bo;
};

// Scaled dot-product self-attention with `heads` heads over x [N, C].
// Per-head dimension C/heads; softmax over the key axis; heads concatenated
// and passed through the output projection. No positional term inside.
Tensor multi_head_self_attention(const Tensor& x, std::size_t heads, const AttentionParams& params);

}  // namespace w2s
