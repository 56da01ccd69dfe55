#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "spectre/tensor.hpp"

namespace spectre {

/// modReLU(z) = ReLU(|z| + b) * z / |z|, with modReLU(0) = 0.
template <typename T>
Complex<T> mod_relu(Complex<T> z, T b) {
    const T mag = std::abs(z);
    if (mag == T{0}) return {T{0}, T{0}};
    const T biased = mag + b;
    if (!(biased > T{0})) return {T{0}, T{0}};
    return z * (biased / mag);
}

/// Exact (erf-based) GELU.
template <typename T>
T gelu(T x) {
    return static_cast<T>(0.5) * x * (T{1} + std::erf(x / std::numbers::sqrt2_v<T>));
}

inline constexpr double kLayerNormEps = 1e-5;

/// LayerNorm over one vector with population variance and eps = 1e-5.
/// A constant input normalizes to the bias.
template <typename T>
std::vector<T> layer_norm(std::span<const T> x, std::span<const T> gain, std::span<const T> bias) {
    require_shape(x.size() == gain.size() && x.size() == bias.size(), "layer_norm: parameter length mismatch");
    const std::size_t n = x.size();
    T mean{0};
    for (T v : x) mean += v;
    mean /= static_cast<T>(n);
    T var{0};
    for (T v : x) var += (v - mean) * (v - mean);
    var /= static_cast<T>(n);
    const T inv = T{1} / std::sqrt(var + static_cast<T>(kLayerNormEps));
    std::vector<T> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = gain[i] * ((x[i] - mean) * inv) + bias[i];
    return out;
}

/// Row-wise LayerNorm of a token matrix.
template <typename T>
Matrix<T> layer_norm_rows(const Matrix<T>& x, std::span<const T> gain, std::span<const T> bias) {
    Matrix<T> out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto y = layer_norm<T>(x.row(r), gain, bias);
        std::copy(y.begin(), y.end(), out.row(r).begin());
    }
    return out;
}

}  // namespace spectre
