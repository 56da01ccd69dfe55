#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "spectre/core/activation.hpp"
#include "spectre/core/fft.hpp"
#include "spectre/layer/config.hpp"
#include "spectre/layer/weights.hpp"

namespace spectre {

/// LayerNorm'd mean query of a head.
template <typename T>
struct Descriptor {
    std::vector<T> values;
};

/// One complex multiplier per half-spectrum bin.
template <typename T>
struct GateVector {
    std::vector<Complex<T>> values;

    std::size_t size() const noexcept { return values.size(); }
    Complex<T>& operator[](std::size_t k) noexcept { return values[k]; }
    const Complex<T>& operator[](std::size_t k) const noexcept { return values[k]; }
};

/// LN(sum / divisor). Prefill passes the token count, decode passes N_max.
template <typename T>
Descriptor<T> descriptor_from_sum(std::span<const T> sum, T divisor, const HeadWeights<T>& w) {
    std::vector<T> mean(sum.begin(), sum.end());
    for (auto& v : mean) v /= divisor;
    return {layer_norm<T>(mean, w.ln_gain, w.ln_bias)};
}

template <typename T>
Descriptor<T> global_descriptor(const Matrix<T>& q, const HeadWeights<T>& w) {
    if (q.rows() == 0) throw ShapeError("global_descriptor: no tokens");
    std::vector<T> sum(q.cols(), T{0});
    for (std::size_t r = 0; r < q.rows(); ++r) {
        for (std::size_t c = 0; c < q.cols(); ++c) sum[c] += q(r, c);
    }
    return descriptor_from_sum<T>(sum, static_cast<T>(q.rows()), w);
}

/// Hidden activations of the gate MLP; shared by the window and memory gates.
template <typename T>
std::vector<T> gate_hidden(const Descriptor<T>& q_bar, const HeadWeights<T>& w) {
    auto h = w.gate_in(q_bar.values);
    for (auto& v : h) v = gelu(v);
    return h;
}

/// Pairs (re, im) of an interleaved real vector.
template <typename T>
std::vector<Complex<T>> interleaved_to_complex(std::span<const T> raw) {
    std::vector<Complex<T>> out(raw.size() / 2);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = {raw[2 * k], raw[2 * k + 1]};
    return out;
}

/// g + (t * g): centred complex convolution along the frequency axis with
/// zero padding outside the available bins.
template <typename T>
std::vector<Complex<T>> toeplitz_update(std::span<const Complex<T>> g, std::span<const Complex<T>> kernel) {
    const auto bins = static_cast<std::int64_t>(g.size());
    const auto taps = static_cast<std::int64_t>(kernel.size());
    const std::int64_t r = taps / 2;
    std::vector<Complex<T>> out(g.begin(), g.end());
    for (std::int64_t k = 0; k < bins; ++k) {
        Complex<T> acc{};
        for (std::int64_t i = 0; i < taps; ++i) {
            const std::int64_t src = k + r - i;
            if (src < 0 || src >= bins) continue;
            acc += kernel[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(src)];
        }
        out[static_cast<std::size_t>(k)] += acc;
    }
    return out;
}

/// Second MLP layer -> optional Toeplitz update -> modReLU. No positional phase.
template <typename T>
GateVector<T> gate_from_hidden(std::span<const T> hidden, const HeadWeights<T>& w, const LayerConfig& cfg) {
    const auto raw = w.gate_out(hidden);
    auto g = interleaved_to_complex<T>(raw);
    require_shape(g.size() == cfg.bins(), "gate MLP emits " + std::to_string(g.size()) + " bins, expected " +
                                              std::to_string(cfg.bins()));
    if (cfg.toeplitz_enabled) g = toeplitz_update<T>(g, w.toeplitz_kernel);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = mod_relu(g[k], w.modrelu_bias[k]);
    return {std::move(g)};
}

template <typename T>
GateVector<T> gate_from_descriptor(const Descriptor<T>& q_bar, const HeadWeights<T>& w, const LayerConfig& cfg) {
    const auto hidden = gate_hidden(q_bar, w);
    return gate_from_hidden<T>(hidden, w, cfg);
}

/// g_k <- g_k * exp(j 2 pi k p / n). Any integer p is accepted; the phase
/// is periodic in p with period n.
template <typename T>
GateVector<T> apply_positional_phase(GateVector<T> g, std::int64_t p, std::size_t n) {
    const auto nn = static_cast<std::int64_t>(n);
    const std::int64_t pm = ((p % nn) + nn) % nn;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const std::int64_t m = (static_cast<std::int64_t>(k % n) * pm) % nn;
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
        g[k] *= Complex<T>{static_cast<T>(std::cos(angle)), static_cast<T>(std::sin(angle))};
    }
    return g;
}

/// Row k of the result is g_k times row k of s.
template <typename T>
HalfSpectrum<T> apply_gate(const HalfSpectrum<T>& s, const GateVector<T>& g) {
    require_shape(s.bins() == g.size(), "apply_gate: spectrum has " + std::to_string(s.bins()) +
                                            " bins, gate has " + std::to_string(g.size()));
    HalfSpectrum<T> out = s;
    for (std::size_t k = 0; k < s.bins(); ++k) {
        for (auto& v : out.coeffs.row(k)) v *= g[k];
    }
    return out;
}

}  // namespace spectre
