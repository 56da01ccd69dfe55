#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "spectre/layer/config.hpp"
#include "spectre/tensor.hpp"

namespace spectre {

/// Fully connected layer y = x W + b (W is in x out).
template <typename T>
struct Dense {
    Matrix<T> weight;
    std::vector<T> bias;

    Dense() = default;
    Dense(std::size_t in, std::size_t out) : weight(in, out), bias(out, T{0}) {}

    std::size_t in() const noexcept { return weight.rows(); }
    std::size_t out() const noexcept { return weight.cols(); }
    std::size_t parameter_count() const noexcept { return weight.size() + bias.size(); }
    bool empty() const noexcept { return weight.empty(); }

    std::vector<T> operator()(std::span<const T> x) const {
        auto y = vecmat<T>(x, weight);
        for (std::size_t j = 0; j < y.size(); ++j) y[j] += bias[j];
        return y;
    }

    bool operator==(const Dense&) const = default;
};

/// Parameters of one mixing head.
template <typename T>
struct HeadWeights {
    Matrix<T> w_q;  // d x d
    Matrix<T> w_v;  // d x d
    std::vector<T> ln_gain;  // descriptor LayerNorm
    std::vector<T> ln_bias;
    Dense<T> gate_in;   // d -> hidden
    Dense<T> gate_out;  // hidden -> 2 * bins, interleaved re/im
    std::vector<T> modrelu_bias;  // bins
    std::vector<Complex<T>> toeplitz_kernel;  // 2r + 1
    Dense<T> wrm_in;   // d -> hidden
    Dense<T> wrm_out;  // hidden -> (J + 1) * d
    T wrm_controller_logit{0};
    Dense<T> memory_gate;  // hidden -> 2 * memory bins; empty without memory

    /// Zero-initialised head with every tensor shaped for `cfg`.
    static HeadWeights zeros(const LayerConfig& cfg) {
        const std::size_t d = cfg.head_dim;
        const std::size_t h = cfg.hidden();
        HeadWeights w;
        w.w_q = Matrix<T>(d, d);
        w.w_v = Matrix<T>(d, d);
        w.ln_gain.assign(d, T{1});
        w.ln_bias.assign(d, T{0});
        w.gate_in = Dense<T>(d, h);
        w.gate_out = Dense<T>(h, 2 * cfg.bins());
        w.modrelu_bias.assign(cfg.bins(), T{0});
        w.toeplitz_kernel.assign(2 * cfg.toeplitz_radius + 1, Complex<T>{});
        w.wrm_in = Dense<T>(d, h);
        w.wrm_out = Dense<T>(h, static_cast<std::size_t>(cfg.wrm_levels + 1) * d);
        if (cfg.memory_tokens) w.memory_gate = Dense<T>(h, 2 * cfg.memory_bins());
        return w;
    }

    /// Parameters added on top of a plain projection head: gate MLP,
    /// modReLU bias, Toeplitz kernel (two reals per tap) and WRM MLP.
    std::size_t spectre_parameter_count() const noexcept {
        return gate_in.parameter_count() + gate_out.parameter_count() + modrelu_bias.size() +
               2 * toeplitz_kernel.size() + wrm_in.parameter_count() + wrm_out.parameter_count();
    }

    std::size_t parameter_count() const noexcept {
        return w_q.size() + w_v.size() + ln_gain.size() + ln_bias.size() + spectre_parameter_count() + 1 +
               memory_gate.parameter_count();
    }

    void validate(const LayerConfig& cfg) const {
        const auto ref = zeros(cfg);
        auto same = [](const Matrix<T>& a, const Matrix<T>& b) { return a.rows() == b.rows() && a.cols() == b.cols(); };
        auto same_dense = [&](const Dense<T>& a, const Dense<T>& b) {
            return same(a.weight, b.weight) && a.bias.size() == b.bias.size();
        };
        require_shape(same(w_q, ref.w_q) && same(w_v, ref.w_v), "head weights: projection shape mismatch");
        require_shape(ln_gain.size() == ref.ln_gain.size() && ln_bias.size() == ref.ln_bias.size(),
                      "head weights: layernorm shape mismatch");
        require_shape(same_dense(gate_in, ref.gate_in) && same_dense(gate_out, ref.gate_out),
                      "head weights: gate MLP shape mismatch");
        require_shape(modrelu_bias.size() == ref.modrelu_bias.size(), "head weights: modReLU bias length mismatch");
        require_shape(toeplitz_kernel.size() == ref.toeplitz_kernel.size(), "head weights: Toeplitz kernel length mismatch");
        require_shape(same_dense(wrm_in, ref.wrm_in) && same_dense(wrm_out, ref.wrm_out),
                      "head weights: WRM MLP shape mismatch");
        require_shape(same_dense(memory_gate, ref.memory_gate), "head weights: memory gate shape mismatch");
    }

    bool operator==(const HeadWeights&) const = default;
};

/// All heads of one mixing layer plus the concat output projection.
template <typename T>
struct LayerWeights {
    std::vector<HeadWeights<T>> heads;
    Matrix<T> w_o;  // (H d) x (H d)

    static LayerWeights zeros(const LayerConfig& cfg) {
        LayerWeights w;
        w.heads.assign(cfg.heads, HeadWeights<T>::zeros(cfg));
        w.w_o = Matrix<T>(cfg.model_dim(), cfg.model_dim());
        return w;
    }

    void validate(const LayerConfig& cfg) const {
        require_shape(heads.size() == cfg.heads, "layer weights: head count mismatch");
        for (const auto& h : heads) h.validate(cfg);
        require_shape(w_o.rows() == cfg.model_dim() && w_o.cols() == cfg.model_dim(),
                      "layer weights: output projection shape mismatch");
    }

    bool operator==(const LayerWeights&) const = default;
};

}  // namespace spectre
