#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "spectre/layer/weights.hpp"
#include "spectre/model/config.hpp"

namespace spectre {

/// Pre-norm transformer block: mixer and FFN, each behind its own LayerNorm.
template <typename T>
struct BlockWeights {
    std::vector<T> ln1_gain, ln1_bias;
    LayerWeights<T> mixer;
    std::vector<T> ln2_gain, ln2_bias;
    Dense<T> ffn_in;   // d_model -> d_ffn
    Dense<T> ffn_out;  // d_ffn -> d_model
    std::vector<Matrix<T>> memory_rows;  // per head, N_mem x d; empty without memory

    bool operator==(const BlockWeights&) const = default;
};

template <typename T>
struct ModelWeights {
    ModelConfig config;
    std::vector<BlockWeights<T>> blocks;
    std::vector<T> final_ln_gain, final_ln_bias;
    Matrix<T> embedding;  // vocab x d_model, tied with the output head

    bool operator==(const ModelWeights&) const = default;
};

/// Named view of one tensor. `init_std` encodes the initialiser:
/// 0 -> zeros, negative -> ones, positive -> N(0, init_std^2).
template <typename T>
struct TensorView {
    std::string name;
    std::vector<std::uint64_t> shape;
    std::span<T> data;
    double init_std = 0.0;
};

namespace detail {

template <typename T, typename F>
void visit_dense(const std::string& name, Dense<T>& d, F&& f) {
    f(TensorView<T>{name + "/weight", {d.weight.rows(), d.weight.cols()}, d.weight.flat(),
                    1.0 / std::sqrt(static_cast<double>(d.weight.rows()))});
    f(TensorView<T>{name + "/bias", {d.bias.size()}, d.bias, 0.0});
}

template <typename T, typename F>
void visit_vector(const std::string& name, std::vector<T>& v, double init_std, F&& f) {
    f(TensorView<T>{name, {v.size()}, v, init_std});
}

template <typename T, typename F>
void visit_head(const std::string& p, HeadWeights<T>& h, F&& f) {
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(h.w_q.rows()));
    f(TensorView<T>{p + "/w_q", {h.w_q.rows(), h.w_q.cols()}, h.w_q.flat(), inv_sqrt_d});
    f(TensorView<T>{p + "/w_v", {h.w_v.rows(), h.w_v.cols()}, h.w_v.flat(), inv_sqrt_d});
    visit_vector(p + "/ln_gain", h.ln_gain, -1.0, f);
    visit_vector(p + "/ln_bias", h.ln_bias, 0.0, f);
    visit_dense(p + "/gate_in", h.gate_in, f);
    visit_dense(p + "/gate_out", h.gate_out, f);
    visit_vector(p + "/modrelu_bias", h.modrelu_bias, 0.0, f);
    // std::complex<T> is layout-compatible with T[2]
    std::span<T> kernel{reinterpret_cast<T*>(h.toeplitz_kernel.data()), 2 * h.toeplitz_kernel.size()};
    f(TensorView<T>{p + "/toeplitz_kernel", {h.toeplitz_kernel.size(), 2}, kernel,
                    1.0 / static_cast<double>(h.toeplitz_kernel.size())});
    visit_dense(p + "/wrm_in", h.wrm_in, f);
    visit_dense(p + "/wrm_out", h.wrm_out, f);
    f(TensorView<T>{p + "/wrm_controller_logit", {1}, std::span<T>(&h.wrm_controller_logit, 1), 0.0});
    if (!h.memory_gate.empty()) visit_dense(p + "/memory_gate", h.memory_gate, f);
}

}  // namespace detail

/// Calls f(TensorView) for every tensor in a fixed order. The order defines
/// both the random initialisation stream and the container layout.
template <typename T, typename F>
void for_each_tensor(ModelWeights<T>& w, F&& f) {
    const double inv_sqrt_model = 1.0 / std::sqrt(static_cast<double>(w.config.d_model()));
    for (std::size_t l = 0; l < w.blocks.size(); ++l) {
        auto& b = w.blocks[l];
        const std::string p = "layers/" + std::to_string(l);
        detail::visit_vector(p + "/ln1_gain", b.ln1_gain, -1.0, f);
        detail::visit_vector(p + "/ln1_bias", b.ln1_bias, 0.0, f);
        for (std::size_t h = 0; h < b.mixer.heads.size(); ++h) {
            detail::visit_head(p + "/heads/" + std::to_string(h), b.mixer.heads[h], f);
        }
        f(TensorView<T>{p + "/w_o", {b.mixer.w_o.rows(), b.mixer.w_o.cols()}, b.mixer.w_o.flat(), inv_sqrt_model});
        detail::visit_vector(p + "/ln2_gain", b.ln2_gain, -1.0, f);
        detail::visit_vector(p + "/ln2_bias", b.ln2_bias, 0.0, f);
        detail::visit_dense(p + "/ffn_in", b.ffn_in, f);
        detail::visit_dense(p + "/ffn_out", b.ffn_out, f);
        for (std::size_t h = 0; h < b.memory_rows.size(); ++h) {
            auto& m = b.memory_rows[h];
            f(TensorView<T>{p + "/memory/" + std::to_string(h), {m.rows(), m.cols()}, m.flat(),
                            1.0 / std::sqrt(static_cast<double>(m.cols()))});
        }
    }
    detail::visit_vector(std::string("final_ln_gain"), w.final_ln_gain, -1.0, f);
    detail::visit_vector(std::string("final_ln_bias"), w.final_ln_bias, 0.0, f);
    if (!w.embedding.empty()) {
        f(TensorView<T>{"embedding", {w.embedding.rows(), w.embedding.cols()}, w.embedding.flat(), 1.0});
    }
}

/// Correctly shaped weights, all zeros except LayerNorm gains (ones).
template <typename T>
ModelWeights<T> zero_weights(const ModelConfig& cfg) {
    cfg.validate();
    const auto lc = cfg.layer_config();
    const std::size_t dm = cfg.d_model();
    ModelWeights<T> w;
    w.config = cfg;
    w.blocks.resize(cfg.n_layers);
    for (auto& b : w.blocks) {
        b.ln1_gain.assign(dm, T{1});
        b.ln1_bias.assign(dm, T{0});
        b.mixer = LayerWeights<T>::zeros(lc);
        b.ln2_gain.assign(dm, T{1});
        b.ln2_bias.assign(dm, T{0});
        b.ffn_in = Dense<T>(dm, cfg.ffn_dim());
        b.ffn_out = Dense<T>(cfg.ffn_dim(), dm);
        if (cfg.memory_tokens) b.memory_rows.assign(cfg.heads, Matrix<T>(cfg.memory_tokens, cfg.head_dim));
    }
    w.final_ln_gain.assign(dm, T{1});
    w.final_ln_bias.assign(dm, T{0});
    if (cfg.vocab_size) w.embedding = Matrix<T>(cfg.vocab_size, dm);
    return w;
}

/// SplitMix64 stream with Box-Muller normals.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in (0, 1], 53 bits.
    double uniform() noexcept { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

namespace detail {

template <typename T>
void share_head_gates(LayerWeights<T>& layer) {
    const auto& src = layer.heads.front();
    for (std::size_t h = 1; h < layer.heads.size(); ++h) {
        auto& dst = layer.heads[h];
        dst.gate_in = src.gate_in;
        dst.gate_out = src.gate_out;
        dst.modrelu_bias = src.modrelu_bias;
        dst.toeplitz_kernel = src.toeplitz_kernel;
        dst.wrm_in = src.wrm_in;
        dst.wrm_out = src.wrm_out;
    }
}

}  // namespace detail

/// Deterministic initialisation: normal draws are taken in tensor order from
/// a SplitMix64 stream seeded with cfg.seed, computed in double and then
/// narrowed to T. Same config -> bit-identical weights.
template <typename T>
ModelWeights<T> init_random(const ModelConfig& cfg) {
    auto w = zero_weights<T>(cfg);
    SplitMix64 rng(cfg.seed);
    for_each_tensor(w, [&](const TensorView<T>& t) {
        for (auto& v : t.data) {
            if (t.init_std > 0.0) {
                v = static_cast<T>(rng.normal() * t.init_std);
            } else {
                v = t.init_std < 0.0 ? T{1} : T{0};
            }
        }
    });
    if (cfg.share_gates) {
        for (auto& b : w.blocks) detail::share_head_gates(b.mixer);
    }
    return w;
}

/// Random head for tests and benchmarks: same initialisers as init_random,
/// drawn from its own SplitMix64 stream.
template <typename T>
HeadWeights<T> random_head_weights(const LayerConfig& cfg, std::uint64_t seed) {
    auto h = HeadWeights<T>::zeros(cfg);
    SplitMix64 rng(seed);
    detail::visit_head(std::string("head"), h, [&](const TensorView<T>& t) {
        for (auto& v : t.data) {
            if (t.init_std > 0.0) {
                v = static_cast<T>(rng.normal() * t.init_std);
            } else {
                v = t.init_std < 0.0 ? T{1} : T{0};
            }
        }
    });
    return h;
}

struct ParameterTally {
    std::size_t total = 0;              // every stored parameter (shared gates counted once)
    std::size_t spectre_per_head = 0;   // gate MLP + modReLU bias + Toeplitz kernel + WRM MLP, one head
    std::size_t spectre_total = 0;      // the same summed over all heads and layers

    double per_head_ratio() const noexcept {
        return total ? static_cast<double>(spectre_per_head) / static_cast<double>(total) : 0.0;
    }
    double model_ratio() const noexcept {
        return total ? static_cast<double>(spectre_total) / static_cast<double>(total) : 0.0;
    }
};

template <typename T>
ParameterTally parameter_tally(const ModelWeights<T>& w) {
    ParameterTally tally;
    auto& mutable_w = const_cast<ModelWeights<T>&>(w);
    for_each_tensor(mutable_w, [&](const TensorView<T>& t) { tally.total += t.data.size(); });
    if (w.blocks.empty() || w.blocks.front().mixer.heads.empty()) return tally;
    tally.spectre_per_head = w.blocks.front().mixer.heads.front().spectre_parameter_count();
    const std::size_t copies_per_layer = w.config.share_gates ? 1 : w.config.heads;
    tally.spectre_total = tally.spectre_per_head * copies_per_layer * w.blocks.size();
    if (w.config.share_gates) {
        // duplicates of head 0's gate tensors are stored but not independent
        tally.total -= tally.spectre_per_head * (w.config.heads - 1) * w.blocks.size();
    }
    return tally;
}

}  // namespace spectre
