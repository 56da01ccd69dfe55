#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "spectre/cache/prefix_cache.hpp"
#include "spectre/model/block.hpp"

namespace spectre {

struct BenchReport {
    double ttft_ms = 0.0;
    double tpot_ms = 0.0;
    double throughput_tok_per_s = 0.0;  // generated tokens per second of decode
    std::size_t seq_len = 0;            // prompt length
    std::string kernel_name;
    std::size_t peak_state_bytes = 0;
    std::size_t generated_tokens = 0;
    double decode_ms = 0.0;
};

template <typename T>
struct GenerateResult {
    Matrix<T> prefill_output;        // L x d_model, after the final LayerNorm
    Matrix<T> tokens;                // steps x d_model, one generated row per step
    std::vector<std::int64_t> token_ids;  // vocab mode only
    std::vector<Matrix<T>> windows;  // last layer's mixed live context per step (if requested)
    std::vector<double> step_ms;     // wall time of every decode step
    BenchReport report;
};

using Clock = std::chrono::steady_clock;

inline double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

/// Streaming state for one sequence: a CacheState per (layer, head) for the
/// spectral mixer, or a growing KV store for the attention baseline.
template <typename T>
class StreamSession {
public:
    explicit StreamSession(const ModelWeights<T>& w) : w_(w), lc_(w.config.layer_config()) {
        w_.config.validate();
    }

    /// Runs the prompt through every block and initialises the caches.
    /// Returns the final-LayerNorm output for all prompt rows.
    Matrix<T> prefill(const Matrix<T>& prompt) {
        const auto& cfg = w_.config;
        require_shape(prompt.cols() == cfg.d_model(), "prefill: prompt width mismatch");
        if (cfg.mixer == MixerKind::spectre && prompt.rows() > cfg.n_max) {
            throw CapacityError("prompt length " + std::to_string(prompt.rows()) + " exceeds N_max " +
                                std::to_string(cfg.n_max));
        }
        auto twiddles = std::make_shared<const TwiddleTable<T>>(cfg.n_max);
        states_.assign(cfg.n_layers, {});
        kv_.assign(cfg.n_layers, {});
        Matrix<T> h = prompt;
        for (std::size_t l = 0; l < cfg.n_layers; ++l) {
            const auto& b = w_.blocks[l];
            const auto xn = layer_norm_rows<T>(h, b.ln1_gain, b.ln1_bias);
            std::vector<Matrix<T>> outs;
            for (std::size_t hd = 0; hd < cfg.heads; ++hd) {
                const auto xh = column_block(xn, hd * cfg.head_dim, cfg.head_dim);
                const auto& head = b.mixer.heads[hd];
                if (cfg.mixer == MixerKind::spectre) {
                    auto res = spectre::prefill(xh, head, lc_, twiddles);
                    if (cfg.memory_tokens) {
                        attach_memory(res.state, memory_precompute(b.memory_rows[hd], cfg.n_max));
                    }
                    states_[l].push_back(std::move(res.state));
                    outs.push_back(std::move(res.output));
                } else {
                    auto [q, v] = project_qv(xh, head);
                    AttentionCache<T> kv(cfg.head_dim);
                    for (std::size_t r = 0; r < q.rows(); ++r) kv.append(q.row(r), v.row(r));
                    kv_[l].push_back(std::move(kv));
                    outs.push_back(causal_attention(q, q, v));
                }
            }
            h = block_finish(h, merge_heads(outs, b.mixer.w_o), b);
        }
        return layer_norm_rows<T>(h, w_.final_ln_gain, w_.final_ln_bias);
    }

    /// Feeds one token row through every block. When `window` is non-null
    /// it receives the last block's mixed live context.
    std::vector<T> step(std::span<const T> x_in, Matrix<T>* window = nullptr) {
        const auto& cfg = w_.config;
        require_shape(x_in.size() == cfg.d_model(), "step: token width mismatch");
        std::vector<T> x(x_in.begin(), x_in.end());
        for (std::size_t l = 0; l < cfg.n_layers; ++l) {
            const auto& b = w_.blocks[l];
            const auto xn = layer_norm<T>(x, b.ln1_gain, b.ln1_bias);
            std::vector<Matrix<T>> outs;
            for (std::size_t hd = 0; hd < cfg.heads; ++hd) {
                const std::span<const T> xh(xn.data() + hd * cfg.head_dim, cfg.head_dim);
                const auto& head = b.mixer.heads[hd];
                if (cfg.mixer == MixerKind::spectre) {
                    outs.push_back(decode_step(states_[l][hd], xh, head, lc_));
                } else {
                    const auto q = vecmat<T>(xh, head.w_q);
                    const auto v = vecmat<T>(xh, head.w_v);
                    kv_[l][hd].append(q, v);
                    const auto o = kv_[l][hd].attend(q);
                    Matrix<T> row(1, cfg.head_dim);
                    std::copy(o.begin(), o.end(), row.data());
                    outs.push_back(std::move(row));
                }
            }
            const bool emit = window && l + 1 == cfg.n_layers;
            if (!emit) {
                // only the current token's row is needed downstream
                for (auto& o : outs) o = row_block(o, o.rows() - 1, 1);
            }
            const auto mixed = merge_heads(outs, b.mixer.w_o);
            if (emit) *window = mixed;
            Matrix<T> xm(1, cfg.d_model());
            std::copy(x.begin(), x.end(), xm.data());
            const auto out = block_finish(xm, row_block(mixed, mixed.rows() - 1, 1), b);
            std::copy(out.data(), out.data() + out.size(), x.begin());
        }
        return layer_norm<T>(x, w_.final_ln_gain, w_.final_ln_bias);
    }

    const std::vector<std::vector<CacheState<T>>>& states() const noexcept { return states_; }

    std::size_t state_bytes() const noexcept {
        std::size_t bytes = 0;
        for (const auto& layer : states_) {
            for (const auto& s : layer) bytes += s.state_bytes();
        }
        if (!states_.empty() && !states_.front().empty()) bytes += states_.front().front().twiddle_bytes();
        for (const auto& layer : kv_) {
            for (const auto& kv : layer) bytes += kv.bytes();
        }
        return bytes;
    }

private:
    const ModelWeights<T>& w_;
    LayerConfig lc_;
    std::vector<std::vector<CacheState<T>>> states_;
    std::vector<std::vector<AttentionCache<T>>> kv_;
};

namespace detail {

template <typename T>
std::int64_t argmax_token(std::span<const T> row, const Matrix<T>& embedding) {
    std::int64_t best = 0;
    T best_score = -std::numeric_limits<T>::infinity();
    for (std::size_t v = 0; v < embedding.rows(); ++v) {
        T s{0};
        const auto e = embedding.row(v);
        for (std::size_t c = 0; c < row.size(); ++c) s += row[c] * e[c];
        if (s > best_score) {
            best_score = s;
            best = static_cast<std::int64_t>(v);
        }
    }
    return best;
}

template <typename T>
GenerateResult<T> run_generation(const ModelWeights<T>& w, const Matrix<T>& prompt, std::size_t steps,
                                 bool vocab_mode, bool keep_windows) {
    const auto& cfg = w.config;
    GenerateResult<T> res;
    StreamSession<T> session(w);

    const auto t0 = Clock::now();
    res.prefill_output = session.prefill(prompt);
    res.report.ttft_ms = elapsed_ms(t0);

    res.tokens = Matrix<T>(steps, cfg.d_model());
    std::vector<T> next(cfg.d_model(), T{0});
    auto choose_next = [&](std::span<const T> out_row) {
        if (vocab_mode) {
            const auto id = argmax_token(out_row, w.embedding);
            res.token_ids.push_back(id);
            std::copy(w.embedding.row(static_cast<std::size_t>(id)).begin(),
                      w.embedding.row(static_cast<std::size_t>(id)).end(), next.begin());
        } else {
            std::copy(out_row.begin(), out_row.end(), next.begin());
        }
    };
    if (prompt.rows() > 0) choose_next(res.prefill_output.row(prompt.rows() - 1));

    double decode_total = 0.0;
    res.step_ms.reserve(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        Matrix<T> window;
        const auto ts = Clock::now();
        const auto out = session.step(next, keep_windows ? &window : nullptr);
        const double ms = elapsed_ms(ts);
        res.step_ms.push_back(ms);
        decode_total += ms;
        std::copy(out.begin(), out.end(), res.tokens.row(s).begin());
        if (keep_windows) res.windows.push_back(std::move(window));
        choose_next(out);
    }

    auto& r = res.report;
    r.seq_len = prompt.rows();
    r.kernel_name = std::string(to_string(cfg.mixer));
    r.generated_tokens = steps;
    r.decode_ms = decode_total;
    r.tpot_ms = steps ? decode_total / static_cast<double>(steps) : 0.0;
    r.throughput_tok_per_s = decode_total > 0.0 ? 1000.0 * static_cast<double>(steps) / decode_total : 0.0;
    r.peak_state_bytes = session.state_bytes();
    return res;
}

}  // namespace detail

/// Raw-embedding mode: prefill on `prompt` (L x d_model), then `steps`
/// decode steps, each fed the previous output row.
template <typename T>
GenerateResult<T> stream_generate(const ModelWeights<T>& w, const Matrix<T>& prompt, std::size_t steps,
                                  bool keep_windows = false) {
    return detail::run_generation(w, prompt, steps, false, keep_windows);
}

/// Vocab mode: token ids are embedded, and each next id is the argmax of
/// the output row against the (tied) embedding table.
template <typename T>
GenerateResult<T> stream_generate_tokens(const ModelWeights<T>& w, std::span<const std::int64_t> prompt_ids,
                                         std::size_t steps, bool keep_windows = false) {
    if (w.config.vocab_size == 0 || w.embedding.empty()) throw ConfigError("vocab mode needs an embedding table");
    Matrix<T> prompt(prompt_ids.size(), w.config.d_model());
    for (std::size_t i = 0; i < prompt_ids.size(); ++i) {
        const auto id = prompt_ids[i];
        if (id < 0 || static_cast<std::size_t>(id) >= w.config.vocab_size) {
            throw InputError("token id " + std::to_string(id) + " outside vocabulary");
        }
        std::copy(w.embedding.row(static_cast<std::size_t>(id)).begin(),
                  w.embedding.row(static_cast<std::size_t>(id)).end(), prompt.row(i).begin());
    }
    return detail::run_generation(w, prompt, steps, true, keep_windows);
}

}  // namespace spectre
