#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spectre/cache/memory_bank.hpp"
#include "spectre/core/fft.hpp"
#include "spectre/core/twiddle.hpp"
#include "spectre/layer/mixer.hpp"

namespace spectre {

/// Per-head Prefix-FFT cache.
///
/// `prefix_fft` is the half spectrum of the ring buffer `v_buf` read in slot
/// order (slot i holds the token with t mod N_max == i). Every decode step
/// keeps that relation exact up to rounding by removing the evicted token's
/// contribution and adding the new one at the same twiddle.
template <typename T>
struct CacheState {
    std::size_t n_max = 0;
    std::size_t dim = 0;
    HalfSpectrum<T> prefix_fft;
    Matrix<T> v_buf;
    Matrix<T> q_buf;
    std::vector<T> sum_q;
    std::uint64_t t = 0;
    std::shared_ptr<const TwiddleTable<T>> twiddles;
    std::shared_ptr<const MemoryBank<T>> memory;
    bool initialized = false;

    std::size_t live_length() const noexcept { return static_cast<std::size_t>(std::min<std::uint64_t>(t, n_max)); }

    /// Scalars held by the window state, counted from the live allocations.
    std::size_t state_scalars() const noexcept {
        return 2 * prefix_fft.coeffs.size() + v_buf.size() + q_buf.size() + sum_q.size();
    }
    /// (N_max/2+1)*d*2 + 2*N_max*d + d.
    static std::size_t expected_scalars(std::size_t n_max, std::size_t d) noexcept {
        return (n_max / 2 + 1) * d * 2 + 2 * n_max * d + d;
    }
    std::size_t state_bytes() const noexcept {
        std::size_t bytes = state_scalars() * sizeof(T);
        if (memory) bytes += memory->bytes();
        return bytes;
    }
    std::size_t twiddle_bytes() const noexcept { return twiddles ? twiddles->bytes() : 0; }
};

/// One bin of the evict-and-update rule, in place:
///   row <- row - [evict] v_old * w_old + v_new * w_new
/// with w_old = exp(-j 2 pi k (t - N)/N) and w_new = exp(-j 2 pi k t / N).
template <typename T>
void evict_update_row(std::span<Complex<T>> row, std::span<const T> v_old, std::span<const T> v_new, bool evict,
                      Complex<T> w_old, Complex<T> w_new) {
    for (std::size_t c = 0; c < row.size(); ++c) {
        if (evict) row[c] -= v_old[c] * w_old;
        row[c] += v_new[c] * w_new;
    }
}

/// Functional single-bin form over an explicit twiddle table.
template <typename T>
std::vector<Complex<T>> evict_update_bin(std::span<const Complex<T>> bin_row, std::span<const T> v_old,
                                         std::span<const T> v_new, std::int64_t t, std::int64_t k,
                                         const TwiddleTable<T>& twiddles) {
    const auto n = static_cast<std::int64_t>(twiddles.size());
    if (k < 0 || k > n / 2) throw ShapeError("evict_update_bin: bin " + std::to_string(k) + " out of range");
    require_shape(bin_row.size() == v_old.size() && bin_row.size() == v_new.size(),
                  "evict_update_bin: channel count mismatch");
    std::vector<Complex<T>> out(bin_row.begin(), bin_row.end());
    evict_update_row<T>(out, v_old, v_new, t >= n, twiddles(k, t - n), twiddles(k, t));
    return out;
}

template <typename T>
std::vector<Complex<T>> evict_update_bin(std::span<const Complex<T>> bin_row, std::span<const T> v_old,
                                         std::span<const T> v_new, std::int64_t t, std::int64_t k, std::size_t n_max) {
    return evict_update_bin<T>(bin_row, v_old, v_new, t, k, TwiddleTable<T>(n_max));
}

template <typename T>
struct PrefillResult {
    CacheState<T> state;
    Matrix<T> output;  // parallel-mode head output for the prompt
};

/// cfg.n_fft plays the role of N_max. `twiddles` may be supplied to share one
/// table across heads (or to inject a corrupted one in tests).
template <typename T>
PrefillResult<T> prefill(const Matrix<T>& x, const HeadWeights<T>& w, const LayerConfig& cfg,
                         std::shared_ptr<const TwiddleTable<T>> twiddles = nullptr) {
    const std::size_t n_max = cfg.n_fft;
    const std::size_t d = cfg.head_dim;
    if (x.rows() > n_max) {
        throw CapacityError("prefill: prompt length " + std::to_string(x.rows()) + " exceeds N_max " +
                            std::to_string(n_max));
    }
    require_shape(x.cols() == d, "prefill: token width mismatch");
    if (!twiddles) twiddles = std::make_shared<const TwiddleTable<T>>(n_max);
    require_shape(twiddles->size() == n_max, "prefill: twiddle table length mismatch");

    const std::size_t len = x.rows();
    PrefillResult<T> res;
    CacheState<T>& s = res.state;
    s.n_max = n_max;
    s.dim = d;
    s.v_buf = Matrix<T>(n_max, d);
    s.q_buf = Matrix<T>(n_max, d);
    s.sum_q.assign(d, T{0});
    s.twiddles = std::move(twiddles);
    s.t = len;
    s.initialized = true;

    if (len == 0) {
        s.prefix_fft = HalfSpectrum<T>(n_max, d);
        res.output = Matrix<T>(0, d);
        return res;
    }

    auto [q, v] = project_qv(x, w);
    s.prefix_fft = rfft(v, n_max);
    std::copy_n(v.data(), v.size(), s.v_buf.data());
    std::copy_n(q.data(), q.size(), s.q_buf.data());
    for (std::size_t r = 0; r < len; ++r) {
        for (std::size_t c = 0; c < d; ++c) s.sum_q[c] += q(r, c);
    }
    res.output = head_forward(q, v, w, cfg);
    return res;
}

template <typename T>
void attach_memory(CacheState<T>& s, std::shared_ptr<const MemoryBank<T>> bank) {
    if (!s.initialized) throw StateError("attach_memory: state not initialised by prefill");
    if (s.memory) throw StateError("attach_memory: memory bank already attached");
    if (!bank) throw StateError("attach_memory: null bank");
    require_shape(bank->rows.cols() == s.dim, "attach_memory: memory width mismatch");
    if (bank->tokens() > s.n_max / 4) throw ConfigError("attach_memory: N_mem exceeds N_max/4");
    s.memory = std::move(bank);
}

template <typename T>
void attach_memory(CacheState<T>& s, MemoryBank<T> bank) {
    attach_memory(s, std::make_shared<const MemoryBank<T>>(std::move(bank)));
}

/// Evict-and-update plus ring buffer and descriptor refresh for token
/// (q_t, v_t). Advances t. Split out so the state recurrence can be driven
/// without the gate and inverse transform.
template <typename T>
void advance_state(CacheState<T>& s, std::span<const T> q_t, std::span<const T> v_t) {
    const std::size_t n = s.n_max;
    const std::size_t slot = static_cast<std::size_t>(s.t % n);
    const bool evict = s.t >= n;
    const auto t = static_cast<std::int64_t>(s.t);
    const auto& tw = *s.twiddles;

    std::vector<T> v_old(s.dim, T{0});
    std::vector<T> q_old(s.dim, T{0});
    if (evict) {
        std::copy_n(s.v_buf.row(slot).begin(), s.dim, v_old.begin());
        std::copy_n(s.q_buf.row(slot).begin(), s.dim, q_old.begin());
    }
    const auto n_i = static_cast<std::int64_t>(n);
    for (std::size_t k = 0; k < s.prefix_fft.bins(); ++k) {
        const auto kk = static_cast<std::int64_t>(k);
        evict_update_row<T>(s.prefix_fft.coeffs.row(k), v_old, v_t, evict, tw(kk, t - n_i), tw(kk, t));
    }
    std::copy(v_t.begin(), v_t.end(), s.v_buf.row(slot).begin());
    std::copy(q_t.begin(), q_t.end(), s.q_buf.row(slot).begin());
    for (std::size_t c = 0; c < s.dim; ++c) s.sum_q[c] += q_t[c] - q_old[c];
    ++s.t;
}

/// One autoregressive step for a single head. Returns the live context:
/// the last min(t+1, N_max) rows of the gated window, preceded by the
/// N_mem memory rows when a bank is attached.
template <typename T>
Matrix<T> decode_step(CacheState<T>& s, std::span<const T> x_t, const HeadWeights<T>& w, const LayerConfig& cfg) {
    if (!s.initialized) throw StateError("decode_step: state not initialised by prefill");
    require_shape(x_t.size() == s.dim, "decode_step: token width mismatch");
    require_shape(cfg.n_fft == s.n_max, "decode_step: layer n_fft differs from cache N_max");

    const auto q_t = vecmat<T>(x_t, w.w_q);
    const auto v_t = vecmat<T>(x_t, w.w_v);
    const std::uint64_t t = s.t;
    advance_state<T>(s, q_t, v_t);

    const auto q_bar = descriptor_from_sum<T>(s.sum_q, static_cast<T>(s.n_max), w);
    const auto hidden = gate_hidden(q_bar, w);
    auto g = gate_from_hidden<T>(hidden, w, cfg);
    g = apply_positional_phase(std::move(g), static_cast<std::int64_t>(t % s.n_max), s.n_max);

    auto window = irfft(apply_gate(s.prefix_fft, g));
    if (cfg.wrm_enabled) window = wrm_forward(window, q_bar, w, cfg);

    const std::size_t live = static_cast<std::size_t>(std::min<std::uint64_t>(t + 1, s.n_max));
    if (!s.memory) return row_block(window, s.n_max - live, live);

    if (w.memory_gate.empty()) throw ConfigError("decode_step: memory attached but head has no memory gate");
    const auto raw = w.memory_gate(hidden);
    GateVector<T> g_mem{interleaved_to_complex<T>(raw)};
    const auto mem_out = irfft(apply_gate(s.memory->spectrum, g_mem));
    Matrix<T> out(mem_out.rows() + live, s.dim);
    std::copy_n(mem_out.data(), mem_out.size(), out.data());
    std::copy_n(window.data() + (s.n_max - live) * s.dim, live * s.dim, out.data() + mem_out.size());
    return out;
}

/// Max |prefix_fft - rfft(v_buf)| over all bins and channels.
template <typename T>
double cache_coherence_error(const CacheState<T>& s) {
    const auto fresh = rfft(s.v_buf, s.n_max);
    return max_abs_diff(s.prefix_fft.coeffs, fresh.coeffs);
}

/// Max |sum_q - column sums of the occupied q_buf slots|.
template <typename T>
double descriptor_coherence_error(const CacheState<T>& s) {
    double worst = 0.0;
    const std::size_t live = s.live_length();
    for (std::size_t c = 0; c < s.dim; ++c) {
        double col = 0.0;
        for (std::size_t r = 0; r < live; ++r) col += static_cast<double>(s.q_buf(r, c));
        worst = std::max(worst, std::abs(col - static_cast<double>(s.sum_q[c])));
    }
    return worst;
}

/// Largest field-wise difference between two cache states.
template <typename T>
double cache_state_difference(const CacheState<T>& a, const CacheState<T>& b) {
    if (a.t != b.t || a.n_max != b.n_max || a.dim != b.dim) return std::numeric_limits<double>::infinity();
    double worst = max_abs_diff(a.prefix_fft.coeffs, b.prefix_fft.coeffs);
    worst = std::max(worst, max_abs_diff(a.v_buf, b.v_buf));
    worst = std::max(worst, max_abs_diff(a.q_buf, b.q_buf));
    for (std::size_t c = 0; c < a.sum_q.size(); ++c) {
        worst = std::max(worst, static_cast<double>(std::abs(a.sum_q[c] - b.sum_q[c])));
    }
    return worst;
}

}  // namespace spectre
