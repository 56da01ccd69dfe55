#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "spectre/bench/sweep.hpp"
#include "spectre/cache/prefix_cache.hpp"
#include "spectre/core/dft_oracle.hpp"
#include "spectre/core/wavelet.hpp"

namespace spectre {

struct CheckResult {
    std::string name;
    bool pass = false;
    double max_error = 0.0;
    double tolerance = 0.0;
};

struct VerifyOptions {
    std::size_t n_max = 256;
    std::size_t dim = 16;
    bool f64 = false;
    std::size_t coherence_steps = 10000;
    std::uint64_t seed = 42;
    bool corrupt_twiddles = false;  // negative control: perturbs one cached root
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
    }
};

inline std::ostream& operator<<(std::ostream& os, const VerifyReport& r) {
    for (const auto& c : r.checks) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-4s %-28s max_err=%.3e tol=%.1e", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                      c.max_error, c.tolerance);
        os << buf << '\n';
    }
    return os;
}

/// Head whose gate MLP emits exactly 1 in every bin (zero weights, unit
/// real bias), with identity projections.
template <typename T>
HeadWeights<T> identity_gate_head(const LayerConfig& cfg) {
    auto h = HeadWeights<T>::zeros(cfg);
    h.w_q = Matrix<T>::identity(cfg.head_dim);
    h.w_v = Matrix<T>::identity(cfg.head_dim);
    for (std::size_t k = 0; k < cfg.bins(); ++k) h.gate_out.bias[2 * k] = T{1};
    return h;
}

namespace detail {

template <typename T>
Matrix<T> uniform_matrix(std::size_t rows, std::size_t cols, SplitMix64& rng) {
    Matrix<T> m(rows, cols);
    for (auto& v : m.flat()) v = static_cast<T>(2.0 * rng.uniform() - 1.0);
    return m;
}

template <typename T>
std::vector<T> uniform_vector(std::size_t n, SplitMix64& rng) {
    std::vector<T> v(n);
    for (auto& x : v) x = static_cast<T>(2.0 * rng.uniform() - 1.0);
    return v;
}

}  // namespace detail

/// Runs every oracle suite once and reports the worst error of each.
template <typename T>
VerifyReport verify(const VerifyOptions& opt) {
    constexpr bool wide = std::is_same_v<T, double>;
    const std::size_t n_max = opt.n_max;
    const std::size_t d = opt.dim;
    require_power_of_two(n_max, "n_max");
    if (n_max < 8) throw ConfigError("verify: n_max must be at least 8");
    if (d == 0) throw ConfigError("verify: d must be positive");

    SplitMix64 rng(opt.seed);
    VerifyReport report;
    auto record = [&](std::string name, double err, double tol) {
        report.checks.push_back({std::move(name), err <= tol, err, tol});
    };

    {  // fast transform vs direct summation
        double worst = 0.0;
        for (std::size_t n : {8u, 64u, 256u}) {
            for (int trial = 0; trial < 20; ++trial) {
                const auto x = detail::uniform_matrix<T>(n, d, rng);
                const auto s = rfft(x, n);
                for (std::size_t c = 0; c < d; ++c) {
                    std::vector<double> col(n);
                    for (std::size_t r = 0; r < n; ++r) col[r] = static_cast<double>(x(r, c));
                    const auto ref = naive_dft(col);
                    for (std::size_t k = 0; k <= n / 2; ++k) {
                        const Complex<double> got{static_cast<double>(s.coeffs(k, c).real()),
                                                  static_cast<double>(s.coeffs(k, c).imag())};
                        worst = std::max(worst, std::abs(got - ref[k]));
                    }
                }
            }
        }
        record("rfft-vs-naive-dft", worst, wide ? 1e-10 : 1e-4);
    }
    {  // conjugate symmetry of the full spectrum
        double worst = 0.0;
        for (std::size_t n : {8u, 64u, 256u}) {
            const auto x = detail::uniform_vector<double>(n, rng);
            const auto X = naive_dft(x);
            for (std::size_t k = 1; k < n; ++k) worst = std::max(worst, std::abs(X[n - k] - std::conj(X[k])));
        }
        record("hermitian-symmetry", worst, 1e-10);
    }
    {
        double worst = 0.0;
        for (std::size_t n : {8u, 64u, 1024u}) {
            const auto x = detail::uniform_matrix<T>(n, d, rng);
            worst = std::max(worst, max_abs_diff(irfft(rfft(x, n)), x));
        }
        record("rfft-round-trip", worst, wide ? 1e-10 : 1e-5);
    }
    {
        double worst = 0.0;
        for (std::size_t n : {8u, 64u, 1024u}) {
            const auto x = detail::uniform_matrix<T>(n, d, rng);
            worst = std::max(worst, max_abs_diff(idwt_haar(dwt_haar(x, 3)), x));
        }
        record("dwt-round-trip", worst, wide ? 1e-10 : 1e-5);
    }

    LayerConfig cfg;
    cfg.head_dim = d;
    cfg.heads = 1;
    cfg.n_fft = n_max;
    cfg.toeplitz_radius = 2;
    cfg.wrm_enabled = false;
    const auto head = random_head_weights<T>(cfg, opt.seed + 1);

    auto table = std::make_shared<TwiddleTable<T>>(n_max);
    if (opt.corrupt_twiddles) table->corrupt_root(1, Complex<T>{T{1}, T{0}});
    std::shared_ptr<const TwiddleTable<T>> twiddles = table;

    {  // evict-and-update keeps the accumulator equal to a fresh transform
        const std::size_t prompt = std::min<std::size_t>(17, n_max / 2);
        auto res = prefill(detail::uniform_matrix<T>(prompt, d, rng), head, cfg, twiddles);
        auto& s = res.state;
        double worst = 0.0, worst_q = 0.0;
        const std::size_t probe = std::max<std::size_t>(1, opt.coherence_steps / 10);
        for (std::size_t step = 0; step < opt.coherence_steps; ++step) {
            const auto x = detail::uniform_vector<T>(d, rng);
            (void)decode_step<T>(s, x, head, cfg);
            if ((step + 1) % probe == 0 || step + 1 == opt.coherence_steps) {
                worst = std::max(worst, cache_coherence_error(s));
                worst_q = std::max(worst_q, descriptor_coherence_error(s));
            }
        }
        record("cache-coherence", worst, wide ? 1e-9 : 1e-3);
        record("descriptor-coherence", worst_q, wide ? 1e-10 : 1e-4);
    }
    {  // one-shot prefill vs prefill(1) + decode
        const auto x = detail::uniform_matrix<T>(n_max, d, rng);
        const auto full = prefill(x, head, cfg, twiddles).state;
        auto inc = prefill(row_block(x, 0, 1), head, cfg, twiddles).state;
        for (std::size_t r = 1; r < n_max; ++r) (void)decode_step<T>(inc, x.row(r), head, cfg);
        record("path-independence", cache_state_difference(full, inc), wide ? 1e-9 : 1e-4);
    }
    {  // unit gate: pad -> rfft -> irfft -> truncate is the identity
        const auto ident = identity_gate_head<T>(cfg);
        LayerConfig plain = cfg;
        plain.toeplitz_enabled = false;
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            const auto x = detail::uniform_matrix<T>(n_max, d, rng);
            auto [q, v] = project_qv(x, ident);
            worst = std::max(worst, max_abs_diff(head_forward(q, v, ident, plain), x));
        }
        record("identity-gate-transparency", worst, wide ? 1e-10 : 1e-5);
    }
    return report;
}

inline VerifyReport verify(const VerifyOptions& opt) {
    return opt.f64 ? verify<double>(opt) : verify<float>(opt);
}

}  // namespace spectre
