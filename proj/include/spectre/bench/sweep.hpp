#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "spectre/bench/types.hpp"
#include "spectre/model/generate.hpp"

namespace spectre {

struct SweepSpec {
    std::vector<std::size_t> lengths;
    std::vector<Kernel> kernels;
    int repeats = 3;
    int warmup = 1;
    std::size_t decode_steps = 0;
    bool parallel = false;
    std::size_t threads = 0;  // 0 = hardware concurrency; SPECTRE_THREADS caps either

    void validate(std::size_t n_max) const {
        if (lengths.empty()) throw ConfigError("sweep: no lengths");
        if (kernels.empty()) throw ConfigError("sweep: no kernels");
        if (repeats < 3) throw ConfigError("sweep: repeats must be >= 3");
        if (warmup < 0) throw ConfigError("sweep: warmup must be >= 0");
        for (std::size_t i = 0; i < lengths.size(); ++i) {
            if (lengths[i] == 0) throw ConfigError("sweep: lengths must be positive");
            if (i && lengths[i] <= lengths[i - 1]) throw ConfigError("sweep: lengths must be strictly increasing");
        }
        const bool cached = std::any_of(kernels.begin(), kernels.end(),
                                        [](Kernel k) { return k != Kernel::naive_attention; });
        if (cached && lengths.back() > n_max) {
            throw CapacityError("sweep: length " + std::to_string(lengths.back()) + " exceeds N_max " +
                                std::to_string(n_max));
        }
    }
};

/// Worker count: the requested value (else the hardware), capped by
/// $SPECTRE_THREADS when set.
inline std::size_t worker_threads(std::size_t requested = 0) {
    std::size_t n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SPECTRE_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
    }
    return n;
}

/// Model config for one sweep cell. The FFT window is the smallest power
/// of two holding L tokens (never below what WRM and the memory bank need),
/// so the gate size tracks the sequence length being measured.
inline ModelConfig cell_config(const ModelConfig& base, Kernel kernel, std::size_t length) {
    ModelConfig cfg = base;
    std::size_t floor = std::size_t{1} << std::max(1, cfg.wrm_levels);
    if (cfg.memory_tokens) floor = std::max(floor, 4 * cfg.memory_tokens);
    cfg.n_max = std::max<std::size_t>(std::bit_ceil(length), floor);
    cfg.mixer = kernel == Kernel::naive_attention ? MixerKind::attention : MixerKind::spectre;
    if (kernel == Kernel::spectre_no_lr) cfg.toeplitz_enabled = false;
    if (kernel == Kernel::spectre_no_wrm) cfg.wrm_enabled = false;
    return cfg;
}

/// Deterministic N(0,1) token matrix for a given seed.
template <typename T>
Matrix<T> random_tokens(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Matrix<T> m(rows, cols);
    for (auto& v : m.flat()) v = static_cast<T>(rng.normal());
    return m;
}

template <typename T>
SweepRow run_cell(Kernel kernel, std::size_t length, const SweepSpec& spec, const ModelConfig& base) {
    const auto cfg = cell_config(base, kernel, length);
    const auto weights = init_random<T>(cfg);
    const auto x = random_tokens<T>(length, cfg.d_model(), base.seed ^ (0x5EEDULL * length));

    for (int i = 0; i < spec.warmup; ++i) (void)model_forward(x, weights);
    std::vector<double> latency, ttft, tpot;
    std::size_t state_bytes = 0;
    for (int i = 0; i < spec.repeats; ++i) {
        const auto t0 = Clock::now();
        const auto y = model_forward(x, weights);
        latency.push_back(elapsed_ms(t0));
        (void)y;
    }
    for (int i = 0; i < spec.repeats; ++i) {
        const auto g = stream_generate(weights, x, spec.decode_steps);
        ttft.push_back(g.report.ttft_ms);
        tpot.push_back(g.report.tpot_ms);
        state_bytes = std::max(state_bytes, g.report.peak_state_bytes);
    }
    SweepRow row;
    row.kernel = std::string(to_string(kernel));
    row.L = length;
    row.median_latency_ms = median(latency);
    row.throughput_tok_per_s = row.median_latency_ms > 0 ? 1000.0 * static_cast<double>(length) / row.median_latency_ms : 0.0;
    row.ttft_ms = median(ttft);
    row.tpot_ms = median(tpot);
    row.bytes_state = state_bytes;
    return row;
}

/// Rows are ordered kernel-major, then by length. `base.n_max` caps the
/// lengths accepted for the cached (spectral) kernels.
template <typename T>
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const ModelConfig& base) {
    spec.validate(base.n_max);
    struct Cell {
        Kernel kernel;
        std::size_t length;
    };
    std::vector<Cell> cells;
    for (auto k : spec.kernels) {
        for (auto l : spec.lengths) cells.push_back({k, l});
    }
    std::vector<SweepRow> rows(cells.size());
    if (!spec.parallel) {
        for (std::size_t i = 0; i < cells.size(); ++i) rows[i] = run_cell<T>(cells[i].kernel, cells[i].length, spec, base);
        return rows;
    }

    // cross-cell interference distorts timings; opt-in only
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const std::size_t n_threads = std::min(worker_threads(spec.threads), cells.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < cells.size(); i = next++) {
                try {
                    rows[i] = run_cell<T>(cells[i].kernel, cells[i].length, spec, base);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return rows;
}

}  // namespace spectre
