#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "spectre/errors.hpp"

namespace spectre {

enum class Kernel { spectre, spectre_no_lr, spectre_no_wrm, naive_attention };

inline std::string_view to_string(Kernel k) {
    switch (k) {
        case Kernel::spectre: return "spectre";
        case Kernel::spectre_no_lr: return "spectre-no-lr";
        case Kernel::spectre_no_wrm: return "spectre-no-wrm";
        case Kernel::naive_attention: return "naive-attention";
    }
    return "spectre";
}

inline Kernel parse_kernel(std::string_view s) {
    if (s == "spectre") return Kernel::spectre;
    if (s == "spectre-no-lr") return Kernel::spectre_no_lr;
    if (s == "spectre-no-wrm") return Kernel::spectre_no_wrm;
    if (s == "naive-attention") return Kernel::naive_attention;
    throw ConfigError("unknown kernel '" + std::string(s) + "'");
}

struct SweepRow {
    std::string kernel;
    std::size_t L = 0;
    double median_latency_ms = 0.0;
    double throughput_tok_per_s = 0.0;
    double ttft_ms = 0.0;
    double tpot_ms = 0.0;
    std::size_t bytes_state = 0;
};

/// Median of a non-empty sample (mean of the middle pair for even sizes).
inline double median(std::vector<double> v) {
    if (v.empty()) throw InsufficientData("median of empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace spectre
