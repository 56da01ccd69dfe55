#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "spectre/errors.hpp"
#include "spectre/tensor.hpp"

namespace spectre {

/// Direct O(N^2) DFT, X_k = sum_m x_m exp(-j 2 pi k m / N), k = 0..N-1.
/// Always evaluated in double precision; the reference the fast paths are
/// checked against.
inline std::vector<Complex<double>> naive_dft(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) throw InputError("naive_dft: empty input");
    for (double v : x) {
        if (!std::isfinite(v)) throw InputError("naive_dft: input contains NaN or Inf");
    }
    std::vector<Complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        Complex<double> acc{0.0, 0.0};
        for (std::size_t m = 0; m < n; ++m) {
            // reduce k*m first so the angle stays in [0, 2pi)
            const double angle =
                -2.0 * std::numbers::pi * static_cast<double>((k * m) % n) / static_cast<double>(n);
            acc += x[m] * Complex<double>{std::cos(angle), std::sin(angle)};
        }
        out[k] = acc;
    }
    return out;
}

}  // namespace spectre
