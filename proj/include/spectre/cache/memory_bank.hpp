#pragma once

#include <cstddef>
#include <string>

#include "spectre/core/fft.hpp"

namespace spectre {

/// Never-evicted memory rows and their half spectrum, computed once.
template <typename T>
struct MemoryBank {
    Matrix<T> rows;             // N_mem x d
    HalfSpectrum<T> spectrum;   // rfft(rows, N_mem)

    std::size_t tokens() const noexcept { return rows.rows(); }
    std::size_t bytes() const noexcept { return (rows.size() + 2 * spectrum.coeffs.size()) * sizeof(T); }
};

template <typename T>
MemoryBank<T> memory_precompute(const Matrix<T>& m, std::size_t n_max) {
    const std::size_t n_mem = m.rows();
    require_power_of_two(n_mem, "N_mem");
    if (n_mem < 2) throw ConfigError("N_mem must be at least 2");
    if (n_mem > n_max / 4) {
        throw ConfigError("N_mem " + std::to_string(n_mem) + " exceeds N_max/4 = " + std::to_string(n_max / 4));
    }
    return {m, rfft(m, n_mem)};
}

}  // namespace spectre
