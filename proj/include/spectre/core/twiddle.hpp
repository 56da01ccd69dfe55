#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "spectre/core/fft.hpp"

namespace spectre {

/// Twiddle factors exp(-j 2 pi k t / N) for k in [0, N/2] and any integer t.
///
/// Every entry is one of the N roots of unity, so only those N values are
/// stored and (k, t) is mapped to the root index (k * t) mod N. This keeps
/// the table O(N) while exposing the full (N/2+1) x N view.
template <typename T>
class TwiddleTable {
public:
    TwiddleTable() = default;

    explicit TwiddleTable(std::size_t n) : n_(n) {
        require_power_of_two(n, "twiddle table length");
        roots_.resize(n);
        for (std::size_t m = 0; m < n; ++m) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
            roots_[m] = {static_cast<T>(std::cos(angle)), static_cast<T>(std::sin(angle))};
        }
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t bins() const noexcept { return n_ / 2 + 1; }

    /// Index into the root table for bin k at time t (t may be negative).
    std::size_t index(std::int64_t k, std::int64_t t) const noexcept {
        const auto n = static_cast<std::int64_t>(n_);
        const std::int64_t km = ((k % n) + n) % n;
        const std::int64_t tm = ((t % n) + n) % n;
        return static_cast<std::size_t>((km * tm) % n);
    }

    Complex<T> operator()(std::int64_t k, std::int64_t t) const noexcept { return roots_[index(k, t)]; }

    /// exp(-j 2 pi m / N)
    const Complex<T>& root(std::size_t m) const noexcept { return roots_[m % n_]; }

    std::size_t bytes() const noexcept { return roots_.size() * sizeof(Complex<T>); }

    /// Test hook: overwrite one stored root. Used to build negative controls
    /// for the cache coherence check.
    void corrupt_root(std::size_t m, Complex<T> value) { roots_[m % n_] = value; }

private:
    std::size_t n_ = 0;
    std::vector<Complex<T>> roots_;
};

template <typename T = double>
TwiddleTable<T> twiddle_table(std::size_t n) {
    return TwiddleTable<T>(n);
}

}  // namespace spectre
