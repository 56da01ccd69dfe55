#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "spectre/errors.hpp"
#include "spectre/tensor.hpp"

namespace spectre {

inline bool is_power_of_two(std::size_t n) noexcept { return n != 0 && std::has_single_bit(n); }

inline void require_power_of_two(std::size_t n, const char* what) {
    if (!is_power_of_two(n)) {
        throw ConfigError(std::string(what) + " must be a power of two, got " + std::to_string(n));
    }
}

/// The non-redundant (n_fft/2 + 1) rows of a real-input DFT, one column per
/// channel. Imaginary parts of the DC and Nyquist rows are treated as zero
/// by the inverse transform.
template <typename T>
struct HalfSpectrum {
    ComplexMatrix<T> coeffs;
    std::size_t n_fft = 0;

    HalfSpectrum() = default;
    HalfSpectrum(std::size_t n, std::size_t channels) : coeffs(n / 2 + 1, channels), n_fft(n) {}
    HalfSpectrum(ComplexMatrix<T> c, std::size_t n) : coeffs(std::move(c)), n_fft(n) {}

    std::size_t bins() const noexcept { return coeffs.rows(); }
    std::size_t channels() const noexcept { return coeffs.cols(); }
};

/// Precomputed plan for a length-N real FFT (N a power of two, N >= 2).
///
/// The real sequence is packed into an N/2-point complex sequence
/// (even samples in the real part, odd samples in the imaginary part),
/// transformed with an iterative radix-2 FFT, and split into the half
/// spectrum with one extra twiddle pass. All twiddles are evaluated in
/// double precision before being narrowed to T.
template <typename T>
class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n), half_(n / 2) {
        require_power_of_two(n, "FFT length");
        if (n < 2) throw ConfigError("FFT length must be at least 2");

        const std::size_t m = half_;
        const int log2m = std::countr_zero(m);
        bitrev_.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t r = 0;
            for (int b = 0; b < log2m; ++b) r |= ((i >> b) & 1u) << (log2m - 1 - b);
            bitrev_[i] = r;
        }
        // roots of the half-length transform: exp(-j 2 pi i / m), i < m/2
        inner_.resize(m / 2);
        for (std::size_t i = 0; i < m / 2; ++i) inner_[i] = root(i, m);
        // split twiddles: exp(-j 2 pi k / n), k <= n/2
        split_.resize(m + 1);
        for (std::size_t k = 0; k <= m; ++k) split_[k] = root(k, n);
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t bins() const noexcept { return half_ + 1; }

    /// x.size() == n, out.size() == n/2 + 1. `scratch` must hold n/2 values.
    void forward(std::span<const T> x, std::span<Complex<T>> out, std::span<Complex<T>> scratch) const {
        const std::size_t m = half_;
        for (std::size_t i = 0; i < m; ++i) scratch[bitrev_[i]] = {x[2 * i], x[2 * i + 1]};
        butterflies(scratch);

        const T half{0.5};
        for (std::size_t k = 0; k <= m; ++k) {
            const Complex<T> zk = scratch[k % m];
            const Complex<T> zc = std::conj(scratch[(m - k) % m]);
            const Complex<T> even = (zk + zc) * half;
            const Complex<T> diff = (zk - zc) * half;
            const Complex<T> odd{diff.imag(), -diff.real()};  // diff / j
            out[k] = even + split_[k] * odd;
        }
    }

    /// spec.size() == n/2 + 1, out.size() == n. Includes the 1/n factor.
    void inverse(std::span<const Complex<T>> spec, std::span<T> out, std::span<Complex<T>> scratch) const {
        const std::size_t m = half_;
        auto bin = [&](std::size_t k) -> Complex<T> {
            if (k == 0 || k == m) return {spec[k].real(), T{0}};
            return spec[k];
        };
        const T half{0.5};
        for (std::size_t k = 0; k < m; ++k) {
            const Complex<T> xk = bin(k);
            const Complex<T> xc = std::conj(bin(m - k));
            const Complex<T> even = (xk + xc) * half;
            const Complex<T> odd = (xk - xc) * std::conj(split_[k]) * half;
            // Z_k = E_k + j O_k, stored conjugated so the forward butterflies
            // compute the inverse transform.
            const Complex<T> z{even.real() - odd.imag(), even.imag() + odd.real()};
            scratch[bitrev_[k]] = std::conj(z);
        }
        butterflies(scratch);
        const T scale = T{1} / static_cast<T>(m);
        for (std::size_t i = 0; i < m; ++i) {
            const Complex<T> z = std::conj(scratch[i]) * scale;
            out[2 * i] = z.real();
            out[2 * i + 1] = z.imag();
        }
    }

private:
    static Complex<T> root(std::size_t k, std::size_t n) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        return {static_cast<T>(std::cos(angle)), static_cast<T>(std::sin(angle))};
    }

    void butterflies(std::span<Complex<T>> a) const {
        const std::size_t m = half_;
        for (std::size_t len = 2; len <= m; len <<= 1) {
            const std::size_t stride = m / len;
            const std::size_t h = len / 2;
            for (std::size_t start = 0; start < m; start += len) {
                for (std::size_t j = 0; j < h; ++j) {
                    const Complex<T> w = inner_[j * stride];
                    const Complex<T> u = a[start + j];
                    const Complex<T> v = a[start + j + h] * w;
                    a[start + j] = u + v;
                    a[start + j + h] = u - v;
                }
            }
        }
    }

    std::size_t n_;
    std::size_t half_;
    std::vector<std::size_t> bitrev_;
    std::vector<Complex<T>> inner_;
    std::vector<Complex<T>> split_;
};

/// Process-wide plan cache. Plans are immutable once built, so handing out
/// shared_ptr<const> makes concurrent transforms safe.
template <typename T>
std::shared_ptr<const RealFft<T>> fft_plan(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::shared_ptr<const RealFft<T>>> plans;
    std::lock_guard lock(mutex);
    auto& slot = plans[n];
    if (!slot) slot = std::make_shared<const RealFft<T>>(n);
    return slot;
}

/// Column-wise real FFT of x (rows = samples), zero-padded to n_fft rows.
template <typename T>
HalfSpectrum<T> rfft(const Matrix<T>& x, std::size_t n_fft) {
    require_power_of_two(n_fft, "n_fft");
    if (n_fft < 2) throw ConfigError("n_fft must be at least 2");
    if (x.rows() > n_fft) {
        throw ShapeError("rfft: input length " + std::to_string(x.rows()) + " exceeds n_fft " +
                         std::to_string(n_fft));
    }
    if (!all_finite(x)) throw InputError("rfft: input contains NaN or Inf");

    const auto plan = fft_plan<T>(n_fft);
    HalfSpectrum<T> out(n_fft, x.cols());
    std::vector<T> column(n_fft, T{0});
    std::vector<Complex<T>> bins(n_fft / 2 + 1);
    std::vector<Complex<T>> scratch(n_fft / 2);
    for (std::size_t c = 0; c < x.cols(); ++c) {
        for (std::size_t r = 0; r < x.rows(); ++r) column[r] = x(r, c);
        plan->forward(column, bins, scratch);
        for (std::size_t k = 0; k < bins.size(); ++k) out.coeffs(k, c) = bins[k];
    }
    return out;
}

/// Single-sequence convenience overload.
template <typename T>
std::vector<Complex<T>> rfft(std::span<const T> x, std::size_t n_fft) {
    Matrix<T> m(x.size(), 1);
    std::copy(x.begin(), x.end(), m.data());
    auto s = rfft(m, n_fft);
    return {s.coeffs.data(), s.coeffs.data() + s.coeffs.size()};
}

/// Inverse of rfft; returns n_fft rows.
template <typename T>
Matrix<T> irfft(const HalfSpectrum<T>& s) {
    require_power_of_two(s.n_fft, "n_fft");
    if (s.n_fft < 2) throw ConfigError("n_fft must be at least 2");
    if (s.bins() != s.n_fft / 2 + 1) {
        throw ShapeError("irfft: " + std::to_string(s.bins()) + " bins do not match n_fft " +
                         std::to_string(s.n_fft));
    }
    const auto plan = fft_plan<T>(s.n_fft);
    Matrix<T> out(s.n_fft, s.channels());
    std::vector<Complex<T>> bins(s.bins());
    std::vector<T> column(s.n_fft);
    std::vector<Complex<T>> scratch(s.n_fft / 2);
    for (std::size_t c = 0; c < s.channels(); ++c) {
        for (std::size_t k = 0; k < bins.size(); ++k) bins[k] = s.coeffs(k, c);
        plan->inverse(bins, column, scratch);
        for (std::size_t r = 0; r < s.n_fft; ++r) out(r, c) = column[r];
    }
    return out;
}

}  // namespace spectre
