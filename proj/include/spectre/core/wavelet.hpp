#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "spectre/errors.hpp"
#include "spectre/tensor.hpp"

namespace spectre {

/// Orthonormal Haar coefficients along the sequence axis, laid out as
/// [approx_J | detail_J | detail_{J-1} | ... | detail_1].
template <typename T>
struct WaveletCoeffs {
    Matrix<T> coeffs;
    int levels = 0;
};

struct Band {
    std::size_t first = 0;
    std::size_t count = 0;
};

/// Row ranges of the J+1 bands in layout order (approx_J first, detail_1 last).
inline std::vector<Band> wavelet_bands(std::size_t n, int levels) {
    std::vector<Band> bands;
    const std::size_t coarsest = n >> levels;
    bands.push_back({0, coarsest});
    std::size_t first = coarsest;
    for (int level = levels; level >= 1; --level) {
        const std::size_t count = n >> level;
        bands.push_back({first, count});
        first += count;
    }
    return bands;
}

inline void require_dyadic(std::size_t n, int levels) {
    if (levels < 1) throw ShapeError("wavelet: levels must be >= 1");
    if (n == 0 || levels >= 63 || n % (std::size_t{1} << levels) != 0) {
        throw ShapeError("wavelet: length " + std::to_string(n) + " not divisible by 2^" +
                         std::to_string(levels));
    }
}

template <typename T>
WaveletCoeffs<T> dwt_haar(const Matrix<T>& v, int levels) {
    require_dyadic(v.rows(), levels);
    const T s = static_cast<T>(1.0 / std::numbers::sqrt2);
    const std::size_t d = v.cols();
    WaveletCoeffs<T> out{v, levels};
    Matrix<T>& w = out.coeffs;
    std::vector<T> tmp(v.rows() * d);
    for (std::size_t len = v.rows(), l = 0; l < static_cast<std::size_t>(levels); ++l, len /= 2) {
        const std::size_t half = len / 2;
        for (std::size_t i = 0; i < half; ++i) {
            for (std::size_t c = 0; c < d; ++c) {
                const T a = w(2 * i, c);
                const T b = w(2 * i + 1, c);
                tmp[i * d + c] = (a + b) * s;
                tmp[(half + i) * d + c] = (a - b) * s;
            }
        }
        std::copy_n(tmp.begin(), len * d, w.data());
    }
    return out;
}

template <typename T>
Matrix<T> idwt_haar(const WaveletCoeffs<T>& wc) {
    require_dyadic(wc.coeffs.rows(), wc.levels);
    const T s = static_cast<T>(1.0 / std::numbers::sqrt2);
    const std::size_t n = wc.coeffs.rows();
    const std::size_t d = wc.coeffs.cols();
    Matrix<T> w = wc.coeffs;
    std::vector<T> tmp(n * d);
    for (std::size_t len = n >> (wc.levels - 1); len <= n; len *= 2) {
        const std::size_t half = len / 2;
        for (std::size_t i = 0; i < half; ++i) {
            for (std::size_t c = 0; c < d; ++c) {
                const T a = w(i, c);
                const T b = w(half + i, c);
                tmp[2 * i * d + c] = (a + b) * s;
                tmp[(2 * i + 1) * d + c] = (a - b) * s;
            }
        }
        std::copy_n(tmp.begin(), len * d, w.data());
    }
    return w;
}

}  // namespace spectre
