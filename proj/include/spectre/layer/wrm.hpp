#pragma once

#include <cstddef>
#include <vector>

#include "spectre/core/activation.hpp"
#include "spectre/core/wavelet.hpp"
#include "spectre/layer/gate.hpp"

namespace spectre {

/// Skip decision for the wavelet branch. The learned-stub mode thresholds
/// a linear score: q_bar dotted with the weights feeding the first hidden
/// unit of the WRM MLP, plus the controller logit.
template <typename T>
bool wrm_controller(const Descriptor<T>& q_bar, const HeadWeights<T>& w, const LayerConfig& cfg) {
    switch (cfg.wrm_mode) {
        case WrmControllerMode::always: return true;
        case WrmControllerMode::never: return false;
        case WrmControllerMode::learned_stub: {
            T score = w.wrm_controller_logit;
            for (std::size_t i = 0; i < q_bar.values.size(); ++i) score += q_bar.values[i] * w.wrm_in.weight(i, 0);
            return score > T{0};
        }
    }
    return false;
}

/// Per-band, per-channel gains, (J+1) x d. Row 0 scales approx_J, row j
/// scales detail_{J+1-j}.
template <typename T>
Matrix<T> wrm_gains(const Descriptor<T>& q_bar, const HeadWeights<T>& w, const LayerConfig& cfg) {
    auto h = w.wrm_in(q_bar.values);
    for (auto& v : h) v = gelu(v);
    const auto flat = w.wrm_out(h);
    const std::size_t bands = static_cast<std::size_t>(cfg.wrm_levels + 1);
    require_shape(flat.size() == bands * cfg.head_dim, "WRM MLP output size mismatch");
    Matrix<T> gains(bands, cfg.head_dim);
    std::copy(flat.begin(), flat.end(), gains.data());
    return gains;
}

/// v + idwt(s * dwt(v)) with s the per-band gains broadcast over positions.
template <typename T>
Matrix<T> wrm_refine(const Matrix<T>& v, const Matrix<T>& gains, int levels) {
    auto coeffs = dwt_haar(v, levels);
    const auto bands = wavelet_bands(v.rows(), levels);
    require_shape(gains.rows() == bands.size() && gains.cols() == v.cols(), "WRM gains shape mismatch");
    for (std::size_t b = 0; b < bands.size(); ++b) {
        for (std::size_t r = bands[b].first; r < bands[b].first + bands[b].count; ++r) {
            for (std::size_t c = 0; c < v.cols(); ++c) coeffs.coeffs(r, c) *= gains(b, c);
        }
    }
    const auto refined = idwt_haar(coeffs);
    Matrix<T> out = v;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += refined.data()[i];
    return out;
}

template <typename T>
Matrix<T> wrm_forward(const Matrix<T>& v_tilde, const Descriptor<T>& q_bar, const HeadWeights<T>& w,
                      const LayerConfig& cfg) {
    require_dyadic(v_tilde.rows(), cfg.wrm_levels);
    if (!wrm_controller(q_bar, w, cfg)) return v_tilde;
    return wrm_refine(v_tilde, wrm_gains(q_bar, w, cfg), cfg.wrm_levels);
}

}  // namespace spectre
