#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spectre/core/activation.hpp"
#include "spectre/layer/mixer.hpp"
#include "spectre/model/attention.hpp"
#include "spectre/model/weights.hpp"

namespace spectre {

template <typename T>
std::vector<T> ffn_row(std::span<const T> x, const BlockWeights<T>& b) {
    auto h = b.ffn_in(x);
    for (auto& v : h) v = gelu(v);
    return b.ffn_out(h);
}

template <typename T>
Matrix<T> mixer_forward(const Matrix<T>& xn, const BlockWeights<T>& b, const ModelConfig& cfg) {
    const auto lc = cfg.layer_config();
    return cfg.mixer == MixerKind::spectre ? spectre_mix_forward(xn, b.mixer, lc)
                                           : naive_attention_forward(xn, b.mixer, lc);
}

/// Pre-norm residual block: h = x + Mix(LN1(x)); out = h + FFN(LN2(h)).
/// `mixed` is the residual branch output of the mixer, already computed
/// from LN1(x); split out so cached decoding can reuse the FFN half.
template <typename T>
Matrix<T> block_finish(const Matrix<T>& x, const Matrix<T>& mixed, const BlockWeights<T>& b) {
    require_shape(x.rows() == mixed.rows() && x.cols() == mixed.cols(), "block: mixer output shape mismatch");
    Matrix<T> h = x;
    for (std::size_t i = 0; i < h.size(); ++i) h.data()[i] += mixed.data()[i];
    for (std::size_t r = 0; r < h.rows(); ++r) {
        const auto hn = layer_norm<T>(h.row(r), b.ln2_gain, b.ln2_bias);
        const auto f = ffn_row<T>(hn, b);
        auto hr = h.row(r);
        for (std::size_t c = 0; c < hr.size(); ++c) hr[c] += f[c];
    }
    return h;
}

template <typename T>
Matrix<T> block_forward(const Matrix<T>& x, const BlockWeights<T>& b, const ModelConfig& cfg) {
    require_shape(x.cols() == cfg.d_model(), "block_forward: input width mismatch");
    const auto xn = layer_norm_rows<T>(x, b.ln1_gain, b.ln1_bias);
    return block_finish(x, mixer_forward(xn, b, cfg), b);
}

/// Every block followed by the final LayerNorm.
template <typename T>
Matrix<T> model_forward(const Matrix<T>& x, const ModelWeights<T>& w) {
    Matrix<T> h = x;
    for (const auto& b : w.blocks) h = block_forward(h, b, w.config);
    return layer_norm_rows<T>(h, w.final_ln_gain, w.final_ln_bias);
}

}  // namespace spectre
