#pragma once

#include <cstddef>
#include <string>
#include <utility>

#include "spectre/core/fft.hpp"
#include "spectre/layer/gate.hpp"
#include "spectre/layer/wrm.hpp"

namespace spectre {

template <typename T>
std::pair<Matrix<T>, Matrix<T>> project_qv(const Matrix<T>& x, const HeadWeights<T>& w) {
    require_shape(x.cols() == w.w_q.rows(), "project_qv: token width " + std::to_string(x.cols()) +
                                                " vs head dim " + std::to_string(w.w_q.rows()));
    return {matmul(x, w.w_q), matmul(x, w.w_v)};
}

/// irfft(diag(g) rfft(pad(v, n_fft))): all n_fft rows, no truncation.
template <typename T>
Matrix<T> spectral_mix(const Matrix<T>& v, const GateVector<T>& g, std::size_t n_fft) {
    return irfft(apply_gate(rfft(v, n_fft), g));
}

/// One head in parallel (whole-sequence) mode. Q drives the gate, V is mixed.
/// The WRM branch, when enabled, refines the full n_fft window before the
/// first n rows are kept.
template <typename T>
Matrix<T> head_forward(const Matrix<T>& q, const Matrix<T>& v, const HeadWeights<T>& w, const LayerConfig& cfg) {
    require_shape(q.rows() == v.rows(), "head_forward: Q/V length mismatch");
    if (v.rows() > cfg.n_fft) {
        throw ShapeError("sequence length " + std::to_string(v.rows()) + " exceeds n_fft " + std::to_string(cfg.n_fft));
    }
    if (v.rows() == 0) return Matrix<T>(0, v.cols());
    const auto q_bar = global_descriptor(q, w);
    const auto g = gate_from_descriptor(q_bar, w, cfg);
    auto mixed = spectral_mix(v, g, cfg.n_fft);
    if (cfg.wrm_enabled) mixed = wrm_forward(mixed, q_bar, w, cfg);
    return resize_rows(mixed, v.rows());
}

/// Concatenates per-head outputs (n x d each) and applies W_o.
template <typename T>
Matrix<T> merge_heads(const std::vector<Matrix<T>>& per_head, const Matrix<T>& w_o) {
    const std::size_t rows = per_head.empty() ? 0 : per_head.front().rows();
    std::size_t width = 0;
    for (const auto& h : per_head) width += h.cols();
    Matrix<T> cat(rows, width);
    std::size_t col = 0;
    for (const auto& h : per_head) {
        set_column_block(cat, col, h);
        col += h.cols();
    }
    return matmul(cat, w_o);
}

/// Multi-head mixing layer over X (n x H*d).
template <typename T>
Matrix<T> spectre_mix_forward(const Matrix<T>& x, const LayerWeights<T>& w, const LayerConfig& cfg) {
    require_shape(x.cols() == cfg.model_dim(), "spectre_mix_forward: input width " + std::to_string(x.cols()) +
                                                   " vs model dim " + std::to_string(cfg.model_dim()));
    require_shape(w.heads.size() == cfg.heads, "spectre_mix_forward: head count mismatch");
    std::vector<Matrix<T>> outs;
    outs.reserve(cfg.heads);
    for (std::size_t h = 0; h < cfg.heads; ++h) {
        const auto xh = column_block(x, h * cfg.head_dim, cfg.head_dim);
        auto [q, v] = project_qv(xh, w.heads[h]);
        outs.push_back(head_forward(q, v, w.heads[h], cfg));
    }
    return merge_heads(outs, w.w_o);
}

}  // namespace spectre
