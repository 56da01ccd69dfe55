#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <span>
#include <vector>

#include "spectre/layer/mixer.hpp"

namespace spectre {

/// softmax(Q K^T / sqrt(d)) V with a causal mask, streaming over keys so
/// memory stays O(n d).
template <typename T>
Matrix<T> causal_attention(const Matrix<T>& q, const Matrix<T>& k, const Matrix<T>& v) {
    require_shape(q.rows() == k.rows() && k.rows() == v.rows() && q.cols() == k.cols(),
                  "causal_attention: shape mismatch");
    const std::size_t n = q.rows();
    const std::size_t d = q.cols();
    const T scale = T{1} / std::sqrt(static_cast<T>(d));
    Matrix<T> out(n, v.cols());
    std::vector<T> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto qi = q.row(i);
        T best = -std::numeric_limits<T>::infinity();
        for (std::size_t j = 0; j <= i; ++j) {
            const auto kj = k.row(j);
            T s{0};
            for (std::size_t c = 0; c < d; ++c) s += qi[c] * kj[c];
            scores[j] = s * scale;
            best = std::max(best, scores[j]);
        }
        T denom{0};
        auto oi = out.row(i);
        for (std::size_t j = 0; j <= i; ++j) {
            const T p = std::exp(scores[j] - best);
            denom += p;
            const auto vj = v.row(j);
            for (std::size_t c = 0; c < v.cols(); ++c) oi[c] += p * vj[c];
        }
        for (auto& o : oi) o /= denom;
    }
    return out;
}

/// Quadratic baseline with the same per-head weights as the spectral
/// mixer. Keys reuse the query projection (K = Q).
template <typename T>
Matrix<T> naive_attention_forward(const Matrix<T>& x, const LayerWeights<T>& w, const LayerConfig& cfg) {
    require_shape(x.cols() == cfg.model_dim(), "naive_attention_forward: input width mismatch");
    require_shape(w.heads.size() == cfg.heads, "naive_attention_forward: head count mismatch");
    std::vector<Matrix<T>> outs;
    outs.reserve(cfg.heads);
    for (std::size_t h = 0; h < cfg.heads; ++h) {
        const auto xh = column_block(x, h * cfg.head_dim, cfg.head_dim);
        auto [q, v] = project_qv(xh, w.heads[h]);
        outs.push_back(causal_attention(q, q, v));
    }
    return merge_heads(outs, w.w_o);
}

/// Growing key/value store for incremental attention decode.
template <typename T>
class AttentionCache {
public:
    explicit AttentionCache(std::size_t dim = 0) : dim_(dim) {}

    void append(std::span<const T> k, std::span<const T> v) {
        keys_.insert(keys_.end(), k.begin(), k.end());
        values_.insert(values_.end(), v.begin(), v.end());
    }

    std::size_t length() const noexcept { return dim_ ? keys_.size() / dim_ : 0; }
    std::size_t bytes() const noexcept { return (keys_.size() + values_.size()) * sizeof(T); }

    /// Attends q over every cached position.
    std::vector<T> attend(std::span<const T> q) const {
        const std::size_t n = length();
        const T scale = T{1} / std::sqrt(static_cast<T>(dim_));
        std::vector<T> scores(n);
        T best = -std::numeric_limits<T>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            T s{0};
            for (std::size_t c = 0; c < dim_; ++c) s += q[c] * keys_[j * dim_ + c];
            scores[j] = s * scale;
            best = std::max(best, scores[j]);
        }
        std::vector<T> out(dim_, T{0});
        T denom{0};
        for (std::size_t j = 0; j < n; ++j) {
            const T p = std::exp(scores[j] - best);
            denom += p;
            for (std::size_t c = 0; c < dim_; ++c) out[c] += p * values_[j * dim_ + c];
        }
        for (auto& o : out) o /= denom;
        return out;
    }

private:
    std::size_t dim_;
    std::vector<T> keys_;
    std::vector<T> values_;
};

}  // namespace spectre
