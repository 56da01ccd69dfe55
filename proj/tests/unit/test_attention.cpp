#include "catch_amalgamated.hpp"

#include "oracles.hpp"
#include "spectre/model/attention.hpp"
#include "spectre/model/weights.hpp"

using spectre::Matrix;

namespace {

template <typename T = double>
Matrix<T> random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    oracle::Lcg rng(seed);
    Matrix<T> m(rows, cols);
    for (auto& v : m.flat()) v = static_cast<T>(rng.next());
    return m;
}

template <typename T>
oracle::Grid grid(const Matrix<T>& m) {
    oracle::Grid g(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) g[i][j] = static_cast<double>(m(i, j));
    return g;
}

}  // namespace

TEST_CASE("single token attends to itself", "[attention]") {
    const auto q = random_matrix(1, 4, 1), v = random_matrix(1, 4, 2);
    CHECK(spectre::max_abs_diff(spectre::causal_attention(q, q, v), v) < 1e-15);
}

TEST_CASE("uniform queries and keys give the causal running mean", "[attention]") {
    const Matrix<double> q(6, 3, 0.5);
    const auto v = random_matrix(6, 3, 3);
    const auto out = spectre::causal_attention(q, q, v);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t c = 0; c < 3; ++c) {
            double mean = 0.0;
            for (std::size_t j = 0; j <= i; ++j) mean += v(j, c);
            CHECK(std::abs(out(i, c) - mean / static_cast<double>(i + 1)) < 1e-6);
        }
}

TEST_CASE("attention matches the loop oracle in f32", "[attention]") {
    const auto q = random_matrix<float>(8, 4, 4), k = random_matrix<float>(8, 4, 5), v = random_matrix<float>(8, 4, 6);
    const auto out = spectre::causal_attention(q, k, v);
    const auto ref = oracle::causal_attention(grid(q), grid(k), grid(v));
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t c = 0; c < 4; ++c) CHECK(std::abs(out(i, c) - ref[i][c]) < 1e-6);
}

TEST_CASE("multi-head baseline ties keys to queries", "[attention]") {
    spectre::LayerConfig cfg;
    cfg.head_dim = 4;
    cfg.heads = 2;
    cfg.n_fft = 16;
    spectre::LayerWeights<double> w;
    w.heads = {spectre::random_head_weights<double>(cfg, 1), spectre::random_head_weights<double>(cfg, 2)};
    w.w_o = random_matrix(8, 8, 3);
    const auto x = random_matrix(8, 8, 4);
    Matrix<double> cat(8, 8);
    for (std::size_t h = 0; h < 2; ++h) {
        const auto xh = grid(spectre::column_block(x, 4 * h, 4));
        const auto q = oracle::matmul(xh, grid(w.heads[h].w_q));
        const auto v = oracle::matmul(xh, grid(w.heads[h].w_v));
        const auto o = oracle::causal_attention(q, q, v);
        for (std::size_t i = 0; i < 8; ++i)
            for (std::size_t c = 0; c < 4; ++c) cat(i, 4 * h + c) = o[i][c];
    }
    const auto ref = spectre::matmul(cat, w.w_o);
    CHECK(spectre::max_abs_diff(spectre::naive_attention_forward(x, w, cfg), ref) < 1e-12);
    CHECK_THROWS_AS(spectre::naive_attention_forward(random_matrix(8, 6, 1), w, cfg), spectre::ShapeError);
}

TEST_CASE("cached attention decode equals the last row of the full pass", "[attention]") {
    const auto q = random_matrix(10, 4, 7), v = random_matrix(10, 4, 8);
    const auto full = spectre::causal_attention(q, q, v);
    spectre::AttentionCache<double> cache(4);
    for (std::size_t i = 0; i < 10; ++i) {
        cache.append(q.row(i), v.row(i));
        const auto o = cache.attend(q.row(i));
        for (std::size_t c = 0; c < 4; ++c) CHECK(std::abs(o[c] - full(i, c)) < 1e-14);
    }
    CHECK(cache.length() == 10);
    CHECK(cache.bytes() == 2 * 10 * 4 * sizeof(double));
}
