// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spectre/spectre.hpp"

using spectre::Matrix;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

template <typename T>
Matrix<T> uniform(std::size_t rows, std::size_t cols, spectre::SplitMix64& rng) {
    Matrix<T> m(rows, cols);
    for (auto& v : m.flat()) v = static_cast<T>(2.0 * rng.uniform() - 1.0);
    return m;
}

template <typename T>
std::vector<T> uniform_vec(std::size_t n, spectre::SplitMix64& rng) {
    std::vector<T> v(n);
    for (auto& x : v) x = static_cast<T>(2.0 * rng.uniform() - 1.0);
    return v;
}

spectre::LayerConfig head_config(std::size_t n_max, std::size_t d) {
    spectre::LayerConfig cfg;
    cfg.head_dim = d;
    cfg.heads = 1;
    cfg.n_fft = n_max;
    return cfg;
}

Outcome spectral_correctness() {
    spectre::SplitMix64 rng(1);
    double worst = 0.0, worst_herm = 0.0;
    for (std::size_t n : {8u, 64u, 256u}) {
        for (int trial = 0; trial < 100; ++trial) {
            const auto x = uniform<double>(n, 1, rng);
            const auto fast = spectre::rfft(x, n);
            const auto ref = spectre::naive_dft(std::vector<double>(x.data(), x.data() + n));
            for (std::size_t k = 0; k <= n / 2; ++k) worst = std::max(worst, std::abs(fast.coeffs(k, 0) - ref[k]));
            for (std::size_t k = 1; k < n; ++k) worst_herm = std::max(worst_herm, std::abs(ref[n - k] - std::conj(ref[k])));
        }
    }
    return {worst < 1e-10 && worst_herm < 1e-10,
            fmt("rfft-vs-dft %.2e, hermitian %.2e (tol 1e-10)", worst, worst_herm)};
}

Outcome round_trips() {
    spectre::SplitMix64 rng(2);
    double f64 = 0.0, f32 = 0.0;
    for (std::size_t n : {8u, 64u, 1024u}) {
        for (std::size_t d : {1u, 16u}) {
            const auto xd = uniform<double>(n, d, rng);
            const auto xf = uniform<float>(n, d, rng);
            f64 = std::max({f64, spectre::max_abs_diff(spectre::irfft(spectre::rfft(xd, n)), xd),
                            spectre::max_abs_diff(spectre::idwt_haar(spectre::dwt_haar(xd, 3)), xd)});
            f32 = std::max({f32, spectre::max_abs_diff(spectre::irfft(spectre::rfft(xf, n)), xf),
                            spectre::max_abs_diff(spectre::idwt_haar(spectre::dwt_haar(xf, 3)), xf)});
        }
    }
    return {f64 < 1e-10 && f32 < 1e-5, fmt("f64 %.2e (tol 1e-10), f32 %.2e (tol 1e-5)", f64, f32)};
}

Outcome cache_coherence() {
    spectre::SplitMix64 rng(3);
    const auto cfg = head_config(256, 16);
    const auto head = spectre::random_head_weights<double>(cfg, 33);
    auto s = spectre::prefill(uniform<double>(17, 16, rng), head, cfg).state;
    double fft_err = 0.0, q_err = 0.0;
    for (int step = 1; step <= 10000; ++step) {
        (void)spectre::decode_step<double>(s, uniform_vec<double>(16, rng), head, cfg);
        if (step % 500 == 0) {
            fft_err = std::max(fft_err, spectre::cache_coherence_error(s));
            q_err = std::max(q_err, spectre::descriptor_coherence_error(s));
        }
    }
    // sum_q against Q_buf column sums, summed here independently
    for (std::size_t c = 0; c < 16; ++c) {
        long double col = 0;
        for (std::size_t r = 0; r < 256; ++r) col += s.q_buf(r, c);
        q_err = std::max(q_err, static_cast<double>(std::abs(col - static_cast<long double>(s.sum_q[c]))));
    }
    return {fft_err < 1e-9 && q_err < 1e-10,
            fmt("prefix_fft %.2e (tol 1e-9), sum_q %.2e (tol 1e-10), t=%llu", fft_err, q_err,
                static_cast<unsigned long long>(s.t))};
}

Outcome path_independence() {
    spectre::SplitMix64 rng(4);
    double worst = 0.0;
    for (std::size_t n_max : {32u, 256u}) {
        const auto cfg = head_config(n_max, 16);
        const auto head = spectre::random_head_weights<float>(cfg, 44);
        const auto x = uniform<float>(n_max, 16, rng);
        const auto full = spectre::prefill(x, head, cfg).state;
        auto inc = spectre::prefill(spectre::row_block(x, 0, 1), head, cfg).state;
        for (std::size_t r = 1; r < n_max; ++r) (void)spectre::decode_step<float>(inc, x.row(r), head, cfg);
        worst = std::max(worst, spectre::cache_state_difference(full, inc));
    }
    return {worst < 1e-4, fmt("max field difference %.2e (tol 1e-4)", worst)};
}

Outcome transparency_and_linearity() {
    spectre::SplitMix64 rng(5);
    double ident = 0.0, lin = 0.0;
    auto plain = head_config(64, 8);
    plain.toeplitz_enabled = false;
    plain.wrm_enabled = false;
    const auto unit = spectre::identity_gate_head<float>(plain);
    auto full = head_config(64, 8);
    const auto head = spectre::random_head_weights<float>(full, 55);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = uniform<float>(64, 8, rng);
        auto [q, v] = spectre::project_qv(x, unit);
        ident = std::max(ident, spectre::max_abs_diff(spectre::head_forward(q, v, unit, plain), x));

        const auto qr = uniform<float>(48, 8, rng);
        const auto v1 = uniform<float>(48, 8, rng), v2 = uniform<float>(48, 8, rng);
        const auto a = static_cast<float>(2.0 * rng.uniform() - 1.0), b = static_cast<float>(2.0 * rng.uniform() - 1.0);
        Matrix<float> mix(48, 8);
        for (std::size_t i = 0; i < mix.size(); ++i) mix.data()[i] = a * v1.data()[i] + b * v2.data()[i];
        const auto lhs = spectre::head_forward(qr, mix, head, full);
        const auto y1 = spectre::head_forward(qr, v1, head, full), y2 = spectre::head_forward(qr, v2, head, full);
        for (std::size_t i = 0; i < lhs.size(); ++i) {
            lin = std::max(lin, static_cast<double>(std::abs(lhs.data()[i] - (a * y1.data()[i] + b * y2.data()[i]))));
        }
    }
    return {ident < 1e-5 && lin < 1e-6, fmt("identity %.2e (tol 1e-5), linearity %.2e (tol 1e-6)", ident, lin)};
}

Outcome wavelet_refinement() {
    spectre::SplitMix64 rng(6);
    const auto vf = uniform<float>(64, 8, rng);
    const bool zero_exact = spectre::wrm_refine(vf, Matrix<float>(3, 8), 2) == vf;
    const auto doubled = spectre::wrm_refine(vf, Matrix<float>(3, 8, 1.0f), 2);
    double unit = 0.0;
    for (std::size_t i = 0; i < vf.size(); ++i) {
        unit = std::max(unit, static_cast<double>(std::abs(doubled.data()[i] - 2.0f * vf.data()[i])));
    }

    const std::size_t n = 32, d = 4;
    const int levels = 3;
    const auto v = uniform<double>(n, d, rng);
    const auto gains = uniform<double>(levels + 1, d, rng);
    const auto out = spectre::wrm_refine(v, gains, levels);
    const auto h = oracle::haar_matrix(n, levels);
    const auto ht = oracle::transpose(h);
    auto band = [&](std::size_t i) -> std::size_t {
        // [approx_J | detail_J | ... | detail_1]; detail_j occupies [n >> j, n >> (j-1))
        if (i < (n >> levels)) return 0;
        std::size_t j = levels;
        while (i >= (n >> (j - 1))) --j;
        return static_cast<std::size_t>(levels - j + 1);
    };
    double composed = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
        oracle::Grid col(n, std::vector<double>(1));
        for (std::size_t i = 0; i < n; ++i) col[i][0] = v(i, c);
        auto coeffs = oracle::matmul(h, col);
        for (std::size_t i = 0; i < n; ++i) coeffs[i][0] *= gains(band(i), c);
        const auto back = oracle::matmul(ht, coeffs);
        for (std::size_t i = 0; i < n; ++i) composed = std::max(composed, std::abs(out(i, c) - (v(i, c) + back[i][0])));
    }
    return {zero_exact && unit < 1e-6 && composed < 1e-10,
            fmt("zero-gain %s, unit-gain %.2e (tol 1e-6), composed %.2e (tol 1e-10)", zero_exact ? "exact" : "INEXACT",
                unit, composed)};
}

template <typename F>
double median_ms(F&& f, int repeats) {
    f();  // warmup
    std::vector<double> ms;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = spectre::Clock::now();
        f();
        ms.push_back(spectre::elapsed_ms(t0));
    }
    return spectre::median(ms);
}

Outcome scaling() {
    const std::vector<std::size_t> lengths{1024, 4096, 16384};
    const std::size_t d = 32;
    std::vector<double> ls, spectral, naive;
    for (std::size_t l : lengths) {
        auto cfg = head_config(l, d);
        spectre::LayerWeights<float> w;
        w.heads = {spectre::random_head_weights<float>(cfg, 7)};
        w.w_o = spectre::random_tokens<float>(d, d, 8);
        const auto x = spectre::random_tokens<float>(l, d, 9 + l);
        ls.push_back(static_cast<double>(l));
        spectral.push_back(median_ms([&] { (void)spectre::spectre_mix_forward(x, w, cfg); }, 5));
        naive.push_back(median_ms([&] { (void)spectre::naive_attention_forward(x, w, cfg); }, 3));
    }
    const double a_s = spectre::fit_power_law(ls, spectral).exponent;
    const double a_n = spectre::fit_power_law(ls, naive).exponent;
    const double ratio = (naive.back() / naive.front()) / (spectral.back() / spectral.front());
    return {a_s <= 1.4 && a_n >= 1.8 && ratio >= 5.0,
            fmt("alpha spectre %.3f (<= 1.4), alpha naive %.3f (>= 1.8), ratio-of-ratios %.1f (>= 5); "
                "ms spectre %.2f/%.2f/%.2f naive %.1f/%.1f/%.1f",
                a_s, a_n, ratio, spectral[0], spectral[1], spectral[2], naive[0], naive[1], naive[2])};
}

Outcome tpot_flatness() {
    const std::size_t n_max = 4096, d = 32;
    const auto cfg = head_config(n_max, d);
    const auto head = spectre::random_head_weights<float>(cfg, 10);
    spectre::SplitMix64 rng(11);
    {  // discarded warmup on a throwaway cache
        auto warm = spectre::prefill(uniform<float>(1, d, rng), head, cfg).state;
        for (int i = 0; i < 256; ++i) (void)spectre::decode_step<float>(warm, uniform_vec<float>(d, rng), head, cfg);
    }
    auto s = spectre::prefill(uniform<float>(1, d, rng), head, cfg).state;
    std::vector<double> early, late;
    for (std::size_t t = 1; t <= 2 * n_max; ++t) {
        const auto x = uniform_vec<float>(d, rng);
        const auto t0 = spectre::Clock::now();
        (void)spectre::decode_step<float>(s, x, head, cfg);
        const double ms = spectre::elapsed_ms(t0);
        if (t <= n_max / 4) early.push_back(ms);
        if (t >= n_max) late.push_back(ms);
    }
    const double e = spectre::median(early), l = spectre::median(late);
    const double ratio = std::max(e, l) / std::min(e, l);
    return {ratio <= 2.0, fmt("median step %.4f ms early, %.4f ms late, ratio %.2f (<= 2)", e, l, ratio)};
}

Outcome parameter_budget() {
    const auto tally = spectre::parameter_tally(spectre::zero_weights<float>(spectre::ModelConfig{}));
    const double r = tally.per_head_ratio();
    return {r < 0.06, fmt("%zu per-head of %zu total, ratio %.5f (< 0.06)", tally.spectre_per_head, tally.total, r)};
}

Outcome state_memory() {
    bool ok = true;
    std::string detail;
    for (std::size_t n_max : {32u, 4096u}) {
        const std::size_t d = 16;
        const auto cfg = head_config(n_max, d);
        const auto head = spectre::random_head_weights<float>(cfg, 12);
        spectre::SplitMix64 rng(13);
        auto s = spectre::prefill(uniform<float>(5, d, rng), head, cfg).state;
        for (int i = 0; i < 50; ++i) (void)spectre::decode_step<float>(s, uniform_vec<float>(d, rng), head, cfg);
        const std::size_t expected = (n_max / 2 + 1) * d * 2 + 2 * n_max * d + d;
        const bool exact = s.state_scalars() == expected && s.state_bytes() == expected * sizeof(float) &&
                           s.twiddle_bytes() == n_max * sizeof(std::complex<float>);
        ok = ok && exact;
        detail += fmt("%sN=%zu: %zu scalars (expected %zu)%s", detail.empty() ? "" : ", ", n_max, s.state_scalars(), expected, exact ? "" : " MISMATCH");
    }
    return {ok, detail};
}

Outcome serialization() {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path();
    const auto wpath = (dir / "spectre_accept_w.spcw").string();
    const auto cpath = (dir / "spectre_accept_c.spcw").string();
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    };
    auto dump = [](const std::string& p, const std::string& b) {
        std::ofstream(p, std::ios::binary | std::ios::trunc).write(b.data(), static_cast<std::streamsize>(b.size()));
    };

    spectre::ModelConfig mc;
    mc.n_layers = 2;
    mc.heads = 2;
    mc.head_dim = 8;
    mc.n_max = 64;
    mc.memory_tokens = 4;
    mc.vocab_size = 20;
    const auto w = spectre::init_random<float>(mc);
    spectre::save_weights(w, wpath);
    const auto w_bytes = slurp(wpath);
    const auto w_back = spectre::load_weights<float>(wpath);
    const bool weights_exact = w_back == w && spectre::weights_to_container(w_back).serialize() == w_bytes;

    const auto lc = mc.layer_config();
    const auto& head = w.blocks[0].mixer.heads[0];
    auto s = spectre::prefill(spectre::random_tokens<float>(10, 8, 1), head, lc).state;
    spectre::attach_memory(s, spectre::memory_precompute(w.blocks[0].memory_rows[0], mc.n_max));
    for (int i = 0; i < 100; ++i) (void)spectre::decode_step<float>(s, std::vector<float>(8, 0.01f * i), head, lc);
    spectre::save_cache(s, cpath);
    const auto c_bytes = slurp(cpath);
    const bool cache_exact = spectre::cache_to_container(spectre::load_cache<float>(cpath)).serialize() == c_bytes;

    auto expect = [&](const std::string& bytes, auto tag) {
        dump(wpath, bytes);
        try {
            (void)spectre::load_weights<float>(wpath);
        } catch (const decltype(tag)&) {
            return true;
        } catch (...) {
        }
        return false;
    };
    auto flipped = w_bytes;
    flipped[w_bytes.size() - 50] ^= 0x04;
    auto magic = w_bytes;
    magic[0] = 'Z';
    auto version = w_bytes;
    version[4] = 9;
    const bool rejects = expect(w_bytes.substr(0, w_bytes.size() - 7), spectre::FormatError("")) &&
                         expect(magic, spectre::FormatError("")) && expect(version, spectre::FormatError("")) &&
                         expect(flipped, spectre::ChecksumError(""));
    fs::remove(wpath);
    fs::remove(cpath);
    bool missing = false;
    try {
        (void)spectre::load_weights<float>(wpath);
    } catch (const spectre::IoError&) {
        missing = true;
    } catch (...) {
    }
    return {weights_exact && cache_exact && rejects && missing,
            fmt("weights %s, cache %s, corruption %s, missing file %s", weights_exact ? "byte-exact" : "DIFFER",
                cache_exact ? "byte-exact" : "DIFFER", rejects ? "rejected" : "NOT REJECTED",
                missing ? "IoError" : "WRONG ERROR")};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"spectral-correctness", spectral_correctness},
        {"round-trips", round_trips},
        {"cache-coherence", cache_coherence},
        {"path-independence", path_independence},
        {"transparency-linearity", transparency_and_linearity},
        {"wavelet-refinement", wavelet_refinement},
        {"scaling", scaling},
        {"tpot-flatness", tpot_flatness},
        {"parameter-budget", parameter_budget},
        {"state-memory", state_memory},
        {"serialization", serialization},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2zu %-24s %8.2fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, secs,
                    o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures ? 1 : 0;
}
