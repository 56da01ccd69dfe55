// spectre-bench: sweeps, oracle verification and streaming generation.
//
// Exit codes: 0 success, 1 check failure, 2 usage error, 3 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "spectre/spectre.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

constexpr std::size_t kDefaultLengthCap = 32768;

struct SweepArgs {
    std::vector<std::size_t> lengths{512, 1024, 2048, 4096};
    std::vector<std::string> kernels{"spectre", "naive-attention"};
    int repeats = 3;
    int warmup = 1;
    std::size_t decode_steps = 16;
    std::size_t n_max = kDefaultLengthCap;
    std::size_t d = 32;
    std::size_t heads = 4;
    std::size_t layers = 2;
    std::uint64_t seed = 42;
    std::string csv;
    bool parallel = false;
    std::size_t threads = 0;
    bool f64 = false;
    bool allow_long = false;
};

struct GenerateArgs {
    std::string weights;
    std::size_t prompt_len = 16;
    std::size_t steps = 32;
    std::uint64_t seed = 7;
    bool f64 = false;
    std::string save_cache;
};

struct InitArgs {
    std::string out;
    spectre::ModelConfig cfg;
    std::string controller = "always";
    bool no_wrm = false;
    bool no_lr = false;
    bool f64 = false;
};

template <typename T>
int run_sweep_cmd(const SweepArgs& a) {
    spectre::SweepSpec spec;
    spec.lengths = a.lengths;
    for (const auto& k : a.kernels) spec.kernels.push_back(spectre::parse_kernel(k));
    spec.repeats = a.repeats;
    spec.warmup = a.warmup;
    spec.decode_steps = a.decode_steps;
    spec.parallel = a.parallel;
    spec.threads = a.threads;
    if (!a.allow_long && !a.lengths.empty() && a.lengths.back() > kDefaultLengthCap) {
        throw spectre::ConfigError("lengths above 32768 need --allow-long");
    }
    if (a.parallel) std::cerr << "warning: --parallel runs cells concurrently; timings may interfere\n";

    spectre::ModelConfig base;
    base.n_layers = a.layers;
    base.heads = a.heads;
    base.head_dim = a.d;
    base.n_max = a.n_max;
    base.seed = a.seed;

    const auto rows = spectre::run_sweep<T>(spec, base);
    std::cout << spectre::format_csv(rows);
    if (a.lengths.size() >= 3) {
        for (const auto& fit : spectre::slope_fit(rows)) {
            std::printf("# slope %-16s alpha=%.3f residual=%.3e\n", fit.kernel.c_str(), fit.exponent, fit.residual);
        }
    }
    if (!a.csv.empty()) spectre::emit_csv(rows, a.csv);
    return kExitOk;
}

int run_verify_cmd(const spectre::VerifyOptions& opt) {
    const auto report = spectre::verify(opt);
    std::cout << report;
    const bool ok = report.all_pass();
    std::cout << (ok ? "verify: all checks passed\n" : "verify: FAILED\n");
    return ok ? kExitOk : kExitCheckFailed;
}

template <typename T>
int run_generate_cmd(const GenerateArgs& a) {
    const auto w = spectre::load_weights<T>(a.weights);
    const auto& cfg = w.config;
    spectre::GenerateResult<T> g;
    spectre::Matrix<T> prompt;
    if (cfg.vocab_size) {
        spectre::SplitMix64 rng(a.seed);
        std::vector<std::int64_t> ids(a.prompt_len);
        for (auto& id : ids) id = static_cast<std::int64_t>(rng.next() % cfg.vocab_size);
        g = spectre::stream_generate_tokens(w, std::span<const std::int64_t>(ids), a.steps);
        prompt = spectre::Matrix<T>(ids.size(), cfg.d_model());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const auto e = w.embedding.row(static_cast<std::size_t>(ids[i]));
            std::copy(e.begin(), e.end(), prompt.row(i).begin());
        }
    } else {
        prompt = spectre::random_tokens<T>(a.prompt_len, cfg.d_model(), a.seed);
        g = spectre::stream_generate(w, prompt, a.steps);
    }
    const auto& r = g.report;
    std::printf("kernel=%s prompt_len=%zu steps=%zu ttft_ms=%.4f tpot_ms=%.4f throughput_tok_per_s=%.1f "
                "state_bytes=%zu\n",
                r.kernel_name.c_str(), r.seq_len, r.generated_tokens, r.ttft_ms, r.tpot_ms, r.throughput_tok_per_s,
                r.peak_state_bytes);
    if (!g.token_ids.empty()) {
        std::printf("tokens:");
        for (auto id : g.token_ids) std::printf(" %lld", static_cast<long long>(id));
        std::printf("\n");
    }
    if (!a.save_cache.empty()) {
        if (cfg.mixer != spectre::MixerKind::spectre) throw spectre::ConfigError("--save-cache needs a spectral model");
        spectre::StreamSession<T> session(w);
        (void)session.prefill(prompt);
        spectre::save_cache(session.states().front().front(), a.save_cache);
    }
    return kExitOk;
}

template <typename T>
int run_init_cmd(InitArgs a) {
    a.cfg.wrm_mode = spectre::parse_controller_mode(a.controller);
    if (a.no_wrm) a.cfg.wrm_enabled = false;
    if (a.no_lr) a.cfg.toeplitz_enabled = false;
    const auto w = spectre::init_random<T>(a.cfg);
    spectre::save_weights(w, a.out);
    const auto tally = spectre::parameter_tally(w);
    std::printf("wrote %s: %zu parameters, per-head spectral ratio %.4f\n", a.out.c_str(), tally.total,
                tally.per_head_ratio());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SPECTRE spectral token mixer: benchmarks, verification and generation"};
    app.require_subcommand(1);

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Latency/throughput sweep over sequence lengths");
    sweep->add_option("--lengths", sw.lengths, "Strictly increasing sequence lengths")->delimiter(',');
    sweep->add_option("--kernels", sw.kernels, "spectre, spectre-no-lr, spectre-no-wrm, naive-attention")
        ->delimiter(',');
    sweep->add_option("--repeats", sw.repeats, "Timed repeats per cell (>= 3)");
    sweep->add_option("--warmup", sw.warmup, "Discarded warmup runs per cell");
    sweep->add_option("--decode-steps", sw.decode_steps, "Decode steps per generation run");
    sweep->add_option("--n-max", sw.n_max, "Length cap for cached kernels");
    sweep->add_option("--d", sw.d, "Head dimension");
    sweep->add_option("--heads", sw.heads, "Heads per layer");
    sweep->add_option("--layers", sw.layers, "Number of blocks");
    sweep->add_option("--seed", sw.seed, "Weight and input seed");
    sweep->add_option("--csv", sw.csv, "Write rows to this CSV file");
    sweep->add_flag("--parallel", sw.parallel, "Run cells concurrently (distorts timings)");
    sweep->add_option("--threads", sw.threads, "Worker threads for --parallel");
    sweep->add_flag("--f64", sw.f64, "Double precision");
    sweep->add_flag("--allow-long", sw.allow_long, "Permit lengths above 32768");

    spectre::VerifyOptions vo;
    auto* verify = app.add_subcommand("verify", "Run the oracle suites and report the worst error per check");
    verify->add_option("--n-max", vo.n_max, "Cache window (power of two, >= 8)");
    verify->add_option("--d", vo.dim, "Head dimension");
    verify->add_option("--steps", vo.coherence_steps, "Random decode steps for the coherence checks");
    verify->add_option("--seed", vo.seed, "Random seed");
    verify->add_flag("--f64", vo.f64, "Double precision");
    verify->add_flag("--corrupt-twiddles", vo.corrupt_twiddles, "Negative control: perturb one cached root");

    GenerateArgs ga;
    auto* generate = app.add_subcommand("generate", "Prefill a random prompt and stream-decode");
    generate->add_option("--weights", ga.weights, "Weight container (.spcw)")->required();
    generate->add_option("--prompt-len", ga.prompt_len, "Prompt length");
    generate->add_option("--steps", ga.steps, "Decode steps");
    generate->add_option("--seed", ga.seed, "Prompt seed");
    generate->add_flag("--f64", ga.f64, "Load and run in double precision");
    generate->add_option("--save-cache", ga.save_cache, "Write the layer-0 head-0 cache after prefill");

    InitArgs ia;
    auto* init = app.add_subcommand("init", "Write randomly initialised weights");
    init->add_option("--out", ia.out, "Output path")->required();
    init->add_option("--layers", ia.cfg.n_layers, "Number of blocks");
    init->add_option("--heads", ia.cfg.heads, "Heads per layer");
    init->add_option("--d", ia.cfg.head_dim, "Head dimension");
    init->add_option("--d-ffn", ia.cfg.d_ffn, "FFN width (0 = 4 * d_model)");
    init->add_option("--n-max", ia.cfg.n_max, "Cache window");
    init->add_option("--vocab", ia.cfg.vocab_size, "Vocabulary size (0 = raw embeddings)");
    init->add_option("--memory", ia.cfg.memory_tokens, "Persistent memory tokens per head");
    init->add_option("--wrm-levels", ia.cfg.wrm_levels, "Haar levels for wavelet refinement");
    init->add_option("--controller", ia.controller, "always, never or learned-stub");
    init->add_flag("--no-wrm", ia.no_wrm, "Disable wavelet refinement");
    init->add_flag("--no-lr", ia.no_lr, "Disable the Toeplitz gate update");
    init->add_flag("--share-gates", ia.cfg.share_gates, "Share gate parameters across heads");
    init->add_option("--seed", ia.cfg.seed, "Initialisation seed");
    init->add_flag("--f64", ia.f64, "Store double-precision tensors");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        (void)app.exit(e);
        return kExitUsage;
    }

    try {
        if (sweep->parsed()) return sw.f64 ? run_sweep_cmd<double>(sw) : run_sweep_cmd<float>(sw);
        if (verify->parsed()) return run_verify_cmd(vo);
        if (generate->parsed()) return ga.f64 ? run_generate_cmd<double>(ga) : run_generate_cmd<float>(ga);
        if (init->parsed()) return ia.f64 ? run_init_cmd<double>(ia) : run_init_cmd<float>(ia);
    } catch (const spectre::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const spectre::FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const spectre::ChecksumError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const spectre::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const spectre::CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const spectre::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCheckFailed;
    }
    return kExitUsage;
}
