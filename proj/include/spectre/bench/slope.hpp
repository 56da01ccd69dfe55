#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "spectre/bench/types.hpp"
#include "spectre/errors.hpp"

namespace spectre {

struct SlopeFit {
    std::string kernel;
    double exponent = 0.0;   // alpha in latency ~ c * L^alpha
    double intercept = 0.0;  // log c
    double residual = 0.0;   // RMS of the log-space residuals
    std::size_t points = 0;
};

/// Ordinary least squares of log(latency) on log(length).
inline SlopeFit fit_power_law(std::span<const double> lengths, std::span<const double> latencies) {
    if (lengths.size() != latencies.size()) throw InsufficientData("slope fit: length/latency count mismatch");
    if (lengths.size() < 3) throw InsufficientData("slope fit needs at least 3 lengths, got " + std::to_string(lengths.size()));
    const auto n = static_cast<double>(lengths.size());
    double sx = 0, sy = 0;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        if (!(lengths[i] > 0.0) || !(latencies[i] > 0.0)) throw InsufficientData("slope fit needs positive values");
        xs.push_back(std::log(lengths[i]));
        ys.push_back(std::log(latencies[i]));
        sx += xs.back();
        sy += ys.back();
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw InsufficientData("slope fit needs at least two distinct lengths");
    SlopeFit fit;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.intercept + fit.exponent * xs[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    fit.points = xs.size();
    return fit;
}

/// One fit per kernel, in order of first appearance.
inline std::vector<SlopeFit> slope_fit(std::span<const SweepRow> rows) {
    std::vector<std::string> kernels;
    for (const auto& r : rows) {
        bool seen = false;
        for (const auto& k : kernels) seen = seen || k == r.kernel;
        if (!seen) kernels.push_back(r.kernel);
    }
    if (kernels.empty()) throw InsufficientData("slope fit: no rows");
    std::vector<SlopeFit> fits;
    for (const auto& k : kernels) {
        std::vector<double> ls, ts;
        for (const auto& r : rows) {
            if (r.kernel != k) continue;
            ls.push_back(static_cast<double>(r.L));
            ts.push_back(r.median_latency_ms);
        }
        auto fit = fit_power_law(ls, ts);
        fit.kernel = k;
        fits.push_back(fit);
    }
    return fits;
}

}  // namespace spectre
