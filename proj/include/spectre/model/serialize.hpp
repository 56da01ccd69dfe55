#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "spectre/cache/prefix_cache.hpp"
#include "spectre/model/container.hpp"
#include "spectre/model/weights.hpp"

namespace spectre {

template <typename T>
Container weights_to_container(const ModelWeights<T>& w) {
    Container c;
    c.metadata["kind"] = "weights";
    c.metadata["config"] = w.config;
    auto& mutable_w = const_cast<ModelWeights<T>&>(w);  // read-only traversal
    for_each_tensor(mutable_w, [&](const TensorView<T>& t) {
        c.add<T>(t.name, t.shape, std::span<const T>(t.data.data(), t.data.size()));
    });
    return c;
}

template <typename T>
ModelWeights<T> weights_from_container(const Container& c) {
    if (c.metadata.value("kind", "") != "weights") throw FormatError("container does not hold model weights");
    ModelConfig cfg;
    try {
        cfg = c.metadata.at("config").get<ModelConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("weights: malformed config: ") + e.what());
    }
    auto w = zero_weights<T>(cfg);
    std::size_t seen = 0;
    for_each_tensor(w, [&](const TensorView<T>& t) {
        c.read_into<T>(t.name, t.data, t.shape);
        ++seen;
    });
    if (seen != c.tensors().size()) throw FormatError("weights: container holds unexpected tensors");
    return w;
}

template <typename T>
void save_weights(const ModelWeights<T>& w, const std::string& path) {
    weights_to_container(w).save(path);
}

template <typename T>
ModelWeights<T> load_weights(const std::string& path) {
    return weights_from_container<T>(Container::load(path));
}

/// Cache layout: header, cache/prefix_fft (bins x d x 2, re/im interleaved),
/// cache/v_buf, cache/q_buf, cache/sum_q, cache/t, then the memory bank when
/// one is attached.
template <typename T>
Container cache_to_container(const CacheState<T>& s) {
    if (!s.initialized) throw StateError("cannot serialise an uninitialised cache");
    if (s.t > (std::uint64_t{1} << 53)) throw StateError("cache step counter exceeds exact f64 range");
    Container c;
    c.metadata["kind"] = "cache";
    c.metadata["n_max"] = s.n_max;
    c.metadata["dim"] = s.dim;
    c.metadata["has_memory"] = static_cast<bool>(s.memory);
    const auto& pf = s.prefix_fft.coeffs;
    c.add<T>("cache/prefix_fft", {pf.rows(), pf.cols(), 2},
             std::span<const T>(reinterpret_cast<const T*>(pf.data()), 2 * pf.size()));
    c.add<T>("cache/v_buf", {s.v_buf.rows(), s.v_buf.cols()}, s.v_buf.flat());
    c.add<T>("cache/q_buf", {s.q_buf.rows(), s.q_buf.cols()}, s.q_buf.flat());
    c.add<T>("cache/sum_q", {s.sum_q.size()}, std::span<const T>(s.sum_q));
    const double t = static_cast<double>(s.t);
    c.add<double>("cache/t", {1}, std::span<const double>(&t, 1));
    if (s.memory) {
        const auto& m = *s.memory;
        c.add<T>("cache/memory/rows", {m.rows.rows(), m.rows.cols()}, m.rows.flat());
        const auto& ms = m.spectrum.coeffs;
        c.add<T>("cache/memory/spectrum", {ms.rows(), ms.cols(), 2},
                 std::span<const T>(reinterpret_cast<const T*>(ms.data()), 2 * ms.size()));
    }
    return c;
}

template <typename T>
CacheState<T> cache_from_container(const Container& c) {
    if (c.metadata.value("kind", "") != "cache") throw FormatError("container does not hold a cache state");
    CacheState<T> s;
    std::size_t n_max = 0, d = 0;
    bool has_memory = false;
    try {
        n_max = c.metadata.at("n_max").get<std::size_t>();
        d = c.metadata.at("dim").get<std::size_t>();
        has_memory = c.metadata.at("has_memory").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("cache: malformed header: ") + e.what());
    }
    if (!is_power_of_two(n_max) || n_max < 2) throw FormatError("cache: invalid n_max");
    s.n_max = n_max;
    s.dim = d;
    s.prefix_fft = HalfSpectrum<T>(n_max, d);
    auto& pf = s.prefix_fft.coeffs;
    c.read_into<T>("cache/prefix_fft", std::span<T>(reinterpret_cast<T*>(pf.data()), 2 * pf.size()),
                   {pf.rows(), pf.cols(), 2});
    s.v_buf = Matrix<T>(n_max, d);
    s.q_buf = Matrix<T>(n_max, d);
    c.read_into<T>("cache/v_buf", s.v_buf.flat(), {n_max, d});
    c.read_into<T>("cache/q_buf", s.q_buf.flat(), {n_max, d});
    s.sum_q.assign(d, T{0});
    c.read_into<T>("cache/sum_q", std::span<T>(s.sum_q), {d});
    double t = 0.0;
    c.read_into<double>("cache/t", std::span<double>(&t, 1), {1});
    if (t < 0.0 || t != static_cast<double>(static_cast<std::uint64_t>(t))) throw FormatError("cache: invalid step counter");
    s.t = static_cast<std::uint64_t>(t);
    if (has_memory) {
        MemoryBank<T> bank;
        const auto& rec = c.get("cache/memory/rows");
        if (rec.shape.size() != 2) throw FormatError("cache: tensor 'cache/memory/rows' has unexpected rank");
        const std::size_t n_mem = rec.shape[0];
        if (!is_power_of_two(n_mem) || n_mem < 2) throw FormatError("cache: invalid memory length");
        bank.rows = Matrix<T>(n_mem, d);
        c.read_into<T>("cache/memory/rows", bank.rows.flat(), {n_mem, d});
        bank.spectrum = HalfSpectrum<T>(n_mem, d);
        auto& ms = bank.spectrum.coeffs;
        c.read_into<T>("cache/memory/spectrum", std::span<T>(reinterpret_cast<T*>(ms.data()), 2 * ms.size()),
                       {ms.rows(), ms.cols(), 2});
        s.memory = std::make_shared<const MemoryBank<T>>(std::move(bank));
    }
    s.twiddles = std::make_shared<const TwiddleTable<T>>(n_max);
    s.initialized = true;
    return s;
}

template <typename T>
void save_cache(const CacheState<T>& s, const std::string& path) {
    cache_to_container(s).save(path);
}

template <typename T>
CacheState<T> load_cache(const std::string& path) {
    return cache_from_container<T>(Container::load(path));
}

}  // namespace spectre
