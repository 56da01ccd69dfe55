#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "spectre/core/fft.hpp"
#include "spectre/errors.hpp"

namespace spectre {

enum class WrmControllerMode { always, never, learned_stub };
enum class Precision { f32, f64 };

inline std::string_view to_string(WrmControllerMode m) {
    switch (m) {
        case WrmControllerMode::always: return "always";
        case WrmControllerMode::never: return "never";
        case WrmControllerMode::learned_stub: return "learned-stub";
    }
    return "always";
}

inline WrmControllerMode parse_controller_mode(std::string_view s) {
    if (s == "always") return WrmControllerMode::always;
    if (s == "never") return WrmControllerMode::never;
    if (s == "learned-stub") return WrmControllerMode::learned_stub;
    throw ConfigError("unknown WRM controller mode '" + std::string(s) + "'");
}

/// Shape and feature switches for one mixing layer. All heads share it.
struct LayerConfig {
    std::size_t head_dim = 32;
    std::size_t heads = 1;
    std::size_t n_fft = 512;
    std::size_t gate_hidden = 0;  // 0 selects head_dim
    std::size_t toeplitz_radius = 2;
    bool toeplitz_enabled = true;
    bool wrm_enabled = false;
    int wrm_levels = 2;
    WrmControllerMode wrm_mode = WrmControllerMode::always;
    Precision precision = Precision::f32;
    std::size_t memory_tokens = 0;  // 0 disables the memory gate extension

    std::size_t hidden() const noexcept { return gate_hidden ? gate_hidden : head_dim; }
    std::size_t bins() const noexcept { return n_fft / 2 + 1; }
    std::size_t memory_bins() const noexcept { return memory_tokens ? memory_tokens / 2 + 1 : 0; }
    std::size_t model_dim() const noexcept { return heads * head_dim; }

    void validate() const {
        if (head_dim == 0) throw ConfigError("head_dim must be positive");
        if (heads == 0) throw ConfigError("heads must be positive");
        require_power_of_two(n_fft, "n_fft");
        if (n_fft < 2) throw ConfigError("n_fft must be at least 2");
        if (wrm_levels < 1) throw ConfigError("wrm_levels must be >= 1");
        if (wrm_enabled && (wrm_levels >= 63 || n_fft % (std::size_t{1} << wrm_levels) != 0)) {
            throw ConfigError("n_fft must be divisible by 2^wrm_levels when WRM is enabled");
        }
        if (memory_tokens) {
            require_power_of_two(memory_tokens, "memory_tokens");
            if (memory_tokens < 2) throw ConfigError("memory_tokens must be at least 2");
            if (memory_tokens > n_fft / 4) throw ConfigError("memory_tokens must not exceed n_fft/4");
        }
    }
};

}  // namespace spectre
