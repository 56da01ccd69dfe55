#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "spectre/layer/config.hpp"

namespace spectre {

enum class MixerKind { spectre, attention };

inline std::string_view to_string(MixerKind m) { return m == MixerKind::spectre ? "spectre" : "attention"; }

inline MixerKind parse_mixer_kind(std::string_view s) {
    if (s == "spectre") return MixerKind::spectre;
    if (s == "attention") return MixerKind::attention;
    throw ConfigError("unknown mixer kind '" + std::string(s) + "'");
}

struct ModelConfig {
    std::size_t n_layers = 4;
    std::size_t heads = 4;
    std::size_t head_dim = 32;
    std::size_t d_ffn = 0;  // 0 selects 4 * d_model
    std::size_t n_max = 512;
    std::size_t vocab_size = 0;     // 0 = raw-embedding mode
    std::size_t memory_tokens = 0;  // 0 = no memory bank
    std::size_t gate_hidden = 0;    // 0 selects head_dim
    std::size_t toeplitz_radius = 2;
    bool toeplitz_enabled = true;
    bool wrm_enabled = true;
    int wrm_levels = 2;
    WrmControllerMode wrm_mode = WrmControllerMode::always;
    bool share_gates = false;
    MixerKind mixer = MixerKind::spectre;
    std::uint64_t seed = 42;

    std::size_t d_model() const noexcept { return heads * head_dim; }
    std::size_t ffn_dim() const noexcept { return d_ffn ? d_ffn : 4 * d_model(); }

    LayerConfig layer_config() const {
        LayerConfig c;
        c.head_dim = head_dim;
        c.heads = heads;
        c.n_fft = n_max;
        c.gate_hidden = gate_hidden;
        c.toeplitz_radius = toeplitz_radius;
        c.toeplitz_enabled = toeplitz_enabled;
        c.wrm_enabled = wrm_enabled;
        c.wrm_levels = wrm_levels;
        c.wrm_mode = wrm_mode;
        c.memory_tokens = memory_tokens;
        return c;
    }

    void validate() const {
        if (n_layers == 0) throw ConfigError("n_layers must be positive");
        layer_config().validate();
    }

    bool operator==(const ModelConfig&) const = default;
};

inline void to_json(nlohmann::json& j, const ModelConfig& c) {
    j = nlohmann::json{{"n_layers", c.n_layers},
                       {"heads", c.heads},
                       {"head_dim", c.head_dim},
                       {"d_ffn", c.d_ffn},
                       {"n_max", c.n_max},
                       {"vocab_size", c.vocab_size},
                       {"memory_tokens", c.memory_tokens},
                       {"gate_hidden", c.gate_hidden},
                       {"toeplitz_radius", c.toeplitz_radius},
                       {"toeplitz_enabled", c.toeplitz_enabled},
                       {"wrm_enabled", c.wrm_enabled},
                       {"wrm_levels", c.wrm_levels},
                       {"wrm_mode", std::string(to_string(c.wrm_mode))},
                       {"share_gates", c.share_gates},
                       {"mixer", std::string(to_string(c.mixer))},
                       {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, ModelConfig& c) {
    j.at("n_layers").get_to(c.n_layers);
    j.at("heads").get_to(c.heads);
    j.at("head_dim").get_to(c.head_dim);
    j.at("d_ffn").get_to(c.d_ffn);
    j.at("n_max").get_to(c.n_max);
    j.at("vocab_size").get_to(c.vocab_size);
    j.at("memory_tokens").get_to(c.memory_tokens);
    j.at("gate_hidden").get_to(c.gate_hidden);
    j.at("toeplitz_radius").get_to(c.toeplitz_radius);
    j.at("toeplitz_enabled").get_to(c.toeplitz_enabled);
    j.at("wrm_enabled").get_to(c.wrm_enabled);
    j.at("wrm_levels").get_to(c.wrm_levels);
    c.wrm_mode = parse_controller_mode(j.at("wrm_mode").get<std::string>());
    j.at("share_gates").get_to(c.share_gates);
    c.mixer = parse_mixer_kind(j.at("mixer").get<std::string>());
    j.at("seed").get_to(c.seed);
}

}  // namespace spectre
