#include "csisim/presets.hpp"

#include <numbers>

#include "csisim/errors.hpp"

namespace csisim {
namespace {

ScenarioConfig base_config(const std::string& name) {
    ScenarioConfig c;
    c.name = name;
    c.rng_seed = 1;
    c.carrier.center_frequency_hz = 5.54e9;
    c.cfo = CfoModel{10.0, 10000.0, 200.0};
    c.noise.snr_db = 3.0;
    c.noise.awgn = true;
    c.noise.sto_mean_s = 300e-6;
    c.noise.epsilon_t_s = 100e-9;
    c.loss_rate = 0.0;

    // Peer node parked off to the side, a few meters out.
    c.node_j.kind = TrajectoryKind::stationary;
    c.node_j.start.pos = {3.858, 0.929, 0.0};
    c.node_j.duration_s = 10.0;
    c.node_j.sample_rate_hz = 100.0;

    c.node_i.kind = TrajectoryKind::stationary;
    c.node_i.start.pos = {0.0, 0.0, 0.0};
    c.node_i.duration_s = 10.0;
    c.node_i.sample_rate_hz = 100.0;
    return c;
}

ScenarioConfig stationary_config(const std::string& name, double duration_s) {
    ScenarioConfig c = base_config(name);
    c.node_i.duration_s = duration_s;
    c.node_j.duration_s = duration_s;
    return c;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"paper-circular",        "paper-linear",         "paper-stationary-10s",
            "paper-stationary-30s",  "paper-stationary-60s", "paper-stationary-120s",
            "paper-stationary-300s"};
}

bool is_preset(const std::string& name) {
    for (const auto& p : preset_names()) {
        if (p == name) return true;
    }
    return false;
}

ScenarioConfig preset_config(const std::string& name) {
    if (name == "paper-circular") {
        ScenarioConfig c = base_config(name);
        c.node_i.kind = TrajectoryKind::circular;
        c.node_i.radius_m = 0.3;
        return c;
    }
    if (name == "paper-linear") {
        // Same path length as one lap of the 0.3 m circle, so the two mobile
        // presets compare apertures of equal extent.
        ScenarioConfig c = base_config(name);
        c.node_i.kind = TrajectoryKind::linear;
        c.node_i.length_m = 2.0 * std::numbers::pi * 0.3;
        return c;
    }
    if (name == "paper-stationary-10s") return stationary_config(name, 10.0);
    if (name == "paper-stationary-30s") return stationary_config(name, 30.0);
    if (name == "paper-stationary-60s") return stationary_config(name, 60.0);
    if (name == "paper-stationary-120s") return stationary_config(name, 120.0);
    if (name == "paper-stationary-300s") return stationary_config(name, 300.0);

    std::string known;
    for (const auto& p : preset_names()) {
        known += known.empty() ? p : ", " + p;
    }
    throw ValidationError("unknown preset '" + name + "' (known presets: " + known + ")");
}

ScenarioConfig make_noiseless(ScenarioConfig config) {
    config.noise.awgn = false;
    config.noise.sto_mean_s = 0.0;
    config.noise.epsilon_t_s = 0.0;
    config.loss_rate = 0.0;
    return config;
}

}  // namespace csisim
