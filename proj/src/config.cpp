#include "bhsim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace bhsim {

const char* to_string(Protocol p) {
    switch (p) {
        case Protocol::Aodv: return "aodv";
        case Protocol::AodvAttack: return "aodv-attack";
        case Protocol::AodvDri: return "aodv-dri";
    }
    return "?";
}

Protocol parse_protocol(std::string_view name) {
    if (name == "aodv") return Protocol::Aodv;
    if (name == "aodv-attack") return Protocol::AodvAttack;
    if (name == "aodv-dri") return Protocol::AodvDri;
    throw ConfigError("unknown protocol '" + std::string(name) + "'");
}

const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::Connections: return "connections";
        case SweepAxis::MaxSpeed: return "max_speed";
    }
    return "?";
}

void ScenarioConfig::validate() const {
    if (!(duration > 0.0)) throw ConfigError("duration must be > 0");
    if (!(area.width > 0.0 && area.height > 0.0)) throw ConfigError("area must be positive");
    if (node_count < 2) throw ConfigError("node_count must be >= 2");
    mobility.validate();
    if (placement == Placement::Grid) {
        if (!(grid_spacing > 0.0)) throw ConfigError("grid_spacing must be > 0");
        const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(double(node_count))));
        const std::size_t rows = (node_count + cols - 1) / cols;
        if ((cols - 1) * grid_spacing > area.width || (rows - 1) * grid_spacing > area.height) {
            throw ConfigError("grid_spacing: grid does not fit in the area");
        }
    }
    if (!(packet_rate > 0.0)) throw ConfigError("packet_rate must be > 0");
    if (attacker_count >= node_count) throw ConfigError("attacker_count must be < node_count");
    medium.validate();
    timers.validate();
    if (warmup < 0.0) throw ConfigError("warmup must be >= 0");
    if (start_window < 0.0) throw ConfigError("start_window must be >= 0");
    if (drain < 0.0 || drain >= duration) throw ConfigError("drain must lie in [0, duration)");
    if (!(mobility_tick > 0.0)) throw ConfigError("mobility_tick must be > 0");
    if (!(sample_interval > 0.0)) throw ConfigError("sample_interval must be > 0");
    const std::size_t honest = node_count - attacker_count;
    if (flow_count > honest * (honest - 1)) {
        throw ConfigError("flow_count exceeds the number of distinct honest pairs");
    }
}

void SweepSpec::validate() const {
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (values.empty()) throw ConfigError("values must not be empty");
    base.validate();
    for (double v : values) at_point(base, axis, v).validate();
}

std::vector<double> default_sweep_values(SweepAxis axis) {
    if (axis == SweepAxis::Connections) return {5, 10, 15, 20, 25, 29};
    return {5, 10, 15, 20};
}

ScenarioConfig at_point(const ScenarioConfig& base, SweepAxis axis, double value) {
    ScenarioConfig c = base;
    if (axis == SweepAxis::Connections) {
        if (value < 0.0 || value != std::floor(value)) {
            throw ConfigError("values: connection counts must be non-negative integers");
        }
        c.flow_count = static_cast<std::size_t>(value);
    } else {
        c.mobility.v_max = value;
    }
    return c;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double as_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out)) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
    return out;
}

std::uint64_t as_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

bool as_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& scenario_keys() {
    static const std::map<std::string, Setter> keys = {
        {"duration", [](auto& c, auto& k, auto& v) { c.duration = as_double(k, v); }},
        {"area_width", [](auto& c, auto& k, auto& v) { c.area.width = as_double(k, v); }},
        {"area_height", [](auto& c, auto& k, auto& v) { c.area.height = as_double(k, v); }},
        {"node_count", [](auto& c, auto& k, auto& v) { c.node_count = as_uint(k, v); }},
        {"range", [](auto& c, auto& k, auto& v) { c.medium.range = as_double(k, v); }},
        {"v_min", [](auto& c, auto& k, auto& v) { c.mobility.v_min = as_double(k, v); }},
        {"v_max", [](auto& c, auto& k, auto& v) { c.mobility.v_max = as_double(k, v); }},
        {"pause", [](auto& c, auto& k, auto& v) { c.mobility.pause = as_double(k, v); }},
        {"mobility",
         [](auto& c, auto& k, auto& v) {
             if (v == "waypoint") {
                 c.mobile = true;
             } else if (v == "static") {
                 c.mobile = false;
             } else {
                 throw ConfigError(k + ": expected waypoint or static, got '" + v + "'");
             }
         }},
        {"placement",
         [](auto& c, auto& k, auto& v) {
             if (v == "uniform") {
                 c.placement = Placement::Uniform;
             } else if (v == "grid") {
                 c.placement = Placement::Grid;
             } else {
                 throw ConfigError(k + ": expected uniform or grid, got '" + v + "'");
             }
         }},
        {"grid_spacing", [](auto& c, auto& k, auto& v) { c.grid_spacing = as_double(k, v); }},
        {"flow_count", [](auto& c, auto& k, auto& v) { c.flow_count = as_uint(k, v); }},
        {"packet_rate", [](auto& c, auto& k, auto& v) { c.packet_rate = as_double(k, v); }},
        {"payload",
         [](auto& c, auto& k, auto& v) { c.payload = static_cast<std::uint32_t>(as_uint(k, v)); }},
        {"attacker_count", [](auto& c, auto& k, auto& v) { c.attacker_count = as_uint(k, v); }},
        {"protocol",
         [](auto& c, auto& k, auto& v) {
             try {
                 c.protocol = parse_protocol(v);
             } catch (const ConfigError& e) {
                 throw ConfigError(k + ": " + e.what());
             }
         }},
        {"seed", [](auto& c, auto& k, auto& v) { c.seed = as_uint(k, v); }},
        {"fabricated_seq_boost",
         [](auto& c, auto& k, auto& v) {
             c.fabricated_seq_boost = static_cast<SeqNum>(as_uint(k, v));
         }},
        {"per_hop_delay", [](auto& c, auto& k, auto& v) { c.medium.per_hop_delay = as_double(k, v); }},
        {"broadcast_jitter_max",
         [](auto& c, auto& k, auto& v) { c.medium.broadcast_jitter_max = as_double(k, v); }},
        {"loss_probability",
         [](auto& c, auto& k, auto& v) { c.medium.loss_probability = as_double(k, v); }},
        {"route_lifetime", [](auto& c, auto& k, auto& v) { c.timers.route_lifetime = as_double(k, v); }},
        {"discovery_timeout",
         [](auto& c, auto& k, auto& v) { c.timers.discovery_timeout = as_double(k, v); }},
        {"discovery_retries",
         [](auto& c, auto& k, auto& v) { c.timers.discovery_retries = static_cast<int>(as_uint(k, v)); }},
        {"buffer_cap", [](auto& c, auto& k, auto& v) { c.timers.buffer_cap = as_uint(k, v); }},
        {"frp_timeout", [](auto& c, auto& k, auto& v) { c.timers.frp_timeout = as_double(k, v); }},
        {"hop_budget",
         [](auto& c, auto& k, auto& v) { c.timers.hop_budget = static_cast<int>(as_uint(k, v)); }},
        {"data_ttl",
         [](auto& c, auto& k, auto& v) { c.timers.data_ttl = static_cast<std::uint32_t>(as_uint(k, v)); }},
        {"dri_sharing", [](auto& c, auto& k, auto& v) { c.timers.dri_sharing = as_bool(k, v); }},
        {"warmup", [](auto& c, auto& k, auto& v) { c.warmup = as_double(k, v); }},
        {"start_window", [](auto& c, auto& k, auto& v) { c.start_window = as_double(k, v); }},
        {"drain", [](auto& c, auto& k, auto& v) { c.drain = as_double(k, v); }},
        {"mobility_tick", [](auto& c, auto& k, auto& v) { c.mobility_tick = as_double(k, v); }},
        {"sample_interval", [](auto& c, auto& k, auto& v) { c.sample_interval = as_double(k, v); }},
    };
    return keys;
}

SweepAxis parse_axis(const std::string& key, const std::string& v) {
    if (v == "connections") return SweepAxis::Connections;
    if (v == "speed" || v == "max_speed") return SweepAxis::MaxSpeed;
    throw ConfigError(key + ": expected connections or speed, got '" + v + "'");
}

}  // namespace

ParsedConfig parse_config_text(std::string_view text) {
    ScenarioConfig cfg;
    std::optional<SweepAxis> axis;
    std::optional<std::vector<double>> values;
    std::optional<std::size_t> reps;

    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (value.empty()) throw ConfigError(key + ": missing value");

        if (key == "sweep") {
            axis = parse_axis(key, value);
        } else if (key == "values") {
            std::vector<double> vs;
            std::stringstream items(value);
            std::string item;
            while (std::getline(items, item, ',')) vs.push_back(as_double(key, trim(item)));
            values = std::move(vs);
        } else if (key == "repetitions") {
            reps = as_uint(key, value);
        } else if (auto it = scenario_keys().find(key); it != scenario_keys().end()) {
            it->second(cfg, key, value);
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    }

    if (!axis) {
        if (values) throw ConfigError("values: only valid together with 'sweep'");
        if (reps) throw ConfigError("repetitions: only valid together with 'sweep'");
        cfg.validate();
        return cfg;
    }
    SweepSpec sweep;
    sweep.axis = *axis;
    sweep.values = values ? *values : default_sweep_values(*axis);
    if (reps) sweep.repetitions = *reps;
    sweep.base = cfg;
    sweep.validate();
    return sweep;
}

ParsedConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

}  // namespace bhsim
