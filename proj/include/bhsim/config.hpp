#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bhsim/medium.hpp"
#include "bhsim/mobility.hpp"
#include "bhsim/router.hpp"

namespace bhsim {

enum class Protocol { Aodv, AodvAttack, AodvDri };

const char* to_string(Protocol p);
/// Accepts "aodv", "aodv-attack", "aodv-dri". Throws ConfigError otherwise.
Protocol parse_protocol(std::string_view name);

enum class Placement { Uniform, Grid };

/// Every parameter of a single run. Defaults reproduce the reference
/// operating point (30 nodes, 1000 x 1000 m, 1000 s, 15 CBR flows, 2 attackers).
struct ScenarioConfig {
    double duration = 1000.0;
    Area area;
    std::size_t node_count = 30;
    MobilityParams mobility;
    bool mobile = true;               // false: nodes never move
    Placement placement = Placement::Uniform;
    double grid_spacing = 150.0;      // m, used with Placement::Grid
    std::size_t flow_count = 15;
    double packet_rate = 2.0;
    std::uint32_t payload = 512;
    std::size_t attacker_count = 2;
    Protocol protocol = Protocol::AodvAttack;
    std::uint64_t seed = 1;
    SeqNum fabricated_seq_boost = 30;

    MediumParams medium;
    ProtocolParams timers;  // `defense` is derived from `protocol`

    double warmup = 50.0;         // s before the first flow starts
    double start_window = 50.0;   // s over which flow starts are spread
    double drain = 5.0;           // s at the end with no new packets
    double mobility_tick = 0.1;
    double sample_interval = 100.0;

    /// Attackers that actually misbehave in this run.
    std::size_t effective_attackers() const {
        return protocol == Protocol::Aodv ? 0 : attacker_count;
    }
    void validate() const;
};

enum class SweepAxis { Connections, MaxSpeed };

const char* to_string(SweepAxis a);

struct SweepSpec {
    SweepAxis axis = SweepAxis::Connections;
    std::vector<double> values;
    std::size_t repetitions = 5;
    ScenarioConfig base;

    void validate() const;
};

std::vector<double> default_sweep_values(SweepAxis axis);

/// Applies one sweep coordinate to a copy of `base`.
ScenarioConfig at_point(const ScenarioConfig& base, SweepAxis axis, double value);

using ParsedConfig = std::variant<ScenarioConfig, SweepSpec>;

/// Parses `key = value` lines; '#' starts a comment. A `sweep` key turns the
/// file into a SweepSpec. Unknown keys and bad values throw ConfigError
/// naming the key.
ParsedConfig parse_config_text(std::string_view text);
ParsedConfig parse_config(const std::filesystem::path& path);

}  // namespace bhsim
