#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bhsim/adversary.hpp"
#include "bhsim/config.hpp"
#include "bhsim/mobility.hpp"
#include "bhsim/traffic.hpp"

namespace bhsim {

/// A run that threw; identifies the failing scenario point.
class RunFailure : public SimError {
public:
    RunFailure(Protocol variant, double value, std::uint64_t seed, const std::string& what);
    Protocol variant;
    double value;
    std::uint64_t seed;
};

/// Initial field for a config: uniform or grid placement, mobile or not.
RandomWaypoint build_field(const ScenarioConfig& cfg);

/// Attacker ids and roles. Drawn for every protocol so that all variants of
/// a seed share endpoints; protocol aodv installs none of them.
std::vector<AttackerConfig> draw_attackers(const ScenarioConfig& cfg);

std::vector<FlowSpec> build_flows(const ScenarioConfig& cfg,
                                  const std::vector<AttackerConfig>& attackers);

struct RunResult {
    RunMetrics metrics;
    std::vector<std::string> audit;  // formatted session records
};

/// One complete run. `trace`, if given, receives the event log.
RunResult run_scenario(const ScenarioConfig& cfg, std::ostream* trace = nullptr);

struct RunRow {
    Protocol variant;
    SweepAxis axis;
    double axis_value;
    std::uint64_t seed;
    RunMetrics metrics;
};

struct AggregateRow {
    Protocol variant;
    SweepAxis axis;
    double axis_value;
    AggregateMetrics stats;
};

struct MatrixResult {
    std::vector<AggregateRow> rows;  // variant-major, then axis value
    std::vector<RunRow> runs;        // same order, then repetition
};

/// Runs every (variant, value, repetition) with seed base.seed + repetition.
/// Output ordering does not depend on `threads`. Throws RunFailure.
/// With a `trace_dir`, each run's event log goes to
/// <trace_dir>/<variant>_<value>_<seed>.log.
MatrixResult run_matrix(const SweepSpec& sweep, const std::vector<Protocol>& variants,
                        unsigned threads = 1, const std::filesystem::path* trace_dir = nullptr);

/// Renders a number with 6 significant digits.
std::string fmt_number(double v);

extern const char* const kCsvHeader;

void write_csv(const std::vector<AggregateRow>& rows, std::ostream& out);
void write_runs_csv(const std::vector<RunRow>& runs, std::ostream& out);
void write_run_log(const std::vector<RunRow>& runs, std::ostream& out);

/// Throws std::runtime_error when `path` cannot be written.
void emit_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path);

/// Writes fig7/fig9 data for a connections sweep, fig8/fig10 for a speed
/// sweep. Returns the files written.
std::vector<std::filesystem::path> emit_plotdata(const std::vector<AggregateRow>& rows,
                                                 const std::filesystem::path& out_dir);

}  // namespace bhsim
