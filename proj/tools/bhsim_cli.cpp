// Command-line driver: runs a scenario or a sweep over the three protocol
// variants and writes aggregated CSV, per-run CSV, run log and plot data.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "bhsim/config.hpp"
#include "bhsim/experiment.hpp"

namespace fs = std::filesystem;
using namespace bhsim;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRun = 2;

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    body(out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cooperative black hole detection simulator"};
    std::string config_path;
    std::string sweep_name;
    std::string protocol_name;
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    bool per_run = false;
    bool trace = false;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());

    app.add_option("--config", config_path, "key = value scenario or sweep file")->check(CLI::ExistingFile);
    app.add_option("--sweep", sweep_name, "sweep axis")->check(CLI::IsMember({"connections", "speed"}));
    app.add_option("--protocol", protocol_name, "protocol variant")
        ->check(CLI::IsMember({"aodv", "aodv-attack", "aodv-dri", "all"}));
    app.add_option("--reps", reps, "repetitions per point")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "base seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--per-run", per_run, "also write runs.csv");
    app.add_flag("--trace", trace, "write per-run event logs under <out>/traces");
    app.add_option("--threads", threads, "concurrent runs")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    SweepSpec sweep;
    std::vector<Protocol> variants;
    try {
        ParsedConfig parsed = config_path.empty() ? ParsedConfig{ScenarioConfig{}}
                                                  : parse_config(config_path);
        const bool from_sweep = std::holds_alternative<SweepSpec>(parsed);
        if (from_sweep) {
            sweep = std::get<SweepSpec>(parsed);
        } else {
            // A single scenario is a one-point connections sweep.
            sweep.base = std::get<ScenarioConfig>(parsed);
            sweep.axis = SweepAxis::Connections;
            sweep.values = {static_cast<double>(sweep.base.flow_count)};
            sweep.repetitions = 1;
        }
        if (!sweep_name.empty()) {
            const SweepAxis axis = sweep_name == "connections" ? SweepAxis::Connections : SweepAxis::MaxSpeed;
            if (!from_sweep || axis != sweep.axis) sweep.values = default_sweep_values(axis);
            if (!from_sweep) sweep.repetitions = 5;
            sweep.axis = axis;
        }
        if (reps) sweep.repetitions = *reps;
        if (seed) sweep.base.seed = *seed;

        const bool is_sweep = from_sweep || !sweep_name.empty();
        if (protocol_name == "all" || (protocol_name.empty() && is_sweep)) {
            variants = {Protocol::Aodv, Protocol::AodvAttack, Protocol::AodvDri};
        } else if (protocol_name.empty()) {
            variants = {sweep.base.protocol};
        } else {
            variants = {parse_protocol(protocol_name)};
        }
        sweep.validate();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const fs::path out(out_dir);
        fs::create_directories(out);
        std::optional<fs::path> trace_dir;
        if (trace) {
            trace_dir = out / "traces";
            fs::create_directories(*trace_dir);
        }
        const MatrixResult result =
            run_matrix(sweep, variants, threads, trace_dir ? &*trace_dir : nullptr);

        emit_csv(result.rows, out / "results.csv");
        write_file(out / "run.log", [&](std::ostream& os) { write_run_log(result.runs, os); });
        if (per_run) {
            write_file(out / "runs.csv", [&](std::ostream& os) { write_runs_csv(result.runs, os); });
        }
        emit_plotdata(result.rows, out);
        std::cout << "wrote " << result.rows.size() << " rows from " << result.runs.size()
                  << " runs to " << (out / "results.csv").string() << '\n';
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return kExitRun;
    }
    return 0;
}
