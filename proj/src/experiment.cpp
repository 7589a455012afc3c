#include "bhsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "bhsim/network.hpp"

namespace bhsim {

RunFailure::RunFailure(Protocol v, double val, std::uint64_t s, const std::string& what)
    : SimError("run failed: variant=" + std::string(to_string(v)) + " value=" + fmt_number(val) +
               " seed=" + std::to_string(s) + ": " + what),
      variant(v),
      value(val),
      seed(s) {}

RandomWaypoint build_field(const ScenarioConfig& cfg) {
    if (cfg.placement == Placement::Grid) {
        const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(double(cfg.node_count))));
        std::vector<Position> pos;
        for (std::size_t i = 0; i < cfg.node_count; ++i) {
            pos.push_back({double(i % cols) * cfg.grid_spacing, double(i / cols) * cfg.grid_spacing});
        }
        return RandomWaypoint::fixed(pos, cfg.area);
    }
    RandomWaypoint field(cfg.node_count, cfg.area, cfg.mobility,
                         Rng(derive_seed(cfg.seed, Stream::Mobility)));
    if (cfg.mobile) return field;
    std::vector<Position> pos;
    for (NodeId n = 0; n < cfg.node_count; ++n) pos.push_back(field.position(n));
    return RandomWaypoint::fixed(pos, cfg.area);
}

std::vector<AttackerConfig> draw_attackers(const ScenarioConfig& cfg) {
    Rng rng(derive_seed(cfg.seed, Stream::Roles));
    std::vector<NodeId> pool(cfg.node_count);
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<NodeId>(i);
    std::vector<NodeId> chosen;
    for (std::size_t i = 0; i < cfg.attacker_count; ++i) {
        const std::size_t j = i + rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
        chosen.push_back(pool[i]);
    }
    // Consecutive draws form primary/colluder pairs; an odd one out acts alone.
    std::vector<AttackerConfig> out;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        AttackerConfig a;
        a.node = chosen[i];
        a.fabricated_seq_boost = cfg.fabricated_seq_boost;
        if (i % 2 == 0) {
            a.role = AttackerRole::Primary;
            a.partner = i + 1 < chosen.size() ? chosen[i + 1] : kNoNode;
        } else {
            a.role = AttackerRole::Colluder;
            a.partner = chosen[i - 1];
        }
        out.push_back(a);
    }
    return out;
}

std::vector<FlowSpec> build_flows(const ScenarioConfig& cfg,
                                  const std::vector<AttackerConfig>& attackers) {
    FlowPlan plan;
    plan.count = cfg.flow_count;
    for (NodeId n = 0; n < cfg.node_count; ++n) {
        const bool bad = std::any_of(attackers.begin(), attackers.end(),
                                     [n](const AttackerConfig& a) { return a.node == n; });
        if (!bad) plan.endpoints.push_back(n);
    }
    plan.rate = cfg.packet_rate;
    plan.payload = cfg.payload;
    plan.first_start = cfg.warmup;
    plan.start_window = cfg.start_window;
    plan.stop = cfg.duration - cfg.drain;
    Rng rng(derive_seed(cfg.seed, Stream::Traffic));
    return generate_flows(plan, rng);
}

RunResult run_scenario(const ScenarioConfig& cfg, std::ostream* trace) {
    cfg.validate();
    const std::vector<AttackerConfig> drawn = draw_attackers(cfg);
    const std::vector<FlowSpec> flows = build_flows(cfg, drawn);

    NetworkParams params;
    params.medium = cfg.medium;
    params.protocol = cfg.timers;
    params.protocol.defense = cfg.protocol == Protocol::AodvDri;
    params.mobility_tick = cfg.mobility_tick;
    params.sample_interval = cfg.sample_interval;

    Network net(cfg.seed, build_field(cfg), params,
                cfg.protocol == Protocol::Aodv ? std::vector<AttackerConfig>{} : drawn);
    net.set_trace(trace);
    for (const FlowSpec& f : flows) net.add_flow(f);
    net.run_until(cfg.duration);

    RunResult result;
    result.metrics = net.metrics();
    for (const SessionRecord& r : net.audit()) result.audit.push_back(format_record(r));
    return result;
}

MatrixResult run_matrix(const SweepSpec& sweep, const std::vector<Protocol>& variants,
                        unsigned threads, const std::filesystem::path* trace_dir) {
    sweep.validate();
    if (variants.empty()) throw ConfigError("no protocol variants selected");

    struct Job {
        Protocol variant;
        double value;
        std::uint64_t seed;
        ScenarioConfig cfg;
    };
    std::vector<Job> jobs;
    for (Protocol v : variants) {
        for (double value : sweep.values) {
            for (std::size_t rep = 0; rep < sweep.repetitions; ++rep) {
                ScenarioConfig cfg = at_point(sweep.base, sweep.axis, value);
                cfg.protocol = v;
                cfg.seed = sweep.base.seed + rep;
                jobs.push_back({v, value, cfg.seed, cfg});
            }
        }
    }

    std::vector<RunMetrics> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                if (trace_dir == nullptr) {
                    results[i] = run_scenario(jobs[i].cfg).metrics;
                    continue;
                }
                const std::filesystem::path file =
                    *trace_dir / (std::string(to_string(jobs[i].variant)) + "_" +
                                  fmt_number(jobs[i].value) + "_" + std::to_string(jobs[i].seed) +
                                  ".log");
                std::ofstream trace(file, std::ios::binary);
                if (!trace) throw std::runtime_error("cannot write '" + file.string() + "'");
                results[i] = run_scenario(jobs[i].cfg, &trace).metrics;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw RunFailure(jobs[i].variant, jobs[i].value, jobs[i].seed, e.what());
        }
    }

    MatrixResult out;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        out.runs.push_back({jobs[i].variant, sweep.axis, jobs[i].value, jobs[i].seed, results[i]});
    }
    for (std::size_t i = 0; i < jobs.size(); i += sweep.repetitions) {
        std::vector<RunMetrics> group(results.begin() + static_cast<std::ptrdiff_t>(i),
                                      results.begin() + static_cast<std::ptrdiff_t>(i + sweep.repetitions));
        out.rows.push_back({jobs[i].variant, sweep.axis, jobs[i].value, aggregate(group)});
    }
    return out;
}

std::string fmt_number(double v) {
    if (v == 0.0) v = 0.0;  // no "-0"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const char* const kCsvHeader =
    "variant,axis,axis_value,reps,sent_mean,delivered_mean,pdr_mean,pdr_sd,false_rreps_mean,"
    "false_rreps_sd,poisoned_mean,blacklist_size_mean,detection_time_mean,rreq,rrep,rerr,frq,frp,"
    "alarm";

void write_csv(const std::vector<AggregateRow>& rows, std::ostream& out) {
    out << kCsvHeader << '\n';
    for (const AggregateRow& r : rows) {
        const AggregateMetrics& a = r.stats;
        out << to_string(r.variant) << ',' << to_string(r.axis) << ',' << fmt_number(r.axis_value)
            << ',' << a.runs << ',' << fmt_number(a.sent.mean) << ',' << fmt_number(a.delivered.mean)
            << ',' << (a.pdr ? fmt_number(a.pdr->mean) : "") << ','
            << (a.pdr ? fmt_number(a.pdr->sd) : "") << ',' << fmt_number(a.false_rreps.mean) << ','
            << fmt_number(a.false_rreps.sd) << ',' << fmt_number(a.poisoned.mean) << ','
            << fmt_number(a.blacklist_size.mean) << ','
            << (a.detection_time ? fmt_number(a.detection_time->mean) : "") << ','
            << fmt_number(a.rreq.mean) << ',' << fmt_number(a.rrep.mean) << ','
            << fmt_number(a.rerr.mean) << ',' << fmt_number(a.frq.mean) << ','
            << fmt_number(a.frp.mean) << ',' << fmt_number(a.alarm.mean) << '\n';
    }
}

void write_runs_csv(const std::vector<RunRow>& runs, std::ostream& out) {
    out << "variant,axis,axis_value,seed,sent,delivered,pdr,false_rreps,poisoned,blacklist_size,"
           "detection_time,rreq,rrep,rerr,frq,frp,alarm,attacker_dropped,overflow_dropped,"
           "no_route_dropped,ttl_dropped,link_lost,in_flight\n";
    for (const RunRow& r : runs) {
        const RunMetrics& m = r.metrics;
        out << to_string(r.variant) << ',' << to_string(r.axis) << ',' << fmt_number(r.axis_value)
            << ',' << r.seed << ',' << m.sent << ',' << m.delivered << ','
            << (m.pdr ? fmt_number(*m.pdr) : "") << ',' << m.false_rreps << ',' << m.poisoned_nodes
            << ',' << m.blacklisted.size() << ','
            << (m.detection_time ? fmt_number(*m.detection_time) : "") << ',' << m.control.rreq
            << ',' << m.control.rrep << ',' << m.control.rerr << ',' << m.control.frq << ','
            << m.control.frp << ',' << m.control.alarm << ',' << m.attacker_dropped << ','
            << m.overflow_dropped << ',' << m.no_route_dropped << ',' << m.ttl_dropped << ','
            << m.link_lost << ',' << m.in_flight << '\n';
    }
}

void write_run_log(const std::vector<RunRow>& runs, std::ostream& out) {
    for (const RunRow& r : runs) {
        out << "variant=" << to_string(r.variant) << ' ' << to_string(r.axis) << '='
            << fmt_number(r.axis_value) << " seed=" << r.seed << ' '
            << r.metrics.conservation_line() << '\n';
    }
}

void emit_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path) {
    if (rows.empty()) throw ConfigError("emit_csv: no rows");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    write_csv(rows, out);
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

namespace {

void write_plot(const std::vector<AggregateRow>& rows, SweepAxis axis,
                  const std::filesystem::path& path, bool pdr) {
    std::vector<Protocol> variants;
    std::vector<double> values;
    for (const AggregateRow& r : rows) {
        if (r.axis != axis) continue;
        if (std::find(variants.begin(), variants.end(), r.variant) == variants.end()) {
            variants.push_back(r.variant);
        }
        if (std::find(values.begin(), values.end(), r.axis_value) == values.end()) {
            values.push_back(r.axis_value);
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << "# " << to_string(axis);
    for (Protocol v : variants) out << ' ' << to_string(v) << "_mean " << to_string(v) << "_sd";
    out << '\n';
    for (double value : values) {
        out << fmt_number(value);
        for (Protocol v : variants) {
            const auto it = std::find_if(rows.begin(), rows.end(), [&](const AggregateRow& r) {
                return r.axis == axis && r.variant == v && r.axis_value == value;
            });
            if (it == rows.end()) {
                out << " nan nan";
                continue;
            }
            const AggregateMetrics& a = it->stats;
            if (pdr) {
                out << ' ' << (a.pdr ? fmt_number(a.pdr->mean) : "nan") << ' '
                    << (a.pdr ? fmt_number(a.pdr->sd) : "nan");
            } else {
                out << ' ' << fmt_number(a.false_rreps.mean) << ' ' << fmt_number(a.false_rreps.sd);
            }
        }
        out << '\n';
    }
}

}  // namespace

std::vector<std::filesystem::path> emit_plotdata(const std::vector<AggregateRow>& rows,
                                                 const std::filesystem::path& out_dir) {
    std::vector<std::filesystem::path> written;
    const bool conn = std::any_of(rows.begin(), rows.end(),
                                  [](const AggregateRow& r) { return r.axis == SweepAxis::Connections; });
    const bool speed = std::any_of(rows.begin(), rows.end(),
                                   [](const AggregateRow& r) { return r.axis == SweepAxis::MaxSpeed; });
    if (conn) {
        write_plot(rows, SweepAxis::Connections, out_dir / "fig7.dat", true);
        write_plot(rows, SweepAxis::Connections, out_dir / "fig9.dat", false);
        written.push_back(out_dir / "fig7.dat");
        written.push_back(out_dir / "fig9.dat");
    }
    if (speed) {
        write_plot(rows, SweepAxis::MaxSpeed, out_dir / "fig8.dat", true);
        write_plot(rows, SweepAxis::MaxSpeed, out_dir / "fig10.dat", false);
        written.push_back(out_dir / "fig8.dat");
        written.push_back(out_dir / "fig10.dat");
    }
    return written;
}

}  // namespace bhsim
