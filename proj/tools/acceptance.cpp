// Acceptance gate: runs every criterion and prints one PASS/FAIL line each.
// Exit status is 0 only if all criteria pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "bhsim/experiment.hpp"
#include "bhsim/network.hpp"

using namespace bhsim;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;
std::uint64_t audited_runs = 0;
std::vector<std::string> conservation_breaks;

void report(int number, const char* name, const Outcome& o) {
    std::printf("criterion %d %-22s %s  %s\n", number, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c, d);
    return buf;
}

void audit(const RunMetrics& m, const std::string& label) {
    ++audited_runs;
    if (!m.conserved()) conservation_breaks.push_back(label + " " + m.conservation_line());
}

void audit(const MatrixResult& r) {
    for (const RunRow& row : r.runs) {
        audit(row.metrics, std::string(to_string(row.variant)) + " " + to_string(row.axis) + "=" +
                               fmt_number(row.axis_value) + " seed=" + std::to_string(row.seed));
    }
}

// Matrix runs are cached by (variant, axis, value) so criteria sharing an
// operating point share the same runs.
class Runs {
public:
    const AggregateRow& row(Protocol v, SweepAxis axis, double value) {
        const auto key = std::make_tuple(v, axis, value);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            SweepSpec s;
            s.axis = axis;
            s.values = {value};
            s.repetitions = 5;
            MatrixResult r = run_matrix(s, {v});
            audit(r);
            it = cache_.emplace(key, r.rows.front()).first;
        }
        return it->second;
    }

private:
    std::map<std::tuple<Protocol, SweepAxis, double>, AggregateRow> cache_;
};

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = (double(i) + double(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxx == 0 || syy == 0 ? 0.0 : sxy / std::sqrt(sxx * syy);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(ranks(x), ranks(y));
}

std::vector<int> bfs(const std::vector<Position>& pos, NodeId src, double range) {
    std::vector<int> d(pos.size(), -1);
    std::queue<NodeId> q;
    d[src] = 0;
    q.push(src);
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop();
        for (NodeId v = 0; v < pos.size(); ++v) {
            const double dx = pos[u].x - pos[v].x, dy = pos[u].y - pos[v].y;
            if (d[v] < 0 && dx * dx + dy * dy <= range * range) {
                d[v] = d[u] + 1;
                q.push(v);
            }
        }
    }
    return d;
}

// ---------------------------------------------------------------------------

Outcome golden_detection() {
    const auto t0 = Clock::now();
    const NodeId S = 0, N6 = 3, B1 = 4, B2 = 5, D = 6;
    const std::vector<Position> pos{{100, 400}, {260, 300}, {420, 300}, {580, 360},
                                    {250, 510}, {430, 480}, {740, 400}};
    AttackerConfig b1{B1, AttackerRole::Primary, B2, 30, std::nullopt};
    AttackerConfig b2{B2, AttackerRole::Colluder, B1, 30, N6};
    NetworkParams p;
    p.protocol.defense = true;
    Network net(1, RandomWaypoint::fixed(pos, Area{}), p, {b1, b2});
    // Node 6 is three hops from S, so S's own data never reaches it directly;
    // it is trusted the way a finished cross-check trusts a node.
    net.node(S).update_dri_secure(N6);
    net.add_flow(FlowSpec{1, S, D, 2.0, 512, 1.0, 20.0});
    net.run_until(30.0);
    const RunMetrics m = net.metrics();
    audit(m, "golden");

    std::size_t found = 0;
    bool one_verdict_names_both = false;
    for (const SessionRecord& r : net.audit()) {
        if (r.origin != S || r.verdict != Verdict::BlackholesFound) continue;
        ++found;
        one_verdict_names_both = r.blackholes == std::vector<NodeId>{B1, B2};
    }
    std::size_t honest_accused = 0;
    for (NodeId n = 0; n < net.size(); ++n) {
        if (net.attackers().count(n)) continue;
        for (NodeId b : net.node(n).blacklist().ids()) honest_accused += net.attackers().count(b) ? 0 : 1;
    }
    const double runtime = seconds_since(t0);
    Outcome o;
    o.pass = net.node(S).blacklist().ids() == std::set<NodeId>{B1, B2} && honest_accused == 0 &&
             found == 1 && one_verdict_names_both && runtime < 1.0;
    o.detail = "blacklist(S)={";
    for (NodeId b : net.node(S).blacklist().ids()) o.detail += std::to_string(b) + (b == B2 ? "" : ",");
    o.detail += "} verdicts=" + std::to_string(found) + " honest_accused=" +
                std::to_string(honest_accused) + fmt(" runtime=%.3fs", runtime);
    return o;
}

Outcome soundness() {
    const auto t0 = Clock::now();
    std::size_t blacklisted = 0, verdicts = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        ScenarioConfig c;
        c.protocol = Protocol::AodvDri;
        c.attacker_count = 0;
        c.seed = seed;
        const RunMetrics m = run_scenario(c).metrics;
        audit(m, "soundness seed=" + std::to_string(seed));
        blacklisted += m.blacklisted.size();
        verdicts += m.blackhole_verdicts;
    }
    const double runtime = seconds_since(t0);
    return {blacklisted == 0 && verdicts == 0 && runtime < 60.0,
            "runs=20 blacklisted=" + std::to_string(blacklisted) + " blackhole_verdicts=" +
                std::to_string(verdicts) + fmt(" runtime=%.1fs", runtime)};
}

Outcome baseline_health(Runs& runs) {
    ScenarioConfig grid;
    grid.protocol = Protocol::Aodv;
    grid.placement = Placement::Grid;
    grid.mobile = false;
    const RunMetrics g = run_scenario(grid).metrics;
    audit(g, "baseline grid");
    const double mobile = runs.row(Protocol::Aodv, SweepAxis::Connections, 15).stats.pdr->mean;
    const bool grid_ok = g.pdr && *g.pdr == 1.0;
    return {grid_ok && mobile >= 0.75,
            fmt("grid_pdr=%.6f (sent=%.0f) mobile_pdr_mean=%.4f (floor 0.75)", g.pdr.value_or(-1),
                double(g.sent), mobile)};
}

Outcome attack_severity(Runs& runs) {
    const double base = runs.row(Protocol::Aodv, SweepAxis::Connections, 15).stats.pdr->mean;
    const double atk = runs.row(Protocol::AodvAttack, SweepAxis::Connections, 15).stats.pdr->mean;
    const double ratio = atk / base;
    return {ratio <= 0.55 && atk >= 0.15 && atk <= 0.55,
            fmt("attack_pdr=%.4f baseline_pdr=%.4f ratio=%.4f (<= 0.55, attack in [0.15,0.55])", atk,
                base, ratio)};
}

Outcome defense_gain(Runs& runs) {
    const double atk_c = runs.row(Protocol::AodvAttack, SweepAxis::Connections, 15).stats.pdr->mean;
    const double dri_c = runs.row(Protocol::AodvDri, SweepAxis::Connections, 15).stats.pdr->mean;
    const double atk_s = runs.row(Protocol::AodvAttack, SweepAxis::MaxSpeed, 20).stats.pdr->mean;
    const double dri_s = runs.row(Protocol::AodvDri, SweepAxis::MaxSpeed, 20).stats.pdr->mean;
    return {dri_c - atk_c >= 0.10 && dri_s - atk_s >= 0.10,
            fmt("gain@15flows=%.4f gain@20m/s=%.4f (>= 0.10 each; dri %.4f vs attack %.4f at 15 flows)",
                dri_c - atk_c, dri_s - atk_s, dri_c, atk_c)};
}

Outcome false_rrep_trends(Runs& runs) {
    std::string detail;
    double rho[2] = {0, 0};
    const SweepAxis axes[2] = {SweepAxis::Connections, SweepAxis::MaxSpeed};
    for (int a = 0; a < 2; ++a) {
        std::vector<double> x, y;
        for (double v : default_sweep_values(axes[a])) {
            x.push_back(v);
            y.push_back(runs.row(Protocol::AodvAttack, axes[a], v).stats.false_rreps.mean);
        }
        rho[a] = spearman(x, y);
        detail += std::string(to_string(axes[a])) + "=[";
        for (std::size_t i = 0; i < y.size(); ++i) detail += (i ? " " : "") + fmt_number(y[i]);
        detail += "] ";
    }
    const AggregateRow& op = runs.row(Protocol::AodvAttack, SweepAxis::Connections, 15);
    const double fr = op.stats.false_rreps.mean;
    const double poisoned = op.stats.poisoned.mean;
    const double third = 30.0 / 3.0;
    return {rho[0] > 0 && rho[1] > 0 && fr > 100 && poisoned >= third,
            fmt("rho_connections=%.3f rho_speed=%.3f false_rreps_mean=%.1f poisoned_mean=%.2f", rho[0],
                rho[1], fr, poisoned) +
                " (need >0, >0, >100, >=10) " + detail};
}

Outcome oracle_equivalence() {
    const auto t0 = Clock::now();
    Rng rng(2024);
    int agree = 0, graphs = 0;
    // The first copy of a flooded request must arrive along a shortest path,
    // so rebroadcast jitter is kept below one per-hop delay over the diameter.
    NetworkParams p;
    p.medium.broadcast_jitter_max = 0.0001;
    while (graphs < 50) {
        const std::size_t n = 2 + rng.below(11);
        std::vector<Position> pos;
        for (std::size_t i = 0; i < n; ++i) pos.push_back({rng.uniform(0, 700), rng.uniform(0, 700)});
        const auto hops = bfs(pos, 0, 200.0);
        if (std::any_of(hops.begin(), hops.end(), [](int h) { return h < 0; })) continue;
        ++graphs;
        const NodeId dst = NodeId(1 + rng.below(n - 1));
        Network net(std::uint64_t(graphs), RandomWaypoint::fixed(pos, Area{}), p);
        net.node(0).originate_discovery(dst);
        net.run_until(2.0);
        const RouteEntry* r = net.node(0).routes().lookup(dst, net.now());
        agree += r != nullptr && int(r->hop_count) == hops[dst] ? 1 : 0;
    }
    const double runtime = seconds_since(t0);
    return {agree == graphs && runtime < 10.0,
            std::to_string(agree) + "/" + std::to_string(graphs) +
                fmt(" graphs match BFS (jitter 0.1 ms), runtime=%.3fs", runtime)};
}

Outcome determinism() {
    SweepSpec s;
    s.values = {15};
    s.repetitions = 2;
    const std::vector<Protocol> all{Protocol::Aodv, Protocol::AodvAttack, Protocol::AodvDri};
    std::ostringstream a, b;
    const MatrixResult ra = run_matrix(s, all);
    const MatrixResult rb = run_matrix(s, all);
    audit(ra);
    audit(rb);
    write_csv(ra.rows, a);
    write_csv(rb.rows, b);
    write_runs_csv(ra.runs, a);
    write_runs_csv(rb.runs, b);

    bool traces_equal = true;
    std::size_t trace_bytes = 0;
    for (Protocol v : all) {
        ScenarioConfig c;
        c.protocol = v;
        c.seed = 7;
        std::ostringstream t1, t2;
        audit(run_scenario(c, &t1).metrics, "determinism trace");
        audit(run_scenario(c, &t2).metrics, "determinism trace");
        traces_equal = traces_equal && t1.str() == t2.str();
        trace_bytes += t1.str().size();
    }
    return {a.str() == b.str() && traces_equal,
            "csv_bytes=" + std::to_string(a.str().size()) +
                " csv_identical=" + (a.str() == b.str() ? "yes" : "no") +
                " trace_bytes=" + std::to_string(trace_bytes) +
                " traces_identical=" + (traces_equal ? "yes" : "no")};
}

Outcome conservation() {
    std::string detail = "runs_audited=" + std::to_string(audited_runs) +
                         " mismatches=" + std::to_string(conservation_breaks.size());
    if (!conservation_breaks.empty()) detail += " first: " + conservation_breaks.front();
    return {conservation_breaks.empty() && audited_runs > 0, detail};
}

}  // namespace

int main() {
    try {
        Runs runs;
        report(1, "golden-detection", golden_detection());
        report(2, "soundness", soundness());
        report(3, "baseline-health", baseline_health(runs));
        report(4, "attack-severity", attack_severity(runs));
        report(5, "defense-gain", defense_gain(runs));
        report(6, "false-rrep-trends", false_rrep_trends(runs));
        report(7, "oracle-equivalence", oracle_equivalence());
        report(8, "determinism", determinism());
        report(9, "conservation", conservation());
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
