#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bhsim/config.hpp"
#include "bhsim/experiment.hpp"

using namespace bhsim;
namespace fs = std::filesystem;

namespace {

std::string error_of(std::string_view text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("bhsim_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// A few simulated minutes: enough to exercise every path, fast enough to
// run a full matrix in a unit test.
ScenarioConfig short_config() {
    ScenarioConfig c;
    c.duration = 40.0;
    c.warmup = 5.0;
    c.start_window = 5.0;
    c.sample_interval = 10.0;
    return c;
}

}  // namespace

TEST(Config, EmptyTextGivesReferenceDefaults) {
    const auto parsed = parse_config_text("# nothing here\n\n");
    ASSERT_TRUE(std::holds_alternative<ScenarioConfig>(parsed));
    const auto& c = std::get<ScenarioConfig>(parsed);
    EXPECT_EQ(c.duration, 1000.0);
    EXPECT_EQ(c.area.width, 1000.0);
    EXPECT_EQ(c.area.height, 1000.0);
    EXPECT_EQ(c.node_count, 30u);
    EXPECT_EQ(c.medium.range, 200.0);
    EXPECT_EQ(c.mobility.v_min, 5.0);
    EXPECT_EQ(c.mobility.v_max, 20.0);
    EXPECT_EQ(c.mobility.pause, 10.0);
    EXPECT_EQ(c.flow_count, 15u);
    EXPECT_EQ(c.packet_rate, 2.0);
    EXPECT_EQ(c.payload, 512u);
    EXPECT_EQ(c.attacker_count, 2u);
}

TEST(Config, OverridesAndComments) {
    const auto c = std::get<ScenarioConfig>(parse_config_text(
        "duration = 300   # short\nprotocol=aodv-dri\nv_max = 12.5\nmobility = static\n"
        "placement = grid\nseed = 42\ndri_sharing = true\n"));
    EXPECT_EQ(c.duration, 300.0);
    EXPECT_EQ(c.protocol, Protocol::AodvDri);
    EXPECT_EQ(c.mobility.v_max, 12.5);
    EXPECT_FALSE(c.mobile);
    EXPECT_EQ(c.placement, Placement::Grid);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_TRUE(c.timers.dri_sharing);
}

TEST(Config, PlainAodvHasNoEffectiveAttackers) {
    auto c = std::get<ScenarioConfig>(parse_config_text("protocol = aodv\n"));
    EXPECT_EQ(c.attacker_count, 2u);
    EXPECT_EQ(c.effective_attackers(), 0u);
    c.protocol = Protocol::AodvAttack;
    EXPECT_EQ(c.effective_attackers(), 2u);
}

TEST(Config, RejectionsNameTheKey) {
    EXPECT_NE(error_of("v_min = 0\n").find("v_min"), std::string::npos);
    EXPECT_NE(error_of("attacker_count = 30\n").find("attacker_count"), std::string::npos);
    EXPECT_EQ(error_of("colour = red\n"), "unknown key 'colour'");
    EXPECT_NE(error_of("duration = soon\n").find("duration"), std::string::npos);
    EXPECT_NE(error_of("node_count = -3\n").find("node_count"), std::string::npos);
    EXPECT_NE(error_of("protocol = olsr\n").find("protocol"), std::string::npos);
    EXPECT_NE(error_of("just words\n").find("line 1"), std::string::npos);
    EXPECT_NE(error_of("seed =\n").find("seed"), std::string::npos);
    EXPECT_NE(error_of("values = 1,2\n").find("values"), std::string::npos);
}

TEST(Config, MissingFile) {
    EXPECT_THROW(parse_config(scratch("missing") / "bhsim.cfg"), ConfigError);
}

TEST(Config, SweepFile) {
    const auto parsed = parse_config_text("sweep = speed\nvalues = 5, 10\nrepetitions = 2\nduration = 100\n");
    ASSERT_TRUE(std::holds_alternative<SweepSpec>(parsed));
    const auto& s = std::get<SweepSpec>(parsed);
    EXPECT_EQ(s.axis, SweepAxis::MaxSpeed);
    EXPECT_EQ(s.values, (std::vector<double>{5, 10}));
    EXPECT_EQ(s.repetitions, 2u);
    EXPECT_EQ(s.base.duration, 100.0);
    EXPECT_NE(error_of("sweep = connections\nvalues = 2.5\n").find("values"), std::string::npos);
    EXPECT_NE(error_of("sweep = connections\nrepetitions = 0\n").find("repetitions"), std::string::npos);
}

TEST(Config, SweepDefaultsAndPoints) {
    EXPECT_EQ(default_sweep_values(SweepAxis::Connections), (std::vector<double>{5, 10, 15, 20, 25, 29}));
    EXPECT_EQ(default_sweep_values(SweepAxis::MaxSpeed), (std::vector<double>{5, 10, 15, 20}));
    const ScenarioConfig base;
    EXPECT_EQ(at_point(base, SweepAxis::Connections, 29).flow_count, 29u);
    const ScenarioConfig fast = at_point(base, SweepAxis::MaxSpeed, 10);
    EXPECT_EQ(fast.mobility.v_max, 10.0);
    EXPECT_EQ(fast.mobility.v_min, 5.0);
}

TEST(Experiment, AttackersAndFlowsAreSharedAcrossVariants) {
    ScenarioConfig c = short_config();
    c.protocol = Protocol::Aodv;
    const auto a1 = draw_attackers(c);
    c.protocol = Protocol::AodvDri;
    const auto a2 = draw_attackers(c);
    ASSERT_EQ(a1.size(), 2u);
    EXPECT_EQ(a1[0].node, a2[0].node);
    EXPECT_EQ(a1[1].node, a2[1].node);
    EXPECT_EQ(a1[0].role, AttackerRole::Primary);
    EXPECT_EQ(a1[0].partner, a1[1].node);
    EXPECT_EQ(a1[1].role, AttackerRole::Colluder);
    const auto flows = build_flows(c, a1);
    for (const FlowSpec& f : flows) {
        for (const AttackerConfig& a : a1) {
            EXPECT_NE(f.source, a.node);
            EXPECT_NE(f.destination, a.node);
        }
        EXPECT_EQ(f.stop, c.duration - c.drain);
    }
}

TEST(Experiment, GridPlacementIsStaticWhenAsked) {
    ScenarioConfig c = short_config();
    c.placement = Placement::Grid;
    c.mobile = false;
    const RandomWaypoint f = build_field(c);
    EXPECT_TRUE(f.is_static());
    EXPECT_EQ(f.position(0).x, f.position(6).x);  // 6 columns for 30 nodes
    EXPECT_NEAR(f.position(1).x - f.position(0).x, 150.0, 1e-9);
}

TEST(Experiment, RunIsConservedAndDeterministic) {
    ScenarioConfig c = short_config();
    c.protocol = Protocol::AodvDri;
    std::ostringstream t1, t2;
    const RunResult r1 = run_scenario(c, &t1);
    const RunResult r2 = run_scenario(c, &t2);
    EXPECT_TRUE(r1.metrics.conserved()) << r1.metrics.conservation_line();
    EXPECT_GT(r1.metrics.sent, 0u);
    EXPECT_EQ(t1.str(), t2.str());
    EXPECT_EQ(r1.audit, r2.audit);
}

TEST(Experiment, FullConnectionsMatrixShape) {
    SweepSpec s;
    s.base = short_config();
    s.base.duration = 20.0;
    s.values = default_sweep_values(SweepAxis::Connections);
    const MatrixResult m =
        run_matrix(s, {Protocol::Aodv, Protocol::AodvAttack, Protocol::AodvDri}, 1);
    EXPECT_EQ(m.runs.size(), 90u);
    ASSERT_EQ(m.rows.size(), 18u);
    EXPECT_EQ(m.rows[0].variant, Protocol::Aodv);
    EXPECT_EQ(m.rows[0].axis_value, 5.0);
    EXPECT_EQ(m.rows[17].variant, Protocol::AodvDri);
    EXPECT_EQ(m.rows[17].axis_value, 29.0);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(m.runs[i].seed, s.base.seed + i);
    for (const RunRow& r : m.runs) {
        EXPECT_TRUE(r.metrics.conserved()) << r.metrics.conservation_line();
        if (r.variant == Protocol::Aodv) EXPECT_EQ(r.metrics.false_rreps, 0u);
    }
    std::ostringstream csv;
    write_csv(m.rows, csv);
    EXPECT_EQ(count_lines(csv.str()), 19u);
    EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), kCsvHeader);
}

TEST(Experiment, SingleRepetitionReportsZeroDeviation) {
    SweepSpec s;
    s.base = short_config();
    s.values = {5};
    s.repetitions = 1;
    const MatrixResult m = run_matrix(s, {Protocol::AodvAttack});
    ASSERT_EQ(m.rows.size(), 1u);
    EXPECT_EQ(m.rows[0].stats.false_rreps.sd, 0.0);
    EXPECT_EQ(m.rows[0].stats.pdr->sd, 0.0);
}

TEST(Experiment, OutputDoesNotDependOnThreadCount) {
    SweepSpec s;
    s.base = short_config();
    s.values = {5, 10};
    s.repetitions = 2;
    const std::vector<Protocol> all{Protocol::Aodv, Protocol::AodvAttack, Protocol::AodvDri};
    std::ostringstream a, b, c;
    write_csv(run_matrix(s, all, 1).rows, a);
    write_csv(run_matrix(s, all, 3).rows, b);
    write_csv(run_matrix(s, all, 1).rows, c);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str(), c.str());
}

TEST(Experiment, FailingRunIsIdentified) {
    SweepSpec s;
    s.base = short_config();
    s.values = {5};
    s.repetitions = 1;
    // A directory below a regular file cannot exist, even for root.
    const fs::path blocker = scratch("fail") / "blocker";
    std::ofstream(blocker) << "x";
    const fs::path missing = blocker / "traces";
    try {
        run_matrix(s, {Protocol::AodvDri}, 1, &missing);
        FAIL() << "expected RunFailure";
    } catch (const RunFailure& e) {
        EXPECT_EQ(e.variant, Protocol::AodvDri);
        EXPECT_EQ(e.value, 5.0);
        EXPECT_EQ(e.seed, 1u);
        const std::string what = e.what();
        EXPECT_NE(what.find("variant=aodv-dri"), std::string::npos);
        EXPECT_NE(what.find("seed=1"), std::string::npos);
    }
}

TEST(Csv, AbsentValuesAreEmptyFields) {
    AggregateRow r;
    r.variant = Protocol::Aodv;
    r.axis = SweepAxis::Connections;
    r.axis_value = 0;
    RunMetrics m;
    std::vector<RunMetrics> runs{m};
    r.stats = aggregate(runs);
    std::ostringstream out;
    write_csv({r}, out);
    const std::string row = out.str().substr(out.str().find('\n') + 1);
    EXPECT_EQ(row, "aodv,connections,0,1,0,0,,,0,0,0,0,,0,0,0,0,0,0\n");
}

TEST(Csv, NumberFormatting) {
    EXPECT_EQ(fmt_number(0.7), "0.7");
    EXPECT_EQ(fmt_number(1.0 / 3.0), "0.333333");
    EXPECT_EQ(fmt_number(2730.0), "2730");
    EXPECT_EQ(fmt_number(-0.0), "0");
    EXPECT_EQ(fmt_number(1234567.0), "1.23457e+06");
}

TEST(Csv, EmitRejectsEmptyAndUnwritable) {
    EXPECT_THROW(emit_csv({}, scratch("empty") / "r.csv"), ConfigError);
    AggregateRow r;
    r.variant = Protocol::Aodv;
    r.axis = SweepAxis::Connections;
    std::vector<RunMetrics> runs{RunMetrics{}};
    r.stats = aggregate(runs);
    const fs::path blocker = scratch("unwritable") / "blocker";
    std::ofstream(blocker) << "x";
    EXPECT_THROW(emit_csv({r}, blocker / "r.csv"), std::runtime_error);
}

TEST(PlotData, FilesFollowTheSweepAxis) {
    SweepSpec s;
    s.base = short_config();
    s.values = {5, 10};
    s.repetitions = 1;
    const std::vector<Protocol> all{Protocol::Aodv, Protocol::AodvAttack, Protocol::AodvDri};
    const fs::path dir = scratch("plot_conn");
    const auto conn = emit_plotdata(run_matrix(s, all).rows, dir);
    EXPECT_EQ(conn, (std::vector<fs::path>{dir / "fig7.dat", dir / "fig9.dat"}));
    EXPECT_TRUE(fs::exists(dir / "fig7.dat"));
    EXPECT_FALSE(fs::exists(dir / "fig8.dat"));
    EXPECT_FALSE(fs::exists(dir / "fig10.dat"));

    const std::string fig9 = slurp(dir / "fig9.dat");
    EXPECT_EQ(fig9.substr(0, fig9.find('\n')),
              "# connections aodv_mean aodv_sd aodv-attack_mean aodv-attack_sd aodv-dri_mean aodv-dri_sd");
    std::istringstream rows(fig9.substr(fig9.find('\n') + 1));
    double axis, mean, sd;
    while (rows >> axis >> mean >> sd) {
        EXPECT_EQ(mean, 0.0);  // plain aodv forges nothing
        EXPECT_EQ(sd, 0.0);
        rows.ignore(1 << 20, '\n');
    }

    s.axis = SweepAxis::MaxSpeed;
    const fs::path dir2 = scratch("plot_speed");
    const auto speed = emit_plotdata(run_matrix(s, all).rows, dir2);
    EXPECT_EQ(speed, (std::vector<fs::path>{dir2 / "fig8.dat", dir2 / "fig10.dat"}));
    EXPECT_FALSE(fs::exists(dir2 / "fig7.dat"));
}

TEST(Cli, ExitCodesAndOutputs) {
    const fs::path dir = scratch("cli");
    {
        std::ofstream cfg(dir / "ok.cfg");
        cfg << "sweep = connections\nvalues = 5\nrepetitions = 2\nduration = 30\nwarmup = 5\n"
               "start_window = 5\n";
        std::ofstream bad(dir / "bad.cfg");
        bad << "colour = red\n";
        std::ofstream(dir / "blocker") << "x";
    }
    const std::string cli = BHSIM_CLI_PATH;
    const auto run = [&](const std::string& args) {
        const int rc = std::system((cli + " " + args + " > " + (dir / "log.txt").string() + " 2>&1").c_str());
        return WEXITSTATUS(rc);
    };
    EXPECT_EQ(run("--config " + (dir / "ok.cfg").string() + " --out " + (dir / "a").string() +
                  " --per-run"),
              0);
    EXPECT_EQ(run("--config " + (dir / "ok.cfg").string() + " --out " + (dir / "b").string() +
                  " --per-run --threads 2"),
              0);
    for (const char* f : {"results.csv", "runs.csv", "run.log", "fig7.dat", "fig9.dat"}) {
        EXPECT_TRUE(fs::exists(dir / "a" / f)) << f;
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    }
    EXPECT_EQ(count_lines(slurp(dir / "a" / "results.csv")), 4u);  // 3 variants
    EXPECT_EQ(count_lines(slurp(dir / "a" / "runs.csv")), 7u);
    const std::string log = slurp(dir / "a" / "run.log");
    EXPECT_NE(log.find("seed=1 "), std::string::npos);
    EXPECT_NE(log.find("seed=2 "), std::string::npos);
    EXPECT_EQ(log.find("MISMATCH"), std::string::npos);

    EXPECT_EQ(run("--config " + (dir / "bad.cfg").string() + " --out " + (dir / "c").string()), 1);
    EXPECT_NE(slurp(dir / "log.txt").find("colour"), std::string::npos);
    EXPECT_EQ(run("--sweep sideways"), 1);
    EXPECT_EQ(run("--config " + (dir / "ok.cfg").string() + " --out " + (dir / "blocker" / "x").string()), 2);
}
