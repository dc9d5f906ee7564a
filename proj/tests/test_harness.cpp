#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cclab/config.hpp"
#include "cclab/experiment.hpp"
#include "cclab/report.hpp"

using namespace cclab;
using namespace cclab::literals;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cclab_test_" + name);
    fs::remove_all(p);
    return p;
}

ExperimentConfig quick(Variant v, std::uint32_t flows, double seconds) {
    ExperimentConfig cfg;
    cfg.variants = {v};
    cfg.num_flows = flows;
    cfg.duration = SimTime::from_seconds(seconds);
    return cfg;
}

}  // namespace

TEST_CASE("scenario parsing") {
    CHECK(parse_scenario("long_lived").kind == ScenarioKind::LongLived);
    CHECK(parse_scenario("50KB").size_bytes == 50'000);
    CHECK(parse_scenario("1MB").size_bytes == 1'000'000);
    CHECK(parse_scenario("1000000").size_bytes == 1'000'000);
    CHECK(parse_scenario("50KB").key() == "short_50000");
    CHECK_THROWS_AS(parse_scenario("0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_scenario("big"), std::invalid_argument);
}

TEST_CASE("config text") {
    SUBCASE("empty config is the single-flow long-lived default") {
        const auto cfg = parse_config("");
        CHECK(cfg.num_flows == 1);
        CHECK(cfg.duration == 180_s);
        CHECK(cfg.scenario.kind == ScenarioKind::LongLived);
        CHECK(cfg.link.rate_bps == 1'500'000);
        CHECK(cfg.link.queue_capacity == 60);
    }
    SUBCASE("round trip") {
        auto cfg = parse_config(
            "[experiment]\nvariant = bic, cubic\nflows = 3\nscenario = 500KB\nruns = 4\nseed = 77\n"
            "[link]\nprop_rtt_ms = 80\narq_frame_error_prob = 0.25\n"
            "[cubic]\nc = 0.3\ntcp_friendly = false\n"
            "[matrix]\nflows = 1,4\nscenarios = long_lived, 50KB\n");
        CHECK(cfg.variants == std::vector<Variant>{Variant::Bic, Variant::Cubic});
        CHECK(cfg.num_flows == 3);
        CHECK(cfg.scenario.size_bytes == 500'000);
        CHECK(cfg.link.prop_rtt == 80_ms);
        CHECK(cfg.cc.cubic.c == 0.3);
        CHECK_FALSE(cfg.cc.cubic.tcp_friendly);
        CHECK(cfg.matrix_flows == std::vector<std::uint32_t>{1, 4});
        const auto again = parse_config(cfg.to_ini());
        CHECK(again.to_ini() == cfg.to_ini());
        CHECK(again.hash() == cfg.hash());
        CHECK(cfg.hash().size() == 16);
        CHECK(cfg.hash() != ExperimentConfig{}.hash());
    }
    SUBCASE("output location and thread count do not affect the hash") {
        ExperimentConfig a, b;
        b.out_dir = "elsewhere";
        b.jobs = 8;
        CHECK(a.hash() == b.hash());
    }
    SUBCASE("rejections") {
        CHECK_THROWS_AS(parse_config("[link]\nspeed = 3\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_config("[nonsense]\nx = 1\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_config("flows = 2\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_config("[experiment]\nflows = two\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_config("[experiment]\nvariant = vegas\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_config("[link]\nqueue_packets = 0\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_config("[bic]\nb = 1.5\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_config("[experiment]\nruns = 0\n"), std::invalid_argument);
    }
}

TEST_CASE("flow plan") {
    ExperimentConfig cfg = quick(Variant::Cubic, 4, 180);
    const auto flows = plan_flows(cfg, Variant::Cubic, 99);
    REQUIRE(flows.size() == 4);
    for (const auto& f : flows) {
        CHECK(f.start < 1_s);
        CHECK(f.stop == f.start + 180_s);
        CHECK(f.variant == Variant::Cubic);
        CHECK(f.bytes == TcpSender::kUnlimited);
    }
    CHECK(plan_flows(cfg, Variant::Cubic, 99)[2].start == flows[2].start);

    cfg.scenario = parse_scenario("100KB");
    for (const auto& f : plan_flows(cfg, Variant::Cubic, 99)) {
        CHECK(f.bytes == 100'000);
        CHECK(f.stop == f.start + 600_s);
    }
}

TEST_CASE("variants rotate across runs") {
    ExperimentConfig cfg;
    cfg.variants = {Variant::NewReno, Variant::WestwoodPlus, Variant::Bic, Variant::Cubic};
    CHECK(run_variant(cfg, 0) == Variant::NewReno);
    CHECK(run_variant(cfg, 5) == Variant::WestwoodPlus);
    CHECK(run_variant(cfg, 7) == Variant::Cubic);
    CHECK(run_seed(cfg, 0) != run_seed(cfg, 1));
}

TEST_CASE("four long-lived flows give four rows and a fairness index") {
    const auto r = run_single(quick(Variant::NewReno, 4, 60), 0);
    REQUIRE(r.summary.flows.size() == 4);
    double sum = 0;
    for (const auto& f : r.summary.flows) {
        CHECK(f.goodput_bps > 0);
        sum += f.goodput_bps;
        // Goodput over the flow's own interval reproduces its unique bytes.
        CHECK(f.goodput_bps * (f.end - f.start).seconds() / 8.0 == doctest::Approx(f.unique_bytes));
    }
    CHECK(r.summary.aggregated_goodput_bps == doctest::Approx(sum));
    CHECK(r.summary.jfi > 0.25);
    CHECK(r.summary.jfi <= 1.0);
    CHECK(r.summary.aggregated_goodput_bps < 1.5e6);
}

TEST_CASE("short transfers deliver exactly their size") {
    ExperimentConfig cfg = quick(Variant::Bic, 1, 180);
    cfg.scenario = parse_scenario("50KB");
    const auto r = run_single(cfg, 0);
    REQUIRE(r.summary.flows.size() == 1);
    CHECK(r.summary.flows[0].unique_bytes == 50'000);
}

TEST_CASE("a 50 KB transfer is slower than a long-lived flow") {
    for (const Variant v : {Variant::NewReno, Variant::WestwoodPlus, Variant::Bic, Variant::Cubic}) {
        CAPTURE(to_string(v));
        ExperimentConfig ll = quick(v, 1, 180);
        ExperimentConfig sh = ll;
        sh.scenario = parse_scenario("50KB");
        ll.runs = sh.runs = 3;
        double g_ll = 0, g_sh = 0;
        for (const auto& r : run_experiment(ll).runs) g_ll += r.summary.flows[0].goodput_bps;
        for (const auto& r : run_experiment(sh).runs) g_sh += r.summary.flows[0].goodput_bps;
        CHECK(g_sh < g_ll);
    }
}

TEST_CASE("identical config and seed give byte-identical files") {
    ExperimentConfig cfg = quick(Variant::WestwoodPlus, 2, 30);
    cfg.variants = {Variant::WestwoodPlus, Variant::Cubic};
    cfg.runs = 2;
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    write_run_outputs(a, run_experiment(cfg, true));
    write_run_outputs(b, run_experiment(cfg, true));
    for (const char* f : {"config.ini", "summary.json", "flows.csv", "rtt.csv", "timeseries.csv"}) {
        CAPTURE(f);
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK(slurp(a / "timeseries.csv").rfind(kTimeseriesHeader, 0) == 0);
    CHECK(slurp(a / "summary.json").find(cfg.hash()) != std::string::npos);

    cfg.seed = 2;
    const fs::path c = scratch("det_c");
    write_run_outputs(c, run_experiment(cfg, true));
    CHECK(slurp(a / "flows.csv") != slurp(c / "flows.csv"));

    SUBCASE("stats recomputes the same aggregate from the files") {
        const auto res = run_experiment(cfg);
        const auto from_disk = read_run_outputs(c);
        REQUIRE(from_disk.size() == res.runs.size());
        CHECK(aggregate_json(aggregate_runs(from_disk, RepresentativeMode::Raw)) ==
              aggregate_json(aggregate_runs(res.runs, RepresentativeMode::Raw)));
    }
    SUBCASE("the embedded config replays the run") {
        auto replay = load_config(c / "config.ini");
        CHECK(replay.hash() == cfg.hash());
    }
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(c);
}

TEST_CASE("matrix completeness and deterministic merge") {
    ExperimentConfig base;
    base.duration = 5_s;
    base.runs = 2;
    base.jobs = 4;
    const auto cells = matrix_cells(base);
    CHECK(cells.size() == 16);
    std::set<std::string> keys;
    for (const auto& c : cells) keys.insert(c.key());
    CHECK(keys.size() == 16);
    CHECK(keys.count("westwood+_n3_long_lived") == 1);

    const auto par = run_matrix(base);
    base.jobs = 1;
    const auto seq = run_matrix(base);
    REQUIRE(par.cells.size() == 16);
    CHECK_FALSE(par.any_failed());
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK(par.cells[i].cell.key() == cells[i].key());
        CHECK(par.cells[i].runs.size() == 2);
        std::ostringstream x, y;
        write_flows_csv(x, par.cells[i].runs);
        write_flows_csv(y, seq.cells[i].runs);
        CHECK(x.str() == y.str());
    }

    const fs::path out = scratch("matrix");
    write_matrix_outputs(out, base, par);
    CHECK(fs::exists(out / "matrix.json"));
    CHECK(fs::exists(out / "tables" / "long_lived_rtt_ms.md"));
    CHECK(fs::exists(out / "cells" / "cubic_n1_long_lived" / "representative.json"));
    CHECK_FALSE(fs::exists(out / "cells" / "cubic_n2_long_lived" / "representative.json"));
    fs::remove_all(out);
}

TEST_CASE("a failing cell is recorded and the rest continue") {
    ExperimentConfig base;
    base.duration = 2_s;
    base.matrix_variants = {Variant::NewReno};
    base.matrix_flows = {1, 2};
    // A zero-byte transfer only fails once specialised into its cell.
    base.matrix_scenarios = {Scenario{}, Scenario{ScenarioKind::ShortTransfer, 0}};
    const auto res = run_matrix(base);
    REQUIRE(res.cells.size() == 4);
    CHECK(res.any_failed());
    CHECK_FALSE(res.cells[0].error);
    CHECK(res.cells[2].error);
    CHECK(res.cells[3].error);
}

TEST_CASE("comparison tables") {
    const std::string t = render_table({"rtt_ms", false, 0, 1.0},
                                       {Variant::NewReno, Variant::WestwoodPlus, Variant::Bic, Variant::Cubic}, {1},
                                       {{383, 377, 519, 582}});
    CHECK(t.find("383 (+1.6%)") != std::string::npos);
    CHECK(t.find("377 (0%)") != std::string::npos);
    CHECK(t.find("519 (+38%)") != std::string::npos);
}
