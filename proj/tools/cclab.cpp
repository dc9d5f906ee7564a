// cclab: run congestion-control experiments on the simulated bottleneck.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "cclab/config.hpp"
#include "cclab/experiment.hpp"
#include "cclab/report.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string variant;
    std::string flows;
    std::optional<double> duration;
    std::string size;
    std::optional<std::uint32_t> runs;
    std::optional<unsigned> jobs;
    std::string out;
};

void add_common(CLI::App* app, CommonFlags& f) {
    app->add_option("--config", f.config, "INI config file")->check(CLI::ExistingFile);
    app->add_option("--seed", f.seed, "base seed");
    app->add_option("--variant", f.variant, "newreno, westwood+, bic, cubic (comma list)");
    app->add_option("--flows", f.flows, "number of concurrent flows (comma list for matrix)");
    app->add_option("--duration", f.duration, "long-lived flow duration in seconds");
    app->add_option("--size", f.size, "short transfer size, e.g. 50KB or 1000000 (comma list for matrix)");
    app->add_option("--runs", f.runs, "repetitions");
    app->add_option("--jobs", f.jobs, "parallel runs (matrix)");
    app->add_option("--out", f.out, "output directory");
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto c = s.find(',', pos);
        out.push_back(s.substr(pos, c == std::string::npos ? std::string::npos : c - pos));
        if (c == std::string::npos) break;
        pos = c + 1;
    }
    return out;
}

cclab::ExperimentConfig base_config(const CommonFlags& f) {
    cclab::ExperimentConfig cfg = f.config.empty() ? cclab::ExperimentConfig{} : cclab::load_config(f.config);
    if (f.seed) cfg.seed = *f.seed;
    if (f.duration) cfg.duration = cclab::SimTime::from_seconds(*f.duration);
    if (f.runs) cfg.runs = *f.runs;
    if (f.jobs) cfg.jobs = *f.jobs;
    if (!f.out.empty()) cfg.out_dir = f.out;
    return cfg;
}

std::uint32_t parse_count(const std::string& s) {
    std::size_t used = 0;
    const unsigned long v = std::stoul(s, &used);
    if (used != s.size()) throw std::invalid_argument("--flows: not a number: '" + s + "'");
    return static_cast<std::uint32_t>(v);
}

int cmd_run(const CommonFlags& f) {
    cclab::ExperimentConfig cfg = base_config(f);
    if (!f.variant.empty()) {
        cfg.variants.clear();
        for (const auto& v : split_commas(f.variant)) cfg.variants.push_back(cclab::parse_variant(v));
    }
    if (!f.flows.empty()) cfg.num_flows = parse_count(f.flows);
    if (!f.size.empty()) cfg.scenario = cclab::parse_scenario(f.size);
    cfg.validate();
    const auto result = cclab::run_experiment(cfg, cfg.write_timeseries);
    cclab::write_run_outputs(cfg.out_dir, result);
    for (const auto& r : result.runs) {
        std::printf("run %u %s seed=%llu goodput=%.0f bps jfi=%.4f\n", r.run_index,
                    std::string(cclab::to_string(r.variant)).c_str(), static_cast<unsigned long long>(r.seed),
                    r.summary.aggregated_goodput_bps, r.summary.jfi);
    }
    std::printf("wrote %s (config %s)\n", cfg.out_dir.string().c_str(), result.config_hash.c_str());
    return 0;
}

int cmd_matrix(const CommonFlags& f) {
    cclab::ExperimentConfig cfg = base_config(f);
    if (!f.variant.empty()) {
        cfg.matrix_variants.clear();
        for (const auto& v : split_commas(f.variant)) cfg.matrix_variants.push_back(cclab::parse_variant(v));
    }
    if (!f.flows.empty()) {
        cfg.matrix_flows.clear();
        for (const auto& n : split_commas(f.flows)) cfg.matrix_flows.push_back(parse_count(n));
    }
    if (!f.size.empty()) {
        cfg.matrix_scenarios.clear();
        for (const auto& s : split_commas(f.size)) cfg.matrix_scenarios.push_back(cclab::parse_scenario(s));
    }
    cfg.validate();
    const auto result = cclab::run_matrix(cfg);
    cclab::write_matrix_outputs(cfg.out_dir, cfg, result);
    for (const auto& c : result.cells) {
        if (c.error) std::fprintf(stderr, "cell %s failed: %s\n", c.cell.key().c_str(), c.error->c_str());
    }
    std::printf("wrote %zu cells to %s\n", result.cells.size(), cfg.out_dir.string().c_str());
    return result.any_failed() ? 1 : 0;
}

int cmd_stats(const std::string& in, const std::string& mode, const std::string& out) {
    const auto runs = cclab::read_run_outputs(in);
    const auto rep = mode == "normalized" ? cclab::RepresentativeMode::Normalized : cclab::RepresentativeMode::Raw;
    const std::string doc = cclab::aggregate_json(cclab::aggregate_runs(runs, rep)) + "\n";
    if (out.empty()) {
        std::cout << doc;
    } else {
        std::ofstream os(out, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + out);
        os << doc;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TCP congestion-control simulation lab"};
    app.require_subcommand(1);

    CommonFlags run_flags, matrix_flags;
    auto* run = app.add_subcommand("run", "run one experiment (all repetitions)");
    add_common(run, run_flags);
    auto* matrix = app.add_subcommand("matrix", "run the variants x flows x scenarios grid");
    add_common(matrix, matrix_flags);

    std::string stats_in, stats_mode = "raw", stats_out;
    auto* stats = app.add_subcommand("stats", "recompute aggregate metrics from a run directory");
    stats->add_option("--in", stats_in, "directory written by `run`")->required()->check(CLI::ExistingDirectory);
    stats->add_option("--representative", stats_mode, "raw or normalized")
        ->check(CLI::IsMember({"raw", "normalized"}));
    stats->add_option("--out", stats_out, "write JSON here instead of stdout");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(run_flags);
        if (*matrix) return cmd_matrix(matrix_flags);
        if (*stats) return cmd_stats(stats_in, stats_mode, stats_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "cclab: %s\n", e.what());
        return 2;
    }
    return 0;
}
