#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cclab/experiment.hpp"
#include "cclab/metrics.hpp"

namespace cclab {

inline constexpr const char* kTimeseriesHeader = "# cclab-timeseries v1";
inline constexpr const char* kFlowsHeader = "# cclab-flows v1";
inline constexpr const char* kRttHeader = "# cclab-rtt v1";
inline constexpr const char* kCdfHeader = "# cclab-cdf v1";

/// Cross-run statistics for the runs of one variant.
struct VariantAggregate {
    Variant variant = Variant::NewReno;
    std::size_t runs = 0;
    double goodput_bps = 0;          // mean per-flow goodput
    double aggregated_goodput_bps = 0;
    double mean_rtt_us = 0;
    double rtt85_us = 0;  // over the pooled samples of all runs
    double retx_ratio = 0;
    double timeouts = 0;  // per flow
    double jfi = 0;
    BoxWhisker goodput_box, rtt_box, retx_box, timeouts_box;
    std::vector<std::uint32_t> bursts;
    std::size_t representative_run = 0;  // run_index of the representative run
};

/// Groups runs by variant (in first-seen order) and aggregates each group.
/// A run is reduced to (mean goodput in kbit/s, mean RTT in ms, mean timeouts)
/// for the representative-run search.
std::vector<VariantAggregate> aggregate_runs(const std::vector<RunResult>& runs, RepresentativeMode mode);

void write_timeseries_csv(std::ostream& os, const std::vector<RunResult>& runs);
void write_flows_csv(std::ostream& os, const std::vector<RunResult>& runs);
void write_rtt_csv(std::ostream& os, const std::vector<RunResult>& runs);
void write_cdf_csv(std::ostream& os, const EmpiricalCdf& cdf);

/// Summary document with a fixed key order. Includes the full config.
std::string summary_json(const ExperimentConfig& cfg, const std::vector<RunResult>& runs);
/// Only the per-variant aggregate block of the summary.
std::string aggregate_json(const std::vector<VariantAggregate>& agg);

/// Writes config.ini, summary.json, flows.csv, rtt.csv and (when enabled and
/// logs were kept) timeseries.csv into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const ExperimentResult& result);

/// Reads flows.csv and rtt.csv back into run results (no event logs).
std::vector<RunResult> read_run_outputs(const std::filesystem::path& dir);

/// Matrix artefacts: matrix.json, one table per scenario and metric, and a
/// directory per cell with flows.csv, CDF point files and, for single-flow
/// cells, the representative run with its time series.
void write_matrix_outputs(const std::filesystem::path& dir, const ExperimentConfig& base, const MatrixResult& result);

/// Table body like "| 1 | 377 (0%) | 383 (+1.6%) |". Rows are flow counts.
struct TableSpec {
    std::string metric;
    bool higher_is_better;
    int decimals;
    double scale;  // multiplies the raw aggregate value
};
std::string render_table(const TableSpec& spec, const std::vector<Variant>& variants,
                         const std::vector<std::uint32_t>& flows, const std::vector<std::vector<double>>& values);

}  // namespace cclab
