#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cclab/cc/congestion_controller.hpp"
#include "cclab/link.hpp"
#include "cclab/sim_time.hpp"

namespace cclab {

/// One retransmitted segment, tagged with its recovery episode.
struct RetxRecord {
    SimTime t;
    std::uint64_t seq = 0;
    std::uint32_t episode = 0;
};

struct FlowMetrics {
    FlowId flow_id = 0;
    Variant variant = Variant::NewReno;
    SimTime start;  // first payload byte sent
    SimTime end;    // last cumulative ACK advance
    std::uint64_t unique_bytes = 0;
    std::uint64_t payload_bytes_sent = 0;
    double goodput_bps = 0.0;
    double throughput_bps = 0.0;
    std::vector<std::pair<SimTime, SimTime>> rtt_samples;
    double mean_rtt_us = 0.0;
    double rtt85_us = 0.0;
    std::uint64_t rtt_sample_count = 0;
    std::uint64_t segments_sent = 0;
    std::uint64_t segments_retx = 0;
    double retx_ratio = 0.0;
    std::uint64_t timeout_count = 0;
    std::vector<std::uint32_t> burst_sizes;
    std::uint64_t queue_drops = 0;
};

struct RunSummary {
    std::vector<FlowMetrics> flows;
    double aggregated_goodput_bps = 0.0;
    double jfi = 1.0;
};

/// Sums goodput and evaluates Jain's index over the flows.
RunSummary summarize_run(std::vector<FlowMetrics> flows);

/// bits/s over [start, end]; zero for an empty interval.
double rate_bps(std::uint64_t bytes, SimTime start, SimTime end);

/// (sum g)^2 / (N sum g^2). Throws std::invalid_argument for empty,
/// negative or all-zero input.
double jain_fairness(std::span<const double> goodputs);

struct CdfPoint {
    double value;
    double fraction;
};

struct EmpiricalCdf {
    std::vector<CdfPoint> points;  // one per distinct value, ascending
    double p85 = 0.0;

    /// F(x): fraction of samples <= x.
    double at(double x) const;
};

/// Right-continuous step CDF. Throws std::invalid_argument on empty input.
EmpiricalCdf empirical_cdf(std::span<const double> samples);

/// Smallest sample x with F(x) >= q (the inverse of the step CDF).
double percentile_nearest_rank(std::span<const double> samples, double q);
/// Linear interpolation between closest ranks: h = (n-1) q.
double percentile_linear(std::span<const double> samples, double q);

struct BoxWhisker {
    double q25 = 0, median = 0, q75 = 0;
    double whisker_lo = 0, whisker_hi = 0;
    double mean = 0;
};

/// Quartiles by linear interpolation; whiskers reach the most extreme
/// samples within 1.5 IQR of the box. Throws on empty input.
BoxWhisker box_whisker(std::span<const double> samples);

/// (goodput, mean RTT, timeouts) for one run.
using RunVector = std::array<double, 3>;

/// Index of the run closest (euclidean) to the componentwise mean; ties go to
/// the lowest index. With `normalized`, each component is divided by its mean
/// first (components with zero mean are left as is).
std::size_t representative_flow(std::span<const RunVector> runs, bool normalized = false);

/// Distinct segments retransmitted in each of `episode_count` episodes.
std::vector<std::uint32_t> burst_size_accounting(std::span<const RetxRecord> log, std::size_t episode_count);

/// Relative difference against the best value, rendered like "(+1.6%)".
/// Magnitudes under 10% keep one decimal. A zero best gives "(n/a)" for any
/// other value.
std::string format_relative(double value, double best);

}  // namespace cclab
