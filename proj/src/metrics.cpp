#include "cclab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace cclab {

namespace {

std::vector<double> sorted_copy(std::span<const double> samples, const char* what) {
    if (samples.empty()) throw std::invalid_argument(std::string(what) + ": empty sample set");
    std::vector<double> v(samples.begin(), samples.end());
    std::sort(v.begin(), v.end());
    return v;
}

double linear_from_sorted(const std::vector<double>& v, double q) {
    const double h = static_cast<double>(v.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double nearest_rank_from_sorted(const std::vector<double>& v, double q) {
    const auto n = static_cast<double>(v.size());
    auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, v.size());
    return v[rank - 1];
}

}  // namespace

double rate_bps(std::uint64_t bytes, SimTime start, SimTime end) {
    if (end <= start) return 0.0;
    return static_cast<double>(bytes) * 8.0 / (end - start).seconds();
}

RunSummary summarize_run(std::vector<FlowMetrics> flows) {
    RunSummary s;
    s.flows = std::move(flows);
    std::vector<double> g;
    for (const auto& f : s.flows) {
        s.aggregated_goodput_bps += f.goodput_bps;
        g.push_back(f.goodput_bps);
    }
    s.jfi = (!g.empty() && s.aggregated_goodput_bps > 0.0) ? jain_fairness(g) : 0.0;
    return s;
}

double jain_fairness(std::span<const double> goodputs) {
    if (goodputs.empty()) throw std::invalid_argument("jain_fairness: no flows");
    double sum = 0.0, sum_sq = 0.0;
    for (double g : goodputs) {
        if (!(g >= 0.0)) throw std::invalid_argument("jain_fairness: negative goodput");
        sum += g;
        sum_sq += g * g;
    }
    if (sum_sq == 0.0) throw std::invalid_argument("jain_fairness: all goodputs are zero");
    return (sum * sum) / (static_cast<double>(goodputs.size()) * sum_sq);
}

double EmpiricalCdf::at(double x) const {
    double f = 0.0;
    for (const auto& p : points) {
        if (p.value > x) break;
        f = p.fraction;
    }
    return f;
}

EmpiricalCdf empirical_cdf(std::span<const double> samples) {
    const auto v = sorted_copy(samples, "empirical_cdf");
    EmpiricalCdf cdf;
    const auto n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
        cdf.points.push_back({v[i], i + 1 == v.size() ? 1.0 : static_cast<double>(i + 1) / n});
    }
    cdf.p85 = nearest_rank_from_sorted(v, 0.85);
    return cdf;
}

double percentile_nearest_rank(std::span<const double> samples, double q) {
    return nearest_rank_from_sorted(sorted_copy(samples, "percentile"), q);
}

double percentile_linear(std::span<const double> samples, double q) {
    return linear_from_sorted(sorted_copy(samples, "percentile"), q);
}

BoxWhisker box_whisker(std::span<const double> samples) {
    const auto v = sorted_copy(samples, "box_whisker");
    BoxWhisker b;
    b.q25 = linear_from_sorted(v, 0.25);
    b.median = linear_from_sorted(v, 0.5);
    b.q75 = linear_from_sorted(v, 0.75);
    const double iqr = b.q75 - b.q25;
    const double lo_fence = b.q25 - 1.5 * iqr;
    const double hi_fence = b.q75 + 1.5 * iqr;
    b.whisker_lo = *std::find_if(v.begin(), v.end(), [&](double x) { return x >= lo_fence; });
    b.whisker_hi = *std::find_if(v.rbegin(), v.rend(), [&](double x) { return x <= hi_fence; });
    b.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    return b;
}

std::size_t representative_flow(std::span<const RunVector> runs, bool normalized) {
    if (runs.empty()) throw std::invalid_argument("representative_flow: no runs");
    RunVector mean{0, 0, 0};
    for (const auto& r : runs)
        for (std::size_t k = 0; k < 3; ++k) mean[k] += r[k];
    for (auto& m : mean) m /= static_cast<double>(runs.size());

    RunVector scale{1, 1, 1};
    if (normalized)
        for (std::size_t k = 0; k < 3; ++k)
            if (mean[k] != 0.0) scale[k] = std::fabs(mean[k]);

    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < runs.size(); ++i) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            const double d = (runs[i][k] - mean[k]) / scale[k];
            d2 += d * d;
        }
        // Distances equal up to rounding count as a tie.
        if (i == 0 || d2 < best_d - 1e-9 * best_d) {
            best_d = d2;
            best = i;
        }
    }
    return best;
}

std::vector<std::uint32_t> burst_size_accounting(std::span<const RetxRecord> log, std::size_t episode_count) {
    std::vector<std::set<std::uint64_t>> distinct(episode_count);
    for (const auto& r : log) {
        if (r.episode >= episode_count) continue;  // episode still open
        distinct[r.episode].insert(r.seq);
    }
    std::vector<std::uint32_t> sizes;
    sizes.reserve(episode_count);
    for (const auto& s : distinct) sizes.push_back(static_cast<std::uint32_t>(s.size()));
    return sizes;
}

std::string format_relative(double value, double best) {
    if (value == best) return "(0%)";
    if (best == 0.0) return "(n/a)";
    const double pct = (value - best) / std::fabs(best) * 100.0;
    char buf[32];
    if (std::fabs(pct) < 10.0)
        std::snprintf(buf, sizeof buf, "(%+.1f%%)", pct);
    else
        std::snprintf(buf, sizeof buf, "(%+.0f%%)", pct);
    return buf;
}

}  // namespace cclab
