#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cclab/config.hpp"
#include "cclab/event_queue.hpp"
#include "cclab/link.hpp"
#include "cclab/metrics.hpp"
#include "cclab/tcp.hpp"

namespace cclab {

struct FlowSpec {
    FlowId id = 0;
    Variant variant = Variant::NewReno;
    SimTime start;
    std::uint64_t bytes = TcpSender::kUnlimited;
    SimTime stop;  // long-lived flows are stopped here; short ones are capped here
};

/// Flows for one run: `num_flows` of the run's variant with seeded start
/// offsets uniform in [0, stagger).
std::vector<FlowSpec> plan_flows(const ExperimentConfig& cfg, Variant variant, std::uint64_t run_seed);

/// One bottleneck shared by several sender/receiver pairs. The reverse path
/// is an uncongested, lossless half of the base RTT.
class Simulation {
public:
    using ControllerFactory = std::function<std::unique_ptr<CongestionController>(const FlowSpec&)>;

    Simulation(const ExperimentConfig& cfg, std::uint64_t run_seed, std::vector<FlowSpec> flows,
               ControllerFactory factory = {});
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    /// Runs until every flow has stopped or completed.
    void run();

    EventQueue& events() { return events_; }
    const BottleneckLink& link() const { return link_; }
    std::size_t flow_count() const { return flows_.size(); }
    const FlowSpec& spec(std::size_t i) const { return flows_.at(i).spec; }
    const TcpSender& sender(std::size_t i) const { return *flows_.at(i).sender; }
    const TcpReceiver& receiver(std::size_t i) const { return flows_.at(i).receiver; }
    const std::vector<FlowLogRecord>& log(std::size_t i) const { return flows_.at(i).log; }
    /// (time, queued packets) at every change of the bottleneck backlog.
    const std::vector<std::pair<SimTime, std::size_t>>& backlog_trace() const { return backlog_; }
    std::uint64_t trace_hash() const { return trace_hash_; }

    std::vector<FlowMetrics> metrics() const;

private:
    struct Flow {
        FlowSpec spec;
        std::unique_ptr<TcpSender> sender;
        TcpReceiver receiver;
        std::vector<FlowLogRecord> log;
        bool done = false;
    };

    void deliver(const Packet& p);
    void finish(std::size_t idx);

    ExperimentConfig cfg_;
    EventQueue events_;
    BottleneckLink link_;
    std::vector<Flow> flows_;
    std::size_t remaining_ = 0;
    std::vector<std::pair<SimTime, std::size_t>> backlog_;
    std::uint64_t trace_hash_ = 0xcbf29ce484222325ULL;
};

struct RunResult {
    std::uint32_t run_index = 0;
    std::uint64_t seed = 0;
    Variant variant = Variant::NewReno;
    RunSummary summary;
    std::vector<std::vector<FlowLogRecord>> logs;  // empty unless requested
};

/// Variant and seed of run `r`: variants rotate, seeds are derived per run.
Variant run_variant(const ExperimentConfig& cfg, std::uint32_t r);
std::uint64_t run_seed(const ExperimentConfig& cfg, std::uint32_t r);

RunResult run_single(const ExperimentConfig& cfg, std::uint32_t run_index, bool keep_logs = false);

struct ExperimentResult {
    ExperimentConfig config;
    std::string config_hash;
    std::vector<RunResult> runs;
};

/// Validates, then runs cfg.runs repetitions in order.
ExperimentResult run_experiment(const ExperimentConfig& cfg, bool keep_logs = false);

struct MatrixCell {
    Variant variant;
    std::uint32_t flows;
    Scenario scenario;

    std::string key() const;
};

struct CellResult {
    MatrixCell cell;
    ExperimentConfig config;  // the base config specialised to this cell
    std::vector<RunResult> runs;
    std::optional<std::string> error;
};

struct MatrixResult {
    std::vector<CellResult> cells;  // in grid order: scenario, flows, variant
    bool any_failed() const;
};

std::vector<MatrixCell> matrix_cells(const ExperimentConfig& base);
ExperimentConfig cell_config(const ExperimentConfig& base, const MatrixCell& cell);

/// Runs every cell of the grid on up to base.jobs threads. Results are placed
/// by cell index, so the output never depends on completion order. A failing
/// cell records its error and the rest of the grid continues.
MatrixResult run_matrix(const ExperimentConfig& base);

}  // namespace cclab
