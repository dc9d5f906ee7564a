#include "cclab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "cclab/cc/factory.hpp"
#include "cclab/rng.hpp"

namespace cclab {

namespace {

constexpr std::uint64_t kLinkStream = 0;
constexpr std::uint64_t kStaggerStream = 1;

}  // namespace

std::vector<FlowSpec> plan_flows(const ExperimentConfig& cfg, Variant variant, std::uint64_t seed) {
    Rng rng(derive_seed(seed, kStaggerStream));
    std::vector<FlowSpec> flows;
    for (std::uint32_t i = 0; i < cfg.num_flows; ++i) {
        FlowSpec f;
        f.id = i;
        f.variant = variant;
        f.start = SimTime::from_us(static_cast<SimTime::rep>(rng.uniform01() * static_cast<double>(cfg.stagger.us())));
        if (cfg.scenario.kind == ScenarioKind::LongLived) {
            f.bytes = TcpSender::kUnlimited;
            f.stop = f.start + cfg.duration;
        } else {
            f.bytes = cfg.scenario.size_bytes;
            f.stop = f.start + cfg.transfer_cap;
        }
        flows.push_back(f);
    }
    return flows;
}

Simulation::Simulation(const ExperimentConfig& cfg, std::uint64_t seed, std::vector<FlowSpec> flows,
                       ControllerFactory factory)
    : cfg_(cfg), link_(events_, cfg.link, derive_seed(seed, kLinkStream)) {
    if (flows.empty()) throw std::invalid_argument("Simulation: at least one flow required");
    if (!factory) {
        factory = [this](const FlowSpec& f) { return make_controller(f.variant, cfg_.cc, cfg_.transport.mss); };
    }
    flows_.resize(flows.size());
    for (std::size_t i = 0; i < flows.size(); ++i) {
        if (flows[i].id != i) throw std::invalid_argument("Simulation: flow ids must be 0..n-1 in order");
        Flow& fl = flows_[i];
        fl.spec = flows[i];
        fl.sender = std::make_unique<TcpSender>(events_, fl.spec.id, factory(fl.spec), cfg_.transport,
                                                [this](const Packet& p) { link_.send(p); });
        fl.sender->set_log_sink([&fl](const FlowLogRecord& r) { fl.log.push_back(r); });
        fl.sender->set_completion([this, i] { finish(i); });
    }
    remaining_ = flows_.size();
    link_.set_delivery_handler([this](const Packet& p) { deliver(p); });
    link_.set_backlog_observer([this](SimTime t, std::size_t n) { backlog_.emplace_back(t, n); });
    events_.set_observer([this](SimTime at, std::uint64_t seq) {
        for (std::uint64_t v : {static_cast<std::uint64_t>(at.us()), seq}) {
            trace_hash_ ^= v;
            trace_hash_ *= 0x100000001b3ULL;
        }
    });
}

void Simulation::run() {
    for (std::size_t i = 0; i < flows_.size(); ++i) {
        Flow& fl = flows_[i];
        events_.schedule(fl.spec.start, [&fl] { fl.sender->start(fl.spec.bytes); });
        events_.schedule(fl.spec.stop, [this, i] { finish(i); });
    }
    // Once every sender is idle only in-flight packets remain, so the queue
    // drains on its own.
    events_.run();
}

void Simulation::deliver(const Packet& p) {
    Flow& fl = flows_.at(p.flow);
    const std::uint64_t ack = fl.receiver.on_segment(p.seq, p.payload);
    const SimTime back = SimTime::from_us(cfg_.link.prop_rtt.us() - cfg_.link.prop_rtt.us() / 2);
    events_.schedule_in(back, [&fl, ack] { fl.sender->on_ack(ack); });
}

void Simulation::finish(std::size_t idx) {
    Flow& fl = flows_.at(idx);
    if (fl.done) return;
    fl.done = true;
    fl.sender->stop();
    --remaining_;
}

std::vector<FlowMetrics> Simulation::metrics() const {
    std::vector<FlowMetrics> out;
    for (const Flow& fl : flows_) {
        const TcpSender& s = *fl.sender;
        const SenderStats& st = s.stats();
        FlowMetrics m;
        m.flow_id = fl.spec.id;
        m.variant = fl.spec.variant;
        m.start = st.first_send.value_or(fl.spec.start);
        m.end = st.last_ack_advance.value_or(m.start);
        m.unique_bytes = s.snd_una();
        m.payload_bytes_sent = st.payload_bytes_sent;
        m.goodput_bps = rate_bps(m.unique_bytes, m.start, m.end);
        m.throughput_bps = rate_bps(m.payload_bytes_sent, m.start, m.end);
        m.rtt_samples = st.rtt_samples;
        m.rtt_sample_count = st.rtt_samples.size();
        if (!st.rtt_samples.empty()) {
            std::vector<double> v;
            v.reserve(st.rtt_samples.size());
            for (const auto& [t, rtt] : st.rtt_samples) v.push_back(static_cast<double>(rtt.us()));
            m.mean_rtt_us = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
            m.rtt85_us = percentile_linear(v, 0.85);
        }
        m.segments_sent = st.segments_sent;
        m.segments_retx = st.segments_retx;
        m.retx_ratio = st.segments_sent ? static_cast<double>(st.segments_retx) / static_cast<double>(st.segments_sent) : 0.0;
        m.timeout_count = st.timeouts;
        m.burst_sizes = burst_size_accounting(st.retx_log, st.episodes.size());
        const auto& ls = link_.flow_stats();
        if (auto it = ls.find(fl.spec.id); it != ls.end()) m.queue_drops = it->second.queue_drops;
        out.push_back(std::move(m));
    }
    return out;
}

Variant run_variant(const ExperimentConfig& cfg, std::uint32_t r) { return cfg.variants.at(r % cfg.variants.size()); }

std::uint64_t run_seed(const ExperimentConfig& cfg, std::uint32_t r) { return derive_seed(cfg.seed, r); }

RunResult run_single(const ExperimentConfig& cfg, std::uint32_t run_index, bool keep_logs) {
    RunResult res;
    res.run_index = run_index;
    res.seed = run_seed(cfg, run_index);
    res.variant = run_variant(cfg, run_index);
    Simulation sim(cfg, res.seed, plan_flows(cfg, res.variant, res.seed));
    sim.run();
    res.summary = summarize_run(sim.metrics());
    if (keep_logs)
        for (std::size_t i = 0; i < sim.flow_count(); ++i) res.logs.push_back(sim.log(i));
    return res;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, bool keep_logs) {
    cfg.validate();
    ExperimentResult out;
    out.config = cfg;
    out.config_hash = cfg.hash();
    for (std::uint32_t r = 0; r < cfg.runs; ++r) out.runs.push_back(run_single(cfg, r, keep_logs));
    return out;
}

std::string MatrixCell::key() const {
    return std::string(to_string(variant)) + "_n" + std::to_string(flows) + "_" + scenario.key();
}

bool MatrixResult::any_failed() const {
    return std::any_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.error.has_value(); });
}

std::vector<MatrixCell> matrix_cells(const ExperimentConfig& base) {
    std::vector<MatrixCell> cells;
    for (const Scenario& sc : base.matrix_scenarios)
        for (std::uint32_t n : base.matrix_flows)
            for (Variant v : base.matrix_variants) cells.push_back({v, n, sc});
    return cells;
}

ExperimentConfig cell_config(const ExperimentConfig& base, const MatrixCell& cell) {
    ExperimentConfig c = base;
    c.variants = {cell.variant};
    c.num_flows = cell.flows;
    c.scenario = cell.scenario;
    return c;
}

MatrixResult run_matrix(const ExperimentConfig& base) {
    base.validate();
    const auto cells = matrix_cells(base);
    MatrixResult out;
    out.cells.resize(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out.cells[i].cell = cells[i];
        out.cells[i].config = cell_config(base, cells[i]);
        out.cells[i].runs.resize(base.runs);
    }

    // One task per (cell, run). Each task writes only its own slot.
    const std::size_t total = cells.size() * base.runs;
    std::vector<std::optional<std::string>> task_errors(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < total; t = next++) {
            const std::size_t ci = t / base.runs;
            const auto r = static_cast<std::uint32_t>(t % base.runs);
            try {
                out.cells[ci].config.validate();
                out.cells[ci].runs[r] = run_single(out.cells[ci].config, r);
            } catch (const std::exception& e) {
                task_errors[t] = "run " + std::to_string(r) + ": " + e.what();
            }
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(base.jobs, static_cast<unsigned>(std::max<std::size_t>(total, 1))));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (std::size_t t = 0; t < total; ++t) {
        if (!task_errors[t]) continue;
        auto& err = out.cells[t / base.runs].error;
        err = err ? *err + "; " + *task_errors[t] : *task_errors[t];
    }
    return out;
}

}  // namespace cclab
