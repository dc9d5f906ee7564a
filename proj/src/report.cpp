#include "cclab/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cclab {

using ojson = nlohmann::ordered_json;

namespace {

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

ojson box_json(const BoxWhisker& b) {
    ojson j;
    j["q25"] = b.q25;
    j["median"] = b.median;
    j["q75"] = b.q75;
    j["whisker_lo"] = b.whisker_lo;
    j["whisker_hi"] = b.whisker_hi;
    j["mean"] = b.mean;
    return j;
}

ojson flow_json(const FlowMetrics& f) {
    ojson j;
    j["flow_id"] = f.flow_id;
    j["variant"] = to_string(f.variant);
    j["start_us"] = f.start.us();
    j["end_us"] = f.end.us();
    j["unique_bytes"] = f.unique_bytes;
    j["payload_bytes_sent"] = f.payload_bytes_sent;
    j["goodput_bps"] = f.goodput_bps;
    j["throughput_bps"] = f.throughput_bps;
    j["mean_rtt_us"] = f.mean_rtt_us;
    j["rtt85_us"] = f.rtt85_us;
    j["rtt_samples"] = f.rtt_sample_count;
    j["segments_sent"] = f.segments_sent;
    j["segments_retx"] = f.segments_retx;
    j["retx_ratio"] = f.retx_ratio;
    j["timeouts"] = f.timeout_count;
    j["queue_drops"] = f.queue_drops;
    j["bursts"] = f.burst_sizes;
    return j;
}

ojson config_json(const ExperimentConfig& cfg) {
    // Section -> key -> value, straight from the canonical INI text.
    ojson j = ojson::object();
    std::istringstream is(cfg.to_ini());
    std::string line, section;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.front() == '[') {
            section = line.substr(1, line.size() - 2);
            j[section] = ojson::object();
            continue;
        }
        const auto eq = line.find(" = ");
        j[section][line.substr(0, eq)] = line.substr(eq + 3);
    }
    return j;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

template <class T>
T to_num(const std::string& s) {
    T v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::runtime_error("malformed numeric field '" + s + "'");
    return v;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    return os;
}

void expect_header(std::istream& is, const char* header, const std::filesystem::path& p) {
    std::string line;
    if (!std::getline(is, line) || line != header)
        throw std::runtime_error(p.string() + ": expected header '" + header + "'");
    std::getline(is, line);  // column names
}

const char* kFlowColumns =
    "run,seed,variant,flow_id,start_us,end_us,unique_bytes,payload_bytes_sent,goodput_bps,throughput_bps,"
    "mean_rtt_us,rtt85_us,rtt_samples,segments_sent,segments_retx,retx_ratio,timeouts,queue_drops,bursts";

}  // namespace

std::vector<VariantAggregate> aggregate_runs(const std::vector<RunResult>& runs, RepresentativeMode mode) {
    std::vector<Variant> order;
    std::map<Variant, std::vector<const RunResult*>> groups;
    for (const auto& r : runs) {
        if (!groups.contains(r.variant)) order.push_back(r.variant);
        groups[r.variant].push_back(&r);
    }

    std::vector<VariantAggregate> out;
    for (Variant v : order) {
        const auto& rs = groups[v];
        VariantAggregate a;
        a.variant = v;
        a.runs = rs.size();
        std::vector<double> goodput, rtt, retx, timeouts, jfi, agg, pooled;
        std::vector<RunVector> vectors;
        for (const RunResult* r : rs) {
            agg.push_back(r->summary.aggregated_goodput_bps);
            jfi.push_back(r->summary.jfi);
            std::vector<double> rg, rr, rt;
            for (const auto& f : r->summary.flows) {
                goodput.push_back(f.goodput_bps);
                retx.push_back(f.retx_ratio);
                timeouts.push_back(static_cast<double>(f.timeout_count));
                rg.push_back(f.goodput_bps);
                rt.push_back(static_cast<double>(f.timeout_count));
                if (f.rtt_sample_count) {
                    rtt.push_back(f.mean_rtt_us);
                    rr.push_back(f.mean_rtt_us);
                }
                for (const auto& s : f.rtt_samples) pooled.push_back(static_cast<double>(s.second.us()));
                a.bursts.insert(a.bursts.end(), f.burst_sizes.begin(), f.burst_sizes.end());
            }
            vectors.push_back({mean_of(rg) / 1000.0, mean_of(rr) / 1000.0, mean_of(rt)});
        }
        a.goodput_bps = mean_of(goodput);
        a.aggregated_goodput_bps = mean_of(agg);
        a.mean_rtt_us = mean_of(rtt);
        a.rtt85_us = pooled.empty() ? 0.0 : percentile_linear(pooled, 0.85);
        a.retx_ratio = mean_of(retx);
        a.timeouts = mean_of(timeouts);
        a.jfi = mean_of(jfi);
        if (!goodput.empty()) {
            a.goodput_box = box_whisker(goodput);
            a.retx_box = box_whisker(retx);
            a.timeouts_box = box_whisker(timeouts);
        }
        if (!rtt.empty()) a.rtt_box = box_whisker(rtt);
        a.representative_run = rs.at(representative_flow(vectors, mode == RepresentativeMode::Normalized))->run_index;
        out.push_back(std::move(a));
    }
    return out;
}

void write_timeseries_csv(std::ostream& os, const std::vector<RunResult>& runs) {
    os << kTimeseriesHeader << '\n'
       << "run,t_us,flow_id,variant,cwnd_segments,ssthresh_segments,srtt_us,rto_us,bytes_acked_cum,retx_cum,"
          "timeouts_cum\n";
    for (const auto& r : runs) {
        for (std::size_t i = 0; i < r.logs.size(); ++i) {
            for (const auto& rec : r.logs[i]) {
                os << r.run_index << ',' << rec.t.us() << ',' << i << ',' << to_string(r.variant) << ','
                   << rec.cwnd.to_string() << ',' << rec.ssthresh.to_string() << ',' << rec.srtt.us() << ','
                   << rec.rto.us() << ',' << rec.bytes_acked << ',' << rec.retx_cum << ',' << rec.timeouts_cum << '\n';
            }
        }
    }
}

void write_flows_csv(std::ostream& os, const std::vector<RunResult>& runs) {
    os << kFlowsHeader << '\n' << kFlowColumns << '\n';
    for (const auto& r : runs) {
        for (const auto& f : r.summary.flows) {
            os << r.run_index << ',' << r.seed << ',' << to_string(f.variant) << ',' << f.flow_id << ','
               << f.start.us() << ',' << f.end.us() << ',' << f.unique_bytes << ',' << f.payload_bytes_sent << ','
               << format_double(f.goodput_bps) << ',' << format_double(f.throughput_bps) << ','
               << format_double(f.mean_rtt_us) << ',' << format_double(f.rtt85_us) << ',' << f.rtt_sample_count
               << ',' << f.segments_sent << ',' << f.segments_retx << ',' << format_double(f.retx_ratio) << ','
               << f.timeout_count << ',' << f.queue_drops << ',';
            for (std::size_t k = 0; k < f.burst_sizes.size(); ++k) os << (k ? ";" : "") << f.burst_sizes[k];
            os << '\n';
        }
    }
}

void write_rtt_csv(std::ostream& os, const std::vector<RunResult>& runs) {
    os << kRttHeader << '\n' << "run,flow_id,t_us,rtt_us\n";
    for (const auto& r : runs)
        for (const auto& f : r.summary.flows)
            for (const auto& [t, rtt] : f.rtt_samples)
                os << r.run_index << ',' << f.flow_id << ',' << t.us() << ',' << rtt.us() << '\n';
}

void write_cdf_csv(std::ostream& os, const EmpiricalCdf& cdf) {
    os << kCdfHeader << '\n' << "value,fraction\n";
    for (const auto& p : cdf.points) os << format_double(p.value) << ',' << format_double(p.fraction) << '\n';
}

std::string aggregate_json(const std::vector<VariantAggregate>& agg) {
    ojson arr = ojson::array();
    for (const auto& a : agg) {
        ojson j;
        j["variant"] = to_string(a.variant);
        j["runs"] = a.runs;
        j["goodput_bps"] = a.goodput_bps;
        j["aggregated_goodput_bps"] = a.aggregated_goodput_bps;
        j["mean_rtt_us"] = a.mean_rtt_us;
        j["rtt85_us"] = a.rtt85_us;
        j["retx_ratio"] = a.retx_ratio;
        j["timeouts"] = a.timeouts;
        j["jfi"] = a.jfi;
        j["goodput_box"] = box_json(a.goodput_box);
        j["rtt_box"] = box_json(a.rtt_box);
        j["retx_box"] = box_json(a.retx_box);
        j["timeouts_box"] = box_json(a.timeouts_box);
        if (a.bursts.empty()) {
            j["burst_box"] = nullptr;
        } else {
            std::vector<double> b(a.bursts.begin(), a.bursts.end());
            j["burst_box"] = box_json(box_whisker(b));
        }
        j["representative_run"] = a.representative_run;
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

std::string summary_json(const ExperimentConfig& cfg, const std::vector<RunResult>& runs) {
    ojson j;
    j["format"] = "cclab-summary v1";
    j["config_hash"] = cfg.hash();
    j["config"] = config_json(cfg);
    ojson rs = ojson::array();
    for (const auto& r : runs) {
        ojson rj;
        rj["run"] = r.run_index;
        rj["seed"] = r.seed;
        rj["variant"] = to_string(r.variant);
        rj["aggregated_goodput_bps"] = r.summary.aggregated_goodput_bps;
        rj["jfi"] = r.summary.jfi;
        ojson fs = ojson::array();
        for (const auto& f : r.summary.flows) fs.push_back(flow_json(f));
        rj["flows"] = std::move(fs);
        rs.push_back(std::move(rj));
    }
    j["runs"] = std::move(rs);
    j["aggregate"] = ojson::parse(aggregate_json(aggregate_runs(runs, cfg.representative)));
    return j.dump(2) + "\n";
}

void write_run_outputs(const std::filesystem::path& dir, const ExperimentResult& result) {
    std::filesystem::create_directories(dir);
    open_out(dir / "config.ini") << result.config.to_ini();
    open_out(dir / "summary.json") << summary_json(result.config, result.runs);
    {
        auto os = open_out(dir / "flows.csv");
        write_flows_csv(os, result.runs);
    }
    {
        auto os = open_out(dir / "rtt.csv");
        write_rtt_csv(os, result.runs);
    }
    const bool have_logs =
        std::any_of(result.runs.begin(), result.runs.end(), [](const RunResult& r) { return !r.logs.empty(); });
    if (result.config.write_timeseries && have_logs) {
        auto os = open_out(dir / "timeseries.csv");
        write_timeseries_csv(os, result.runs);
    }
}

std::vector<RunResult> read_run_outputs(const std::filesystem::path& dir) {
    std::vector<RunResult> runs;
    std::map<std::uint32_t, std::size_t> by_index;

    const auto flows_path = dir / "flows.csv";
    std::ifstream fin(flows_path, std::ios::binary);
    if (!fin) throw std::runtime_error("cannot read " + flows_path.string());
    expect_header(fin, kFlowsHeader, flows_path);
    std::string line;
    std::vector<std::vector<FlowMetrics>> flows;
    while (std::getline(fin, line)) {
        if (line.empty()) continue;
        const auto c = split(line, ',');
        if (c.size() != 19) throw std::runtime_error(flows_path.string() + ": expected 19 columns in '" + line + "'");
        const auto run = to_num<std::uint32_t>(c[0]);
        if (!by_index.contains(run)) {
            by_index[run] = runs.size();
            RunResult r;
            r.run_index = run;
            r.seed = to_num<std::uint64_t>(c[1]);
            r.variant = parse_variant(c[2]);
            runs.push_back(std::move(r));
            flows.emplace_back();
        }
        FlowMetrics f;
        f.variant = parse_variant(c[2]);
        f.flow_id = to_num<FlowId>(c[3]);
        f.start = SimTime::from_us(to_num<SimTime::rep>(c[4]));
        f.end = SimTime::from_us(to_num<SimTime::rep>(c[5]));
        f.unique_bytes = to_num<std::uint64_t>(c[6]);
        f.payload_bytes_sent = to_num<std::uint64_t>(c[7]);
        f.goodput_bps = to_num<double>(c[8]);
        f.throughput_bps = to_num<double>(c[9]);
        f.mean_rtt_us = to_num<double>(c[10]);
        f.rtt85_us = to_num<double>(c[11]);
        f.rtt_sample_count = to_num<std::uint64_t>(c[12]);
        f.segments_sent = to_num<std::uint64_t>(c[13]);
        f.segments_retx = to_num<std::uint64_t>(c[14]);
        f.retx_ratio = to_num<double>(c[15]);
        f.timeout_count = to_num<std::uint64_t>(c[16]);
        f.queue_drops = to_num<std::uint64_t>(c[17]);
        if (!c[18].empty())
            for (const auto& b : split(c[18], ';')) f.burst_sizes.push_back(to_num<std::uint32_t>(b));
        flows[by_index[run]].push_back(std::move(f));
    }

    const auto rtt_path = dir / "rtt.csv";
    std::ifstream rin(rtt_path, std::ios::binary);
    if (rin) {
        expect_header(rin, kRttHeader, rtt_path);
        while (std::getline(rin, line)) {
            if (line.empty()) continue;
            const auto c = split(line, ',');
            if (c.size() != 4) throw std::runtime_error(rtt_path.string() + ": expected 4 columns");
            const auto it = by_index.find(to_num<std::uint32_t>(c[0]));
            if (it == by_index.end()) throw std::runtime_error(rtt_path.string() + ": sample for unknown run");
            auto& fl = flows[it->second];
            const auto id = to_num<FlowId>(c[1]);
            auto f = std::find_if(fl.begin(), fl.end(), [id](const FlowMetrics& m) { return m.flow_id == id; });
            if (f == fl.end()) throw std::runtime_error(rtt_path.string() + ": sample for unknown flow");
            f->rtt_samples.emplace_back(SimTime::from_us(to_num<SimTime::rep>(c[2])),
                                        SimTime::from_us(to_num<SimTime::rep>(c[3])));
        }
    }
    for (std::size_t i = 0; i < runs.size(); ++i) runs[i].summary = summarize_run(std::move(flows[i]));
    return runs;
}

std::string render_table(const TableSpec& spec, const std::vector<Variant>& variants,
                         const std::vector<std::uint32_t>& flows, const std::vector<std::vector<double>>& values) {
    std::ostringstream os;
    os << "| #Flows |";
    for (Variant v : variants) os << ' ' << to_string(v) << " |";
    os << "\n|---|";
    for (std::size_t i = 0; i < variants.size(); ++i) os << "---|";
    os << '\n';
    for (std::size_t r = 0; r < flows.size(); ++r) {
        const auto& row = values.at(r);
        double best = std::numeric_limits<double>::quiet_NaN();
        for (double x : row) {
            if (std::isnan(x)) continue;
            const double sx = x * spec.scale;
            if (std::isnan(best) || (spec.higher_is_better ? sx > best : sx < best)) best = sx;
        }
        os << "| " << flows[r] << " |";
        for (double x : row) {
            if (std::isnan(x)) {
                os << " n/a |";
                continue;
            }
            const double sx = x * spec.scale;
            char num[64];
            std::snprintf(num, sizeof num, "%.*f", spec.decimals, sx);
            os << ' ' << num << ' ' << format_relative(sx, best) << " |";
        }
        os << '\n';
    }
    return os.str();
}

void write_matrix_outputs(const std::filesystem::path& dir, const ExperimentConfig& base, const MatrixResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "cells");
    fs::create_directories(dir / "tables");
    open_out(dir / "config.ini") << base.to_ini();

    ojson cells = ojson::array();
    std::map<std::string, VariantAggregate> agg_by_key;
    for (const auto& c : result.cells) {
        const std::string key = c.cell.key();
        ojson cj;
        cj["key"] = key;
        cj["variant"] = to_string(c.cell.variant);
        cj["flows"] = c.cell.flows;
        cj["scenario"] = c.cell.scenario.key();
        cj["runs"] = c.runs.size();
        if (c.error) {
            cj["status"] = "failed";
            cj["error"] = *c.error;
            cells.push_back(std::move(cj));
            continue;
        }
        cj["status"] = "ok";
        const auto agg = aggregate_runs(c.runs, base.representative);
        cj["aggregate"] = ojson::parse(aggregate_json(agg)).at(0);
        agg_by_key[key] = agg.at(0);
        cells.push_back(std::move(cj));

        const fs::path cdir = dir / "cells" / key;
        fs::create_directories(cdir);
        {
            auto os = open_out(cdir / "flows.csv");
            write_flows_csv(os, c.runs);
        }
        std::vector<double> goodput, retx, timeouts, rtt;
        for (const auto& r : c.runs)
            for (const auto& f : r.summary.flows) {
                goodput.push_back(f.goodput_bps);
                retx.push_back(f.retx_ratio);
                timeouts.push_back(static_cast<double>(f.timeout_count));
                for (const auto& s : f.rtt_samples) rtt.push_back(static_cast<double>(s.second.us()));
            }
        auto cdf_file = [&](const char* name, const std::vector<double>& xs) {
            if (xs.empty()) return;
            auto os = open_out(cdir / name);
            write_cdf_csv(os, empirical_cdf(xs));
        };
        cdf_file("goodput_cdf.csv", goodput);
        cdf_file("retx_cdf.csv", retx);
        cdf_file("timeouts_cdf.csv", timeouts);
        cdf_file("rtt_cdf.csv", rtt);

        if (c.cell.flows == 1) {
            const std::uint32_t rep = agg.at(0).representative_run;
            const RunResult replay = run_single(c.config, rep, true);
            ojson rj;
            rj["run"] = rep;
            rj["seed"] = replay.seed;
            rj["mode"] = base.representative == RepresentativeMode::Raw ? "raw" : "normalized";
            rj["flow"] = flow_json(replay.summary.flows.at(0));
            open_out(cdir / "representative.json") << rj.dump(2) << '\n';
            auto os = open_out(cdir / "representative_timeseries.csv");
            write_timeseries_csv(os, {replay});
        }
    }

    ojson mj;
    mj["format"] = "cclab-matrix v1";
    mj["config_hash"] = base.hash();
    mj["config"] = config_json(base);
    mj["cells"] = std::move(cells);
    open_out(dir / "matrix.json") << mj.dump(2) << '\n';

    const std::vector<std::pair<TableSpec, double VariantAggregate::*>> metrics = {
        {{"goodput_kbps", true, 0, 1e-3}, &VariantAggregate::goodput_bps},
        {{"rtt_ms", false, 0, 1e-3}, &VariantAggregate::mean_rtt_us},
        {{"retx_percent", false, 3, 100.0}, &VariantAggregate::retx_ratio},
        {{"timeouts", false, 2, 1.0}, &VariantAggregate::timeouts},
        {{"jfi", true, 3, 1.0}, &VariantAggregate::jfi},
    };
    for (const Scenario& sc : base.matrix_scenarios) {
        for (const auto& [spec, member] : metrics) {
            std::vector<std::vector<double>> values;
            for (std::uint32_t n : base.matrix_flows) {
                std::vector<double> row;
                for (Variant v : base.matrix_variants) {
                    const auto it = agg_by_key.find(MatrixCell{v, n, sc}.key());
                    row.push_back(it == agg_by_key.end() ? std::numeric_limits<double>::quiet_NaN()
                                                         : it->second.*member);
                }
                values.push_back(std::move(row));
            }
            open_out(dir / "tables" / (sc.key() + "_" + spec.metric + ".md"))
                << render_table(spec, base.matrix_variants, base.matrix_flows, values);
        }
    }
}

}  // namespace cclab
