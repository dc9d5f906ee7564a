#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cclab/cc/cubic.hpp"
#include "cclab/cc/factory.hpp"
#include "cclab/config.hpp"
#include "cclab/experiment.hpp"
#include "cclab/metrics.hpp"
#include "cclab/report.hpp"

namespace py = pybind11;
using namespace cclab;

namespace {

py::dict flow_dict(const FlowMetrics& f) {
    py::dict d;
    d["flow_id"] = f.flow_id;
    d["variant"] = std::string(to_string(f.variant));
    d["start_us"] = f.start.us();
    d["end_us"] = f.end.us();
    d["unique_bytes"] = f.unique_bytes;
    d["goodput_bps"] = f.goodput_bps;
    d["throughput_bps"] = f.throughput_bps;
    d["mean_rtt_us"] = f.mean_rtt_us;
    d["rtt85_us"] = f.rtt85_us;
    d["segments_sent"] = f.segments_sent;
    d["segments_retx"] = f.segments_retx;
    d["retx_ratio"] = f.retx_ratio;
    d["timeouts"] = f.timeout_count;
    d["queue_drops"] = f.queue_drops;
    d["bursts"] = f.burst_sizes;
    return d;
}

py::dict run_dict(const RunResult& r) {
    py::dict d;
    d["run_index"] = r.run_index;
    d["seed"] = r.seed;
    d["variant"] = std::string(to_string(r.variant));
    d["aggregated_goodput_bps"] = r.summary.aggregated_goodput_bps;
    d["jfi"] = r.summary.jfi;
    py::list flows;
    for (const auto& f : r.summary.flows) flows.append(flow_dict(f));
    d["flows"] = flows;
    return d;
}

std::vector<std::string> variant_names(const std::vector<Variant>& vs) {
    std::vector<std::string> out;
    for (Variant v : vs) out.emplace_back(to_string(v));
    return out;
}

std::vector<Variant> parse_variants(const std::vector<std::string>& names) {
    std::vector<Variant> out;
    for (const auto& n : names) out.push_back(parse_variant(n));
    return out;
}

RepresentativeMode parse_mode(const std::string& m) {
    if (m == "raw") return RepresentativeMode::Raw;
    if (m == "normalized") return RepresentativeMode::Normalized;
    throw std::invalid_argument("representative mode must be raw or normalized");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Discrete-event TCP congestion-control lab (native core).";

    py::class_<ExperimentConfig>(m, "Config")
        .def(py::init<>())
        .def_static("from_ini", [](const std::string& text) { return parse_config(text); })
        .def_static("load", [](const std::filesystem::path& p) { return load_config(p); })
        .def("to_ini", &ExperimentConfig::to_ini)
        .def("hash", &ExperimentConfig::hash)
        .def("validate", &ExperimentConfig::validate)
        .def_property(
            "variants", [](const ExperimentConfig& c) { return variant_names(c.variants); },
            [](ExperimentConfig& c, const std::vector<std::string>& v) { c.variants = parse_variants(v); })
        .def_readwrite("flows", &ExperimentConfig::num_flows)
        .def_property(
            "scenario", [](const ExperimentConfig& c) { return c.scenario.key(); },
            [](ExperimentConfig& c, const std::string& s) { c.scenario = parse_scenario(s); })
        .def_property(
            "duration_s", [](const ExperimentConfig& c) { return c.duration.seconds(); },
            [](ExperimentConfig& c, double s) { c.duration = SimTime::from_seconds(s); })
        .def_readwrite("runs", &ExperimentConfig::runs)
        .def_readwrite("seed", &ExperimentConfig::seed)
        .def_readwrite("jobs", &ExperimentConfig::jobs)
        .def_property(
            "matrix_variants", [](const ExperimentConfig& c) { return variant_names(c.matrix_variants); },
            [](ExperimentConfig& c, const std::vector<std::string>& v) { c.matrix_variants = parse_variants(v); })
        .def_readwrite("matrix_flows", &ExperimentConfig::matrix_flows)
        .def_property(
            "matrix_scenarios",
            [](const ExperimentConfig& c) {
                std::vector<std::string> out;
                for (const auto& s : c.matrix_scenarios) out.push_back(s.key());
                return out;
            },
            [](ExperimentConfig& c, const std::vector<std::string>& v) {
                c.matrix_scenarios.clear();
                for (const auto& s : v) c.matrix_scenarios.push_back(parse_scenario(s));
            })
        .def("__repr__", [](const ExperimentConfig& c) { return "<Config " + c.hash() + ">"; });

    py::class_<ExperimentResult>(m, "Result")
        .def_readonly("config_hash", &ExperimentResult::config_hash)
        .def_property_readonly("runs",
                               [](const ExperimentResult& r) {
                                   py::list out;
                                   for (const auto& run : r.runs) out.append(run_dict(run));
                                   return out;
                               })
        .def("summary_json", [](const ExperimentResult& r) { return summary_json(r.config, r.runs); })
        .def("aggregate_json",
             [](const ExperimentResult& r, const std::string& mode) {
                 return aggregate_json(aggregate_runs(r.runs, parse_mode(mode)));
             },
             py::arg("mode") = "raw")
        .def("write", [](const ExperimentResult& r, const std::filesystem::path& dir) { write_run_outputs(dir, r); })
        .def("__len__", [](const ExperimentResult& r) { return r.runs.size(); });

    m.def(
        "run_experiment",
        [](const ExperimentConfig& cfg, bool keep_logs) {
            py::gil_scoped_release nogil;
            return run_experiment(cfg, keep_logs);
        },
        py::arg("config"), py::arg("keep_logs") = false);

    m.def(
        "run_matrix",
        [](const ExperimentConfig& cfg, std::optional<std::filesystem::path> out_dir) {
            MatrixResult res;
            {
                py::gil_scoped_release nogil;
                res = run_matrix(cfg);
                if (out_dir) write_matrix_outputs(*out_dir, cfg, res);
            }
            py::list cells;
            for (const auto& c : res.cells) {
                py::dict d;
                d["key"] = c.cell.key();
                d["variant"] = std::string(to_string(c.cell.variant));
                d["flows"] = c.cell.flows;
                d["scenario"] = c.cell.scenario.key();
                d["error"] = c.error ? py::object(py::str(*c.error)) : py::object(py::none());
                py::list runs;
                if (!c.error)
                    for (const auto& r : c.runs) runs.append(run_dict(r));
                d["runs"] = runs;
                cells.append(d);
            }
            return cells;
        },
        py::arg("config"), py::arg("out_dir") = py::none());

    m.def(
        "stats",
        [](const std::filesystem::path& dir, const std::string& mode) {
            return aggregate_json(aggregate_runs(read_run_outputs(dir), parse_mode(mode)));
        },
        py::arg("run_dir"), py::arg("mode") = "raw");

    m.def("jain_fairness", [](const std::vector<double>& g) { return jain_fairness(g); });
    m.def("empirical_cdf", [](const std::vector<double>& s) {
        const auto cdf = empirical_cdf(s);
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : cdf.points) pts.emplace_back(p.value, p.fraction);
        return py::make_tuple(pts, cdf.p85);
    });
    m.def("box_whisker", [](const std::vector<double>& s) {
        const auto b = box_whisker(s);
        py::dict d;
        d["q25"] = b.q25;
        d["median"] = b.median;
        d["q75"] = b.q75;
        d["whisker_lo"] = b.whisker_lo;
        d["whisker_hi"] = b.whisker_hi;
        d["mean"] = b.mean;
        return d;
    });
    m.def(
        "representative_flow",
        [](const std::vector<std::array<double, 3>>& runs, bool normalized) {
            return representative_flow(runs, normalized);
        },
        py::arg("runs"), py::arg("normalized") = false);
    m.def("format_relative", &format_relative, py::arg("value"), py::arg("best"));
    m.def("cubic_k", [](double max_win, double b, double c) {
        CubicParams p;
        p.b = b;
        p.c = c;
        return cubic_k(Segments::from_double(max_win), p);
    }, py::arg("max_win"), py::arg("b") = 0.2, py::arg("c") = 0.4);
}
