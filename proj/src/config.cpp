#include "cclab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace cclab {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string Scenario::key() const {
    return kind == ScenarioKind::LongLived ? "long_lived" : "short_" + std::to_string(size_bytes);
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const auto item = trim(s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

template <class T>
T parse_number(const std::string& text, const std::string& key) {
    T v{};
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::invalid_argument(key + ": cannot parse '" + text + "' as a number");
    return v;
}

bool parse_bool(const std::string& text, const std::string& key) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw std::invalid_argument(key + ": expected true/false, got '" + text + "'");
}

SimTime ms_to_time(double ms, const std::string& key) {
    if (!(ms >= 0.0) || !std::isfinite(ms)) throw std::invalid_argument(key + " must be a finite value >= 0");
    return SimTime::from_us(static_cast<SimTime::rep>(std::llround(ms * 1000.0)));
}

std::string time_ms(SimTime t) { return format_double(static_cast<double>(t.us()) / 1000.0); }
std::string time_s(SimTime t) { return format_double(t.seconds()); }

std::string join_variants(const std::vector<Variant>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) out += (i ? "," : "") + std::string(to_string(vs[i]));
    return out;
}

std::vector<Variant> parse_variants(const std::string& text, const std::string& key) {
    std::vector<Variant> out;
    for (const auto& item : split_list(text)) {
        try {
            out.push_back(parse_variant(item));
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument(key + ": unknown variant '" + item + "'");
        }
    }
    return out;
}

struct Field {
    const char* section;
    const char* key;
    std::function<void(ExperimentConfig&, const std::string& value, const std::string& name)> set;
    std::function<std::string(const ExperimentConfig&)> get;
    bool canonical = true;  // part of the hashed, embedded config text
};

#define CCLAB_NUM_FIELD(sec, name, T, member)                                                    \
    Field {                                                                                      \
        sec, name, [](ExperimentConfig& c, const std::string& v, const std::string& n) {         \
            c.member = parse_number<T>(v, n);                                                    \
        },                                                                                       \
            [](const ExperimentConfig& c) {                                                      \
                if constexpr (std::is_floating_point_v<T>) return format_double(c.member);       \
                else return std::to_string(c.member);                                            \
            }                                                                                    \
    }

#define CCLAB_MS_FIELD(sec, name, member)                                                        \
    Field {                                                                                      \
        sec, name, [](ExperimentConfig& c, const std::string& v, const std::string& n) {         \
            c.member = ms_to_time(parse_number<double>(v, n), n);                                \
        },                                                                                       \
            [](const ExperimentConfig& c) { return time_ms(c.member); }                          \
    }

#define CCLAB_S_FIELD(sec, name, member)                                                         \
    Field {                                                                                      \
        sec, name, [](ExperimentConfig& c, const std::string& v, const std::string& n) {         \
            c.member = ms_to_time(parse_number<double>(v, n) * 1000.0, n);                       \
        },                                                                                       \
            [](const ExperimentConfig& c) { return time_s(c.member); }                           \
    }

#define CCLAB_BOOL_FIELD(sec, name, member)                                                      \
    Field {                                                                                      \
        sec, name, [](ExperimentConfig& c, const std::string& v, const std::string& n) {         \
            c.member = parse_bool(v, n);                                                         \
        },                                                                                       \
            [](const ExperimentConfig& c) { return std::string(c.member ? "true" : "false"); }   \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        Field{"experiment", "variant",
              [](ExperimentConfig& c, const std::string& v, const std::string& n) { c.variants = parse_variants(v, n); },
              [](const ExperimentConfig& c) { return join_variants(c.variants); }},
        CCLAB_NUM_FIELD("experiment", "flows", std::uint32_t, num_flows),
        Field{"experiment", "scenario",
              [](ExperimentConfig& c, const std::string& v, const std::string&) { c.scenario = parse_scenario(v); },
              [](const ExperimentConfig& c) { return c.scenario.key(); }},
        CCLAB_S_FIELD("experiment", "duration_s", duration),
        CCLAB_NUM_FIELD("experiment", "runs", std::uint32_t, runs),
        CCLAB_NUM_FIELD("experiment", "seed", std::uint64_t, seed),
        CCLAB_S_FIELD("experiment", "stagger_s", stagger),
        CCLAB_S_FIELD("experiment", "transfer_cap_s", transfer_cap),

        CCLAB_NUM_FIELD("link", "rate_bps", std::uint64_t, link.rate_bps),
        CCLAB_MS_FIELD("link", "prop_rtt_ms", link.prop_rtt),
        CCLAB_NUM_FIELD("link", "queue_packets", std::size_t, link.queue_capacity),
        CCLAB_NUM_FIELD("link", "arq_frame_error_prob", double, link.arq_frame_error_prob),
        CCLAB_MS_FIELD("link", "arq_retx_delay_ms", link.arq_retx_delay),
        CCLAB_NUM_FIELD("link", "arq_max_retx", unsigned, link.arq_max_retx),
        CCLAB_NUM_FIELD("link", "residual_loss_prob", double, link.residual_loss_prob),

        CCLAB_NUM_FIELD("transport", "mss", std::uint32_t, transport.mss),
        CCLAB_NUM_FIELD("transport", "header_bytes", std::uint32_t, transport.header_bytes),
        CCLAB_MS_FIELD("transport", "rto_min_ms", transport.rto_min),
        CCLAB_MS_FIELD("transport", "rto_initial_ms", transport.rto_initial),
        CCLAB_MS_FIELD("transport", "rto_max_ms", transport.rto_max),
        CCLAB_NUM_FIELD("transport", "initial_cwnd", std::int64_t, transport.initial_cwnd),

        CCLAB_NUM_FIELD("newreno", "b", double, cc.newreno.b),

        CCLAB_NUM_FIELD("westwood", "filter_gain", double, cc.westwood.filter_gain),
        CCLAB_MS_FIELD("westwood", "min_interval_ms", cc.westwood.min_interval),
        CCLAB_NUM_FIELD("westwood", "fallback_b", double, cc.westwood.fallback_b),

        CCLAB_NUM_FIELD("bic", "b", double, cc.bic.b),
        CCLAB_NUM_FIELD("bic", "s_max", double, cc.bic.s_max),
        CCLAB_NUM_FIELD("bic", "s_min", double, cc.bic.s_min),
        CCLAB_NUM_FIELD("bic", "low_window", std::int64_t, cc.bic.low_window),

        CCLAB_NUM_FIELD("cubic", "c", double, cc.cubic.c),
        CCLAB_NUM_FIELD("cubic", "b", double, cc.cubic.b),
        CCLAB_BOOL_FIELD("cubic", "tcp_friendly", cc.cubic.tcp_friendly),

        Field{"matrix", "variants",
              [](ExperimentConfig& c, const std::string& v, const std::string& n) {
                  c.matrix_variants = parse_variants(v, n);
              },
              [](const ExperimentConfig& c) { return join_variants(c.matrix_variants); }},
        Field{"matrix", "flows",
              [](ExperimentConfig& c, const std::string& v, const std::string& n) {
                  c.matrix_flows.clear();
                  for (const auto& item : split_list(v)) c.matrix_flows.push_back(parse_number<std::uint32_t>(item, n));
              },
              [](const ExperimentConfig& c) {
                  std::string out;
                  for (std::size_t i = 0; i < c.matrix_flows.size(); ++i)
                      out += (i ? "," : "") + std::to_string(c.matrix_flows[i]);
                  return out;
              }},
        Field{"matrix", "scenarios",
              [](ExperimentConfig& c, const std::string& v, const std::string&) {
                  c.matrix_scenarios.clear();
                  for (const auto& item : split_list(v)) c.matrix_scenarios.push_back(parse_scenario(item));
              },
              [](const ExperimentConfig& c) {
                  std::string out;
                  for (std::size_t i = 0; i < c.matrix_scenarios.size(); ++i)
                      out += (i ? "," : "") + c.matrix_scenarios[i].key();
                  return out;
              }},
        Field{"matrix", "jobs",
              [](ExperimentConfig& c, const std::string& v, const std::string& n) {
                  c.jobs = parse_number<unsigned>(v, n);
              },
              [](const ExperimentConfig& c) { return std::to_string(c.jobs); }, false},

        Field{"output", "out_dir",
              [](ExperimentConfig& c, const std::string& v, const std::string&) { c.out_dir = v; },
              [](const ExperimentConfig& c) { return c.out_dir.generic_string(); }, false},
        CCLAB_BOOL_FIELD("output", "timeseries", write_timeseries),
        Field{"output", "representative",
              [](ExperimentConfig& c, const std::string& v, const std::string& n) {
                  if (v == "raw") c.representative = RepresentativeMode::Raw;
                  else if (v == "normalized") c.representative = RepresentativeMode::Normalized;
                  else throw std::invalid_argument(n + ": expected raw or normalized, got '" + v + "'");
              },
              [](const ExperimentConfig& c) {
                  return std::string(c.representative == RepresentativeMode::Raw ? "raw" : "normalized");
              }},
    };
    return table;
}

#undef CCLAB_NUM_FIELD
#undef CCLAB_MS_FIELD
#undef CCLAB_S_FIELD
#undef CCLAB_BOOL_FIELD

}  // namespace

Scenario parse_scenario(std::string_view text) {
    const std::string t = trim(text);
    if (t == "long_lived" || t == "long") return Scenario{};
    std::string digits = t;
    if (digits.starts_with("short_")) digits = digits.substr(6);
    std::uint64_t mult = 1;
    auto ends_with_ci = [&](std::string_view suf) {
        if (digits.size() < suf.size()) return false;
        return std::equal(suf.begin(), suf.end(), digits.end() - static_cast<std::ptrdiff_t>(suf.size()),
                          [](char s, char d) { return std::tolower(static_cast<unsigned char>(d)) == s; });
    };
    if (ends_with_ci("kb")) {
        mult = 1000;
        digits.resize(digits.size() - 2);
    } else if (ends_with_ci("mb")) {
        mult = 1'000'000;
        digits.resize(digits.size() - 2);
    }
    digits = trim(digits);
    std::uint64_t n = 0;
    const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (digits.empty() || res.ec != std::errc{} || res.ptr != digits.data() + digits.size() || n == 0)
        throw std::invalid_argument("scenario: expected long_lived or a positive transfer size, got '" + t + "'");
    return Scenario{ScenarioKind::ShortTransfer, n * mult};
}

void ExperimentConfig::validate() const {
    if (variants.empty()) throw std::invalid_argument("experiment.variant must name at least one variant");
    if (num_flows < 1) throw std::invalid_argument("experiment.flows must be >= 1");
    if (runs < 1) throw std::invalid_argument("experiment.runs must be >= 1");
    if (scenario.kind == ScenarioKind::LongLived && duration.us() == 0)
        throw std::invalid_argument("experiment.duration_s must be > 0");
    if (scenario.kind == ScenarioKind::ShortTransfer && scenario.size_bytes == 0)
        throw std::invalid_argument("experiment.scenario transfer size must be > 0");
    if (transfer_cap.us() == 0) throw std::invalid_argument("experiment.transfer_cap_s must be > 0");
    link.validate();
    transport.validate();
    if (!(cc.newreno.b > 0.0 && cc.newreno.b < 1.0)) throw std::invalid_argument("newreno.b must be in (0,1)");
    if (!(cc.westwood.filter_gain >= 0.0 && cc.westwood.filter_gain < 1.0))
        throw std::invalid_argument("westwood.filter_gain must be in [0,1)");
    if (!(cc.westwood.fallback_b > 0.0 && cc.westwood.fallback_b < 1.0))
        throw std::invalid_argument("westwood.fallback_b must be in (0,1)");
    if (!(cc.bic.b > 0.0 && cc.bic.b < 1.0)) throw std::invalid_argument("bic.b must be in (0,1)");
    if (!(cc.bic.s_min > 0.0)) throw std::invalid_argument("bic.s_min must be > 0");
    if (!(cc.bic.s_max >= cc.bic.s_min)) throw std::invalid_argument("bic.s_max must be >= bic.s_min");
    if (cc.bic.low_window < 0) throw std::invalid_argument("bic.low_window must be >= 0");
    if (!(cc.cubic.c > 0.0)) throw std::invalid_argument("cubic.c must be > 0");
    if (!(cc.cubic.b > 0.0 && cc.cubic.b < 1.0)) throw std::invalid_argument("cubic.b must be in (0,1)");
    if (matrix_variants.empty()) throw std::invalid_argument("matrix.variants must not be empty");
    if (matrix_flows.empty()) throw std::invalid_argument("matrix.flows must not be empty");
    if (std::find(matrix_flows.begin(), matrix_flows.end(), 0u) != matrix_flows.end())
        throw std::invalid_argument("matrix.flows entries must be >= 1");
    if (matrix_scenarios.empty()) throw std::invalid_argument("matrix.scenarios must not be empty");
    if (jobs < 1) throw std::invalid_argument("matrix.jobs must be >= 1");
}

std::string ExperimentConfig::to_ini() const {
    std::ostringstream os;
    const char* current = nullptr;
    for (const auto& f : fields()) {
        if (!f.canonical) continue;
        if (!current || std::string_view(current) != f.section) {
            if (current) os << '\n';
            os << '[' << f.section << "]\n";
            current = f.section;
        }
        os << f.key << " = " << f.get(*this) << '\n';
    }
    return os.str();
}

std::string ExperimentConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_ini())));
    return buf;
}

ExperimentConfig parse_config(std::string_view text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream is{std::string(text)};
    try {
        pt::ini_parser::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    ExperimentConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw std::invalid_argument("config: key '" + section + "' is outside any section");
        if (std::none_of(fields().begin(), fields().end(), [&](const Field& f) { return section == f.section; }))
            throw std::invalid_argument("config: unknown section [" + section + "]");
        for (const auto& [key, value] : body) {
            const std::string name = section + "." + key;
            const auto it = std::find_if(fields().begin(), fields().end(),
                                         [&](const Field& f) { return section == f.section && key == f.key; });
            if (it == fields().end()) throw std::invalid_argument("config: unknown key " + name);
            it->set(cfg, trim(value.data()), name);
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("config: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace cclab
