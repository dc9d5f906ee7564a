#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cclab/cc/factory.hpp"
#include "cclab/link.hpp"
#include "cclab/sim_time.hpp"
#include "cclab/tcp.hpp"

namespace cclab {

enum class ScenarioKind { LongLived, ShortTransfer };

struct Scenario {
    ScenarioKind kind = ScenarioKind::LongLived;
    std::uint64_t size_bytes = 0;  // short transfers only

    /// "long_lived" or "short_<bytes>".
    std::string key() const;
    bool operator==(const Scenario&) const = default;
};

/// Parses "long_lived", a byte count ("50000") or a count with a KB/MB
/// suffix (1 KB = 1000 bytes).
Scenario parse_scenario(std::string_view text);

enum class RepresentativeMode { Raw, Normalized };

struct ExperimentConfig {
    // [experiment]
    std::vector<Variant> variants{Variant::NewReno};  // rotated across runs
    std::uint32_t num_flows = 1;
    Scenario scenario;
    SimTime duration = SimTime::from_seconds(180);
    std::uint32_t runs = 1;
    std::uint64_t seed = 1;
    SimTime stagger = SimTime::from_seconds(1);
    SimTime transfer_cap = SimTime::from_seconds(600);

    LinkConfig link;
    TransportParams transport;
    CcParams cc;

    // [matrix]
    std::vector<Variant> matrix_variants{Variant::NewReno, Variant::WestwoodPlus, Variant::Bic, Variant::Cubic};
    std::vector<std::uint32_t> matrix_flows{1, 2, 3, 4};
    std::vector<Scenario> matrix_scenarios{Scenario{}};
    unsigned jobs = 1;

    // [output]
    std::filesystem::path out_dir = "out";
    bool write_timeseries = true;
    RepresentativeMode representative = RepresentativeMode::Raw;

    /// Throws std::invalid_argument naming the offending key.
    void validate() const;

    /// Canonical sectioned key=value text; parse_config(to_ini()) round-trips.
    /// Where results go (out_dir) and how many threads make them (jobs) are
    /// left out, so they never change the hash or any output byte.
    std::string to_ini() const;
    /// 16 hex digits of FNV-1a over to_ini().
    std::string hash() const;
};

/// Reads a config from INI text. Unknown sections and keys are rejected, as
/// are malformed values and out-of-range settings. Missing keys keep their
/// defaults.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view data);

/// Shortest decimal that round-trips the double.
std::string format_double(double v);

}  // namespace cclab
