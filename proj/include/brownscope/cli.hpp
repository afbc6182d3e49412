#pragma once

// Command-line front end: brownscope {lifetime|domain|map|spectest|oracle|radii}.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "brownscope/region.hpp"

namespace brownscope {

struct GridSpec {
    Bounds bounds{-2.0, 2.0, -2.0, 2.0};
    std::size_t nx = 256;
    std::size_t ny = 256;
    /// Inner radius of the log-polar grid used for mult-positive domains.
    double r_min = 1e-3;
};

struct ProbeSpec {
    Complex lambda;
    double epsilon = 0.0;
};

struct OracleSpec {
    std::size_t n = 400;
    std::size_t k = 200;
    std::size_t trials = 1;
    std::uint64_t seed = 1;
    /// Negative means 3/sqrt(n).
    double dilation = -1.0;
    std::vector<ProbeSpec> probes;
};

struct RunConfig {
    std::string command;
    std::string model;
    /// Inline measure document, or a string holding a file path.
    nlohmann::json measure;
    double t = 1.0;
    Complex gamma = 0.0;
    GridSpec grid;
    OracleSpec oracle;
    std::string format = "json";
    std::string out = "-";
    /// Evaluation point for spectest.
    std::optional<Complex> point;
    /// Points for map.
    std::vector<Complex> points;
    /// Inner-radius curve for radii: t in [0, t_max] with t_steps intervals.
    double t_max = 0.0;
    std::size_t t_steps = 20;
};

/// Reads a config document; unknown keys and bad values raise ConfigError.
RunConfig parse_run_config(const nlohmann::json& doc);
/// Canonical JSON of every field, including defaults.
nlohmann::json effective_config(const RunConfig& cfg);
/// FNV-1a (64 bit, hex) of the canonical JSON.
std::string config_hash(const RunConfig& cfg);

/// Executes one command and returns the bytes it would write.
std::string execute(const RunConfig& cfg);

/// Full entry point. Exit codes: 0 success, 2 configuration error, 3 numerical
/// failure; errors are written to err as one JSON object.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace brownscope
