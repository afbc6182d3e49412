#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "brownscope/measure.hpp"

namespace brownscope {

struct LoadedMeasure {
    SpectralMeasure measure;
    std::vector<std::string> warnings;
};

/// Reads {"kind": "atomic", "support": ..., "atoms": [[re, im, w], ...]} or
/// {"kind": "density", "support": ..., "grid": [[x, f(x)], ...]}. Weights are
/// renormalised; a warning is recorded when the mass is off by more than 1e-9.
LoadedMeasure measure_from_json(const nlohmann::json& doc);
LoadedMeasure load_measure_file(const std::string& path);

/// Atomic measures round-trip exactly; densities are written as their quadrature grid.
nlohmann::json measure_to_json(const SpectralMeasure& mu);

SupportKind parse_support_kind(const std::string& name);

}  // namespace brownscope
