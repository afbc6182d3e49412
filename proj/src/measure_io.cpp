#include "brownscope/measure_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "brownscope/error.hpp"

namespace brownscope {

SupportKind parse_support_kind(const std::string& name) {
    if (name == "real") return SupportKind::RealLine;
    if (name == "nonneg") return SupportKind::NonnegativeHalfLine;
    if (name == "circle") return SupportKind::UnitCircle;
    if (name == "complex") return SupportKind::ComplexPlane;
    throw InvalidMeasure("unknown support kind '" + name + "'");
}

namespace {

std::string mass_warning(double mass) {
    std::ostringstream os;
    os.precision(17);
    os << "measure mass " << mass << " differs from 1 by more than 1e-9; renormalised";
    return os.str();
}

}  // namespace

LoadedMeasure measure_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw InvalidMeasure("measure document must be a JSON object");
    const std::string kind = doc.value("kind", std::string(doc.contains("grid") ? "density" : "atomic"));
    const SupportKind support = parse_support_kind(doc.value("support", std::string("real")));
    std::vector<std::string> warnings;
    try {
        if (kind == "atomic") {
            if (!doc.contains("atoms") || !doc["atoms"].is_array())
                throw InvalidMeasure("atomic measure needs an 'atoms' array");
            std::vector<Atom> atoms;
            double total = 0.0;
            for (const auto& a : doc["atoms"]) {
                if (!a.is_array() || a.size() != 3)
                    throw InvalidMeasure("each atom must be [re, im, weight]");
                atoms.push_back({{a[0].get<double>(), a[1].get<double>()}, a[2].get<double>()});
                total += atoms.back().weight;
            }
            if (std::abs(total - 1.0) > 1e-9) warnings.push_back(mass_warning(total));
            return {SpectralMeasure::atomic(support, std::move(atoms), Normalization::Renormalize),
                    warnings};
        }
        if (kind == "density") {
            if (!doc.contains("grid") || !doc["grid"].is_array())
                throw InvalidMeasure("density measure needs a 'grid' array");
            std::vector<std::pair<double, double>> grid;
            for (const auto& g : doc["grid"]) {
                if (!g.is_array() || g.size() != 2) throw InvalidMeasure("each grid entry must be [x, f(x)]");
                grid.emplace_back(g[0].get<double>(), g[1].get<double>());
            }
            auto mu = SpectralMeasure::from_grid(support, grid);
            if (std::abs(mu.normalization_correction() - 1.0) > 1e-9)
                warnings.push_back(mass_warning(mu.normalization_correction()));
            return {std::move(mu), warnings};
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidMeasure(std::string("malformed measure JSON: ") + e.what());
    }
    throw InvalidMeasure("unknown measure kind '" + kind + "'");
}

LoadedMeasure load_measure_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidMeasure("cannot open measure file " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidMeasure("cannot parse " + path + ": " + e.what());
    }
    return measure_from_json(doc);
}

nlohmann::json measure_to_json(const SpectralMeasure& mu) {
    nlohmann::json doc;
    doc["support"] = to_string(mu.support_kind());
    if (mu.is_atomic()) {
        doc["kind"] = "atomic";
        auto& arr = doc["atoms"] = nlohmann::json::array();
        for (const auto& a : mu.atoms()) arr.push_back({a.position.real(), a.position.imag(), a.weight});
        return doc;
    }
    doc["kind"] = "density";
    auto& arr = doc["grid"] = nlohmann::json::array();
    for (const auto& p : mu.pieces())
        for (double s : p.nodes) arr.push_back({s, p.density(s)});
    return doc;
}

}  // namespace brownscope
