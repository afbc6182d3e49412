#include "brownscope/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "brownscope/error.hpp"
#include "brownscope/hj_additive.hpp"
#include "brownscope/hj_multiplicative.hpp"
#include "brownscope/measure_io.hpp"
#include "brownscope/rdiagonal.hpp"
#include "brownscope/rmt_oracle.hpp"

namespace brownscope {

using nlohmann::json;

namespace {

const std::vector<std::string> kCommands{"lifetime", "domain", "map", "spectest", "oracle", "radii"};
const std::vector<std::string> kModels{"add-circ", "add-elliptic", "mult-unitary", "mult-positive", "rdiag"};

bool one_of(const std::string& s, const std::vector<std::string>& set) {
    return std::find(set.begin(), set.end(), s) != set.end();
}

void check_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : obj.items())
        if (!one_of(key, allowed)) throw ConfigError("unknown key '" + key + "' in " + where);
}

Complex read_complex(const json& v, const std::string& what) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError(what + " must be a number or [re, im]");
}

json write_complex(Complex z) { return json::array({z.real(), z.imag()}); }

template <class T>
T read_number(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(std::string(key) + " in " + where + " must be a number");
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() || v.get<double>() < 0)
            throw ConfigError(std::string(key) + " in " + where + " must be a nonnegative integer");
    }
    return v.get<T>();
}

void validate(const RunConfig& cfg) {
    if (!one_of(cfg.command, kCommands)) throw ConfigError("unknown command '" + cfg.command + "'");
    if (!one_of(cfg.model, kModels))
        throw ConfigError("unknown model '" + cfg.model +
                          "' (add-circ, add-elliptic, mult-unitary, mult-positive, rdiag)");
    if (!std::isfinite(cfg.t) || !(cfg.t > 0)) throw ConfigError("t must be positive");
    ModelParams{cfg.t, cfg.gamma}.validate();
    if (cfg.model == "add-circ" && cfg.gamma != 0.0)
        throw ConfigError("add-circ is the gamma = 0 model; use add-elliptic for gamma != 0");
    if (cfg.model == "rdiag" && cfg.gamma != 0.0) throw ConfigError("rdiag takes gamma = 0");
    validate_grid_shape(cfg.grid.bounds, cfg.grid.nx, cfg.grid.ny);
    if (!(cfg.grid.r_min > 0)) throw ConfigError("grid.r_min must be positive");
    if (cfg.oracle.n < 2) throw ConfigError("oracle.n must be at least 2");
    if (cfg.oracle.trials < 1) throw ConfigError("oracle.trials must be at least 1");
    if (cfg.oracle.k < 1) throw ConfigError("oracle.k must be at least 1");
    for (const auto& p : cfg.oracle.probes)
        if (!(p.epsilon > 0)) throw ConfigError("oracle probes need epsilon > 0");
    parse_format(cfg.format);
    if (cfg.t_max < 0) throw ConfigError("radii.t_max must be nonnegative");
    if (cfg.t_steps < 1) throw ConfigError("radii.t_steps must be at least 1");
}

std::string fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

LoadedMeasure load_measure(const RunConfig& cfg) {
    if (cfg.measure.is_null()) throw ConfigError("no measure given (config key 'measure' or --measure)");
    if (cfg.measure.is_string()) return load_measure_file(cfg.measure.get<std::string>());
    return measure_from_json(cfg.measure);
}

void require_support(const SpectralMeasure& mu, const std::string& model) {
    SupportKind need;
    if (model == "mult-unitary") need = SupportKind::UnitCircle;
    else if (model == "mult-positive" || model == "rdiag") need = SupportKind::NonnegativeHalfLine;
    else return;
    if (mu.support_kind() != need)
        throw ConfigError("model " + model + " needs a measure with support '" + to_string(need) +
                          "', got '" + to_string(mu.support_kind()) + "'");
}

struct Context {
    const RunConfig& cfg;
    SpectralMeasure mu;
    json meta;
};

std::string emit_grid(const Context& c, const Grid& g) {
    switch (parse_format(c.cfg.format)) {
        case Format::Csv: return emit_csv(g, c.meta);
        case Format::Json: return emit_json(g, c.meta);
        case Format::Pgm: return emit_pgm(g, c.meta);
    }
    return {};
}

std::string emit_boundary(const Context& c, const Boundary& b) {
    switch (parse_format(c.cfg.format)) {
        case Format::Csv: return emit_csv(b, c.meta);
        case Format::Json: return emit_json(b, c.meta);
        case Format::Pgm: throw ConfigError("pgm output is only available for grids (lifetime)");
    }
    return {};
}

std::string emit_document(const Context& c, json doc) {
    if (parse_format(c.cfg.format) == Format::Pgm)
        throw ConfigError("pgm output is only available for grids (lifetime)");
    doc["meta"] = c.meta;
    return doc.dump(1) + "\n";
}

ScalarField lifetime_field(const Context& c) {
    const SpectralMeasure& mu = c.mu;
    const std::string& m = c.cfg.model;
    if (m == "add-circ" || m == "add-elliptic") return [&mu](Complex z) { return T_additive(mu, z); };
    if (m == "mult-unitary") return [&mu](Complex z) { return T_mult_unitary(mu, z); };
    if (m == "mult-positive")
        return [&mu](Complex z) {
            if (z == 0.0) return std::numeric_limits<double>::quiet_NaN();
            return T_mult_positive(mu, z);
        };
    throw ConfigError("lifetime is not defined for model " + m + "; use radii");
}

double rdiag_outer(const Context& c) { return std::sqrt(abs_moment(c.mu, 2.0) + c.cfg.t); }

double rdiag_inner(const Context& c) {
    const double m = neg2_trace(c.mu, 0.0);
    if (std::isinf(m) || c.cfg.t >= 1.0 / m) return 0.0;
    return circ_inner_radius(c.mu, c.cfg.t);
}

Polyline circle(double r, std::size_t n, bool clockwise) {
    Polyline pl;
    pl.closed = true;
    for (std::size_t k = 0; k < n; ++k) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        pl.points.push_back(std::polar(r, clockwise ? -a : a));
    }
    return pl;
}

Boundary sigma_boundary(const Context& c) {
    const auto& g = c.cfg.grid;
    const std::string& m = c.cfg.model;
    if (m == "add-circ" || m == "add-elliptic") return sigma_boundary_additive(c.mu, c.cfg.t, g.bounds, g.nx, g.ny);
    if (m == "mult-unitary") return sigma_boundary_mult_unitary(c.mu, c.cfg.t, g.bounds, g.nx, g.ny);
    if (m == "mult-positive") {
        const auto& b = g.bounds;
        const double r_max = std::max({std::abs(Complex(b.re_min, b.im_min)), std::abs(Complex(b.re_min, b.im_max)),
                                       std::abs(Complex(b.re_max, b.im_min)), std::abs(Complex(b.re_max, b.im_max))});
        return sigma_boundary_mult_positive(c.mu, c.cfg.t, g.r_min, r_max, g.nx, g.ny);
    }
    Boundary b;
    b.level = c.cfg.t;
    b.polylines.push_back(circle(rdiag_outer(c), g.nx, false));
    const double inner = rdiag_inner(c);
    if (inner > 0) b.polylines.push_back(circle(inner, g.nx, true));
    return b;
}

/// Sigma_t boundary pushed forward by the model's map when gamma != 0.
Boundary domain_boundary(const Context& c) {
    Boundary b = sigma_boundary(c);
    const Complex gamma = c.cfg.gamma;
    if (gamma == 0.0) return b;
    const SpectralMeasure& mu = c.mu;
    const std::string& m = c.cfg.model;
    if (m == "add-elliptic") return e_region(mu, {c.cfg.t, gamma}, b);
    if (m == "mult-unitary") return map_boundary(b, [&](Complex z) { return psi_exterior(mu, gamma, z); });
    return map_boundary(b, [&](Complex z) { return f_gamma_exterior(mu, gamma, z); });
}

std::string cmd_lifetime(const Context& c) {
    const auto& g = c.cfg.grid;
    return emit_grid(c, evaluate_grid(lifetime_field(c), g.bounds, g.nx, g.ny));
}

std::string cmd_domain(const Context& c) { return emit_boundary(c, domain_boundary(c)); }

std::string cmd_map(const Context& c) {
    const std::string& m = c.cfg.model;
    if (m == "rdiag") throw ConfigError("map is not defined for model rdiag");
    std::vector<Complex> pts = c.cfg.points;
    if (pts.empty() && c.cfg.point) pts.push_back(*c.cfg.point);
    if (pts.empty()) throw ConfigError("map needs 'points' (or 'point') in the config");
    const ModelParams params{c.cfg.t, c.cfg.gamma};
    json rows = json::array();
    for (Complex z : pts) {
        json row{{"lambda", write_complex(z)}};
        try {
            Complex w;
            if (m == "mult-unitary") w = psi_map(c.mu, params, z);
            else if (m == "mult-positive") w = f_gamma_map(c.mu, params, z);
            else w = phi_map(c.mu, params, z);
            row["image"] = write_complex(w);
        } catch (const InsideDomain& e) {
            row["image"] = nullptr;
            row["error"] = e.what();
        } catch (const OriginExcluded& e) {
            row["image"] = nullptr;
            row["error"] = e.what();
        }
        rows.push_back(row);
    }
    if (parse_format(c.cfg.format) == Format::Csv) {
        std::ostringstream os;
        os.precision(17);
        os << "# " << c.meta.dump() << "\nre,im,image_re,image_im\n";
        for (const auto& r : rows) {
            os << r["lambda"][0].get<double>() << ',' << r["lambda"][1].get<double>() << ',';
            if (r["image"].is_null()) os << "nan,nan\n";
            else os << r["image"][0].get<double>() << ',' << r["image"][1].get<double>() << '\n';
        }
        return os.str();
    }
    return emit_document(c, {{"map", rows}});
}

std::string cmd_spectest(const Context& c) {
    const std::string& m = c.cfg.model;
    if (m == "rdiag")
        throw ConfigError("spectest needs a normal initial element; rdiag is covered by radii");
    if (!c.cfg.point) throw ConfigError("spectest needs 'point' in the config (or --point-re/--point-im)");
    const Complex z = *c.cfg.point;
    const ModelParams params{c.cfg.t, c.cfg.gamma};
    json doc{{"point", write_complex(z)}};
    SpectralVerdict v;
    if (m == "add-circ" || m == "add-elliptic") {
        v = spectral_test_additive(c.mu, support_distance(c.mu), z, c.cfg.t);
        doc["T"] = T_additive(c.mu, z);
        // The verdict is about x + c_t at z; for gamma != 0 it certifies Phi(z).
        if (m == "add-elliptic" && v.verdict == Verdict::OutsideSpectrum)
            doc["certified_point"] = write_complex(phi_exterior(c.mu, c.cfg.gamma, z));
    } else if (m == "mult-unitary") {
        v = spectral_test_mult(MultKind::Unitary, c.mu, z, params);
        doc["T"] = T_mult_unitary(c.mu, z);
        if (v.verdict == Verdict::OutsideSpectrum)
            doc["certified_point"] = write_complex(psi_exterior(c.mu, c.cfg.gamma, z));
    } else {
        v = spectral_test_mult(MultKind::Positive, c.mu, z, params);
        if (z != 0.0) {
            const auto d = d_region_membership(c.mu, params, z);
            doc["outside_D"] = d.membership == DMembership::OutsideD;
            if (d.preimage) {
                doc["preimage"] = write_complex(*d.preimage);
                doc["T"] = T_mult_positive(c.mu, *d.preimage);
            }
            if (d.continuation_failed) doc["warning"] = d.warning;
        }
    }
    doc["verdict"] = to_string(v.verdict);
    if (v.verdict == Verdict::ZeroAtomCase) doc["zero_in_spectrum"] = v.zero_in_spectrum;
    return emit_document(c, doc);
}

Matrix sample_model(const Context& c, Engine& rng) {
    const auto& o = c.cfg.oracle;
    const std::string& m = c.cfg.model;
    const double t = c.cfg.t;
    if (m == "add-circ") return sample_atomic_normal(o.n, c.mu, rng) + sample_ginibre(o.n, t, rng);
    if (m == "add-elliptic") return sample_atomic_normal(o.n, c.mu, rng) + sample_elliptic(o.n, t, c.cfg.gamma, rng);
    if (m == "mult-unitary") {
        const Matrix u = sample_atomic_unitary(o.n, c.mu, rng);
        return u * sample_b(o.n, t, c.cfg.gamma, o.k, rng);
    }
    if (m == "mult-positive") {
        const Matrix x = sample_atomic_positive(o.n, c.mu, rng);
        return x * sample_b(o.n, t, c.cfg.gamma, o.k, rng);
    }
    const Matrix h = sample_atomic_positive(o.n, c.mu, rng);
    const Matrix u = sample_haar_unitary(o.n, rng);
    return u * h + sample_ginibre(o.n, t, rng);
}

json probe_prediction(const Context& c, const ProbeSpec& p) {
    if (c.cfg.model != "add-circ") return nullptr;
    try {
        return analytic_extension_trace(c.mu, p.lambda, c.cfg.t, {p.epsilon})[0];
    } catch (const InsideDomain&) {
        return nullptr;
    }
}

std::string cmd_oracle(const Context& c) {
    const auto& o = c.cfg.oracle;
    if (!c.mu.is_atomic()) throw ConfigError("oracle sampling needs an atomic measure");
    const Boundary b = domain_boundary(c);
    const RegionTest region = c.cfg.model == "rdiag" ? annulus_region(rdiag_inner(c), rdiag_outer(c)) : boundary_region(b);
    const double dilation = o.dilation >= 0 ? o.dilation : 3.0 / std::sqrt(static_cast<double>(o.n));
    const auto results = run_trials(o.trials, [&](std::size_t i) {
        Engine rng = make_engine(o.seed, i);
        const Matrix a = sample_model(c, rng);
        std::vector<double> row;
        for (const auto& p : o.probes) row.push_back(empirical_dSde(a, p.lambda, p.epsilon));
        for (Complex z : eigenvalues(a)) {
            row.push_back(z.real());
            row.push_back(z.imag());
        }
        return row;
    });
    const std::size_t np = o.probes.size();
    EmpiricalSpectrum pooled;
    for (const auto& row : results)
        for (std::size_t j = np; j + 1 < row.size(); j += 2) pooled.eigenvalues.emplace_back(row[j], row[j + 1]);
    pooled.n = pooled.eigenvalues.size();
    double rmin = kInf, rmax = 0.0;
    for (Complex z : pooled.eigenvalues) {
        rmin = std::min(rmin, std::abs(z));
        rmax = std::max(rmax, std::abs(z));
    }
    json probes = json::array();
    for (std::size_t p = 0; p < np; ++p) {
        double mean = 0.0, sq = 0.0;
        for (const auto& row : results) mean += row[p];
        mean /= static_cast<double>(results.size());
        for (const auto& row : results) sq += (row[p] - mean) * (row[p] - mean);
        const double se = results.size() > 1 ? std::sqrt(sq / static_cast<double>(results.size() - 1) /
                                                         static_cast<double>(results.size()))
                                             : 0.0;
        probes.push_back({{"lambda", write_complex(o.probes[p].lambda)},
                          {"epsilon", o.probes[p].epsilon},
                          {"empirical_dSde", mean},
                          {"standard_error", se},
                          {"predicted_dSde", probe_prediction(c, o.probes[p])}});
    }
    json doc{{"n", o.n},
             {"trials", o.trials},
             {"eigenvalue_count", pooled.eigenvalues.size()},
             {"dilation", dilation},
             {"inside_fraction", support_report(pooled, region, dilation)},
             {"min_modulus", rmin},
             {"max_modulus", rmax},
             {"probes", probes}};
    if (c.cfg.model == "rdiag") doc["annulus"] = {{"inner", rdiag_inner(c)}, {"outer", rdiag_outer(c)}};
    return emit_document(c, doc);
}

std::string cmd_radii(const Context& c) {
    if (c.mu.support_kind() != SupportKind::NonnegativeHalfLine)
        throw ConfigError("radii needs a measure on the nonnegative half-line (the law of h)");
    const AnnulusSpec hl = hl_radii(c.mu);
    const double m = neg2_trace(c.mu, 0.0);
    const double threshold = std::isinf(m) ? 0.0 : 1.0 / m;
    const double t_max = c.cfg.t_max > 0 ? std::min(c.cfg.t_max, threshold) : threshold;
    json curve = json::array();
    for (std::size_t k = 0; k <= c.cfg.t_steps; ++k) {
        const double t = t_max * static_cast<double>(k) / static_cast<double>(c.cfg.t_steps);
        curve.push_back({t, circ_inner_radius(c.mu, t)});
    }
    if (parse_format(c.cfg.format) == Format::Csv) {
        std::ostringstream os;
        os.precision(17);
        os << "# " << c.meta.dump() << "\nt,inner_radius\n";
        for (const auto& r : curve) os << r[0].get<double>() << ',' << r[1].get<double>() << '\n';
        return os.str();
    }
    json doc{{"inner_radius", hl.inner_radius},
             {"outer_radius", hl.outer_radius},
             {"t_threshold", threshold},
             {"inner_radius_curve", curve}};
    if (c.cfg.t <= threshold) doc["inner_radius_at_t"] = circ_inner_radius(c.mu, c.cfg.t);
    return emit_document(c, doc);
}

int exit_code_for(const Error& e) {
    const std::string k = e.kind();
    if (k == "ConfigError" || k == "BadGamma" || k == "InvalidMeasure" || k == "WrongSupportKind" ||
        k == "FormatError")
        return 2;
    return 3;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message, int code) {
    err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << "\n";
}

json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse config file " + path + ": " + e.what());
    }
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
    RunConfig cfg;
    check_keys(doc, {"command", "model", "measure", "t", "gamma", "grid", "oracle", "output", "point", "points", "radii"},
               "config");
    try {
        cfg.command = doc.value("command", cfg.command);
        cfg.model = doc.value("model", cfg.model);
        if (doc.contains("measure")) {
            cfg.measure = doc["measure"];
            if (!cfg.measure.is_object() && !cfg.measure.is_string())
                throw ConfigError("measure must be an inline measure object or a file path");
        }
        cfg.t = read_number(doc, "t", cfg.t, "config");
        if (doc.contains("gamma")) cfg.gamma = read_complex(doc["gamma"], "gamma");
        if (doc.contains("grid")) {
            const auto& g = doc["grid"];
            check_keys(g, {"re_min", "re_max", "im_min", "im_max", "nx", "ny", "r_min"}, "grid");
            auto& b = cfg.grid.bounds;
            b.re_min = read_number(g, "re_min", b.re_min, "grid");
            b.re_max = read_number(g, "re_max", b.re_max, "grid");
            b.im_min = read_number(g, "im_min", b.im_min, "grid");
            b.im_max = read_number(g, "im_max", b.im_max, "grid");
            cfg.grid.nx = read_number(g, "nx", cfg.grid.nx, "grid");
            cfg.grid.ny = read_number(g, "ny", cfg.grid.ny, "grid");
            cfg.grid.r_min = read_number(g, "r_min", cfg.grid.r_min, "grid");
        }
        if (doc.contains("oracle")) {
            const auto& o = doc["oracle"];
            check_keys(o, {"n", "k", "trials", "seed", "dilation", "probes"}, "oracle");
            cfg.oracle.n = read_number(o, "n", cfg.oracle.n, "oracle");
            cfg.oracle.k = read_number(o, "k", cfg.oracle.k, "oracle");
            cfg.oracle.trials = read_number(o, "trials", cfg.oracle.trials, "oracle");
            cfg.oracle.seed = read_number(o, "seed", cfg.oracle.seed, "oracle");
            cfg.oracle.dilation = read_number(o, "dilation", cfg.oracle.dilation, "oracle");
            if (o.contains("probes")) {
                for (const auto& p : o["probes"]) {
                    if (!p.is_array() || p.size() != 3) throw ConfigError("each probe must be [re, im, epsilon]");
                    cfg.oracle.probes.push_back({{p[0].get<double>(), p[1].get<double>()}, p[2].get<double>()});
                }
            }
        }
        if (doc.contains("output")) {
            const auto& o = doc["output"];
            check_keys(o, {"format", "path"}, "output");
            cfg.format = o.value("format", cfg.format);
            cfg.out = o.value("path", cfg.out);
        }
        if (doc.contains("point")) cfg.point = read_complex(doc["point"], "point");
        if (doc.contains("points")) {
            if (!doc["points"].is_array()) throw ConfigError("points must be an array");
            for (const auto& p : doc["points"]) cfg.points.push_back(read_complex(p, "points entry"));
        }
        if (doc.contains("radii")) {
            const auto& r = doc["radii"];
            check_keys(r, {"t_max", "t_steps"}, "radii");
            cfg.t_max = read_number(r, "t_max", cfg.t_max, "radii");
            cfg.t_steps = read_number(r, "t_steps", cfg.t_steps, "radii");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return cfg;
}

json effective_config(const RunConfig& cfg) {
    const auto& b = cfg.grid.bounds;
    json probes = json::array();
    for (const auto& p : cfg.oracle.probes) probes.push_back({p.lambda.real(), p.lambda.imag(), p.epsilon});
    json points = json::array();
    for (Complex z : cfg.points) points.push_back(write_complex(z));
    return {{"command", cfg.command},
            {"model", cfg.model},
            {"measure", cfg.measure},
            {"t", cfg.t},
            {"gamma", write_complex(cfg.gamma)},
            {"grid",
             {{"re_min", b.re_min}, {"re_max", b.re_max}, {"im_min", b.im_min}, {"im_max", b.im_max},
              {"nx", cfg.grid.nx}, {"ny", cfg.grid.ny}, {"r_min", cfg.grid.r_min}}},
            {"oracle",
             {{"n", cfg.oracle.n}, {"k", cfg.oracle.k}, {"trials", cfg.oracle.trials}, {"seed", cfg.oracle.seed},
              {"dilation", cfg.oracle.dilation}, {"probes", probes}}},
            {"output", {{"format", cfg.format}, {"path", cfg.out}}},
            {"point", cfg.point ? write_complex(*cfg.point) : json(nullptr)},
            {"points", points},
            {"radii", {{"t_max", cfg.t_max}, {"t_steps", cfg.t_steps}}}};
}

std::string config_hash(const RunConfig& cfg) { return fnv1a(effective_config(cfg).dump()); }

std::string execute(const RunConfig& cfg) {
    validate(cfg);
    auto loaded = load_measure(cfg);
    require_support(loaded.measure, cfg.model);
    Context c{cfg, std::move(loaded.measure), {}};
    c.meta = {{"config_hash", config_hash(cfg)}, {"command", cfg.command}, {"model", cfg.model},
              {"t", cfg.t}, {"gamma", write_complex(cfg.gamma)}};
    if (!loaded.warnings.empty()) c.meta["warnings"] = loaded.warnings;
    if (cfg.command == "lifetime") return cmd_lifetime(c);
    if (cfg.command == "domain") return cmd_domain(c);
    if (cfg.command == "map") return cmd_map(c);
    if (cfg.command == "spectest") return cmd_spectest(c);
    if (cfg.command == "oracle") return cmd_oracle(c);
    return cmd_radii(c);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectra and Brown measure supports of free-probability models"};
    app.require_subcommand(1);
    struct Flags {
        std::string config, model, measure, out, format;
        std::optional<double> t, gamma_re, gamma_im, point_re, point_im;
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> n, k, trials, nx, ny;
    } f;
    for (const auto& name : kCommands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", f.config, "JSON config file");
        sub->add_option("--model", f.model, "add-circ, add-elliptic, mult-unitary, mult-positive or rdiag");
        sub->add_option("--measure", f.measure, "measure JSON file");
        sub->add_option("--t", f.t, "time parameter t > 0");
        sub->add_option("--gamma-re", f.gamma_re, "real part of gamma");
        sub->add_option("--gamma-im", f.gamma_im, "imaginary part of gamma");
        sub->add_option("--out", f.out, "output path ('-' for stdout)");
        sub->add_option("--format", f.format, "csv, json or pgm");
        sub->add_option("--seed", f.seed, "oracle seed");
        sub->add_option("--n", f.n, "oracle matrix size");
        sub->add_option("--k", f.k, "factors in the multiplicative product");
        sub->add_option("--trials", f.trials, "oracle trials");
        sub->add_option("--nx", f.nx, "grid columns");
        sub->add_option("--ny", f.ny, "grid rows");
        sub->add_option("--point-re", f.point_re, "real part of the spectest point");
        sub->add_option("--point-im", f.point_im, "imaginary part of the spectest point");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        report_error(err, "ConfigError", e.what(), 2);
        return 2;
    }
    try {
        RunConfig cfg = f.config.empty() ? RunConfig{} : parse_run_config(read_config_file(f.config));
        cfg.command = app.get_subcommands().front()->get_name();
        if (!f.model.empty()) cfg.model = f.model;
        if (!f.measure.empty()) cfg.measure = f.measure;
        if (f.t) cfg.t = *f.t;
        if (f.gamma_re) cfg.gamma.real(*f.gamma_re);
        if (f.gamma_im) cfg.gamma.imag(*f.gamma_im);
        if (!f.out.empty()) cfg.out = f.out;
        if (!f.format.empty()) cfg.format = f.format;
        if (f.seed) cfg.oracle.seed = *f.seed;
        if (f.n) cfg.oracle.n = *f.n;
        if (f.k) cfg.oracle.k = *f.k;
        if (f.trials) cfg.oracle.trials = *f.trials;
        if (f.nx) cfg.grid.nx = *f.nx;
        if (f.ny) cfg.grid.ny = *f.ny;
        if (f.point_re || f.point_im) {
            Complex p = cfg.point.value_or(0.0);
            if (f.point_re) p.real(*f.point_re);
            if (f.point_im) p.imag(*f.point_im);
            cfg.point = p;
        }
        const std::string bytes = execute(cfg);
        if (cfg.out == "-") {
            out << bytes;
        } else {
            std::ofstream file(cfg.out, std::ios::binary);
            if (!file) throw ConfigError("cannot write " + cfg.out);
            file << bytes;
        }
        return 0;
    } catch (const Error& e) {
        const int code = exit_code_for(e);
        report_error(err, e.kind(), e.what(), code);
        return code;
    } catch (const std::exception& e) {
        report_error(err, "Error", e.what(), 3);
        return 3;
    }
}

}  // namespace brownscope
