#include "brownscope/region.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <sstream>

#include "brownscope/error.hpp"

namespace brownscope {

std::size_t Boundary::point_count() const {
    std::size_t n = 0;
    for (const auto& p : polylines) n += p.points.size();
    return n;
}

void validate_grid_shape(const Bounds& b, std::size_t nx, std::size_t ny) {
    if (nx < 2 || ny < 2) throw ConfigError("grid needs nx, ny >= 2");
    if (!(b.re_max > b.re_min) || !(b.im_max > b.im_min) || !std::isfinite(b.re_min) ||
        !std::isfinite(b.re_max) || !std::isfinite(b.im_min) || !std::isfinite(b.im_max))
        throw ConfigError("grid bounds are degenerate");
}

Grid evaluate_grid(const ScalarField& f, const Bounds& bounds, std::size_t nx, std::size_t ny) {
    validate_grid_shape(bounds, nx, ny);
    Grid g{bounds, nx, ny, std::vector<double>(nx * ny)};
    std::vector<std::exception_ptr> failures(ny);
    const long rows = static_cast<long>(ny);
#pragma omp parallel for schedule(dynamic)
    for (long jj = 0; jj < rows; ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        try {
            for (std::size_t i = 0; i < nx; ++i) g.at(i, j) = f(g.node(i, j));
        } catch (...) {
            failures[j] = std::current_exception();
        }
    }
    for (auto& e : failures)
        if (e) std::rethrow_exception(e);
    return g;
}

Grid evaluate_grid_serial(const ScalarField& f, const Bounds& bounds, std::size_t nx,
                          std::size_t ny) {
    validate_grid_shape(bounds, nx, ny);
    Grid g{bounds, nx, ny, std::vector<double>(nx * ny)};
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) g.at(i, j) = f(g.node(i, j));
    return g;
}

// ---- marching squares ----

namespace {

bool above(double v, double level) { return v > level; }

struct EdgeKey {
    static std::size_t horizontal(std::size_t i, std::size_t j, std::size_t nx) { return 2 * (j * nx + i); }
    static std::size_t vertical(std::size_t i, std::size_t j, std::size_t nx) { return 2 * (j * nx + i) + 1; }
};

/// Crossing point on the segment between nodes a and b with values va, vb.
Complex crossing(Complex a, Complex b, double va, double vb, double level,
                 const LevelsetOptions& opts) {
    if (opts.field) {
        // Keep the invariant "a side" vs "b side" and bisect.
        const bool a_above = above(va, level);
        Complex lo = a, hi = b;
        const double len = std::abs(b - a);
        for (int it = 0; it < 200 && std::abs(hi - lo) > opts.bisection_tol * std::max(1.0, len); ++it) {
            const Complex mid = 0.5 * (lo + hi);
            if (above(opts.field(mid), level) == a_above)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    }
    double u = 0.5;
    if (std::isfinite(va) && std::isfinite(vb) && va != vb) u = std::clamp((level - va) / (vb - va), 0.0, 1.0);
    return a + u * (b - a);
}

}  // namespace

Boundary extract_levelset(const Grid& grid, double level, const LevelsetOptions& opts) {
    Boundary out;
    out.level = level;
    const std::size_t nx = grid.nx, ny = grid.ny;
    if (nx < 2 || ny < 2) return out;
    const std::size_t nkeys = 2 * nx * ny;
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> next(nkeys, kNone);
    std::vector<char> has_incoming(nkeys, 0);
    std::vector<Complex> point(nkeys);
    std::vector<char> point_done(nkeys, 0);

    auto inside = [&](double v) { return above(v, level) == (opts.inside == Inside::Above); };

    for (std::size_t j = 0; j + 1 < ny; ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            // Corners counter-clockwise from bottom-left; edge k joins corner k and k+1.
            const std::size_t ci[4] = {i, i + 1, i + 1, i};
            const std::size_t cj[4] = {j, j, j + 1, j + 1};
            const std::size_t edge[4] = {EdgeKey::horizontal(i, j, nx), EdgeKey::vertical(i + 1, j, nx),
                                         EdgeKey::horizontal(i, j + 1, nx), EdgeKey::vertical(i, j, nx)};
            bool in[4];
            int count = 0;
            for (int k = 0; k < 4; ++k) {
                in[k] = inside(grid.at(ci[k], cj[k]));
                count += in[k];
            }
            if (count == 0 || count == 4) continue;

            auto ensure_point = [&](int k) {
                const std::size_t e = edge[k];
                if (point_done[e]) return;
                const int k1 = (k + 1) % 4;
                // Evaluate along the edge in a fixed global direction so shared
                // edges get the same point from both cells.
                int a = k, b = k1;
                if (k == 2 || k == 3) std::swap(a, b);
                point[e] = crossing(grid.node(ci[a], cj[a]), grid.node(ci[b], cj[b]),
                                    grid.at(ci[a], cj[a]), grid.at(ci[b], cj[b]), level, opts);
                point_done[e] = 1;
            };
            auto link = [&](int from, int to) {
                ensure_point(from);
                ensure_point(to);
                next[edge[from]] = edge[to];
                has_incoming[edge[to]] = 1;
            };

            const bool saddle = count == 2 && in[0] == in[2];
            if (!saddle) {
                int exit_edge = -1, entry_edge = -1;
                for (int k = 0; k < 4; ++k) {
                    const int k1 = (k + 1) % 4;
                    if (in[k] && !in[k1]) exit_edge = k;
                    if (!in[k] && in[k1]) entry_edge = k;
                }
                link(exit_edge, entry_edge);
                continue;
            }
            const Complex centre = 0.5 * (grid.node(i, j) + grid.node(i + 1, j + 1));
            double vc;
            if (opts.field) {
                vc = opts.field(centre);
            } else {
                vc = 0.0;
                for (int k = 0; k < 4; ++k) vc += grid.at(ci[k], cj[k]);
                vc *= 0.25;
                if (std::isnan(vc)) vc = -std::numeric_limits<double>::infinity();
            }
            const bool centre_in = inside(vc);
            for (int k = 0; k < 4; ++k) {
                const int prev = (k + 3) % 4;
                if (centre_in && !in[k]) link(prev, k);   // cut off an outside corner
                if (!centre_in && in[k]) link(k, prev);   // cut off an inside corner
            }
        }
    }

    std::vector<char> used(nkeys, 0);
    auto follow = [&](std::size_t start) {
        Polyline pl;
        std::size_t e = start;
        while (e != kNone && !used[e]) {
            used[e] = 1;
            pl.points.push_back(point[e]);
            e = next[e];
        }
        pl.closed = (e == start);
        // Drop repeated points (a crossing landing on a shared node).
        std::vector<Complex> clean;
        for (const auto& p : pl.points)
            if (clean.empty() || clean.back() != p) clean.push_back(p);
        if (pl.closed)
            while (clean.size() > 1 && clean.front() == clean.back()) clean.pop_back();
        pl.points = std::move(clean);
        if (pl.points.size() >= 2) out.polylines.push_back(std::move(pl));
    };
    for (std::size_t e = 0; e < nkeys; ++e)
        if (next[e] != kNone && !has_incoming[e] && !used[e]) follow(e);
    for (std::size_t e = 0; e < nkeys; ++e)
        if (next[e] != kNone && !used[e]) follow(e);
    return out;
}

// ---- maps ----

Boundary map_boundary(const Boundary& b, const ComplexMap& m, double stretch, int max_depth) {
    Boundary out;
    out.level = b.level;
    for (std::size_t c = 0; c < b.polylines.size(); ++c) {
        const auto& src = b.polylines[c];
        auto eval = [&](Complex z, std::size_t idx) {
            try {
                return m(z);
            } catch (const std::exception& e) {
                std::ostringstream os;
                os << "map failed at point " << idx << " of chain " << c << " (" << z.real() << ", "
                   << z.imag() << "): " << e.what();
                throw MapError(os.str());
            }
        };
        Polyline dst;
        dst.closed = src.closed;
        const std::size_t n = src.points.size();
        if (n == 0) continue;
        std::vector<Complex> img(n);
        for (std::size_t k = 0; k < n; ++k) img[k] = eval(src.points[k], k);
        const std::size_t segs = src.closed ? n : n - 1;
        // Recursive midpoint insertion between a and b (images fa, fb), appending
        // interior points only.
        std::function<void(Complex, Complex, Complex, Complex, int, std::size_t)> refine =
            [&](Complex a, Complex fa, Complex bb, Complex fb, int depth, std::size_t idx) {
                const double ls = std::abs(bb - a), li = std::abs(fb - fa);
                if (depth >= max_depth || !(li > stretch * ls)) return;
                const Complex mid = 0.5 * (a + bb);
                const Complex fm = eval(mid, idx);
                refine(a, fa, mid, fm, depth + 1, idx);
                dst.points.push_back(fm);
                refine(mid, fm, bb, fb, depth + 1, idx);
            };
        for (std::size_t k = 0; k < n; ++k) {
            dst.points.push_back(img[k]);
            if (k < segs) {
                const std::size_t k1 = (k + 1) % n;
                refine(src.points[k], img[k], src.points[k1], img[k1], 0, k);
            }
        }
        out.polylines.push_back(std::move(dst));
    }
    return out;
}

void stitch_chains(Boundary& b, double tol) {
    auto& pls = b.polylines;
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t a = 0; a < pls.size() && !merged; ++a) {
            if (pls[a].closed || pls[a].points.empty()) continue;
            for (std::size_t c = 0; c < pls.size() && !merged; ++c) {
                if (c == a || pls[c].closed || pls[c].points.empty()) continue;
                if (std::abs(pls[a].points.back() - pls[c].points.front()) <= tol) {
                    auto& dst = pls[a].points;
                    dst.insert(dst.end(), pls[c].points.begin() + 1, pls[c].points.end());
                    pls.erase(pls.begin() + static_cast<std::ptrdiff_t>(c));
                    merged = true;
                }
            }
        }
    }
    for (auto& pl : pls) {
        if (pl.closed || pl.points.size() < 3) continue;
        if (std::abs(pl.points.back() - pl.points.front()) <= tol) {
            pl.points.pop_back();
            pl.closed = true;
        }
    }
}

bool boundary_contains(const Boundary& b, Complex z) {
    bool in = false;
    for (const auto& pl : b.polylines) {
        const auto& p = pl.points;
        const std::size_t n = p.size();
        if (n < 3) continue;
        for (std::size_t k = 0, l = n - 1; k < n; l = k++) {
            const bool cross = (p[k].imag() > z.imag()) != (p[l].imag() > z.imag());
            if (cross) {
                const double x = p[k].real() + (z.imag() - p[k].imag()) * (p[l].real() - p[k].real()) /
                                                     (p[l].imag() - p[k].imag());
                if (z.real() < x) in = !in;
            }
        }
    }
    return in;
}

double distance_to_boundary(const Boundary& b, Complex z) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& pl : b.polylines) {
        const auto& p = pl.points;
        const std::size_t n = p.size();
        if (n == 1) d = std::min(d, std::abs(z - p[0]));
        const std::size_t segs = pl.closed ? n : (n > 0 ? n - 1 : 0);
        for (std::size_t k = 0; k < segs; ++k) {
            const Complex a = p[k], c = p[(k + 1) % n];
            const Complex ab = c - a;
            const double len2 = std::norm(ab);
            double u = len2 > 0 ? ((z - a) * std::conj(ab)).real() / len2 : 0.0;
            u = std::clamp(u, 0.0, 1.0);
            d = std::min(d, std::abs(z - (a + u * ab)));
        }
    }
    return d;
}

// ---- emission ----

Format parse_format(const std::string& name) {
    if (name == "csv") return Format::Csv;
    if (name == "json") return Format::Json;
    if (name == "pgm") return Format::Pgm;
    throw ConfigError("unknown output format '" + name + "' (csv, json or pgm)");
}

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json json_num(double v) {
    if (std::isfinite(v)) return v;
    return num(v);
}

std::string meta_comment(const nlohmann::json& meta) {
    if (meta.is_null() || meta.empty()) return {};
    return "# " + meta.dump() + "\n";
}

}  // namespace

std::string emit_csv(const Grid& g, const nlohmann::json& meta) {
    std::string s = meta_comment(meta) + "re,im,value\n";
    for (std::size_t j = 0; j < g.ny; ++j)
        for (std::size_t i = 0; i < g.nx; ++i) {
            const Complex z = g.node(i, j);
            s += num(z.real()) + "," + num(z.imag()) + "," + num(g.at(i, j)) + "\n";
        }
    return s;
}

std::string emit_csv(const Boundary& b, const nlohmann::json& meta) {
    std::string s = meta_comment(meta) + "chain,closed,re,im\n";
    for (std::size_t c = 0; c < b.polylines.size(); ++c)
        for (const auto& p : b.polylines[c].points)
            s += std::to_string(c) + "," + (b.polylines[c].closed ? "1" : "0") + "," + num(p.real()) +
                 "," + num(p.imag()) + "\n";
    return s;
}

nlohmann::json grid_to_json(const Grid& g, const nlohmann::json& meta) {
    nlohmann::json doc;
    doc["schema"] = "brownscope-region/1";
    doc["type"] = "grid";
    doc["bounds"] = {{"re_min", g.bounds.re_min},
                     {"re_max", g.bounds.re_max},
                     {"im_min", g.bounds.im_min},
                     {"im_max", g.bounds.im_max}};
    doc["nx"] = g.nx;
    doc["ny"] = g.ny;
    doc["layout"] = "row-major from im_min, nodes at cell centres";
    auto& vals = doc["values"] = nlohmann::json::array();
    for (double v : g.values) vals.push_back(json_num(v));
    if (!meta.is_null()) doc["meta"] = meta;
    return doc;
}

nlohmann::json boundary_to_json(const Boundary& b, const nlohmann::json& meta) {
    nlohmann::json doc;
    doc["schema"] = "brownscope-region/1";
    doc["type"] = "boundary";
    doc["level"] = json_num(b.level);
    auto& arr = doc["polylines"] = nlohmann::json::array();
    for (const auto& pl : b.polylines) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : pl.points) pts.push_back({p.real(), p.imag()});
        arr.push_back({{"closed", pl.closed}, {"points", pts}});
    }
    if (!meta.is_null()) doc["meta"] = meta;
    return doc;
}

std::string emit_json(const Grid& g, const nlohmann::json& meta) { return grid_to_json(g, meta).dump(1) + "\n"; }
std::string emit_json(const Boundary& b, const nlohmann::json& meta) {
    return boundary_to_json(b, meta).dump(1) + "\n";
}

std::uint16_t quantize(double v, double lo, double hi) {
    if (std::isnan(v)) return 0;
    if (v == std::numeric_limits<double>::infinity()) return 65535;
    if (v == -std::numeric_limits<double>::infinity()) return 0;
    if (!(hi > lo)) return 0;
    const double u = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
    return static_cast<std::uint16_t>(std::lround(u * 65535.0));
}

std::string emit_pgm(const Grid& g, const nlohmann::json& meta) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : g.values)
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!std::isfinite(lo)) lo = hi = 0.0;
    std::ostringstream os;
    os << "P5\n"
       << "# brownscope-region/1 bounds " << num(g.bounds.re_min) << ' ' << num(g.bounds.re_max) << ' '
       << num(g.bounds.im_min) << ' ' << num(g.bounds.im_max) << '\n'
       << "# clamp " << num(lo) << ' ' << num(hi) << " (+inf -> 65535, -inf/nan -> 0)\n";
    if (!meta.is_null() && !meta.empty()) os << "# meta " << meta.dump() << '\n';
    os << g.nx << ' ' << g.ny << "\n65535\n";
    std::string s = os.str();
    s.reserve(s.size() + 2 * g.nx * g.ny);
    for (std::size_t r = 0; r < g.ny; ++r) {
        const std::size_t j = g.ny - 1 - r;
        for (std::size_t i = 0; i < g.nx; ++i) {
            const std::uint16_t p = quantize(g.at(i, j), lo, hi);
            s.push_back(static_cast<char>(p >> 8));
            s.push_back(static_cast<char>(p & 0xff));
        }
    }
    return s;
}

double PgmImage::value(std::size_t i, std::size_t j) const {
    const std::uint16_t p = pixels[j * nx + i];
    return lo + (hi - lo) * static_cast<double>(p) / 65535.0;
}

PgmImage parse_pgm(const std::string& bytes) {
    PgmImage img;
    std::size_t pos = 0;
    auto line = [&]() {
        const std::size_t e = bytes.find('\n', pos);
        if (e == std::string::npos) throw FormatError("truncated PGM header");
        std::string l = bytes.substr(pos, e - pos);
        pos = e + 1;
        return l;
    };
    if (line() != "P5") throw FormatError("not a binary PGM (P5)");
    std::string l;
    bool have_dims = false;
    while (!have_dims) {
        l = line();
        if (l.rfind("# brownscope-region/1 bounds", 0) == 0) {
            std::istringstream is(l.substr(28));
            is >> img.bounds.re_min >> img.bounds.re_max >> img.bounds.im_min >> img.bounds.im_max;
        } else if (l.rfind("# clamp", 0) == 0) {
            std::istringstream is(l.substr(7));
            is >> img.lo >> img.hi;
        } else if (!l.empty() && l[0] != '#') {
            std::istringstream is(l);
            is >> img.nx >> img.ny;
            have_dims = true;
        }
    }
    if (line() != "65535") throw FormatError("expected 16-bit PGM (maxval 65535)");
    if (bytes.size() - pos != 2 * img.nx * img.ny) throw FormatError("PGM payload size mismatch");
    img.pixels.assign(img.nx * img.ny, 0);
    for (std::size_t r = 0; r < img.ny; ++r) {
        const std::size_t j = img.ny - 1 - r;
        for (std::size_t i = 0; i < img.nx; ++i) {
            const auto hi8 = static_cast<unsigned char>(bytes[pos++]);
            const auto lo8 = static_cast<unsigned char>(bytes[pos++]);
            img.pixels[j * img.nx + i] = static_cast<std::uint16_t>((hi8 << 8) | lo8);
        }
    }
    return img;
}

}  // namespace brownscope
