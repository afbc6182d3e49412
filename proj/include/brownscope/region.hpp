#pragma once

// Grid sampling of scalar fields on the complex plane, marching-squares level
// sets, images of boundaries under maps, and csv/json/pgm emission.

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace brownscope {

using Complex = std::complex<double>;
using ScalarField = std::function<double(Complex)>;
using ComplexMap = std::function<Complex(Complex)>;

struct Bounds {
    double re_min = -1.0;
    double re_max = 1.0;
    double im_min = -1.0;
    double im_max = 1.0;
};

/// Values at cell centres, stored row by row from im_min upwards:
/// values[j * nx + i] is the node with real index i and imaginary index j.
struct Grid {
    Bounds bounds;
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> values;

    double dx() const { return (bounds.re_max - bounds.re_min) / static_cast<double>(nx); }
    double dy() const { return (bounds.im_max - bounds.im_min) / static_cast<double>(ny); }
    Complex node(std::size_t i, std::size_t j) const {
        return {bounds.re_min + (static_cast<double>(i) + 0.5) * dx(),
                bounds.im_min + (static_cast<double>(j) + 0.5) * dy()};
    }
    double at(std::size_t i, std::size_t j) const { return values[j * nx + i]; }
    double& at(std::size_t i, std::size_t j) { return values[j * nx + i]; }
};

struct Polyline {
    std::vector<Complex> points;
    bool closed = false;
};

struct Boundary {
    std::vector<Polyline> polylines;
    double level = 0.0;

    std::size_t point_count() const;
};

void validate_grid_shape(const Bounds& b, std::size_t nx, std::size_t ny);

/// Samples f at every cell centre; rows are distributed over OpenMP threads.
Grid evaluate_grid(const ScalarField& f, const Bounds& bounds, std::size_t nx, std::size_t ny);
/// Single-threaded reference with identical output.
Grid evaluate_grid_serial(const ScalarField& f, const Bounds& bounds, std::size_t nx,
                          std::size_t ny);

/// Which side of the level counts as the region. Chains are oriented with the
/// region on their left.
enum class Inside { Below, Above };

struct LevelsetOptions {
    Inside inside = Inside::Below;
    /// When set, edge crossings are refined by bisection of field - level and
    /// saddle cells are resolved by sampling the cell centre.
    ScalarField field;
    double bisection_tol = 1e-10;
};

/// Marching squares. A value counts as above the level iff v > level, so
/// +inf is always above and -inf or NaN always below. Without a field sampler,
/// saddles use the mean of the four corners.
Boundary extract_levelset(const Grid& grid, double level, const LevelsetOptions& opts = {});

/// Pointwise image of every chain; a segment whose image is longer than
/// `stretch` times the source gets a midpoint inserted (up to `max_depth`
/// halvings). Failures of m are rethrown as MapError naming the point.
Boundary map_boundary(const Boundary& b, const ComplexMap& m, double stretch = 5.0,
                      int max_depth = 12);

/// Joins open chains whose end meets another chain's start within tol, and
/// closes chains whose ends meet.
void stitch_chains(Boundary& b, double tol);

/// Even-odd test against all chains (open chains are closed by their chord).
bool boundary_contains(const Boundary& b, Complex z);
double distance_to_boundary(const Boundary& b, Complex z);

// ---- emission ----

enum class Format { Csv, Json, Pgm };
Format parse_format(const std::string& name);

std::string emit_csv(const Grid& g, const nlohmann::json& meta = {});
std::string emit_csv(const Boundary& b, const nlohmann::json& meta = {});
nlohmann::json grid_to_json(const Grid& g, const nlohmann::json& meta = {});
nlohmann::json boundary_to_json(const Boundary& b, const nlohmann::json& meta = {});
std::string emit_json(const Grid& g, const nlohmann::json& meta = {});
std::string emit_json(const Boundary& b, const nlohmann::json& meta = {});
/// Binary P5, 16-bit big-endian, top row = largest imaginary part. Finite
/// values map affinely onto [0, 65535]; +inf clamps to 65535 and -inf/NaN to 0.
std::string emit_pgm(const Grid& g, const nlohmann::json& meta = {});

struct PgmImage {
    std::size_t nx = 0;
    std::size_t ny = 0;
    Bounds bounds;
    double lo = 0.0;
    double hi = 0.0;
    /// Row-major in the grid's orientation (row 0 = im_min).
    std::vector<std::uint16_t> pixels;

    double value(std::size_t i, std::size_t j) const;
};
PgmImage parse_pgm(const std::string& bytes);
/// The pixel a value would be quantised to for the given clamp range.
std::uint16_t quantize(double v, double lo, double hi);

}  // namespace brownscope
