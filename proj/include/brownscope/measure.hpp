#pragma once

// Compactly supported probability measures and the integral transforms built on them.

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace brownscope {

using Complex = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kDefaultQuadratureNodes = 2048;

enum class SupportKind { RealLine, NonnegativeHalfLine, UnitCircle, ComplexPlane };

std::string to_string(SupportKind kind);

struct Atom {
    Complex position;
    double weight = 0.0;
};

/// A point of the discretised measure: an atom, or a quadrature node carrying
/// density * quadrature weight.
struct QuadratureNode {
    Complex position;
    double mass = 0.0;
};

/// One connected piece of a density measure: a segment of the real line
/// (xi = s) or an arc of the unit circle (xi = exp(i s)). The density is taken
/// with respect to ds.
struct DensityPiece {
    enum class Geometry { Segment, Arc };

    Geometry geometry = Geometry::Segment;
    double lo = 0.0;
    double hi = 0.0;
    std::function<double(double)> density;
    std::vector<double> nodes;
    std::vector<double> weights;

    Complex position(double s) const;
    /// Parameter of the point of this piece closest to z.
    double nearest_parameter(Complex z) const;
    double distance(Complex z) const;
    /// Largest gap between consecutive quadrature nodes, in |xi| units.
    double max_node_spacing() const;
};

enum class Normalization { Strict, Renormalize };

class SpectralMeasure {
public:
    /// Weighted atoms. Strict normalisation rejects total mass off by more than 1e-12.
    static SpectralMeasure atomic(SupportKind kind, std::vector<Atom> atoms,
                                  Normalization norm = Normalization::Strict);
    static SpectralMeasure point_mass(Complex position, SupportKind kind);

    /// Density f on [lo, hi] with Gauss-Legendre nodes. The density is rescaled
    /// so the discrete mass is exactly one.
    static SpectralMeasure density_on_interval(SupportKind kind, double lo, double hi,
                                               std::function<double(double)> f,
                                               std::size_t nodes = kDefaultQuadratureNodes);
    /// Density f(theta) on the unit circle with the periodic trapezoid rule.
    static SpectralMeasure density_on_circle(std::function<double(double)> f,
                                             std::size_t nodes = kDefaultQuadratureNodes);
    static SpectralMeasure uniform_circle(std::size_t nodes = kDefaultQuadratureNodes);
    /// Density sampled on a grid of (parameter, value) pairs: trapezoid weights,
    /// linear interpolation between samples. Parameter is x for real kinds and
    /// the angle for the unit circle.
    static SpectralMeasure from_grid(SupportKind kind,
                                     const std::vector<std::pair<double, double>>& grid);
    /// Assemble from already-built pieces (used by symmetrisation and inversion).
    static SpectralMeasure from_pieces(SupportKind kind, std::vector<DensityPiece> pieces);

    SupportKind support_kind() const noexcept { return kind_; }
    bool is_atomic() const noexcept { return pieces_.empty(); }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    const std::vector<DensityPiece>& pieces() const noexcept { return pieces_; }
    const std::vector<QuadratureNode>& nodes() const noexcept { return nodes_; }

    /// Width of the band around a density's support inside which nodal
    /// quadrature is not trusted (10x the node spacing). Zero for atomic measures.
    double guard_band() const noexcept { return guard_; }
    double distance_to_support(Complex z) const;
    /// Mass of the atom at z (0 for densities or when no atom is there).
    double atom_mass_at(Complex z, double tol = 1e-12) const;
    double support_radius() const;
    /// Sum of the density values at x over all real-line pieces.
    double density_at(double s) const;
    /// Factor the raw mass was divided by when the measure was normalised.
    double normalization_correction() const noexcept { return correction_; }

private:
    SpectralMeasure() = default;
    void finalize();

    SupportKind kind_ = SupportKind::RealLine;
    std::vector<Atom> atoms_;
    std::vector<DensityPiece> pieces_;
    std::vector<QuadratureNode> nodes_;
    double guard_ = 0.0;
    double correction_ = 1.0;
};

/// G(z) = int 1/(z - xi) dmu(xi).
Complex cauchy_transform(const SpectralMeasure& mu, Complex z);
/// G'(z) = -int 1/(z - xi)^2 dmu(xi).
Complex cauchy_transform_derivative(const SpectralMeasure& mu, Complex z);
/// J(lambda) = 1/2 - lambda G(lambda).
Complex herglotz(const SpectralMeasure& mu, Complex lambda);
Complex herglotz_derivative(const SpectralMeasure& mu, Complex lambda);

/// int 1/(|xi - lambda|^2 + eps) dmu; +inf when eps = 0 and the integral diverges.
double reg_resolvent(const SpectralMeasure& mu, Complex lambda, double eps);
/// d/d eps of reg_resolvent, i.e. -int 1/(|xi - lambda|^2 + eps)^2 dmu.
double reg_resolvent_derivative(const SpectralMeasure& mu, Complex lambda, double eps);
/// int w(xi)/(|xi - lambda|^2 + eps) dmu for a nonnegative weight w.
double resolvent_moment(const SpectralMeasure& mu, Complex lambda, double eps,
                        const std::function<double(Complex)>& weight);
/// reg_resolvent at eps = 0, i.e. tr |x - lambda|^-2.
double neg2_trace(const SpectralMeasure& mu, Complex lambda);
/// int |xi - lambda|^-4 dmu, off the support only.
double neg4_trace(const SpectralMeasure& mu, Complex lambda);
/// int log |xi - lambda|^2 dmu; -inf allowed.
double log_potential(const SpectralMeasure& mu, Complex lambda);
/// int |xi|^p dmu for p >= 0.
double abs_moment(const SpectralMeasure& mu, double p);

/// Average of mu and its reflection through 0.
SpectralMeasure symmetrize(const SpectralMeasure& mu);

}  // namespace brownscope
