#pragma once

// R-diagonal elements uh: Haagerup-Larsen annulus, Biane subordination for
// free convolution with a semicircular, and the inner radius of uh + c_t.

#include <functional>
#include <vector>

#include "brownscope/measure.hpp"

namespace brownscope {

struct AnnulusSpec {
    double inner_radius = 0.0;
    double outer_radius = 0.0;
};

/// outer = sqrt(int xi^2), inner = (int xi^-2)^(-1/2), 0 when that diverges.
AnnulusSpec hl_radii(const SpectralMeasure& mu_h);

/// Smallest y >= 0 with int dmu(xi) / ((x - xi)^2 + y^2) <= 1/t (bisection, 1e-10 in y).
double vt(const SpectralMeasure& mu_sym, double t, double x);

/// H_t(z) = z + t G(z) on Omega_t = {Im z > v_t(Re z)}; OutsideOmega otherwise.
Complex biane_Ht(const SpectralMeasure& mu_sym, double t, Complex z);

/// sqrt(1/int xi^-2 - t). TMaxExceeded beyond t = 1/int xi^-2.
double circ_inner_radius(const SpectralMeasure& mu_h, double t);

/// The same radius reached through the subordination limit: with
/// m = G(i eps)/(-i eps) for the symmetrisation, returns sqrt((1 - t m)/m).
double inner_radius_limit_chain(const SpectralMeasure& mu_h, double t, double eps);

/// density(x) = max(0, -Im G(x + iy)/pi) on x_grid, as a trapezoid-rule
/// density measure. normalization_correction() of the result is the recovered
/// mass before normalisation. Throws InvalidMeasure when nothing is recovered.
/// Pass NonnegativeHalfLine for a grid on [0, inf) to allow symmetrize().
SpectralMeasure stieltjes_invert(const std::function<Complex(Complex)>& G,
                                 const std::vector<double>& x_grid, double y,
                                 SupportKind kind = SupportKind::RealLine);

}  // namespace brownscope
