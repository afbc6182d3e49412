#pragma once

// Multiplicative models: ub_t, ub_{t,gamma} (unitary initial condition) and
// xb_t, xb_{t,gamma} (nonnegative initial condition).

#include <optional>
#include <string>

#include "brownscope/hj_additive.hpp"
#include "brownscope/measure.hpp"
#include "brownscope/region.hpp"

namespace brownscope {

struct HamiltonStateMult {
    Complex lambda;
    double epsilon = 0.0;
    Complex p_lambda;  ///< (p_x, p_y)
    double p_epsilon = 0.0;
    double elapsed = 0.0;
};

struct FlowOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    /// BlowUp is raised once |p_eps| exceeds 1/blowup_tol.
    double blowup_tol = 1e-10;
};

/// int 1/|lambda - xi|^2 dmu_u over the unit circle.
double p_tilde_unitary(const SpectralMeasure& mu_u, Complex lambda);

/// log(r2)/(r2 - 1), by its series when |r2 - 1| < 1e-8.
double log_ratio_factor(double r2);

/// (1/p~) log|lambda|^2 / (|lambda|^2 - 1); +inf at 0, 0 where p~ diverges.
double T_mult_unitary(const SpectralMeasure& mu_u, Complex lambda);

/// Psi(lambda) = lambda exp(gamma J(lambda)), checked to lie outside the closure of Sigma_t.
Complex psi_map(const SpectralMeasure& mu_u, const ModelParams& params, Complex lambda);
Complex psi_exterior(const SpectralMeasure& mu_u, Complex gamma, Complex lambda);

/// State at time zero: p_eps = int 1/(|lambda-xi|^2+eps0), p_lambda = grad_lambda S.
HamiltonStateMult initial_state_mult(const SpectralMeasure& mu_u, Complex lambda0, double eps0);
/// Integrates Hamilton's equations for
/// H = -eps p_eps (1 + (|lambda|^2 - eps) p_eps - x p_x - y p_y)
/// with adaptive Dormand-Prince steps. Throws BlowUp when |p_eps| passes the threshold.
HamiltonStateMult hamilton_flow_mult(const SpectralMeasure& mu_u, Complex lambda0, double eps0,
                                     double t, const FlowOptions& opts = {});
/// Time at which the flow blows up, +inf if it survives past t_max.
double blowup_time_mult(const SpectralMeasure& mu_u, Complex lambda0, double eps0, double t_max,
                        const FlowOptions& opts = {});

/// Second theta-derivative of 1/T on the unit circle:
/// 1/2 int (2 + cos(theta - phi)) / (1 - cos(theta - phi))^2 dmu_u(e^{i phi}).
double curvature_check_circle(const SpectralMeasure& mu_u, double theta);

struct PTildePositive {
    double p0 = 0.0;
    double p2 = 0.0;
};
PTildePositive p0_p2_positive(const SpectralMeasure& mu_x, Complex lambda);

/// log(|lambda|^2 p0 / p2) / (|lambda|^2 p0 - p2), 1/p2 on the removable
/// singularity. Throws OriginExcluded at 0.
double T_mult_positive(const SpectralMeasure& mu_x, Complex lambda);

/// f_gamma(lambda) = lambda exp(gamma J_x(lambda)), checked against the
/// positive-case Sigma_t for params.t.
Complex f_gamma_map(const SpectralMeasure& mu_x, const ModelParams& params, Complex lambda);
Complex f_gamma_exterior(const SpectralMeasure& mu_x, Complex gamma, Complex lambda);

/// Whether every point of the circle of radius 1e-6 about 0 has T > t.
bool origin_outside_sigma_positive(const SpectralMeasure& mu_x, double t);

enum class DMembership { InsideD, OutsideD };

struct DRegionResult {
    DMembership membership = DMembership::InsideD;
    /// The preimage under f_gamma outside the closure of Sigma_t, when found.
    std::optional<Complex> preimage;
    bool continuation_failed = false;
    std::string warning;
};

/// Membership in D_{t,gamma}: z is outside iff f_gamma has a preimage of z
/// outside the closure of Sigma_t. The preimage is found by Newton
/// path-following from far away (and from near 0 when 0 lies outside Sigma_t).
/// A stalled continuation is reported and treated as InsideD.
DRegionResult d_region_membership(const SpectralMeasure& mu_x, const ModelParams& params, Complex z);

enum class MultKind { Unitary, Positive };

SpectralVerdict spectral_test_mult(MultKind kind, const SpectralMeasure& mu, Complex z,
                                   const ModelParams& params);

/// Boundary of the unitary-case Sigma_t on a rectangular grid.
Boundary sigma_boundary_mult_unitary(const SpectralMeasure& mu_u, double t, const Bounds& bounds,
                                     std::size_t nx, std::size_t ny);

/// Boundary of the positive-case Sigma_t from a log-polar grid covering
/// r in [r_min, r_max] (r_min >= 1e-6), mapped back to the plane.
Boundary sigma_boundary_mult_positive(const SpectralMeasure& mu_x, double t, double r_min,
                                      double r_max, std::size_t nr, std::size_t ntheta);

}  // namespace brownscope
