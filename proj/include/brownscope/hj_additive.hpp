#pragma once

// Additive Hamilton-Jacobi machinery for x + c_t and x + g_{t,gamma}.

#include <functional>
#include <vector>

#include "brownscope/measure.hpp"
#include "brownscope/region.hpp"

namespace brownscope {

struct HamiltonState {
    double epsilon = 0.0;
    double p_epsilon = 0.0;
    double elapsed = 0.0;
};

/// Time t > 0 and gamma with |gamma| <= t.
struct ModelParams {
    double t = 1.0;
    Complex gamma = 0.0;

    /// Throws BadGamma when |gamma| > t or t is not positive.
    void validate() const;
};

enum class Membership { Inside, Boundary, Outside };
enum class Verdict { OutsideSpectrum, ZeroAtomCase, Undetermined };

struct SpectralVerdict {
    Verdict verdict = Verdict::Undetermined;
    /// Only meaningful for ZeroAtomCase: whether mu({0}) > 0, i.e. 0 is in the spectrum.
    bool zero_in_spectrum = false;
};

const char* to_string(Membership m);
const char* to_string(Verdict v);

/// Distance from lambda to the spectrum of x.
using SpectrumDistance = std::function<double(Complex)>;

/// eps(t) = eps0 (1 - t p0)^2, p(t) = p0 / (1 - t p0). Throws LifetimeExceeded
/// when t >= 1/p0.
HamiltonState flow_additive(double eps0, double p0, double t);
/// 1/p0, +inf for p0 = 0.
double lifetime_additive(double p0);
/// Lifetime of the characteristic through (lambda, eps0): 1/reg_resolvent.
double t_star_additive(const SpectralMeasure& mu_x, Complex lambda, double eps0);

/// 1/neg2_trace; 0 when the trace diverges.
double T_additive(const SpectralMeasure& mu_x, Complex lambda);

/// Three-way comparison of a lifetime value with t at a relative tolerance.
Membership classify_lifetime(double T, double t, double rel_tol = 1e-9);
Membership sigma_additive_membership(const SpectralMeasure& mu_x, Complex lambda, double t,
                                     double rel_tol = 1e-9);

/// Distance to the atoms, or to the hull of the support intervals for densities.
SpectrumDistance support_distance(const SpectralMeasure& mu_x);

SpectralVerdict spectral_test_additive(const SpectralMeasure& mu_x,
                                       const SpectrumDistance& sigma_x_distance, Complex lambda,
                                       double t);

/// Largest delta such that eps0 -> eps0 (1 - t p(eps0))^2 is invertible on a
/// neighbourhood of 0 whose image contains [-delta, delta].
double extension_radius(const SpectralMeasure& mu_x, Complex lambda, double t);

/// Analytic continuation of dS/deps(t, lambda, eps) to eps in (-delta, inf).
/// Throws InsideDomain when the spectral test is not OutsideSpectrum, and
/// InversionFailed when Newton does not converge or eps < -delta.
std::vector<double> analytic_extension_trace(const SpectralMeasure& mu_x, Complex lambda, double t,
                                             const std::vector<double>& eps_samples);

/// Phi(lambda) = lambda + gamma G_x(lambda); throws InsideDomain unless lambda
/// is strictly outside the closure of Sigma_t and off the support.
Complex phi_map(const SpectralMeasure& mu_x, const ModelParams& params, Complex lambda);
/// Same formula without the domain check (boundary limits).
Complex phi_exterior(const SpectralMeasure& mu_x, Complex gamma, Complex lambda);

/// Image of the boundary of Sigma_t under Phi. Throws InsideDomain when a
/// boundary point lies on the support or deep inside Sigma_t (T < t/2).
Boundary e_region(const SpectralMeasure& mu_x, const ModelParams& params, const Boundary& sigma_boundary);

struct LaplacianCheck {
    double lhs = 0.0;  ///< five-point Laplacian of 1/T
    double rhs = 0.0;  ///< int |xi - lambda|^-4 dmu_x
};
LaplacianCheck laplacian_identity_check(const SpectralMeasure& mu_x, Complex lambda, double h);

/// Boundary of Sigma_t = {T < t} on a grid, crossings refined by bisection.
Boundary sigma_boundary_additive(const SpectralMeasure& mu_x, double t, const Bounds& bounds,
                                 std::size_t nx, std::size_t ny);

}  // namespace brownscope
