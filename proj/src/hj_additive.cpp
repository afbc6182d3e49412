#include "brownscope/hj_additive.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "brownscope/error.hpp"

namespace brownscope {

void ModelParams::validate() const {
    if (!(t > 0) || !std::isfinite(t)) throw BadGamma("t must be positive and finite");
    if (!(std::abs(gamma) <= t * (1.0 + 1e-12))) {
        std::ostringstream os;
        os << "gamma must satisfy |gamma| <= t (got |gamma| = " << std::abs(gamma) << ", t = " << t << ")";
        throw BadGamma(os.str());
    }
}

const char* to_string(Membership m) {
    switch (m) {
        case Membership::Inside: return "inside";
        case Membership::Boundary: return "boundary";
        case Membership::Outside: return "outside";
    }
    return "?";
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::OutsideSpectrum: return "outside-spectrum";
        case Verdict::ZeroAtomCase: return "zero-atom-case";
        case Verdict::Undetermined: return "undetermined";
    }
    return "?";
}

HamiltonState flow_additive(double eps0, double p0, double t) {
    if (eps0 < 0 || p0 < 0 || t < 0) throw LifetimeExceeded("flow needs eps0, p0, t >= 0");
    const double s = 1.0 - t * p0;
    if (!(s > 0)) throw LifetimeExceeded("t beyond the lifetime 1/p0");
    return {eps0 * s * s, p0 / s, t};
}

double lifetime_additive(double p0) { return p0 > 0 ? 1.0 / p0 : kInf; }

double t_star_additive(const SpectralMeasure& mu_x, Complex lambda, double eps0) {
    const double p = reg_resolvent(mu_x, lambda, eps0);
    return std::isinf(p) ? 0.0 : lifetime_additive(p);
}

double T_additive(const SpectralMeasure& mu_x, Complex lambda) {
    const double m = neg2_trace(mu_x, lambda);
    if (std::isinf(m)) return 0.0;
    return 1.0 / m;
}

Membership classify_lifetime(double T, double t, double rel_tol) {
    const double tol = rel_tol * std::abs(t);
    if (T < t - tol) return Membership::Inside;
    if (T > t + tol) return Membership::Outside;
    return Membership::Boundary;
}

Membership sigma_additive_membership(const SpectralMeasure& mu_x, Complex lambda, double t,
                                     double rel_tol) {
    return classify_lifetime(T_additive(mu_x, lambda), t, rel_tol);
}

SpectrumDistance support_distance(const SpectralMeasure& mu_x) {
    if (mu_x.is_atomic()) return [mu_x](Complex z) { return mu_x.distance_to_support(z); };
    double lo = kInf, hi = -kInf;
    bool segments = true;
    for (const auto& p : mu_x.pieces()) {
        if (p.geometry != DensityPiece::Geometry::Segment) segments = false;
        lo = std::min(lo, p.lo);
        hi = std::max(hi, p.hi);
    }
    if (!segments) return [mu_x](Complex z) { return mu_x.distance_to_support(z); };
    return [lo, hi](Complex z) { return std::abs(z - Complex(std::clamp(z.real(), lo, hi), 0.0)); };
}

SpectralVerdict spectral_test_additive(const SpectralMeasure& mu_x,
                                       const SpectrumDistance& sigma_x_distance, Complex lambda,
                                       double t) {
    if (!(sigma_x_distance(lambda) > 0)) return {};
    if (T_additive(mu_x, lambda) > t) return {Verdict::OutsideSpectrum, false};
    return {};
}

namespace {

struct InverseMap {
    const SpectralMeasure& mu;
    Complex lambda;
    double t;

    // F(e0) = e0 (1 - t p(e0))^2 and its derivative.
    std::pair<double, double> eval(double e0) const {
        const double p = reg_resolvent(mu, lambda, e0);
        const double dp = reg_resolvent_derivative(mu, lambda, e0);
        const double s = 1.0 - t * p;
        return {e0 * s * s, s * s - 2.0 * t * e0 * s * dp};
    }
    double slack(double e0) const { return 1.0 - t * reg_resolvent(mu, lambda, e0); }
};

}  // namespace

double extension_radius(const SpectralMeasure& mu_x, Complex lambda, double t) {
    const double d = mu_x.distance_to_support(lambda);
    const InverseMap F{mu_x, lambda, t};
    auto admissible = [&](double e0) {
        if (!(e0 < d * d)) return false;
        if (!(F.slack(-e0) > 0)) return false;
        return F.eval(-e0).second > 0;
    };
    if (!admissible(0.0)) return 0.0;
    double lo = 0.0, hi = 0.99 * d * d;
    if (!admissible(hi)) {
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (admissible(mid) ? lo : hi) = mid;
        }
    } else {
        lo = hi;
    }
    // Keep a safety margin inside the admissible interval.
    const double e0 = 0.9 * lo;
    return std::min(F.eval(e0).first, -F.eval(-e0).first);
}

std::vector<double> analytic_extension_trace(const SpectralMeasure& mu_x, Complex lambda, double t,
                                             const std::vector<double>& eps_samples) {
    if (spectral_test_additive(mu_x, support_distance(mu_x), lambda, t).verdict !=
        Verdict::OutsideSpectrum)
        throw InsideDomain("analytic extension needs lambda outside the spectrum (T(lambda) > t)");
    const InverseMap F{mu_x, lambda, t};
    const bool any_negative =
        std::any_of(eps_samples.begin(), eps_samples.end(), [](double e) { return e < 0; });
    const double delta = any_negative ? extension_radius(mu_x, lambda, t) : 0.0;
    std::vector<double> out;
    out.reserve(eps_samples.size());
    for (double eps : eps_samples) {
        if (eps < 0 && !(-eps < delta)) {
            std::ostringstream os;
            os << "eps = " << eps << " beyond the extension radius " << delta;
            throw InversionFailed(os.str());
        }
        double e0 = eps;
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
            const auto [f, df] = F.eval(e0);
            const double r = f - eps;
            if (!(df > 0) || !std::isfinite(f)) break;
            const double step = r / df;
            e0 -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(e0))) {
                converged = true;
                break;
            }
        }
        if (!converged || !(F.slack(e0) > 0)) {
            std::ostringstream os;
            os << "Newton inversion of eps0 -> eps(t) failed at eps = " << eps;
            throw InversionFailed(os.str());
        }
        const double p = reg_resolvent(mu_x, lambda, e0);
        out.push_back(p / (1.0 - t * p));
    }
    return out;
}

Complex phi_exterior(const SpectralMeasure& mu_x, Complex gamma, Complex lambda) {
    if (gamma == 0.0) return lambda;
    try {
        return lambda + gamma * cauchy_transform(mu_x, lambda);
    } catch (const EvaluationOnSupport& e) {
        throw InsideDomain(std::string("Phi evaluated on the support: ") + e.what());
    }
}

Complex phi_map(const SpectralMeasure& mu_x, const ModelParams& params, Complex lambda) {
    params.validate();
    if (!(mu_x.distance_to_support(lambda) > 0))
        throw InsideDomain("Phi needs lambda off the support of mu_x");
    if (sigma_additive_membership(mu_x, lambda, params.t) != Membership::Outside)
        throw InsideDomain("Phi needs lambda strictly outside the closure of Sigma_t");
    return phi_exterior(mu_x, params.gamma, lambda);
}

Boundary e_region(const SpectralMeasure& mu_x, const ModelParams& params, const Boundary& sigma_boundary) {
    params.validate();
    const double t = params.t;
    const Complex gamma = params.gamma;
    return map_boundary(sigma_boundary, [&](Complex z) {
        if (T_additive(mu_x, z) < 0.5 * t)
            throw InsideDomain("boundary point lies deep inside Sigma_t");
        return phi_exterior(mu_x, gamma, z);
    });
}

LaplacianCheck laplacian_identity_check(const SpectralMeasure& mu_x, Complex lambda, double h) {
    auto f = [&](Complex z) { return neg2_trace(mu_x, z); };
    const Complex ih(0.0, h);
    const double lap = (f(lambda + h) + f(lambda - h) + f(lambda + ih) + f(lambda - ih) - 4.0 * f(lambda)) / (h * h);
    return {lap, neg4_trace(mu_x, lambda)};
}

Boundary sigma_boundary_additive(const SpectralMeasure& mu_x, double t, const Bounds& bounds,
                                 std::size_t nx, std::size_t ny) {
    ScalarField T = [&mu_x](Complex z) { return T_additive(mu_x, z); };
    const Grid g = evaluate_grid(T, bounds, nx, ny);
    LevelsetOptions opts;
    opts.inside = Inside::Below;
    opts.field = T;
    return extract_levelset(g, t, opts);
}

}  // namespace brownscope
