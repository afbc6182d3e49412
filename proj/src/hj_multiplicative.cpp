#include "brownscope/hj_multiplicative.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "brownscope/error.hpp"

namespace brownscope {

namespace {

void require_kind(const SpectralMeasure& mu, SupportKind kind, const char* what) {
    if (mu.support_kind() != kind)
        throw WrongSupportKind(std::string(what) + " needs a measure on the " + to_string(kind) +
                               " support, got " + to_string(mu.support_kind()));
}

}  // namespace

double p_tilde_unitary(const SpectralMeasure& mu_u, Complex lambda) {
    require_kind(mu_u, SupportKind::UnitCircle, "p_tilde_unitary");
    return neg2_trace(mu_u, lambda);
}

double log_ratio_factor(double r2) {
    const double u = r2 - 1.0;
    if (std::abs(u) < 1e-8) return 1.0 - u / 2.0 + u * u / 3.0;
    return std::log(r2) / u;
}

double T_mult_unitary(const SpectralMeasure& mu_u, Complex lambda) {
    if (lambda == 0.0) {
        require_kind(mu_u, SupportKind::UnitCircle, "T_mult_unitary");
        return kInf;
    }
    const double p = p_tilde_unitary(mu_u, lambda);
    if (std::isinf(p)) return 0.0;
    return log_ratio_factor(std::norm(lambda)) / p;
}

Complex psi_exterior(const SpectralMeasure& mu_u, Complex gamma, Complex lambda) {
    if (gamma == 0.0 || lambda == 0.0) return lambda;
    try {
        return lambda * std::exp(gamma * herglotz(mu_u, lambda));
    } catch (const EvaluationOnSupport& e) {
        throw InsideDomain(std::string("map evaluated on the support: ") + e.what());
    }
}

Complex psi_map(const SpectralMeasure& mu_u, const ModelParams& params, Complex lambda) {
    params.validate();
    if (classify_lifetime(T_mult_unitary(mu_u, lambda), params.t) != Membership::Outside)
        throw InsideDomain("Psi needs lambda strictly outside the closure of Sigma_t");
    return psi_exterior(mu_u, params.gamma, lambda);
}

// ---- Hamilton flow ----

namespace {

using State = std::array<double, 6>;  // x, y, eps, p_x, p_y, p_eps

struct MultSystem {
    void operator()(const State& s, State& ds, double) const {
        const double x = s[0], y = s[1], e = s[2], px = s[3], py = s[4], pe = s[5];
        const double r2 = x * x + y * y;
        const double bracket = 1.0 + (r2 - e) * pe - x * px - y * py;
        ds[0] = e * pe * x;
        ds[1] = e * pe * y;
        ds[2] = -e * bracket - e * pe * (r2 - e);
        ds[3] = e * pe * (2.0 * x * pe - px);
        ds[4] = e * pe * (2.0 * y * pe - py);
        ds[5] = pe * bracket - e * pe * pe;
    }
};

HamiltonStateMult to_state(const State& s, double t) {
    return {{s[0], s[1]}, s[2], {s[3], s[4]}, s[5], t};
}

}  // namespace

HamiltonStateMult initial_state_mult(const SpectralMeasure& mu_u, Complex lambda0, double eps0) {
    if (!(eps0 > 0)) throw NegativeEpsilon("the multiplicative flow needs eps0 > 0");
    const double pe = reg_resolvent(mu_u, lambda0, eps0);
    const double px = resolvent_moment(mu_u, lambda0, eps0,
                                       [&](Complex xi) { return 2.0 * (lambda0.real() - xi.real()); });
    const double py = resolvent_moment(mu_u, lambda0, eps0,
                                       [&](Complex xi) { return 2.0 * (lambda0.imag() - xi.imag()); });
    return {lambda0, eps0, {px, py}, pe, 0.0};
}

HamiltonStateMult hamilton_flow_mult(const SpectralMeasure& mu_u, Complex lambda0, double eps0,
                                     double t, const FlowOptions& opts) {
    namespace odeint = boost::numeric::odeint;
    const auto init = initial_state_mult(mu_u, lambda0, eps0);
    State s = {init.lambda.real(), init.lambda.imag(), init.epsilon,
               init.p_lambda.real(), init.p_lambda.imag(), init.p_epsilon};
    if (t <= 0) return init;
    auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<State>());
    const MultSystem sys;
    const double threshold = 1.0 / opts.blowup_tol;
    double time = 0.0;
    double dt = std::min(1e-3, t);
    int rejections = 0;
    while (time < t) {
        dt = std::min(dt, t - time);
        const double before = time;
        if (stepper.try_step(sys, s, time, dt) == odeint::fail) {
            if (++rejections > 10000 || dt < 1e-15 * std::max(1.0, time))
                throw BlowUp("step size collapsed in the multiplicative flow", time);
            continue;
        }
        rejections = 0;
        bool finite = true;
        for (double v : s) finite = finite && std::isfinite(v);
        if (!finite || std::abs(s[5]) > threshold) {
            std::ostringstream os;
            os << "p_eps exceeded " << threshold << " at t = " << time;
            throw BlowUp(os.str(), time);
        }
        if (time == before) throw BlowUp("flow stalled", time);
    }
    return to_state(s, time);
}

double blowup_time_mult(const SpectralMeasure& mu_u, Complex lambda0, double eps0, double t_max,
                        const FlowOptions& opts) {
    try {
        hamilton_flow_mult(mu_u, lambda0, eps0, t_max, opts);
    } catch (const BlowUp& b) {
        return b.t_detected();
    }
    return kInf;
}

double curvature_check_circle(const SpectralMeasure& mu_u, double theta) {
    require_kind(mu_u, SupportKind::UnitCircle, "curvature_check_circle");
    const Complex z = std::polar(1.0, theta);
    const double d = mu_u.distance_to_support(z);
    if (!(d > mu_u.guard_band()) || d == 0.0)
        throw EvaluationOnSupport("e^{i theta} lies on the support of mu_u");
    double s = 0.0;
    for (const auto& n : mu_u.nodes()) {
        const double c = std::cos(theta - std::arg(n.position));
        s += n.mass * (2.0 + c) / ((1.0 - c) * (1.0 - c));
    }
    return 0.5 * s;
}

// ---- positive case ----

PTildePositive p0_p2_positive(const SpectralMeasure& mu_x, Complex lambda) {
    require_kind(mu_x, SupportKind::NonnegativeHalfLine, "p0_p2_positive");
    const double p0 = neg2_trace(mu_x, lambda);
    const double p2 = resolvent_moment(mu_x, lambda, 0.0, [](Complex xi) { return std::norm(xi); });
    return {p0, p2};
}

double T_mult_positive(const SpectralMeasure& mu_x, Complex lambda) {
    if (lambda == 0.0) throw OriginExcluded("the origin is analysed separately (T undefined at 0)");
    const auto [p0, p2] = p0_p2_positive(mu_x, lambda);
    if (std::isinf(p0)) return 0.0;
    if (p2 == 0.0) return kInf;
    const double a = std::norm(lambda) * p0;
    const double diff = a - p2;
    if (std::abs(diff) < 1e-8 * p2) {
        const double u = diff / p2;
        return (1.0 - u / 2.0 + u * u / 3.0) / p2;
    }
    return std::log(a / p2) / diff;
}

Complex f_gamma_exterior(const SpectralMeasure& mu_x, Complex gamma, Complex lambda) {
    return psi_exterior(mu_x, gamma, lambda);
}

Complex f_gamma_map(const SpectralMeasure& mu_x, const ModelParams& params, Complex lambda) {
    params.validate();
    if (lambda == 0.0) {
        if (!origin_outside_sigma_positive(mu_x, params.t))
            throw InsideDomain("0 lies in the closure of Sigma_t");
        return 0.0;
    }
    if (classify_lifetime(T_mult_positive(mu_x, lambda), params.t) != Membership::Outside)
        throw InsideDomain("f_gamma needs lambda strictly outside the closure of Sigma_t");
    return f_gamma_exterior(mu_x, params.gamma, lambda);
}

bool origin_outside_sigma_positive(const SpectralMeasure& mu_x, double t) {
    constexpr int kSamples = 16;
    for (int k = 0; k < kSamples; ++k) {
        const Complex z = std::polar(1e-6, 2.0 * std::numbers::pi * (k + 0.5) / kSamples);
        if (!(T_mult_positive(mu_x, z) > t)) return false;
    }
    return true;
}

namespace {

/// Follows the f_gamma-preimage of the segment from `from` (with known
/// preimage lam) to `to`. Returns the preimage of `to`, or nothing when the
/// path has to enter the closure of Sigma_t. Sets stalled when Newton gives up
/// while the path is still outside.
std::optional<Complex> follow_path(const SpectralMeasure& mu, Complex gamma, double t, Complex from,
                                   Complex lam, Complex to, bool& stalled) {
    auto f = [&](Complex l) { return f_gamma_exterior(mu, gamma, l); };
    auto df = [&](Complex l) {
        const Complex J = herglotz(mu, l);
        return std::exp(gamma * J) * (1.0 + gamma * l * herglotz_derivative(mu, l));
    };
    auto outside = [&](Complex l) {
        if (l == 0.0) return origin_outside_sigma_positive(mu, t);
        return classify_lifetime(T_mult_positive(mu, l), t) == Membership::Outside;
    };
    auto newton = [&](Complex target, Complex guess) -> std::optional<Complex> {
        Complex l = guess;
        const double scale = std::max(1.0, std::abs(target));
        for (int it = 0; it < 40; ++it) {
            if (!outside(l)) return std::nullopt;
            Complex step;
            try {
                step = (f(l) - target) / df(l);
            } catch (const Error&) {
                return std::nullopt;
            }
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return std::nullopt;
            l -= step;
            if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(l))) {
                if (std::abs(f(l) - target) > 1e-9 * scale) return std::nullopt;
                return l;
            }
        }
        return std::nullopt;
    };
    double s = 0.0, ds = 0.05;
    while (s < 1.0) {
        const double s1 = std::min(1.0, s + ds);
        const Complex target = from + s1 * (to - from);
        const auto next = newton(target, lam);
        const bool ok = next && outside(*next) && std::abs(*next - lam) < 0.5 * std::max(std::abs(lam), 1e-3);
        if (ok) {
            lam = *next;
            s = s1;
            ds = std::min(0.1, ds * 1.5);
            continue;
        }
        ds *= 0.5;
        if (ds < 1e-9) {
            // Distinguish "hit the closure of Sigma_t" from a Newton stall.
            const Complex probe = lam + (target - f(lam)) / df(lam);
            if (!outside(probe)) return std::nullopt;
            stalled = true;
            return std::nullopt;
        }
    }
    return lam;
}

}  // namespace

DRegionResult d_region_membership(const SpectralMeasure& mu_x, const ModelParams& params, Complex z) {
    params.validate();
    if (z == 0.0) throw OriginExcluded("D-region membership is not defined at z = 0");
    const double t = params.t;
    const Complex gamma = params.gamma;
    DRegionResult res;
    const double radius = std::max(1.0, mu_x.support_radius());
    const double far = 10.0 * radius * std::exp(std::abs(gamma)) + 10.0 * std::abs(z);
    bool stalled = false;

    std::vector<std::pair<Complex, Complex>> starts;  // (image point, preimage seed)
    constexpr int kRays = 8;
    const double base = std::arg(z);
    for (int k = 0; k < kRays; ++k) {
        const Complex w = std::polar(far, base + 2.0 * std::numbers::pi * k / kRays);
        starts.emplace_back(w, w * std::exp(gamma / 2.0));
    }
    if (origin_outside_sigma_positive(mu_x, t)) {
        const double small = 1e-5 * std::min(1.0, std::abs(z));
        for (int k = 0; k < kRays; ++k) {
            const Complex w = std::polar(small, base + 2.0 * std::numbers::pi * k / kRays);
            starts.emplace_back(w, w * std::exp(-gamma / 2.0));
        }
    }
    for (const auto& [w, seed] : starts) {
        // Polish the seed at the start point, then follow the straight segment to z.
        bool local_stall = false;
        const auto lam0 = follow_path(mu_x, gamma, t, w, seed, w, local_stall);
        if (!lam0) continue;
        const auto lam = follow_path(mu_x, gamma, t, w, *lam0, z, stalled);
        if (lam) {
            res.membership = DMembership::OutsideD;
            res.preimage = lam;
            return res;
        }
    }
    res.membership = DMembership::InsideD;
    if (stalled) {
        res.continuation_failed = true;
        res.warning = "path-following stalled; treated as inside D";
    }
    return res;
}

SpectralVerdict spectral_test_mult(MultKind kind, const SpectralMeasure& mu, Complex z,
                                   const ModelParams& params) {
    params.validate();
    if (kind == MultKind::Unitary) {
        if (z == 0.0) return {Verdict::OutsideSpectrum, false};
        if (classify_lifetime(T_mult_unitary(mu, z), params.t) == Membership::Outside)
            return {Verdict::OutsideSpectrum, false};
        return {};
    }
    require_kind(mu, SupportKind::NonnegativeHalfLine, "spectral_test_mult(positive)");
    if (z == 0.0) {
        if (origin_outside_sigma_positive(mu, params.t))
            return {Verdict::ZeroAtomCase, mu.atom_mass_at(0.0) > 0};
        return {};
    }
    const auto d = d_region_membership(mu, params, z);
    if (d.membership == DMembership::OutsideD && d.preimage &&
        classify_lifetime(T_mult_positive(mu, *d.preimage), params.t) == Membership::Outside)
        return {Verdict::OutsideSpectrum, false};
    return {};
}

Boundary sigma_boundary_mult_unitary(const SpectralMeasure& mu_u, double t, const Bounds& bounds,
                                     std::size_t nx, std::size_t ny) {
    ScalarField T = [&mu_u](Complex z) { return T_mult_unitary(mu_u, z); };
    const Grid g = evaluate_grid(T, bounds, nx, ny);
    LevelsetOptions opts;
    opts.inside = Inside::Below;
    opts.field = T;
    return extract_levelset(g, t, opts);
}

Boundary sigma_boundary_mult_positive(const SpectralMeasure& mu_x, double t, double r_min,
                                      double r_max, std::size_t nr, std::size_t ntheta) {
    r_min = std::max(r_min, 1e-6);
    if (!(r_max > r_min)) throw ConfigError("log-polar grid needs r_max > r_min");
    const double pi = std::numbers::pi;
    const double h = 2.0 * pi / static_cast<double>(ntheta);
    // One extra row so the seam at theta = pi is sampled on both sides.
    const Bounds lp{std::log(r_min), std::log(r_max), -pi, pi + h};
    ScalarField T = [&mu_x](Complex w) { return T_mult_positive(mu_x, std::exp(w)); };
    const Grid g = evaluate_grid(T, lp, nr, ntheta + 1);
    LevelsetOptions opts;
    opts.inside = Inside::Below;
    opts.field = T;
    Boundary b = extract_levelset(g, t, opts);
    for (auto& pl : b.polylines)
        for (auto& p : pl.points) p = std::exp(p);
    stitch_chains(b, 1e-7 * std::max(1.0, r_max));
    return b;
}

}  // namespace brownscope
