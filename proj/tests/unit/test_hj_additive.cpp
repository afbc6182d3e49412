#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "brownscope/error.hpp"
#include "brownscope/hj_additive.hpp"

using namespace brownscope;
using doctest::Approx;

namespace {

SpectralMeasure bernoulli() {
    return SpectralMeasure::atomic(SupportKind::RealLine, {{-1.0, 0.5}, {1.0, 0.5}});
}

SpectralMeasure delta0() { return SpectralMeasure::point_mass(0.0, SupportKind::RealLine); }

// Explicit sums, independent of the library transforms.
double neg2_sum(const std::vector<Atom>& atoms, Complex z) {
    double s = 0.0;
    for (const auto& a : atoms) s += a.weight / std::norm(z - a.position);
    return s;
}

Complex cauchy_sum(const std::vector<Atom>& atoms, Complex z) {
    Complex s = 0.0;
    for (const auto& a : atoms) s += a.weight / (z - a.position);
    return s;
}

}  // namespace

TEST_CASE("flow_additive examples") {
    auto s = flow_additive(1.0, 1e-300, 5.0);
    CHECK(s.epsilon == Approx(1.0));
    CHECK(s.p_epsilon == Approx(0.0));
    s = flow_additive(1.0, 1.0, 0.5);
    CHECK(s.epsilon == Approx(0.25).epsilon(1e-15));
    CHECK(s.p_epsilon == Approx(2.0).epsilon(1e-15));
    s = flow_additive(4.0, 0.5, 1.0);
    CHECK(s.epsilon == Approx(1.0).epsilon(1e-15));
    CHECK(s.p_epsilon == Approx(1.0).epsilon(1e-15));
    CHECK(std::sqrt(s.epsilon) * s.p_epsilon == Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(flow_additive(1.0, 1.0, 1.0), LifetimeExceeded);
    CHECK_THROWS_AS(flow_additive(1.0, 1.0, 2.0), LifetimeExceeded);
    CHECK(lifetime_additive(0.0) == kInf);
    CHECK(lifetime_additive(4.0) == 0.25);
}

TEST_CASE("conservation along the flow") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 10000; ++k) {
        const double eps0 = 10.0 * u(rng), p0 = 0.01 + 10.0 * u(rng);
        const double t = 0.999 * u(rng) / p0;
        const auto s = flow_additive(eps0, p0, t);
        REQUIRE(std::abs(std::sqrt(s.epsilon) * s.p_epsilon - std::sqrt(eps0) * p0) <
                1e-12 * std::max(1.0, std::sqrt(eps0) * p0));
        CHECK(s.epsilon >= 0.0);
    }
}

TEST_CASE("T_additive examples") {
    CHECK(T_additive(bernoulli(), 0.0) == Approx(1.0).epsilon(1e-15));
    CHECK(T_additive(bernoulli(), 2.0) == Approx(9.0 / 5.0).epsilon(1e-15));
    CHECK(T_additive(bernoulli(), 3.0) == Approx(6.4).epsilon(1e-15));
    for (Complex z : {Complex(0.3, 0.2), Complex(-2.0, 1.0), Complex(0.0, 5.0)})
        CHECK(T_additive(delta0(), z) == Approx(std::norm(z)).epsilon(1e-14));
    CHECK(T_additive(bernoulli(), 1.0) == 0.0);
    // A density with finite neg2 trace at an interior point gives T > 0.
    const auto flat = SpectralMeasure::density_on_interval(SupportKind::RealLine, -1.0, 1.0,
                                                           [](double) { return 0.5; });
    CHECK(T_additive(flat, 0.0) == 0.0);
    CHECK(T_additive(flat, 3.0) > 0.0);
    CHECK(std::isfinite(T_additive(flat, 3.0)));
}

TEST_CASE("membership and spectral test examples") {
    const auto b = bernoulli();
    CHECK(sigma_additive_membership(b, 0.0, 2.0) == Membership::Inside);
    CHECK(sigma_additive_membership(b, 0.0, 1.0) == Membership::Boundary);
    CHECK(sigma_additive_membership(b, 2.0, 1.0) == Membership::Outside);
    const auto dist = support_distance(b);
    CHECK(spectral_test_additive(b, dist, 3.0, 1.0).verdict == Verdict::OutsideSpectrum);
    CHECK(spectral_test_additive(b, dist, 1.0, 0.001).verdict == Verdict::Undetermined);
    CHECK(spectral_test_additive(b, dist, 0.0, 2.0).verdict == Verdict::Undetermined);
    // An explicit distance input overrides the measure (non-normal x).
    CHECK(spectral_test_additive(b, [](Complex) { return 0.0; }, 3.0, 1.0).verdict ==
          Verdict::Undetermined);
    const auto flat = SpectralMeasure::density_on_interval(SupportKind::RealLine, -1.0, 1.0,
                                                           [](double) { return 0.5; });
    CHECK(support_distance(flat)(Complex(0.5, 0.2)) == Approx(0.2));
    CHECK(support_distance(flat)(3.0) == Approx(2.0));
    CHECK(std::string(to_string(Membership::Boundary)) == "boundary");
}

TEST_CASE("ModelParams validation") {
    CHECK_NOTHROW((ModelParams{1.0, 1.0}.validate()));
    CHECK_NOTHROW((ModelParams{1.0, Complex(0.6, 0.8)}.validate()));
    CHECK_THROWS_AS((ModelParams{1.0, 1.5}.validate()), BadGamma);
    CHECK_THROWS_AS((ModelParams{0.0, 0.0}.validate()), BadGamma);
    CHECK_THROWS_AS((ModelParams{-1.0, 0.0}.validate()), BadGamma);
}

TEST_CASE("lifetime is monotone in eps0 and tends to T") {
    const auto b = bernoulli();
    for (Complex z : {Complex(0.0, 0.0), Complex(0.5, 0.5), Complex(2.0, -1.0)}) {
        double prev = 0.0;
        for (double e = 1e-10; e < 10.0; e *= 3.0) {
            const double ts = t_star_additive(b, z, e);
            CHECK(ts >= prev);
            prev = ts;
        }
        CHECK(t_star_additive(b, z, 1e-12) == Approx(T_additive(b, z)).epsilon(1e-9));
    }
}

TEST_CASE("upper semicontinuity proxy on grid refinements") {
    const auto mu = SpectralMeasure::atomic(SupportKind::RealLine, {{-1.0, 0.3}, {0.5, 0.5}, {2.0, 0.2}});
    for (Complex z : {Complex(0.0, 0.4), Complex(1.2, -0.3), Complex(-2.0, 0.0)}) {
        const double T0 = T_additive(mu, z);
        double prev_gap = kInf;
        for (double h = 0.1; h > 1e-5; h /= 10.0) {
            double mx = 0.0;
            for (int k = 0; k < 8; ++k) mx = std::max(mx, T_additive(mu, z + std::polar(h, k * std::numbers::pi / 4)));
            const double gap = std::max(0.0, mx - T0);
            CHECK(gap <= prev_gap + 1e-15);
            prev_gap = gap;
        }
        CHECK(prev_gap < 1e-3);
    }
}

TEST_CASE("exterior of the extracted Sigma_t has T > t") {
    const auto mu = SpectralMeasure::atomic(SupportKind::RealLine, {{-1.0, 0.5}, {1.0, 0.5}});
    const double t = 1.5;
    const Boundary sb = sigma_boundary_additive(mu, t, {-3.0, 3.0, -3.0, 3.0}, 120, 120);
    REQUIRE_FALSE(sb.polylines.empty());
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    int tested = 0;
    while (tested < 1000) {
        const Complex z(u(rng), u(rng));
        if (boundary_contains(sb, z) || distance_to_boundary(sb, z) < 1e-6) continue;
        if (mu.distance_to_support(z) == 0.0) continue;
        REQUIRE(T_additive(mu, z) > t);
        ++tested;
    }
    // Boundary points sit on T = t after bisection.
    for (const auto& pl : sb.polylines)
        for (auto p : pl.points) CHECK(T_additive(mu, p) == Approx(t).epsilon(1e-8));
}

TEST_CASE("analytic extension examples") {
    const auto d = delta0();
    auto v = analytic_extension_trace(d, 2.0, 1.0, {0.0});
    CHECK(v[0] == Approx(1.0 / 3.0).epsilon(1e-12));
    v = analytic_extension_trace(bernoulli(), 3.0, 1.0, {0.0});
    CHECK(v[0] == Approx(5.0 / 27.0).epsilon(1e-12));
    const std::vector<double> eps{-1e-2, -1e-3, -1e-4, 0.0, 1e-4, 1e-3, 1e-2};
    v = analytic_extension_trace(d, 2.0, 1.0, eps);
    for (std::size_t k = 1; k < v.size(); ++k) CHECK(v[k] < v[k - 1]);
    CHECK_THROWS_AS((analytic_extension_trace(bernoulli(), 0.0, 2.0, {0.0})), InsideDomain);
    CHECK_THROWS_AS((analytic_extension_trace(d, 2.0, 1.0, {-10.0})), InversionFailed);
}

TEST_CASE("analytic extension agrees with the direct formula for eps > 0") {
    const auto b = bernoulli();
    const double t = 1.0;
    for (double eps : {1e-3, 0.1, 1.0}) {
        // Direct: find eps0 with eps0 (1 - t p(eps0))^2 = eps by bisection on the closed form.
        auto F = [&](double e0) {
            double p = 0.0;
            for (double xi : {-1.0, 1.0}) p += 0.5 / (std::norm(3.0 - xi) + e0);
            return e0 * std::pow(1.0 - t * p, 2) - eps;
        };
        double lo = 0.0, hi = 10.0;
        for (int it = 0; it < 200; ++it) (F(0.5 * (lo + hi)) > 0 ? hi : lo) = 0.5 * (lo + hi);
        double p = 0.0;
        for (double xi : {-1.0, 1.0}) p += 0.5 / (std::norm(3.0 - xi) + lo);
        const double direct = p / (1.0 - t * p);
        CHECK(analytic_extension_trace(b, 3.0, t, {eps})[0] == Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("analytic extension is smooth across zero") {
    const std::vector<double> eps{-1e-3, -5e-4, -2e-4, -1e-4, 0.0, 1e-4, 2e-4, 5e-4, 1e-3};
    for (auto [mu, lam, t] : {std::tuple{bernoulli(), Complex(3.0, 0.0), 1.0},
                              std::tuple{delta0(), Complex(2.0, 0.0), 1.0},
                              std::tuple{bernoulli(), Complex(0.5, 1.5), 1.0}}) {
        const auto v = analytic_extension_trace(mu, lam, t, eps);
        Eigen::MatrixXd A(eps.size(), 5);
        Eigen::VectorXd y(eps.size());
        for (std::size_t i = 0; i < eps.size(); ++i) {
            const double s = eps[i] / 1e-3;
            for (int k = 0; k < 5; ++k) A(i, k) = std::pow(s, k);
            y(i) = v[i];
        }
        const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
        CHECK((A * c - y).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(extension_radius(mu, lam, t) > 1e-3);
    }
}

TEST_CASE("phi_map examples") {
    CHECK(std::abs(phi_map(delta0(), {1.0, 1.0}, 2.0) - 2.5) < 1e-15);
    CHECK(std::abs(phi_map(bernoulli(), {1.0, 1.0}, Complex(0.0, 2.0)) - Complex(0.0, 1.6)) < 1e-15);
    const Complex z(1.7, -2.2);
    CHECK(phi_map(bernoulli(), {1.0, 0.0}, z) == z);
    CHECK_THROWS_AS((phi_map(bernoulli(), {2.0, 1.0}, 0.0)), InsideDomain);
    CHECK_THROWS_AS((phi_map(delta0(), {1.0, 1.0}, 0.5)), InsideDomain);
    CHECK_THROWS_AS((phi_map(delta0(), {1.0, 2.0}, 3.0)), BadGamma);
}

TEST_CASE("phi_map is injective on the exterior") {
    const std::vector<Atom> atoms{{-1.0, 0.3}, {0.2, 0.4}, {1.5, 0.3}};
    const auto mu = SpectralMeasure::atomic(SupportKind::RealLine, atoms);
    const double t = 1.0;
    const Complex gamma = std::polar(0.9, 0.7);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    auto sample = [&] {
        for (;;) {
            const Complex z(u(rng), u(rng));
            if (1.0 / neg2_sum(atoms, z) > t * (1.0 + 1e-6)) return z;
        }
    };
    int violations = 0;
    for (int k = 0; k < 10000; ++k) {
        const Complex a = sample(), b = sample();
        const Complex fa = phi_map(mu, {t, gamma}, a), fb = phi_map(mu, {t, gamma}, b);
        CHECK(std::abs(fa - (a + gamma * cauchy_sum(atoms, a))) < 1e-13);
        const double T1 = 1.0 / neg2_sum(atoms, a), T2 = 1.0 / neg2_sum(atoms, b);
        const double bound = (1.0 - std::abs(gamma) / std::sqrt(T1 * T2)) * std::abs(a - b);
        if (std::abs(fa - fb) < bound * (1.0 - 1e-12)) ++violations;
        if (a != b) REQUIRE(std::abs(fa - fb) > 1e-10);
    }
    CHECK(violations == 0);
}

TEST_CASE("e_region examples") {
    Polyline circle;
    circle.closed = true;
    for (int k = 0; k < 360; ++k) circle.points.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / 360));
    const Boundary c{{circle}, 1.0};
    const Boundary same = e_region(delta0(), {1.0, 0.0}, c);
    CHECK(same.polylines[0].points == circle.points);
    const Boundary seg = e_region(delta0(), {1.0, 1.0}, c);
    for (auto p : seg.polylines[0].points) {
        CHECK(std::abs(p.imag()) < 1e-14);
        CHECK(std::abs(p.real()) <= 2.0 + 1e-14);
    }
    const Boundary ell = e_region(delta0(), {1.0, 0.5}, c);
    for (auto p : ell.polylines[0].points)
        CHECK(std::norm(p.real() / 1.5) + std::norm(p.imag() / 0.5) == Approx(1.0).epsilon(1e-12));
    Polyline inner{{Complex(0.1, 0.0), Complex(0.0, 0.1)}, false};
    CHECK_THROWS_AS((e_region(delta0(), {1.0, 0.5}, Boundary{{inner}, 1.0})), MapError);
}

TEST_CASE("laplacian identity check") {
    auto r = laplacian_identity_check(delta0(), 2.0, 1e-3);
    CHECK(r.lhs == Approx(0.25).epsilon(1e-5));
    CHECK(r.rhs == Approx(1.0 / 16.0).epsilon(1e-14));
    r = laplacian_identity_check(delta0(), Complex(1.0, 1.0), 1e-3);
    CHECK(r.lhs == Approx(1.0).epsilon(1e-5));
    CHECK(r.rhs == Approx(0.25).epsilon(1e-14));
    // The two sides differ by a factor of 4 at every tested exterior point.
    const auto mu = SpectralMeasure::atomic(SupportKind::RealLine, {{-1.0, 0.25}, {0.0, 0.25}, {2.0, 0.5}});
    for (Complex z : {Complex(0.5, 0.7), Complex(3.0, 0.1), Complex(-2.0, -1.5)}) {
        r = laplacian_identity_check(mu, z, 1e-3);
        CHECK(r.lhs > 0.0);
        CHECK(r.lhs / r.rhs == Approx(4.0).epsilon(1e-4));
    }
}
