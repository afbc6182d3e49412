#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "brownscope/error.hpp"
#include "brownscope/hj_multiplicative.hpp"

using namespace brownscope;
using doctest::Approx;

namespace {

const double pi = std::numbers::pi;

SpectralMeasure delta1_circle() { return SpectralMeasure::point_mass(1.0, SupportKind::UnitCircle); }
SpectralMeasure delta1_pos() { return SpectralMeasure::point_mass(1.0, SupportKind::NonnegativeHalfLine); }
SpectralMeasure two_atoms() {
    return SpectralMeasure::atomic(SupportKind::NonnegativeHalfLine, {{1.0, 0.5}, {2.0, 0.5}});
}

Complex herglotz_sum(const std::vector<Atom>& atoms, Complex z) {
    Complex s = 0.0;
    for (const auto& a : atoms) s += a.weight * 0.5 * (a.position + z) / (a.position - z);
    return s;
}

}  // namespace

TEST_CASE("p_tilde_unitary examples") {
    CHECK(p_tilde_unitary(delta1_circle(), -1.0) == Approx(0.25).epsilon(1e-15));
    CHECK(p_tilde_unitary(delta1_circle(), 0.0) == Approx(1.0).epsilon(1e-15));
    const auto roots = SpectralMeasure::atomic(
        SupportKind::UnitCircle, {{1.0, 0.25}, {Complex(0, 1), 0.25}, {-1.0, 0.25}, {Complex(0, -1), 0.25}});
    CHECK(p_tilde_unitary(roots, 0.0) == Approx(1.0).epsilon(1e-15));
    CHECK(std::isinf(p_tilde_unitary(delta1_circle(), 1.0)));
    CHECK_THROWS_AS(p_tilde_unitary(delta1_pos(), 2.0), WrongSupportKind);
}

TEST_CASE("T_mult_unitary examples") {
    CHECK(T_mult_unitary(delta1_circle(), -1.0) == Approx(4.0).epsilon(1e-14));
    CHECK(T_mult_unitary(delta1_circle(), 1.0) == 0.0);
    CHECK(T_mult_unitary(delta1_circle(), Complex(1.0 + 1e-9, 0.0)) < 1e-16);
    CHECK(T_mult_unitary(delta1_circle(), 0.0) == kInf);
    CHECK(T_mult_unitary(delta1_circle(), 2.0) == Approx(std::log(4.0) / 3.0).epsilon(1e-14));
    // Continuity across |lambda| = 1 where the series takes over.
    const Complex a = std::polar(1.0 + 4e-9, 2.0), b = std::polar(1.0 + 6e-9, 2.0);
    CHECK(T_mult_unitary(delta1_circle(), a) == Approx(T_mult_unitary(delta1_circle(), b)).epsilon(1e-8));
    CHECK(log_ratio_factor(1.0) == 1.0);
    CHECK(log_ratio_factor(1.0 + 1e-9) == Approx(std::log1p(1e-9) / 1e-9).epsilon(1e-15));
}

TEST_CASE("T_mult_unitary is rotation equivariant") {
    const std::vector<Atom> atoms{{std::polar(1.0, 0.3), 0.2}, {std::polar(1.0, 2.0), 0.5}, {std::polar(1.0, -1.7), 0.3}};
    const auto mu = SpectralMeasure::atomic(SupportKind::UnitCircle, atoms);
    for (double alpha : {0.4, 1.9, -2.6}) {
        std::vector<Atom> rot = atoms;
        for (auto& a : rot) a.position *= std::polar(1.0, alpha);
        const auto mr = SpectralMeasure::atomic(SupportKind::UnitCircle, rot);
        for (Complex z : {Complex(0.3, 0.1), Complex(1.5, -0.7), Complex(-0.2, 2.0)})
            CHECK(T_mult_unitary(mr, z * std::polar(1.0, alpha)) == Approx(T_mult_unitary(mu, z)).epsilon(1e-13));
    }
}

TEST_CASE("psi_map examples") {
    const auto d = delta1_circle();
    const Complex z(0.2, -3.0);
    CHECK(psi_map(d, {0.3, 0.0}, z) == z);
    CHECK(std::abs(psi_map(d, {3.0, 2.5}, -1.0) - Complex(-1.0)) < 1e-15);
    CHECK(std::abs(psi_map(d, {0.3, 0.3}, 2.0) - 2.0 * std::exp(-0.45)) < 1e-14);
    CHECK(std::abs(psi_map(d, {0.3, 0.3}, 2.0) - 1.2753) < 1e-4);
    CHECK_THROWS_AS((psi_map(d, {5.0, 0.3}, -1.0)), InsideDomain);
    CHECK_THROWS_AS((psi_map(d, {0.3, 1.0}, 2.0)), BadGamma);
}

TEST_CASE("psi and f_gamma are injective on the exterior") {
    const std::vector<Atom> ua{{std::polar(1.0, 0.5), 0.4}, {std::polar(1.0, 2.5), 0.6}};
    const std::vector<Atom> xa{{0.5, 0.3}, {2.0, 0.7}};
    const auto mu_u = SpectralMeasure::atomic(SupportKind::UnitCircle, ua);
    const auto mu_x = SpectralMeasure::atomic(SupportKind::NonnegativeHalfLine, xa);
    const double t = 0.5;
    const Complex gamma = std::polar(0.45, 1.1);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    auto sample = [&](auto&& T) {
        for (;;) {
            const Complex z(u(rng), u(rng));
            if (z != 0.0 && T(z) > t * (1.0 + 1e-6)) return z;
        }
    };
    for (int k = 0; k < 10000; ++k) {
        const Complex a = sample([&](Complex z) { return T_mult_unitary(mu_u, z); });
        const Complex b = sample([&](Complex z) { return T_mult_unitary(mu_u, z); });
        const Complex pa = psi_map(mu_u, {t, gamma}, a), pb = psi_map(mu_u, {t, gamma}, b);
        REQUIRE(std::abs(pa - a * std::exp(gamma * herglotz_sum(ua, a))) < 1e-12 * std::abs(pa));
        if (a != b) REQUIRE(std::abs(pa - pb) > 1e-10);
        const Complex c = sample([&](Complex z) { return T_mult_positive(mu_x, z); });
        const Complex d = sample([&](Complex z) { return T_mult_positive(mu_x, z); });
        if (c != d) REQUIRE(std::abs(f_gamma_map(mu_x, {t, gamma}, c) - f_gamma_map(mu_x, {t, gamma}, d)) > 1e-10);
    }
}

TEST_CASE("hamilton flow blow-up time tends to T") {
    const auto d = delta1_circle();
    std::vector<double> err;
    for (double e0 : {1e-4, 1e-5, 1e-6}) {
        const double bt = blowup_time_mult(d, -1.0, e0, 10.0);
        CHECK(bt >= 3.9);
        CHECK(bt <= 4.1);
        err.push_back(bt - 4.0);
    }
    CHECK(std::abs(err[1]) < std::abs(err[0]));
    CHECK(std::abs(err[2]) < std::abs(err[1]));
    // Linear Richardson extrapolation in eps0.
    const double extrap = (4.0 + err[2]) - (err[1] - err[2]) / 9.0;
    CHECK(std::abs(extrap - 4.0) < 0.01 * 4.0);
    const auto mu = SpectralMeasure::atomic(SupportKind::UnitCircle, {{1.0, 0.5}, {Complex(0, 1), 0.5}});
    for (Complex z : {Complex(0.5, -0.5), Complex(2.0, 1.0)}) {
        const double bt = blowup_time_mult(mu, z, 1e-6, 20.0);
        CHECK(bt == Approx(T_mult_unitary(mu, z)).epsilon(1e-3));
    }
}

TEST_CASE("hamilton flow initial state and frozen regime") {
    const auto d = delta1_circle();
    const auto s0 = initial_state_mult(d, Complex(0.3, 0.4), 0.01);
    CHECK(s0.p_epsilon == Approx(1.0 / (std::norm(Complex(0.3, 0.4) - 1.0) + 0.01)).epsilon(1e-10));
    CHECK(s0.p_epsilon == Approx(reg_resolvent(d, Complex(0.3, 0.4), 0.01)).epsilon(1e-10));
    const auto s = hamilton_flow_mult(d, Complex(50.0, 0.0), 100.0, 0.01);
    CHECK(s.epsilon == Approx(100.0).epsilon(0.05));
    CHECK(s.elapsed == Approx(0.01));
    CHECK_THROWS_AS(hamilton_flow_mult(d, -1.0, 1e-6, 10.0), BlowUp);
    try {
        hamilton_flow_mult(d, -1.0, 1e-6, 10.0);
    } catch (const BlowUp& b) {
        CHECK(b.t_detected() == Approx(4.0).epsilon(1e-3));
    }
    CHECK_THROWS_AS(initial_state_mult(d, 2.0, 0.0), NegativeEpsilon);
}

TEST_CASE("curvature check") {
    const auto d = delta1_circle();
    CHECK(curvature_check_circle(d, pi) == Approx(0.125).epsilon(1e-14));
    CHECK(curvature_check_circle(d, pi / 2) == Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(curvature_check_circle(d, 0.0), EvaluationOnSupport);
    const auto mu = SpectralMeasure::atomic(SupportKind::UnitCircle, {{1.0, 0.3}, {std::polar(1.0, 2.0), 0.7}});
    auto invT = [&](double th) { return 1.0 / T_mult_unitary(mu, std::polar(1.0, th)); };
    for (double th : {0.7, 1.3, 3.5, 4.4}) {
        auto d2 = [&](double h) { return (invT(th + h) - 2.0 * invT(th) + invT(th - h)) / (h * h); };
        const double fd = (4.0 * d2(1e-3) - d2(2e-3)) / 3.0;
        const double c = curvature_check_circle(mu, th);
        CHECK(c > 0.0);
        CHECK(fd == Approx(c).epsilon(1e-6));
    }
}

TEST_CASE("p0_p2_positive examples") {
    auto r = p0_p2_positive(delta1_pos(), 2.0);
    CHECK(r.p0 == Approx(1.0).epsilon(1e-15));
    CHECK(r.p2 == Approx(1.0).epsilon(1e-15));
    r = p0_p2_positive(delta1_pos(), Complex(0.3, 2.0));
    CHECK(r.p0 == Approx(r.p2).epsilon(1e-15));
    r = p0_p2_positive(two_atoms(), 4.0);
    CHECK(r.p0 == Approx(13.0 / 72.0).epsilon(1e-15));
    CHECK(r.p2 == Approx(5.0 / 9.0).epsilon(1e-15));
    CHECK_THROWS_AS(p0_p2_positive(delta1_circle(), 2.0), WrongSupportKind);
}

TEST_CASE("T_mult_positive examples") {
    CHECK(T_mult_positive(delta1_pos(), -1.0) == Approx(4.0).epsilon(1e-14));
    for (Complex z : {Complex(0.4, 0.3), Complex(-2.0, 1.0)})
        CHECK(T_mult_positive(delta1_pos(), z) == Approx(T_mult_unitary(delta1_circle(), z)).epsilon(1e-13));
    // On |lambda| = 1 the declared limiting value 1/p2 applies.
    const Complex on = std::polar(1.0, 2.0);
    CHECK(T_mult_positive(delta1_pos(), on) == Approx(1.0 / p0_p2_positive(delta1_pos(), on).p2).epsilon(1e-12));
    const auto [p0, p2] = p0_p2_positive(two_atoms(), 4.0);
    CHECK(T_mult_positive(two_atoms(), 4.0) == Approx(std::log(16.0 * p0 / p2) / (16.0 * p0 - p2)).epsilon(1e-14));
    CHECK_THROWS_AS(T_mult_positive(delta1_pos(), 0.0), OriginExcluded);
    CHECK(T_mult_positive(delta1_pos(), 1.0) == 0.0);
}

TEST_CASE("f_gamma examples") {
    const Complex z(3.0, 1.0);
    CHECK(f_gamma_map(two_atoms(), {0.2, 0.0}, z) == z);
    for (Complex w : {Complex(-1.0, 0.5), Complex(2.0, 2.0)})
        CHECK(std::abs(f_gamma_exterior(delta1_pos(), 0.7, w) - psi_exterior(delta1_circle(), 0.7, w)) < 1e-15);
    const std::vector<Atom> atoms{{1.0, 0.5}, {2.0, 0.5}};
    const Complex direct = 10.0 * std::exp(herglotz_sum(atoms, 10.0));
    CHECK(std::abs(f_gamma_map(two_atoms(), {1.0, 1.0}, 10.0) - direct) < 1e-12 * std::abs(direct));
    CHECK(std::abs(f_gamma_exterior(two_atoms(), 1.0, 1e6)) > 1e5);
}

TEST_CASE("D-region membership") {
    const auto d = delta1_pos();
    // gamma = 0 reproduces the Sigma_t threshold.
    for (Complex z : {Complex(-1.0, 0.0), Complex(1.1, 0.1), Complex(0.5, 0.5), Complex(3.0, -2.0)}) {
        const bool outside = T_mult_positive(d, z) > 1.0;
        CHECK((d_region_membership(d, {1.0, 0.0}, z).membership == DMembership::OutsideD) == outside);
    }
    // Far points are always outside.
    for (double a : {0.0, 1.0, 2.5, -2.0}) {
        const auto r = d_region_membership(two_atoms(), {1.0, Complex(0.6, 0.6)}, std::polar(40.0, a));
        CHECK(r.membership == DMembership::OutsideD);
        REQUIRE(r.preimage);
        CHECK(std::abs(f_gamma_exterior(two_atoms(), Complex(0.6, 0.6), *r.preimage) - std::polar(40.0, a)) < 1e-8);
    }
    // t = gamma = 2: the forward image of the boundary of Sigma_t lies on the unit circle.
    const ModelParams tg{2.0, 2.0};
    const Boundary sb = sigma_boundary_mult_positive(d, 2.0, 1e-3, 20.0, 200, 200);
    REQUIRE(sb.polylines.size() == 1);
    for (auto p : sb.polylines[0].points) CHECK(std::abs(std::abs(f_gamma_exterior(d, 2.0, p)) - 1.0) < 1e-6);
    CHECK(d_region_membership(d, tg, 1.0).membership == DMembership::InsideD);
    CHECK(d_region_membership(d, tg, Complex(1.0, 0.01)).membership == DMembership::OutsideD);
    CHECK(d_region_membership(d, tg, 3.0).membership == DMembership::OutsideD);
    CHECK(d_region_membership(d, tg, 0.2).membership == DMembership::OutsideD);
    // Complex gamma: points just off the forward image switch membership across it.
    const ModelParams cg{2.0, Complex(1.0, 0.5)};
    int agree = 0, total = 0;
    for (std::size_t k = 0; k < sb.polylines[0].points.size(); k += 15) {
        const Complex w = f_gamma_exterior(d, cg.gamma, sb.polylines[0].points[k]);
        const bool a = d_region_membership(d, cg, w * 1.05).membership == DMembership::OutsideD;
        const bool b = d_region_membership(d, cg, w * 0.95).membership == DMembership::OutsideD;
        agree += (a != b);
        ++total;
    }
    CHECK(agree == total);
    CHECK_THROWS_AS(d_region_membership(d, tg, 0.0), OriginExcluded);
}

TEST_CASE("spectral_test_mult examples") {
    CHECK(spectral_test_mult(MultKind::Unitary, delta1_circle(), -1.0, {3.0, 0.0}).verdict == Verdict::OutsideSpectrum);
    CHECK(spectral_test_mult(MultKind::Unitary, delta1_circle(), -1.0, {5.0, 0.0}).verdict == Verdict::Undetermined);
    CHECK(spectral_test_mult(MultKind::Unitary, delta1_circle(), 0.0, {7.0, 1.0}).verdict == Verdict::OutsideSpectrum);
    const auto mu = SpectralMeasure::atomic(SupportKind::NonnegativeHalfLine, {{0.0, 0.5}, {2.0, 0.5}});
    CHECK(origin_outside_sigma_positive(mu, 0.1));
    auto v = spectral_test_mult(MultKind::Positive, mu, 0.0, {0.1, 0.0});
    CHECK(v.verdict == Verdict::ZeroAtomCase);
    CHECK(v.zero_in_spectrum);
    v = spectral_test_mult(MultKind::Positive, two_atoms(), 0.0, {0.1, 0.0});
    CHECK(v.verdict == Verdict::ZeroAtomCase);
    CHECK_FALSE(v.zero_in_spectrum);
    CHECK(spectral_test_mult(MultKind::Positive, two_atoms(), 20.0, {0.5, 0.2}).verdict == Verdict::OutsideSpectrum);
    CHECK(spectral_test_mult(MultKind::Positive, two_atoms(), 1.0, {0.5, 0.0}).verdict == Verdict::Undetermined);
}

TEST_CASE("unitary Sigma_t boundary") {
    const auto d = delta1_circle();
    const double t = 1.0;
    const Boundary b = sigma_boundary_mult_unitary(d, t, {-5.0, 5.0, -5.0, 5.0}, 161, 160);
    REQUIRE_FALSE(b.polylines.empty());
    for (const auto& pl : b.polylines)
        for (auto p : pl.points) {
            CHECK(T_mult_unitary(d, p) == Approx(t).epsilon(1e-8));
            CHECK(distance_to_boundary(b, std::conj(p)) < 1e-6);
        }
    // Exterior exclusion on random points.
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-4.5, 4.5);
    for (int k = 0; k < 1000; ++k) {
        const Complex z(u(rng), u(rng));
        if (boundary_contains(b, z) || distance_to_boundary(b, z) < 1e-6) continue;
        CHECK(T_mult_unitary(d, z) > t);
    }
    for (double th = 0.3; th < 2.0 * pi - 0.3; th += 0.1)
        if (T_mult_unitary(d, std::polar(1.0, th)) > t) CHECK(curvature_check_circle(d, th) > 0.0);
}

TEST_CASE("positive Sigma_t boundary on the log-polar grid") {
    const auto mu = two_atoms();
    const double t = 0.5;
    const Boundary b = sigma_boundary_mult_positive(mu, t, 1e-3, 10.0, 160, 160);
    REQUIRE_FALSE(b.polylines.empty());
    for (const auto& pl : b.polylines) {
        CHECK(pl.closed);
        for (auto p : pl.points) CHECK(T_mult_positive(mu, p) == Approx(t).epsilon(1e-7));
    }
    CHECK(boundary_contains(b, 1.0));
    CHECK(boundary_contains(b, 2.0));
    CHECK_FALSE(boundary_contains(b, -1.0));
    CHECK_THROWS_AS(sigma_boundary_mult_positive(mu, t, 2.0, 1.0, 10, 10), ConfigError);
}
