#include <doctest.h>

#include <cmath>
#include <numbers>

#include "brownscope/error.hpp"
#include "brownscope/rdiagonal.hpp"

using namespace brownscope;
using doctest::Approx;

namespace {

SpectralMeasure half12() {
    return SpectralMeasure::atomic(SupportKind::NonnegativeHalfLine, {{1.0, 0.5}, {2.0, 0.5}});
}
SpectralMeasure cubic() {
    return SpectralMeasure::density_on_interval(SupportKind::NonnegativeHalfLine, 0.0, 1.0,
                                                [](double x) { return 3.0 * x * x; });
}
SpectralMeasure bernoulli() {
    return SpectralMeasure::atomic(SupportKind::RealLine, {{-1.0, 0.5}, {1.0, 0.5}});
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

// Mass of nodes at positions <= x.
double cdf(const SpectralMeasure& mu, double x) {
    double s = 0.0;
    for (const auto& n : mu.nodes())
        if (n.position.real() <= x) s += n.mass;
    return s;
}

}  // namespace

TEST_CASE("hl_radii examples") {
    auto r = hl_radii(SpectralMeasure::point_mass(1.0, SupportKind::NonnegativeHalfLine));
    CHECK(r.inner_radius == Approx(1.0).epsilon(1e-15));
    CHECK(r.outer_radius == Approx(1.0).epsilon(1e-15));
    r = hl_radii(half12());
    CHECK(r.inner_radius == Approx(std::sqrt(1.6)).epsilon(1e-14));
    CHECK(r.outer_radius == Approx(std::sqrt(2.5)).epsilon(1e-14));
    r = hl_radii(cubic());
    CHECK(r.inner_radius == Approx(1.0 / std::sqrt(3.0)).epsilon(1e-9));
    CHECK(r.outer_radius == Approx(std::sqrt(0.6)).epsilon(1e-9));
    // Linear density near 0 makes int xi^-2 diverge.
    const auto lin = SpectralMeasure::density_on_interval(SupportKind::NonnegativeHalfLine, 0.0, 1.0,
                                                          [](double x) { return 2.0 * x; });
    CHECK(hl_radii(lin).inner_radius == 0.0);
    CHECK_THROWS_AS(hl_radii(bernoulli()), WrongSupportKind);
}

TEST_CASE("hl_radii inner <= outer") {
    for (auto mu : {half12(), cubic(),
                    SpectralMeasure::atomic(SupportKind::NonnegativeHalfLine, {{0.1, 0.2}, {3.0, 0.8}}),
                    SpectralMeasure::point_mass(2.5, SupportKind::NonnegativeHalfLine)}) {
        const auto r = hl_radii(mu);
        CHECK(r.inner_radius <= r.outer_radius * (1.0 + 1e-14));
        if (mu.is_atomic() && mu.atoms().size() == 1) CHECK(r.inner_radius == Approx(r.outer_radius));
        else CHECK(r.inner_radius < r.outer_radius);
    }
}

TEST_CASE("vt examples") {
    const auto b = bernoulli();
    const double v = vt(b, 3.0, 0.0);
    CHECK(v > 0.0);
    // Scan oracle at 1e-6 resolution.
    double scan = 0.0;
    for (double y = 0.0;; y += 1e-6) {
        if (1.0 / (1.0 + y * y) <= 1.0 / 3.0) {
            scan = y;
            break;
        }
    }
    CHECK(std::abs(v - scan) <= 1e-6);
    CHECK(v == Approx(std::sqrt(2.0)).epsilon(1e-9));
    CHECK(vt(b, 0.01, 10.0) == 0.0);
    for (double t : {1e-2, 1e-4, 1e-6}) CHECK(vt(b, t, 0.5) == 0.0);
    CHECK(vt(b, 1e-6, 1.0 + 1e-4) < 1e-2);
}

TEST_CASE("biane_Ht examples") {
    const auto d0 = SpectralMeasure::point_mass(0.0, SupportKind::RealLine);
    CHECK(std::abs(biane_Ht(d0, 0.5, Complex(0, 1)) - Complex(0, 0.5)) < 1e-15);
    CHECK(std::abs(biane_Ht(bernoulli(), 1.0, Complex(0, 2)) - Complex(0, 1.6)) < 1e-15);
    CHECK_THROWS_AS(biane_Ht(bernoulli(), 3.0, Complex(0.0, 1.0)), OutsideOmega);
    CHECK_THROWS_AS(biane_Ht(bernoulli(), 1.0, Complex(0.0, -1.0)), OutsideOmega);
    // H_t(z) - z -> 0 as t -> 0, uniformly on a compact set.
    double prev = 1e300;
    for (double t : {1e-1, 1e-2, 1e-3}) {
        double worst = 0.0;
        for (double x = -2.0; x <= 2.0; x += 0.25)
            for (double y = 0.5; y <= 2.0; y += 0.5)
                worst = std::max(worst, std::abs(biane_Ht(bernoulli(), t, Complex(x, y)) - Complex(x, y)));
        CHECK(worst < prev);
        prev = worst;
    }
    CHECK(prev < 1e-2);
}

TEST_CASE("circ_inner_radius examples") {
    CHECK(circ_inner_radius(half12(), 0.0) == Approx(std::sqrt(1.6)).epsilon(1e-14));
    CHECK(circ_inner_radius(half12(), 1.6) == Approx(0.0).epsilon(1e-7));
    CHECK(circ_inner_radius(cubic(), 0.1) == Approx(std::sqrt(1.0 / 3.0 - 0.1)).epsilon(1e-9));
    CHECK(circ_inner_radius(cubic(), 0.1) == Approx(0.48305).epsilon(1e-5));
    CHECK_THROWS_AS(circ_inner_radius(half12(), 1.7), TMaxExceeded);
    CHECK(circ_inner_radius(half12(), 0.0) == Approx(hl_radii(half12()).inner_radius).epsilon(1e-14));
    CHECK(circ_inner_radius(cubic(), 0.0) == Approx(hl_radii(cubic()).inner_radius).epsilon(1e-12));
    double prev = 1e300;
    for (double t = 0.0; t < 1.6; t += 0.1) {
        const double r = circ_inner_radius(half12(), t);
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("limit chain agrees with the closed formula") {
    for (auto mu : {half12(), cubic()})
        for (double t : {0.0, 0.1, 0.2}) {
            const double exact = circ_inner_radius(mu, t);
            CHECK(inner_radius_limit_chain(mu, t, 1e-4) == Approx(exact).epsilon(1e-4));
        }
}

TEST_CASE("stieltjes inversion of two atoms") {
    const auto b = bernoulli();
    const auto grid = linspace(-3.0, 3.0, 30001);
    const auto rec = stieltjes_invert([&](Complex z) { return cauchy_transform(b, z); }, grid, 1e-3);
    const double raw = rec.normalization_correction();
    CHECK(raw == Approx(1.0).epsilon(2e-3));
    // Each spike carries half the recovered mass.
    CHECK(cdf(rec, 0.0) * raw == Approx(0.5).epsilon(1e-2));
    CHECK((1.0 - cdf(rec, 0.0)) * raw == Approx(0.5).epsilon(1e-2));
    CHECK(cdf(rec, -1.1) < 1e-2);
}

TEST_CASE("stieltjes inversion of a flat density") {
    // Closed form of the Cauchy transform of the uniform law on [-1, 1].
    auto G = [](Complex z) { return 0.5 * std::log((z + 1.0) / (z - 1.0)); };
    const auto grid = linspace(-1.5, 1.5, 3001);
    const auto rec = stieltjes_invert(G, grid, 1e-3);
    const double raw = rec.normalization_correction();
    for (double x = -0.9; x <= 0.9; x += 0.1) CHECK(rec.density_at(x) * raw == Approx(0.5).epsilon(2e-2));
}

TEST_CASE("stieltjes inversion where G is real") {
    const auto grid = linspace(-1.0, 1.0, 101);
    auto G = [](Complex z) { return Complex(1.0 / (z.real() - 5.0), 0.0); };
    CHECK_THROWS_AS(stieltjes_invert(G, grid, 1e-3), InvalidMeasure);
    auto Gmix = [](Complex z) { return z.real() < 0 ? Complex(0.3, 0.0) : Complex(0.0, -1.0); };
    const auto rec = stieltjes_invert(Gmix, grid, 1e-3);
    CHECK(rec.density_at(-0.5) == 0.0);
    CHECK(rec.density_at(0.5) > 0.0);
    CHECK_THROWS_AS(stieltjes_invert(G, grid, 0.0), InvalidMeasure);
}

TEST_CASE("round trip through symmetrize") {
    const auto mu = SpectralMeasure::atomic(SupportKind::NonnegativeHalfLine, {{0.5, 0.3}, {1.0, 0.2}, {2.0, 0.5}});
    const auto grid = linspace(0.0, 3.0, 15001);
    const auto rec = symmetrize(stieltjes_invert([&](Complex z) { return cauchy_transform(mu, z); }, grid, 1e-3,
                                                 SupportKind::NonnegativeHalfLine));
    const auto ref = symmetrize(mu);
    for (double x = -2.875; x <= 2.875; x += 0.25) {
        double exact = 0.0;
        for (const auto& a : ref.atoms())
            if (a.position.real() <= x) exact += a.weight;
        CHECK(std::abs(cdf(rec, x) - exact) < 2e-2);
    }
}
