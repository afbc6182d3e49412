#include "brownscope/rdiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "brownscope/error.hpp"

namespace brownscope {

AnnulusSpec hl_radii(const SpectralMeasure& mu_h) {
    if (mu_h.support_kind() != SupportKind::NonnegativeHalfLine)
        throw WrongSupportKind("hl_radii needs a measure on the nonnegative half-line");
    const double m2 = abs_moment(mu_h, 2.0);
    const double minus2 = neg2_trace(mu_h, 0.0);
    return {std::isinf(minus2) ? 0.0 : 1.0 / std::sqrt(minus2), std::sqrt(m2)};
}

double vt(const SpectralMeasure& mu_sym, double t, double x) {
    if (!(t > 0)) return 0.0;
    const double target = 1.0 / t;
    auto I = [&](double y) { return reg_resolvent(mu_sym, Complex(x, 0.0), y * y); };
    if (I(0.0) <= target) return 0.0;
    double lo_s = 0.0, hi_s = 0.0;
    for (const auto& n : mu_sym.nodes()) {
        lo_s = std::min(lo_s, n.position.real());
        hi_s = std::max(hi_s, n.position.real());
    }
    double lo = 0.0, hi = std::sqrt(t) * (1.0 + (hi_s - lo_s));
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        (I(mid) <= target ? hi : lo) = mid;
    }
    return hi;
}

Complex biane_Ht(const SpectralMeasure& mu_sym, double t, Complex z) {
    if (!(z.imag() > 0) || !(z.imag() > vt(mu_sym, t, z.real())))
        throw OutsideOmega("z lies on or below the graph of v_t");
    return z + t * cauchy_transform(mu_sym, z);
}

double circ_inner_radius(const SpectralMeasure& mu_h, double t) {
    const double m = neg2_trace(mu_h, 0.0);
    if (t < 0) throw TMaxExceeded("t must be nonnegative");
    if (std::isinf(m)) {
        if (t == 0.0) return 0.0;
        throw TMaxExceeded("h^-1 is not in L^2, so the inner radius exists only at t = 0");
    }
    const double tmax = 1.0 / m;
    if (t > tmax * (1.0 + 1e-12))
        throw TMaxExceeded("t exceeds 1/tr[h^-2] = " + std::to_string(tmax));
    return std::sqrt(std::max(0.0, tmax - t));
}

double inner_radius_limit_chain(const SpectralMeasure& mu_h, double t, double eps) {
    const SpectralMeasure sym = symmetrize(mu_h);
    const Complex ie(0.0, eps);
    double m;
    if (sym.is_atomic() || sym.distance_to_support(ie) > sym.guard_band())
        m = (cauchy_transform(sym, ie) / (-ie)).real();
    else
        m = reg_resolvent(sym, 0.0, eps * eps);
    const double q = m / (1.0 - t * m);
    if (!(q > 0)) throw TMaxExceeded("t beyond the inner-radius threshold");
    return std::sqrt(1.0 / q);
}

SpectralMeasure stieltjes_invert(const std::function<Complex(Complex)>& G,
                                 const std::vector<double>& x_grid, double y, SupportKind kind) {
    if (!(y > 0)) throw InvalidMeasure("Stieltjes inversion needs y > 0");
    std::vector<std::pair<double, double>> grid;
    grid.reserve(x_grid.size());
    for (double x : x_grid)
        grid.emplace_back(x, std::max(0.0, -G(Complex(x, y)).imag() / std::numbers::pi));
    return SpectralMeasure::from_grid(kind, grid);
}

}  // namespace brownscope
