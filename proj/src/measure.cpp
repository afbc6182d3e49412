#include "brownscope/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/legendre.hpp>

#include "brownscope/error.hpp"
#include "quadrature.hpp"

namespace brownscope {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAtomTol = 1e-12;

double wrap_angle(double phi, double lo) {
    double r = std::fmod(phi - lo, kTwoPi);
    if (r < 0) r += kTwoPi;
    return lo + r;
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

namespace detail {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n, double lo,
                                                                   double hi) {
    const auto zeros = boost::math::legendre_p_zeros<double>(static_cast<int>(n));
    std::vector<double> x, w;
    x.reserve(n);
    w.reserve(n);
    const int order = static_cast<int>(n);
    auto weight = [&](double z) {
        const double dp = boost::math::legendre_p_prime(order, z);
        return 2.0 / ((1.0 - z * z) * dp * dp);
    };
    // zeros holds the nonnegative roots in increasing order (0 first when n is odd).
    for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
        if (*it == 0.0) continue;
        x.push_back(-*it);
        w.push_back(weight(*it));
    }
    for (double z : zeros) {
        x.push_back(z);
        w.push_back(weight(z));
    }
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = mid + half * x[i];
        w[i] *= half;
    }
    return {x, w};
}

}  // namespace detail

std::string to_string(SupportKind kind) {
    switch (kind) {
        case SupportKind::RealLine: return "real";
        case SupportKind::NonnegativeHalfLine: return "nonneg";
        case SupportKind::UnitCircle: return "circle";
        case SupportKind::ComplexPlane: return "complex";
    }
    return "unknown";
}

// ---- DensityPiece ----

Complex DensityPiece::position(double s) const {
    return geometry == Geometry::Segment ? Complex(s, 0.0) : std::polar(1.0, s);
}

double DensityPiece::nearest_parameter(Complex z) const {
    if (geometry == Geometry::Segment) return std::clamp(z.real(), lo, hi);
    if (std::abs(z) == 0.0) return lo;
    const double phi = wrap_angle(std::arg(z), lo);
    if (phi <= hi) return phi;
    return std::abs(z - position(lo)) <= std::abs(z - position(hi)) ? lo : hi;
}

double DensityPiece::distance(Complex z) const { return std::abs(z - position(nearest_parameter(z))); }

double DensityPiece::max_node_spacing() const {
    double h = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) h = std::max(h, nodes[i] - nodes[i - 1]);
    if (geometry == Geometry::Arc && hi - lo >= kTwoPi - 1e-12 && !nodes.empty())
        h = std::max(h, nodes.front() + kTwoPi - nodes.back());
    return h;
}

// ---- SpectralMeasure ----

SpectralMeasure SpectralMeasure::atomic(SupportKind kind, std::vector<Atom> atoms,
                                        Normalization norm) {
    SpectralMeasure m;
    m.kind_ = kind;
    double total = 0.0;
    for (auto& a : atoms) {
        if (!finite(a.position) || !std::isfinite(a.weight))
            throw InvalidMeasure("atom with non-finite position or weight");
        if (a.weight < 0) throw InvalidMeasure("negative atom weight");
        switch (kind) {
            case SupportKind::RealLine:
            case SupportKind::NonnegativeHalfLine:
                if (std::abs(a.position.imag()) > kAtomTol)
                    throw InvalidMeasure("real-line atom with nonzero imaginary part");
                a.position = Complex(a.position.real(), 0.0);
                if (kind == SupportKind::NonnegativeHalfLine && a.position.real() < 0)
                    throw InvalidMeasure("negative atom on the nonnegative half-line");
                break;
            case SupportKind::UnitCircle:
                if (std::abs(std::abs(a.position) - 1.0) > kAtomTol)
                    throw InvalidMeasure("unit-circle atom off the circle");
                break;
            case SupportKind::ComplexPlane: break;
        }
        total += a.weight;
    }
    std::erase_if(atoms, [](const Atom& a) { return a.weight == 0.0; });
    if (atoms.empty() || !(total > 0)) throw InvalidMeasure("measure has no mass");
    if (std::abs(total - 1.0) > 1e-12) {
        if (norm == Normalization::Strict)
            throw InvalidMeasure("atom weights sum to " + std::to_string(total) + ", not 1");
    }
    if (total != 1.0)
        for (auto& a : atoms) a.weight /= total;
    m.correction_ = total;
    m.atoms_ = std::move(atoms);
    m.finalize();
    return m;
}

SpectralMeasure SpectralMeasure::point_mass(Complex position, SupportKind kind) {
    return atomic(kind, {{position, 1.0}});
}

SpectralMeasure SpectralMeasure::density_on_interval(SupportKind kind, double lo, double hi,
                                                     std::function<double(double)> f,
                                                     std::size_t nodes) {
    if (kind != SupportKind::RealLine && kind != SupportKind::NonnegativeHalfLine)
        throw InvalidMeasure("interval densities live on the real line or half-line");
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw InvalidMeasure("degenerate density interval");
    if (kind == SupportKind::NonnegativeHalfLine && lo < 0)
        throw InvalidMeasure("density on the half-line must start at or after 0");
    if (nodes < 2) throw InvalidMeasure("need at least 2 quadrature nodes");
    DensityPiece p;
    p.geometry = DensityPiece::Geometry::Segment;
    p.lo = lo;
    p.hi = hi;
    p.density = std::move(f);
    std::tie(p.nodes, p.weights) = detail::gauss_legendre(nodes, lo, hi);
    return from_pieces(kind, {std::move(p)});
}

SpectralMeasure SpectralMeasure::density_on_circle(std::function<double(double)> f,
                                                   std::size_t nodes) {
    if (nodes < 2) throw InvalidMeasure("need at least 2 quadrature nodes");
    DensityPiece p;
    p.geometry = DensityPiece::Geometry::Arc;
    p.lo = 0.0;
    p.hi = kTwoPi;
    p.density = std::move(f);
    const double h = kTwoPi / static_cast<double>(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
        p.nodes.push_back(h * static_cast<double>(j));
        p.weights.push_back(h);
    }
    return from_pieces(SupportKind::UnitCircle, {std::move(p)});
}

SpectralMeasure SpectralMeasure::uniform_circle(std::size_t nodes) {
    return density_on_circle([](double) { return 1.0 / kTwoPi; }, nodes);
}

SpectralMeasure SpectralMeasure::from_grid(SupportKind kind,
                                           const std::vector<std::pair<double, double>>& grid) {
    if (grid.size() < 2) throw InvalidMeasure("density grid needs at least 2 samples");
    if (kind == SupportKind::ComplexPlane)
        throw InvalidMeasure("density grids are one-dimensional");
    std::vector<double> xs, fs;
    for (const auto& [x, f] : grid) {
        if (!std::isfinite(x) || !std::isfinite(f)) throw InvalidMeasure("non-finite grid sample");
        if (f < 0) throw InvalidMeasure("negative density value");
        if (!xs.empty() && !(x > xs.back()))
            throw InvalidMeasure("density grid must be strictly increasing");
        xs.push_back(x);
        fs.push_back(f);
    }
    if (kind == SupportKind::NonnegativeHalfLine && xs.front() < 0)
        throw InvalidMeasure("density on the half-line must start at or after 0");
    if (kind == SupportKind::UnitCircle && xs.back() - xs.front() > kTwoPi + 1e-12)
        throw InvalidMeasure("angular grid spans more than a full turn");
    DensityPiece p;
    p.geometry = kind == SupportKind::UnitCircle ? DensityPiece::Geometry::Arc
                                                 : DensityPiece::Geometry::Segment;
    p.lo = xs.front();
    p.hi = xs.back();
    p.nodes = xs;
    p.weights.assign(xs.size(), 0.0);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double h = 0.5 * (xs[i] - xs[i - 1]);
        p.weights[i - 1] += h;
        p.weights[i] += h;
    }
    p.density = [xs, fs](double s) {
        if (s <= xs.front()) return s == xs.front() ? fs.front() : 0.0;
        if (s >= xs.back()) return s == xs.back() ? fs.back() : 0.0;
        const auto it = std::upper_bound(xs.begin(), xs.end(), s);
        const std::size_t i = static_cast<std::size_t>(it - xs.begin());
        const double u = (s - xs[i - 1]) / (xs[i] - xs[i - 1]);
        return (1.0 - u) * fs[i - 1] + u * fs[i];
    };
    return from_pieces(kind, {std::move(p)});
}

SpectralMeasure SpectralMeasure::from_pieces(SupportKind kind, std::vector<DensityPiece> pieces) {
    if (pieces.empty()) throw InvalidMeasure("density measure without pieces");
    SpectralMeasure m;
    m.kind_ = kind;
    double raw = 0.0;
    for (const auto& p : pieces) {
        if (!p.density || p.nodes.size() != p.weights.size() || p.nodes.empty())
            throw InvalidMeasure("malformed density piece");
        for (std::size_t i = 0; i < p.nodes.size(); ++i) {
            const double f = p.density(p.nodes[i]);
            if (!std::isfinite(f) || f < 0) throw InvalidMeasure("negative or non-finite density");
            raw += f * p.weights[i];
        }
    }
    if (!(raw > 0) || !std::isfinite(raw)) throw InvalidMeasure("density has no mass");
    for (auto& p : pieces) {
        auto f = std::move(p.density);
        p.density = [f = std::move(f), raw](double s) { return f(s) / raw; };
    }
    m.pieces_ = std::move(pieces);
    m.correction_ = raw;
    m.finalize();
    return m;
}

void SpectralMeasure::finalize() {
    nodes_.clear();
    if (is_atomic()) {
        for (const auto& a : atoms_) nodes_.push_back({a.position, a.weight});
        guard_ = 0.0;
        return;
    }
    double h = 0.0;
    for (const auto& p : pieces_) {
        for (std::size_t i = 0; i < p.nodes.size(); ++i)
            nodes_.push_back({p.position(p.nodes[i]), p.density(p.nodes[i]) * p.weights[i]});
        h = std::max(h, p.max_node_spacing());
    }
    guard_ = 10.0 * h;
}

double SpectralMeasure::distance_to_support(Complex z) const {
    double d = kInf;
    if (is_atomic()) {
        for (const auto& a : atoms_) d = std::min(d, std::abs(z - a.position));
    } else {
        for (const auto& p : pieces_) d = std::min(d, p.distance(z));
    }
    return d;
}

double SpectralMeasure::atom_mass_at(Complex z, double tol) const {
    double m = 0.0;
    for (const auto& a : atoms_)
        if (std::abs(a.position - z) <= tol) m += a.weight;
    return m;
}

double SpectralMeasure::support_radius() const {
    double r = 0.0;
    for (const auto& n : nodes_) r = std::max(r, std::abs(n.position));
    for (const auto& p : pieces_)
        r = std::max({r, std::abs(p.position(p.lo)), std::abs(p.position(p.hi))});
    return r;
}

double SpectralMeasure::density_at(double s) const {
    double f = 0.0;
    for (const auto& p : pieces_)
        if (s >= p.lo && s <= p.hi) f += p.density(s);
    return f;
}

// ---- transforms ----

namespace {

/// int kernel(xi) dmu. Nodal sums when the kernel is resolved by the
/// quadrature grid (width beyond the guard band), adaptive quadrature on each
/// piece otherwise, split at the point of the piece nearest lambda.
template <class K>
double real_integral(const SpectralMeasure& mu, Complex lambda, double width, K&& kernel) {
    if (mu.is_atomic() || width > mu.guard_band()) {
        double s = 0.0;
        for (const auto& n : mu.nodes()) s += n.mass * kernel(n.position);
        return s;
    }
    double s = 0.0;
    for (const auto& p : mu.pieces()) {
        auto g = [&](double u) { return p.density(u) * kernel(p.position(u)); };
        s += detail::adaptive_split(g, p.lo, p.hi, p.nearest_parameter(lambda));
    }
    return s;
}

void require_off_support(const SpectralMeasure& mu, Complex z) {
    if (!finite(z)) throw EvaluationOnSupport("non-finite evaluation point");
    if (mu.is_atomic()) {
        for (const auto& a : mu.atoms())
            if (std::abs(z - a.position) <= 1e-14 * std::max(1.0, std::abs(a.position)))
                throw EvaluationOnSupport("evaluation point coincides with an atom");
        return;
    }
    const double d = mu.distance_to_support(z);
    if (d <= mu.guard_band())
        throw EvaluationOnSupport("evaluation point within the quadrature guard band (distance " +
                                  std::to_string(d) + ")");
}

bool hits_atom(const SpectralMeasure& mu, Complex lambda) {
    for (const auto& a : mu.atoms())
        if (a.position == lambda) return true;
    return false;
}

/// Shared core of reg_resolvent / resolvent_moment.
template <class W>
double resolvent_core(const SpectralMeasure& mu, Complex lambda, double eps, W&& weight) {
    if (!finite(lambda) || std::isnan(eps)) throw EvaluationOnSupport("non-finite argument");
    const double d = mu.distance_to_support(lambda);
    if (eps < 0) {
        if (d * d <= -eps)
            throw NegativeEpsilon("eps < 0 with lambda within sqrt|eps| of the support");
    }
    if (eps == 0.0 && mu.is_atomic() && hits_atom(mu, lambda)) return kInf;
    auto kernel = [&](Complex xi) {
        const double r2 = std::norm(xi - lambda);
        return weight(xi) / (r2 + eps);
    };
    if (eps == 0.0 && !mu.is_atomic() && d == 0.0) {
        // Increasing limit eps_k -> 0 with a geometric-ratio convergence test.
        std::vector<double> seq;
        for (int k = 1; k <= 8; ++k) {
            const double ek = std::pow(10.0, -2.0 * k);
            seq.push_back(real_integral(mu, lambda, 0.0, [&](Complex xi) {
                return weight(xi) / (std::norm(xi - lambda) + ek);
            }));
        }
        const std::size_t n = seq.size();
        const double d1 = seq[n - 2] - seq[n - 3], d2 = seq[n - 1] - seq[n - 2];
        if (!std::isfinite(seq.back())) return kInf;
        if (d2 <= 1e-15 * std::abs(seq.back())) return seq.back();
        const double r = d2 / d1;
        if (!(d1 > 0) || r >= 0.5) return kInf;
        return seq.back() + d2 * r / (1.0 - r);
    }
    const double width = std::sqrt(std::max(d * d + eps, 0.0));
    return real_integral(mu, lambda, width, kernel);
}

}  // namespace

Complex cauchy_transform(const SpectralMeasure& mu, Complex z) {
    require_off_support(mu, z);
    Complex s = 0.0;
    for (const auto& n : mu.nodes()) s += n.mass / (z - n.position);
    return s;
}

Complex cauchy_transform_derivative(const SpectralMeasure& mu, Complex z) {
    require_off_support(mu, z);
    Complex s = 0.0;
    for (const auto& n : mu.nodes()) {
        const Complex r = 1.0 / (z - n.position);
        s -= n.mass * r * r;
    }
    return s;
}

Complex herglotz(const SpectralMeasure& mu, Complex lambda) {
    if (lambda == 0.0) return 0.5;
    return 0.5 - lambda * cauchy_transform(mu, lambda);
}

Complex herglotz_derivative(const SpectralMeasure& mu, Complex lambda) {
    return -cauchy_transform(mu, lambda) - lambda * cauchy_transform_derivative(mu, lambda);
}

double reg_resolvent(const SpectralMeasure& mu, Complex lambda, double eps) {
    return resolvent_core(mu, lambda, eps, [](Complex) { return 1.0; });
}

double reg_resolvent_derivative(const SpectralMeasure& mu, Complex lambda, double eps) {
    const double d = mu.distance_to_support(lambda);
    if (eps < 0 && d * d <= -eps)
        throw NegativeEpsilon("eps < 0 with lambda within sqrt|eps| of the support");
    if (eps == 0.0 && d == 0.0) return -kInf;
    const double width = std::sqrt(std::max(d * d + eps, 0.0));
    return -real_integral(mu, lambda, width, [&](Complex xi) {
        const double q = std::norm(xi - lambda) + eps;
        return 1.0 / (q * q);
    });
}

double resolvent_moment(const SpectralMeasure& mu, Complex lambda, double eps,
                        const std::function<double(Complex)>& weight) {
    return resolvent_core(mu, lambda, eps, weight);
}

double neg2_trace(const SpectralMeasure& mu, Complex lambda) { return reg_resolvent(mu, lambda, 0.0); }

double neg4_trace(const SpectralMeasure& mu, Complex lambda) {
    const double d = mu.distance_to_support(lambda);
    if (d == 0.0) return kInf;
    return real_integral(mu, lambda, d, [&](Complex xi) {
        const double q = std::norm(xi - lambda);
        return 1.0 / (q * q);
    });
}

double log_potential(const SpectralMeasure& mu, Complex lambda) {
    if (mu.is_atomic() && hits_atom(mu, lambda)) return -kInf;
    const double d = mu.distance_to_support(lambda);
    return real_integral(mu, lambda, d, [&](Complex xi) { return std::log(std::norm(xi - lambda)); });
}

double abs_moment(const SpectralMeasure& mu, double p) {
    double s = 0.0;
    for (const auto& n : mu.nodes()) s += n.mass * std::pow(std::abs(n.position), p);
    return s;
}

SpectralMeasure symmetrize(const SpectralMeasure& mu) {
    if (mu.support_kind() != SupportKind::NonnegativeHalfLine)
        throw WrongSupportKind("symmetrize needs a measure on the nonnegative half-line");
    if (mu.is_atomic()) {
        std::vector<Atom> out;
        for (const auto& a : mu.atoms()) {
            if (a.position.real() == 0.0) {
                out.push_back(a);
            } else {
                out.push_back({-a.position, 0.5 * a.weight});
                out.push_back({a.position, 0.5 * a.weight});
            }
        }
        std::sort(out.begin(), out.end(),
                  [](const Atom& a, const Atom& b) { return a.position.real() < b.position.real(); });
        return SpectralMeasure::atomic(SupportKind::RealLine, std::move(out),
                                       Normalization::Renormalize);
    }
    std::vector<DensityPiece> out;
    for (const auto& p : mu.pieces()) {
        DensityPiece m;
        m.geometry = DensityPiece::Geometry::Segment;
        m.lo = -p.hi;
        m.hi = -p.lo;
        m.density = [f = p.density](double s) { return 0.5 * f(-s); };
        for (std::size_t i = p.nodes.size(); i-- > 0;) {
            m.nodes.push_back(-p.nodes[i]);
            m.weights.push_back(p.weights[i]);
        }
        DensityPiece q = p;
        q.density = [f = p.density](double s) { return 0.5 * f(s); };
        out.push_back(std::move(m));
        out.push_back(std::move(q));
    }
    return SpectralMeasure::from_pieces(SupportKind::RealLine, std::move(out));
}

}  // namespace brownscope
