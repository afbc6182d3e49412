#include "brownscope/rmt_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "brownscope/error.hpp"

namespace brownscope {

Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Engine(seq);
}

Matrix sample_ginibre(std::size_t n, double t, Engine& rng) {
    const auto N = static_cast<Eigen::Index>(n);
    std::normal_distribution<double> g(0.0, std::sqrt(t / (2.0 * static_cast<double>(n))));
    Matrix a(N, N);
    for (Eigen::Index j = 0; j < N; ++j)
        for (Eigen::Index i = 0; i < N; ++i) {
            const double re = g(rng);
            const double im = g(rng);
            a(i, j) = Complex(re, im);
        }
    return a;
}

Matrix sample_gue(std::size_t n, Engine& rng) {
    const auto N = static_cast<Eigen::Index>(n);
    const double v = 1.0 / static_cast<double>(n);
    std::normal_distribution<double> diag(0.0, std::sqrt(v));
    std::normal_distribution<double> off(0.0, std::sqrt(v / 2.0));
    Matrix a(N, N);
    for (Eigen::Index j = 0; j < N; ++j) {
        a(j, j) = Complex(diag(rng), 0.0);
        for (Eigen::Index i = j + 1; i < N; ++i) {
            const double re = off(rng);
            const double im = off(rng);
            a(i, j) = Complex(re, im);
            a(j, i) = std::conj(a(i, j));
        }
    }
    return a;
}

Matrix sample_elliptic(std::size_t n, double t, Complex gamma, Engine& rng) {
    if (!(t > 0)) throw BadGamma("t must be positive");
    if (std::abs(gamma) > t * (1.0 + 1e-12)) throw BadGamma("gamma must satisfy |gamma| <= t");
    const double g = std::min(std::abs(gamma), t);
    const double a = std::sqrt((t + g) / 2.0);
    const double b = std::sqrt(std::max(0.0, (t - g) / 2.0));
    const double theta = gamma == 0.0 ? 0.0 : std::arg(gamma) / 2.0;
    const Matrix x = sample_gue(n, rng);
    const Matrix y = sample_gue(n, rng);
    return std::polar(1.0, theta) * (a * x + Complex(0.0, b) * y);
}

Matrix sample_haar_unitary(std::size_t n, Engine& rng) {
    const Matrix z = sample_ginibre(n, static_cast<double>(n), rng);
    Eigen::HouseholderQR<Matrix> qr(z);
    const auto N = static_cast<Eigen::Index>(n);
    Matrix q = qr.householderQ() * Matrix::Identity(N, N);
    const Matrix& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < N; ++j) {
        const Complex d = r(j, j);
        const double m = std::abs(d);
        if (m > 0) q.col(j) *= d / m;
    }
    return q;
}

std::vector<std::size_t> largest_remainder(const std::vector<double>& weights, std::size_t n) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<std::size_t> counts(weights.size());
    std::vector<std::pair<double, std::size_t>> rem;
    std::size_t used = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double exact = static_cast<double>(n) * weights[i] / total;
        counts[i] = static_cast<std::size_t>(std::floor(exact));
        used += counts[i];
        rem.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; used < n && k < rem.size(); ++k, ++used) ++counts[rem[k].second];
    return counts;
}

Matrix sample_atomic_normal(std::size_t n, const SpectralMeasure& mu, Engine& rng) {
    if (!mu.is_atomic()) throw InvalidMeasure("atomic sampler needs an atomic measure");
    std::vector<double> w;
    for (const auto& a : mu.atoms()) w.push_back(a.weight);
    const auto counts = largest_remainder(w, n);
    Eigen::VectorXcd d(static_cast<Eigen::Index>(n));
    Eigen::Index pos = 0;
    for (std::size_t i = 0; i < counts.size(); ++i)
        for (std::size_t c = 0; c < counts[i]; ++c) d(pos++) = mu.atoms()[i].position;
    const Matrix u = sample_haar_unitary(n, rng);
    return u * d.asDiagonal() * u.adjoint();
}

Matrix sample_atomic_unitary(std::size_t n, const SpectralMeasure& mu_u, Engine& rng) {
    if (mu_u.support_kind() != SupportKind::UnitCircle)
        throw WrongSupportKind("sample_atomic_unitary needs a unit-circle measure");
    return sample_atomic_normal(n, mu_u, rng);
}

Matrix sample_atomic_positive(std::size_t n, const SpectralMeasure& mu_x, Engine& rng) {
    if (mu_x.support_kind() != SupportKind::NonnegativeHalfLine)
        throw WrongSupportKind("sample_atomic_positive needs a half-line measure");
    return sample_atomic_normal(n, mu_x, rng);
}

Matrix sample_b(std::size_t n, double t, Complex gamma, std::size_t k, Engine& rng) {
    if (k == 0) throw InvalidMeasure("sample_b needs k >= 1");
    const auto N = static_cast<Eigen::Index>(n);
    const double sk = std::sqrt(static_cast<double>(k));
    const Complex drift = 1.0 - gamma / (2.0 * static_cast<double>(k));
    Matrix b = Matrix::Identity(N, N);
    Matrix tmp(N, N);
    for (std::size_t j = 0; j < k; ++j) {
        const Matrix g = sample_elliptic(n, t, gamma, rng);
        tmp.noalias() = b * g;
        b = drift * b + Complex(0.0, 1.0 / sk) * tmp;
    }
    return b;
}

std::vector<Complex> eigenvalues(const Matrix& a) {
    if (a.rows() != a.cols()) throw InvalidMeasure("eigenvalues of a non-square matrix");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Matrix work = a;
    std::vector<Complex> w(static_cast<std::size_t>(n));
    Complex dummy;
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, w.data(),
                                          &dummy, 1, &dummy, 1);
    if (info != 0) throw Error("zgeev failed with info = " + std::to_string(info));
    return w;
}

std::vector<double> singular_values_squared(const Matrix& a, Complex lambda) {
    const Eigen::Index n = a.rows();
    Matrix s = a;
    s.diagonal().array() -= lambda;
    const Matrix m = s.adjoint() * s;
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::max(0.0, es.eigenvalues()(i));
    return out;
}

double empirical_S(const Matrix& a, Complex lambda, double eps) {
    const auto s2 = singular_values_squared(a, lambda);
    double s = 0.0;
    for (double v : s2) s += std::log(v + eps);
    return s / static_cast<double>(s2.size());
}

double empirical_dSde(const std::vector<double>& s2, double eps) {
    double s = 0.0;
    for (double v : s2) s += 1.0 / (v + eps);
    return s / static_cast<double>(s2.size());
}

double empirical_dSde(const Matrix& a, Complex lambda, double eps) {
    return empirical_dSde(singular_values_squared(a, lambda), eps);
}

EmpiricalSpectrum make_spectrum(const Matrix& a, const Ensemble& e) {
    EmpiricalSpectrum s;
    s.eigenvalues = eigenvalues(a);
    s.n = static_cast<std::size_t>(a.rows());
    s.ensemble = e;
    s.ensemble.n = s.n;
    return s;
}

nlohmann::json spectrum_to_json(const EmpiricalSpectrum& s) {
    nlohmann::json ev = nlohmann::json::array();
    for (const auto& z : s.eigenvalues) ev.push_back({z.real(), z.imag()});
    const auto& e = s.ensemble;
    return {{"n", s.n},
            {"ensemble",
             {{"kind", e.kind},
              {"n", e.n},
              {"t", e.t},
              {"gamma", {e.gamma.real(), e.gamma.imag()}},
              {"k", e.k},
              {"seed", e.seed},
              {"stream", e.stream}}},
            {"eigenvalues", ev}};
}

EmpiricalSpectrum spectrum_from_json(const nlohmann::json& doc) {
    EmpiricalSpectrum s;
    s.n = doc.at("n").get<std::size_t>();
    const auto& e = doc.at("ensemble");
    s.ensemble.kind = e.at("kind").get<std::string>();
    s.ensemble.n = e.at("n").get<std::size_t>();
    s.ensemble.t = e.at("t").get<double>();
    s.ensemble.gamma = {e.at("gamma")[0].get<double>(), e.at("gamma")[1].get<double>()};
    s.ensemble.k = e.at("k").get<std::size_t>();
    s.ensemble.seed = e.at("seed").get<std::uint64_t>();
    s.ensemble.stream = e.at("stream").get<std::uint64_t>();
    for (const auto& z : doc.at("eigenvalues")) s.eigenvalues.emplace_back(z[0].get<double>(), z[1].get<double>());
    if (s.eigenvalues.size() != s.n) throw FormatError("eigenvalue count does not match n");
    return s;
}

RegionTest whole_plane() {
    return {[](Complex) { return true; }, [](Complex) { return kInf; }};
}

RegionTest empty_region() {
    return {[](Complex) { return false; }, [](Complex) { return kInf; }};
}

RegionTest disk_region(Complex centre, double radius) {
    return {[=](Complex z) { return std::abs(z - centre) <= radius; },
            [=](Complex z) { return std::abs(std::abs(z - centre) - radius); }};
}

RegionTest annulus_region(double inner, double outer) {
    return {[=](Complex z) {
                const double r = std::abs(z);
                return r >= inner && r <= outer;
            },
            [=](Complex z) {
                const double r = std::abs(z);
                return std::min(std::abs(r - inner), std::abs(r - outer));
            }};
}

RegionTest boundary_region(const Boundary& b) {
    return {[b](Complex z) { return boundary_contains(b, z); },
            [b](Complex z) { return distance_to_boundary(b, z); }};
}

double support_report(const EmpiricalSpectrum& s, const RegionTest& region, double dilation) {
    if (s.eigenvalues.empty()) return 0.0;
    std::size_t inside = 0;
    for (const auto& z : s.eigenvalues)
        if (region.contains(z) || region.boundary_distance(z) <= dilation) ++inside;
    return static_cast<double>(inside) / static_cast<double>(s.eigenvalues.size());
}

std::vector<std::vector<double>> run_trials(std::size_t trials,
                                            const std::function<std::vector<double>(std::size_t)>& trial) {
    std::vector<std::vector<double>> out(trials);
    std::vector<std::exception_ptr> failures(trials);
    const long count = static_cast<long>(trials);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            out[k] = trial(k);
        } catch (...) {
            failures[k] = std::current_exception();
        }
    }
    for (auto& e : failures)
        if (e) std::rethrow_exception(e);
    return out;
}

std::vector<std::vector<double>> run_trials_serial(
    std::size_t trials, const std::function<std::vector<double>(std::size_t)>& trial) {
    std::vector<std::vector<double>> out;
    out.reserve(trials);
    for (std::size_t i = 0; i < trials; ++i) out.push_back(trial(i));
    return out;
}

}  // namespace brownscope
