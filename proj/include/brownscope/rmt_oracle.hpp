#pragma once

// Finite-n random matrix samplers and empirical spectral statistics.

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "brownscope/measure.hpp"
#include "brownscope/region.hpp"

namespace brownscope {

using Matrix = Eigen::MatrixXcd;
using Engine = std::mt19937_64;

/// Independent engine per (seed, stream) so parallel draws do not depend on order.
Engine make_engine(std::uint64_t seed, std::uint64_t stream);

/// i.i.d. complex Gaussian entries of variance t/n.
Matrix sample_ginibre(std::size_t n, double t, Engine& rng);
/// Hermitian with E|X_ij|^2 = 1/n (semicircle of variance 1).
Matrix sample_gue(std::size_t n, Engine& rng);
/// e^{i theta}(a X + i b Y) with a^2 = (t + |gamma|)/2, b^2 = (t - |gamma|)/2,
/// theta = arg(gamma)/2. BadGamma when |gamma| > t.
Matrix sample_elliptic(std::size_t n, double t, Complex gamma, Engine& rng);
/// QR of a Ginibre matrix with the phases of diag(R) divided out.
Matrix sample_haar_unitary(std::size_t n, Engine& rng);
/// Multiplicities n*w rounded by largest remainder, summing to n.
std::vector<std::size_t> largest_remainder(const std::vector<double>& weights, std::size_t n);
/// U diag(atoms) U^* with U Haar and atom multiplicities by largest remainder.
Matrix sample_atomic_unitary(std::size_t n, const SpectralMeasure& mu_u, Engine& rng);
Matrix sample_atomic_positive(std::size_t n, const SpectralMeasure& mu_x, Engine& rng);
/// Same construction for any atomic measure (used for Hermitian x as well).
Matrix sample_atomic_normal(std::size_t n, const SpectralMeasure& mu, Engine& rng);
/// prod_{j=1..k} (I + i G_j / sqrt(k) - gamma/(2k) I), G_j elliptic(t, gamma).
Matrix sample_b(std::size_t n, double t, Complex gamma, std::size_t k, Engine& rng);

/// Eigenvalues of a general complex matrix (LAPACK zgeev).
std::vector<Complex> eigenvalues(const Matrix& a);
/// Squared singular values of a - lambda I, clamped at 0.
std::vector<double> singular_values_squared(const Matrix& a, Complex lambda);

/// (1/n) sum log(s_i^2 + eps) over singular values of a - lambda.
double empirical_S(const Matrix& a, Complex lambda, double eps);
/// (1/n) sum 1/(s_i^2 + eps).
double empirical_dSde(const Matrix& a, Complex lambda, double eps);
double empirical_dSde(const std::vector<double>& s2, double eps);

struct Ensemble {
    std::string kind;
    std::size_t n = 0;
    double t = 0.0;
    Complex gamma = 0.0;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

struct EmpiricalSpectrum {
    std::vector<Complex> eigenvalues;
    std::size_t n = 0;
    Ensemble ensemble;
};

EmpiricalSpectrum make_spectrum(const Matrix& a, const Ensemble& e);
nlohmann::json spectrum_to_json(const EmpiricalSpectrum& s);
EmpiricalSpectrum spectrum_from_json(const nlohmann::json& doc);

/// A region given by a membership test and a distance to its boundary.
struct RegionTest {
    std::function<bool(Complex)> contains;
    std::function<double(Complex)> boundary_distance;
};
RegionTest whole_plane();
RegionTest empty_region();
RegionTest disk_region(Complex centre, double radius);
RegionTest annulus_region(double inner, double outer);
RegionTest boundary_region(const Boundary& b);

/// Fraction of eigenvalues inside the region dilated by `dilation`.
double support_report(const EmpiricalSpectrum& s, const RegionTest& region, double dilation);

/// Runs trial(i) for i in [0, trials) across OpenMP threads; results in trial order.
std::vector<std::vector<double>> run_trials(std::size_t trials,
                                            const std::function<std::vector<double>(std::size_t)>& trial);
std::vector<std::vector<double>> run_trials_serial(
    std::size_t trials, const std::function<std::vector<double>(std::size_t)>& trial);

}  // namespace brownscope
