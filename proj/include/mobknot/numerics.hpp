#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace mobknot {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecGrid = std::vector<Vec3>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr int kDefaultGridSize = 256;

/// Cascade (pairwise) summation. Fixed reduction order, so results are
/// reproducible and the error constant is O(log n) instead of O(n).
double pairwise_sum(std::span<const double> x);
Vec3 pairwise_sum(std::span<const Vec3> x);

/// Deterministic random source. Only raw mt19937_64 draws are mapped to
/// floats here; std distributions are avoided because their output is
/// implementation-defined and would break run-to-run reproducibility of
/// seeded reports.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform in [0,1).
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    const auto n = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(eng_() % n);
  }

  /// Standard normal via Box-Muller.
  double normal();

  /// Uniform direction on the unit sphere.
  Vec3 unit_vector();

  /// Haar-ish random rotation from a normalized quaternion of normals.
  Mat3 rotation();

private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Least-squares fit of sum_k c_k x^k (k = 0..degree) through (xs, ys),
/// returning the value at x = 0 and, if requested, the max |fit - y|.
double extrapolate_to_zero(std::span<const double> xs, std::span<const double> ys,
                           int degree, double* max_residual = nullptr);

/// Limit of the even part (g(s+sigma) + g(s-sigma))/2 as sigma -> 0,
/// extracted from three evaluations at sigma0, sigma0/2, sigma0/4 by fitting
/// {1, sigma, sigma^2}. The sigma^1 term keeps the fit honest at points where
/// the even part has a |sigma| cone instead of a smooth minimum.
double even_limit(const std::function<double(double)>& symmetric_avg, double sigma0);
Vec3 even_limit3(const std::function<Vec3(double)>& symmetric_avg, double sigma0);

/// Integrate f over [a, b] with 16-point Gauss-Legendre panels (n_panels >= 1).
double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                      int n_panels = 1);

}  // namespace mobknot
