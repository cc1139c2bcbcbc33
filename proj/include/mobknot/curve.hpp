#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "mobknot/errors.hpp"
#include "mobknot/numerics.hpp"

namespace mobknot {

/// Orientation-preserving diffeomorphism of the circle,
///   rho(t) = t + a*sin(2*pi*t + b)/(2*pi),  |a| < 1,
/// used as the input generator for parametrization-independence tests.
struct ReparamMap {
  double a = 0.0;
  double b = 0.0;

  ReparamMap() = default;
  ReparamMap(double a_, double b_);

  double operator()(double t) const;
  double deriv(double t) const;
};

/// Truncated real Fourier series for one closed space curve: per coordinate,
/// coefficient pairs (cos, sin) for modes 0..M. Mode 0 has sin coefficient 0.
struct FourierSeries3 {
  std::vector<Vec3> cosc;  // cosc[k] multiplies cos(2*pi*k*t)
  std::vector<Vec3> sinc;  // sinc[k] multiplies sin(2*pi*k*t); sinc[0] == 0

  int modes() const { return static_cast<int>(cosc.size()) - 1; }

  /// Evaluate the series or its termwise derivative of the given order (0..3).
  Vec3 eval(double t, int order = 0) const;
};

class SampledKnot;

/// Spectral representation of a closed curve f : S^1 = R/Z -> R^3 together
/// with its quadrature grid size N (even). Immutable after construction.
///
/// Valid knots are immersed (min |f'| > 1e-8 * length) and embedded at grid
/// scale: grid points whose arc separation exceeds four grid spacings must
/// stay at least 1e-6 * length apart.
class KnotCurve {
public:
  /// Interpolating Fourier fit through N uniformly spaced samples
  /// (modes 0..N/2-1). Throws InvalidKnotError for non-immersed or
  /// self-touching grids, with the offending indices.
  static KnotCurve from_samples(const VecGrid& points);

  /// Wrap explicit coefficients (IO path). Validates the knot invariants.
  static KnotCurve from_coeffs(FourierSeries3 series, int grid_size);

  // Presets. All validate; torus_knot requires gcd(p,q) == 1.
  static KnotCurve circle(const Vec3& center, double radius, const Vec3& axis,
                          int grid_size = kDefaultGridSize);
  static KnotCurve ellipse(double a, double b, int grid_size = kDefaultGridSize);
  static KnotCurve torus_knot(int p, int q, double big_radius, double small_radius,
                              int grid_size = kDefaultGridSize);
  static KnotCurve perturbed_circle(double amplitude, int mode,
                                    int grid_size = kDefaultGridSize);

  int grid_size() const { return grid_size_; }
  int modes() const { return series_.modes(); }
  const FourierSeries3& series() const { return series_; }

  Vec3 eval(double t, int order = 0) const { return series_.eval(t, order); }

  /// Re-fit the same curve on a different grid size.
  KnotCurve with_grid_size(int n) const;

  /// Same coefficients on a finer grid (zero padding, exact). Skips
  /// re-validation: the curve was validated at construction.
  KnotCurve padded_to(int n) const;

private:
  KnotCurve(FourierSeries3 series, int grid_size)
      : series_(std::move(series)), grid_size_(grid_size) {}

  FourierSeries3 series_;
  int grid_size_ = 0;
};

/// Uniform-grid evaluation of a KnotCurve: f, f', f'', f''' plus speed and
/// arc-length tables. This is the workhorse object all quadratures consume.
/// Arc length is integrated spectrally (exact integral of the trigonometric
/// interpolant of |f'|), so cum_arclen carries no O(h^2) partial-sum error.
class SampledKnot {
public:
  explicit SampledKnot(KnotCurve curve);

  const KnotCurve& curve() const { return curve_; }
  int size() const { return n_; }
  double h() const { return 1.0 / n_; }

  const VecGrid& points() const { return points_; }
  const VecGrid& d1() const { return d1_; }
  const VecGrid& d2() const { return d2_; }
  const VecGrid& d3() const { return d3_; }
  const std::vector<double>& speed() const { return speed_; }
  const std::vector<double>& cum_arclen() const { return cum_; }
  double total_len() const { return total_len_; }

  Vec3 eval(double t, int order = 0) const { return curve_.eval(t, order); }

  /// Arc length from parameter 0 to t (t may lie outside [0,1)).
  double arc_of(double t) const;
  /// Speed of the trigonometric interpolant at arbitrary t.
  double speed_at(double t) const;
  /// Inverse of arc_of: parameter u in [0,1) with arc_of(u) = s (mod L).
  double param_at_arc(double s) const;

  /// f(t) - f(s) assembled from per-mode trig differences. For |t - s| far
  /// below the grid scale this keeps full relative accuracy where the plain
  /// difference of two eval() calls would cancel catastrophically.
  Vec3 eval_diff(double t, double s) const;
  /// Signed arc length from s to t (same difference identities).
  double arc_diff(double t, double s) const;

  /// f(s + dt) - f(s) with the offset dt supplied directly, so it keeps its
  /// own full precision instead of the absolute parameter's. Singular-kernel
  /// quadratures divide by powers of the offset and need this.
  Vec3 eval_diff_offset(double s, double dt) const;
  /// Signed arc from s to s + dt, offset-based.
  double arc_diff_offset(double s, double dt) const;

  /// Shorter-arc distance between grid points i and j.
  double arc_distance(int i, int j) const;
  /// Forward arc length from grid point i to grid point j.
  double arc_forward(int i, int j) const;

  /// Twice the max distance from the centroid; cheap scale reference.
  double diameter() const { return diameter_; }
  Vec3 centroid() const { return centroid_; }

  /// FNV-1a over the point grid; used to detect base mismatches.
  std::uint64_t content_hash() const { return hash_; }

private:
  KnotCurve curve_;
  int n_;
  VecGrid points_, d1_, d2_, d3_;
  std::vector<double> speed_, cum_;
  double total_len_ = 0.0;
  double diameter_ = 0.0;
  Vec3 centroid_ = Vec3::Zero();
  std::uint64_t hash_ = 0;

  // Fourier coefficients of the speed grid (for arc_of / param_at_arc).
  std::vector<double> sp_cos_, sp_sin_;
};

using KnotRef = std::shared_ptr<const SampledKnot>;

/// Sample a curve and share the result.
KnotRef make_knot(KnotCurve curve);

/// Throws InvalidKnotError if the sampled grid violates the immersion or
/// embedding invariants.
void validate_knot(const SampledKnot& f);

/// New curve with the same image whose parametrization has constant speed
/// (|f'| == total length) up to spectral accuracy.
KnotCurve resample_by_arclength(const KnotCurve& curve);

/// Precompose with a diffeomorphism of S^1; the image is unchanged.
KnotCurve reparametrize(const KnotCurve& curve, const ReparamMap& rho);

/// Best-fit circle of the sampled grid: plane through the centroid from the
/// second-moment eigenvectors, then an algebraic (Kasa) center/radius fit in
/// that plane.
struct CircleFit {
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
  double radius = 0.0;
  double rms = 0.0;  // RMS of in-plane radial residual and out-of-plane height
};

CircleFit fit_circle(const SampledKnot& f);

/// Normalized deviation from the best-fit circle: rms / radius. Zero exactly
/// when the grid lies on a round circle. Throws InvalidArgumentError for
/// degenerate (collinear or coincident) point clouds.
double roundness(const SampledKnot& f);

}  // namespace mobknot
