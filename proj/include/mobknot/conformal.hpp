#pragma once

#include <vector>

#include "mobknot/curve.hpp"
#include "mobknot/moebius.hpp"
#include "mobknot/mu.hpp"
#include "mobknot/numerics.hpp"

namespace mobknot {

/// 1 - cos of the conformal angle between the tangent circles at (p_s, tau_s)
/// and (p_t, tau_t), both through the two points. Computed as the
/// reflected-tangent form
///   1 - (2 <e,tau_s><e,tau_t> - <tau_s,tau_t>),   e = chord direction,
/// which is a smooth rational expression in the curve data (no arccos), so
/// the round circle gives exactly 0 and quadratures of it stay spectral.
double one_minus_cos_angle(const Vec3& ps, const Vec3& tau_s, const Vec3& pt,
                           const Vec3& tau_t);

/// Conformal angle theta in [0, pi] between grid points i != j.
double conformal_angle(const SampledKnot& f, int i, int j);

/// Full N x N angle grid; the diagonal is 0 by convention.
struct AngleField {
  int n = 0;
  std::vector<double> theta;  // row-major
  double operator()(int i, int j) const { return theta[static_cast<std::size_t>(i) * n + j]; }
};

AngleField conformal_angle_field(const SampledKnot& f);

/// Circle (or line) through p and q tangent to `dir` at p.
struct CircleRecord {
  bool is_line = false;
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  Vec3 normal = Vec3::Zero();  // oriented so the tangent at p is +dir
  Vec3 line_dir = Vec3::Zero();
};

CircleRecord tangent_circle_through(const Vec3& p, const Vec3& dir, const Vec3& q);

enum class PotentialMethod { cosine, hadamard };

struct PotentialProfile {
  std::vector<double> v;
  PotentialMethod method = PotentialMethod::cosine;
  double max_fit_residual = 0.0;        // hadamard diagnostics
  std::vector<uint8_t> flagged;         // per-point extrapolation flags
};

/// Regularized r^-2 potential via the cosine formula,
///   V(s) = int (1 - cos theta) / chord^2 |f'(t)| dt,
/// trapezoid on the grid with the (vanishing) diagonal entry set to 0.
PotentialProfile potential_V_cosine(const SampledKnot& f);

/// Same integral evaluated at an arbitrary parameter s: the quadrature grid
/// is shifted so one node lands exactly on s.
double potential_V_cosine_at(const SampledKnot& f, double s);

/// mu-kernel potential int mu(theta)/chord^2 |f'(t)| dt at arbitrary s, on a
/// grid oversampled by the given factor and shifted onto s. The diagonal
/// node takes the continuous limit of the integrand (extracted numerically),
/// not 0: kernels with mu'(0) != 0 have a nonzero limit there and dropping
/// it costs an O(h) bias.
double mu_potential_at(const SampledKnot& f, double s, const MuKernel& mu, int oversample);

/// Truncated potential: the integral over arc_distance >= eps minus the 2/eps
/// counterterm. The cut sits at exact arc length eps on both sides (the cut
/// parameters come from the spectral arc-length inverse), so there are no
/// partial quadrature cells and the eps expansion stays purely odd.
/// Requires eps >= two grid spacings of arc and eps < length/2.
double potential_V_truncated(const SampledKnot& f, int i, double eps);

struct HadamardConfig {
  // Geometric eps ladder, coarsest = coarsest_fraction * length. The ladder
  // deliberately descends below the grid spacing: the truncated integrals are
  // evaluated from the spectral representation, which stays accurate there,
  // and the extrapolation model error scales like the fifth power of the
  // coarsest fitted eps.
  int levels = 6;
  double ratio = 0.5;
  double coarsest_fraction = 1.0 / 32.0;
  int fit_points = 4;  // finest levels used for the value
  double residual_tol = 1e-5;
};

struct HadamardV {
  double value = 0.0;
  double fit_residual = 0.0;  // |cubic fit - quadratic fit| convergence gap
  bool flagged = false;
};

/// Hadamard finite part: extrapolate the truncated values over a geometric
/// eps ladder to eps = 0 with a polynomial model in eps.
HadamardV potential_V_hadamard(const SampledKnot& f, int i, const HadamardConfig& cfg = {});

PotentialProfile potential_V_hadamard_profile(const SampledKnot& f,
                                              const HadamardConfig& cfg = {});

/// Residual grid of |V(T o f, t_i) - |T'(f(t_i))|^-2 V(f, t_i)| (cosine route
/// on both sides).
std::vector<double> v_scaling_residual(const MoebiusTransform& t, const SampledKnot& f);

}  // namespace mobknot
