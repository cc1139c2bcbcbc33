#pragma once

#include <functional>
#include <vector>

#include "mobknot/conformal.hpp"
#include "mobknot/curve.hpp"
#include "mobknot/moebius.hpp"
#include "mobknot/mu.hpp"

namespace mobknot {

/// Element of the tangent space at a knot: a grid of vectors with
/// u(t_i) perpendicular to f'(t_i).
struct TangentField {
  KnotRef base;
  VecGrid vectors;

  int size() const { return static_cast<int>(vectors.size()); }
};

/// Pointwise orthogonal projection of a raw vector grid onto the normal
/// bundle of f.
TangentField project_normal(const VecGrid& raw, KnotRef base);

/// Throws GridMismatchError unless both fields live on the same sampled knot
/// (content hash, not pointer identity).
void require_same_base(const TangentField& u, const TangentField& v);

/// L^2 inner product (u, v)_f = int (u, v) |f'| dt.
double l2_inner(const TangentField& u, const TangentField& v);

enum class WeightKind { v_cubed, phi0, psi_cubed, conformal_arclength };

/// Pointwise positive weight on the grid. `param_independent` records
/// whether the construction depends only on the image of the knot
/// (phi0 = |f'|^-3 does not).
struct WeightFunction {
  WeightKind kind = WeightKind::v_cubed;
  std::vector<double> values;
  bool param_independent = true;
  std::vector<uint8_t> degenerate_flags;  // conformal weight: curvature-degenerate points
  std::string mu_name;                    // psi_cubed only

  int size() const { return static_cast<int>(values.size()); }
};

/// <u, v>_Phi = int (u, v) Phi |f'| dt.
double weighted_inner(const TangentField& u, const TangentField& v,
                      const WeightFunction& phi);

/// Cube of the regularized r^-2 potential.
WeightFunction weight_V3(const PotentialProfile& profile);

/// Phi_0 = |f'|^-3: Moebius-covariant but parametrization dependent.
WeightFunction weight_phi0(const SampledKnot& f);

/// Psi^3 from a mu kernel: Psi(s) = int mu(theta)/chord^2 |f'(t)| dt, cubed.
WeightFunction weight_psi_mu(const SampledKnot& f, const MuKernel& mu, int oversample = 16);

/// Curvature/torsion data. tau is left undefined (flagged) where kappa falls
/// below 1e-6 / length; kappa' is the arc-length derivative, computed by
/// spectral differentiation of the curvature grid.
struct FrenetData {
  std::vector<double> kappa, tau, kappa_prime;
  std::vector<uint8_t> tau_defined;

  // Fourier coefficients of the kappa grid, for off-grid evaluation.
  std::vector<double> kappa_cos, kappa_sin;
};

FrenetData frenet(const SampledKnot& f);

/// Conformal arc-length weight (kappa'^2 + kappa^2 tau^2)^(3/4). At
/// tau-degenerate indices the torsion term is dropped and the index flagged.
WeightFunction weight_conformal(const FrenetData& fd, const SampledKnot& f);

/// Weight value at arbitrary parameter, per kind (used by the
/// parametrization-independence checks).
double phi0_at(const SampledKnot& f, double s);
double conformal_weight_at(const FrenetData& fd, const SampledKnot& f, double s);

using WeightBuilder = std::function<WeightFunction(const SampledKnot&)>;

/// Residual grid of |Phi(T o f, t_i) |T'(f(t_i))|^6 - Phi(f, t_i)|: the
/// covariance condition that makes <.,.>_Phi Moebius invariant.
std::vector<double> check_weight_condition(const WeightBuilder& builder,
                                           const MoebiusTransform& t,
                                           const SampledKnot& f);

}  // namespace mobknot
