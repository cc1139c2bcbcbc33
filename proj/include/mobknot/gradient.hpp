#pragma once

#include <optional>

#include "mobknot/conformal.hpp"
#include "mobknot/curve.hpp"
#include "mobknot/metric.hpp"

namespace mobknot {

enum class GradientRoute { pv, hadamard };

struct GradientField {
  TangentField g;
  GradientRoute route = GradientRoute::pv;
  std::vector<double> route_residual;  // filled when both routes are compared

  double max_norm() const;
};

/// Energy gradient as a principal-value integral:
///   G(s) = 2 p.v. int { 2 P_perp (f(t)-f(s))/chord^2 - W(s) } |f'(t)|/chord^2 dt,
/// W(s) the curvature vector of the parametrized curve at s. The integrand
/// has an odd 1/(t-s) singularity; the punctured symmetric trapezoid kills
/// it exactly on the uniform grid, and the omitted diagonal term is restored
/// from the even-part limit of the integrand (extracted by shrinking
/// symmetric evaluations), which upgrades the rule from O(h) to spectral.
GradientField grad_E_pv(KnotRef f);

/// The finite-part decomposition at one grid point:
///   u1 = 2 Pf int (f(t)-f(s))/chord^4 |f'(t)| dt
///      = int 2 [ Delta/chord^4 - W(s)/(2 chord^2) ] d(arc) + V(s) W(s),
///   u2 = -V(s) f''(s)/|f'(s)|^2,   u3/u4 = tangential compensators.
/// u1's regularized integrand still carries odd 1/sigma^3 and 1/sigma parts;
/// they cancel under a puncture symmetric in arc length, so the quadrature
/// runs on a uniform arc grid through the spectral arc-length inverse.
struct UComponents {
  Vec3 u1 = Vec3::Zero();
  Vec3 u2 = Vec3::Zero();
  Vec3 u3 = Vec3::Zero();
  Vec3 u4 = Vec3::Zero();

  Vec3 gradient() const { return 2.0 * (u1 + u2 + u3 + u4); }
};

UComponents u_components(const SampledKnot& f, int i, const PotentialProfile& v,
                         int oversample = 4);

/// Gradient assembled from the u-components; when `pv` is supplied the
/// pointwise difference against it is recorded as the route residual.
GradientField grad_E_hadamard(KnotRef f, const PotentialProfile& v,
                              const GradientField* pv = nullptr, int oversample = 4);

/// Phi^-1-weighted gradient. Returns the zero field when the knot is a round
/// circle at tolerance (the gradient vanishes there anyway); on non-circular
/// knots every weight value must clear 1e-12 * median(Phi), otherwise a
/// DegenerateWeightError lists the offending indices.
TangentField weighted_gradient(const GradientField& g, const WeightFunction& phi,
                               double roundness_value, double circle_tol = 1e-6,
                               double floor_factor = 1e-12);

enum class URule { u1, u2, u3, u4, grad_e };

/// A knot paired with its image under the unit-sphere inversion at the
/// origin, plus the potential profiles both sides of the inversion identity
/// need. Throws PoleError if the curve passes through the origin.
struct InversionPair {
  KnotRef f;
  KnotRef inverted;
  PotentialProfile v_f;
  PotentialProfile v_inverted;

  static InversionPair make(KnotRef f);
};

/// Evaluate a named component rule on a knot.
Vec3 u_rule_value(URule rule, const SampledKnot& f, int i, const PotentialProfile& v,
                  int oversample = 4);

/// Left side of the inversion identity:
///   J(u) = u(I o f, s) - |f(s)|^4 u(f, s) + 2 |f(s)|^2 (u(f,s), f(s)) f(s),
/// with u(I o f, s) recomputed on the inverted knot.
Vec3 J_operator(URule rule, const InversionPair& pair, int i);

/// Closed-form right sides of the inversion identities (V and position data
/// only; independent of the left-side recomputation).
Vec3 J_rhs(URule rule, const InversionPair& pair, int i);

/// Central difference (E(f + eps u) - E(f - eps u)) / (2 eps) with E by the
/// cosine route. eps <= 0 selects the default 1e-5 * length / max|u|.
double directional_derivative(const KnotCurve& f, const TangentField& u, double eps = 0.0);

}  // namespace mobknot
