#pragma once

#include <variant>
#include <vector>

#include "mobknot/curve.hpp"
#include "mobknot/numerics.hpp"

namespace mobknot {

// Primitive conformal maps of R^3 u {inf}. A transform is a word of these,
// applied left to right; conformal factors and Jacobians compose by the
// chain rule through exact per-primitive formulas, which avoids committing
// to a matrix representation of the conformal group.

struct Translation {
  Vec3 v = Vec3::Zero();
};

struct Rotation {
  Mat3 m = Mat3::Identity();  // orthogonal, det +-1
};

struct Homothety {
  double k = 1.0;  // k > 0
};

struct SphereInversion {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;  // > 0
};

using Primitive = std::variant<Translation, Rotation, Homothety, SphereInversion>;

class MoebiusTransform {
public:
  MoebiusTransform() = default;
  explicit MoebiusTransform(std::vector<Primitive> word);

  MoebiusTransform& push(Primitive p);

  const std::vector<Primitive>& word() const { return word_; }
  bool empty() const { return word_.empty(); }

  /// Image of a point. Throws PoleError when the running point comes within
  /// pole_tol of an inversion center (relative to that inversion's radius
  /// unless an absolute scale is supplied).
  Vec3 apply(const Vec3& p) const;

  /// |T'(p)| = |det DT(p)|^(1/6), as the chain-rule product of the
  /// per-primitive factors (1 for isometries, sqrt(k) for homotheties,
  /// r/|C-p| for inversions).
  double conformal_factor(const Vec3& p) const;

  /// Full Jacobian DT(p), composed from exact primitive Jacobians.
  Mat3 jacobian(const Vec3& p) const;

  /// Relative tolerance for pole detection; a running point q trips the
  /// error when |q - C| < pole_tol * scale. `scale` defaults to each
  /// inversion's own radius.
  static constexpr double kPoleTol = 1e-9;

private:
  std::vector<Primitive> word_;
};

/// |T(p) - T(q)| - |T'(p)||T'(q)||p - q|; vanishes identically for Moebius
/// transforms, so the return value is a pure numerical residual.
double distance_identity_residual(const MoebiusTransform& t, const Vec3& p, const Vec3& q);

/// Pointwise residual grid of |(T o f)'(t)| - |T'(f(t))|^2 |f'(t)|, with the
/// left side from spectral differentiation of the re-fitted image curve.
std::vector<double> speed_identity_residual(const MoebiusTransform& t, const SampledKnot& f);

/// Transform a curve: apply T to the sample grid and re-fit. Throws PoleError
/// if any grid point comes within kPoleTol * diameter of an inversion center.
KnotCurve transform_curve(const MoebiusTransform& t, const SampledKnot& f);

/// Pushforward grid DT(f(t_i)) * u_i, re-based on the transformed knot. The
/// vectors are re-projected onto the transformed tangent complement, which
/// changes them only at the refit error scale.
struct PushforwardField {
  KnotRef base;          // T o f
  VecGrid vectors;       // T_* u on the grid
};

PushforwardField pushforward(const MoebiusTransform& t, const SampledKnot& f,
                             const VecGrid& u);

/// Seeded random word of at most four primitives that keeps the image of f
/// compact with a margin: inversion centers stay at least two diameters away
/// from the running image, homothety factors stay in [1/2, 2].
MoebiusTransform random_compact_preserving(std::uint64_t seed, const SampledKnot& f);

}  // namespace mobknot
