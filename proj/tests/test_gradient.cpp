#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mobknot/energy.hpp"
#include "mobknot/gradient.hpp"
#include "oracles.hpp"

using namespace mobknot;

namespace {

TangentField smooth_normal_field(KnotRef f, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  VecGrid raw(f->size());
  Vec3 a[3], b[3];
  for (int k = 0; k < 3; ++k) {
    a[k] = scale * Vec3(rng.normal(), rng.normal(), rng.normal());
    b[k] = scale * Vec3(rng.normal(), rng.normal(), rng.normal());
  }
  for (int i = 0; i < f->size(); ++i) {
    const double t = static_cast<double>(i) / f->size();
    Vec3 v = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
      v += a[k] * std::cos(kTwoPi * (k + 1) * t) + b[k] * std::sin(kTwoPi * (k + 1) * t);
    }
    raw[i] = v;
  }
  return project_normal(raw, std::move(f));
}

}  // namespace

TEST_CASE("round circles are critical for both routes") {
  const auto f = make_knot(KnotCurve::circle(Vec3(0.4, -1.0, 0.3), 1.7, Vec3(1, 2, 0), 256));
  CHECK(grad_E_pv(f).max_norm() < 1e-6);
  const auto v = potential_V_cosine(*f);
  CHECK(grad_E_hadamard(f, v).max_norm() < 1e-6);
}

TEST_CASE("gradient scales like k^-2 under homothety and ignores translations") {
  const auto f = make_knot(KnotCurve::ellipse(2.0, 1.0, 256));
  const auto g = grad_E_pv(f);
  const double k = 2.0;
  const auto fk = make_knot(transform_curve(MoebiusTransform({Homothety{k}}), *f));
  const auto gk = grad_E_pv(fk);
  const auto ft = make_knot(
      transform_curve(MoebiusTransform({Translation{Vec3(3, -2, 5)}}), *f));
  const auto gt = grad_E_pv(ft);
  const double scale = g.max_norm();
  for (int i = 0; i < f->size(); i += 13) {
    CHECK((gk.g.vectors[i] - g.g.vectors[i] / (k * k)).norm() < 1e-6 * scale);
    CHECK((gt.g.vectors[i] - g.g.vectors[i]).norm() < 1e-8 * scale);
  }
}

TEST_CASE("directional derivatives of the energy match the gradient pairing") {
  for (const auto& curve :
       {KnotCurve::ellipse(2.0, 1.0, 256), KnotCurve::torus_knot(2, 3, 2.0, 1.0, 256),
        KnotCurve::perturbed_circle(0.2, 3, 256)}) {
    const auto f = make_knot(curve);
    const auto g = grad_E_pv(f);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const auto u = smooth_normal_field(f, seed, 0.05 * f->diameter());
      const double paired = l2_inner(u, g.g);
      const double fd = directional_derivative(curve, u);
      CHECK(fd == doctest::Approx(paired).epsilon(1e-4).scale(1.0));
    }
  }
}

TEST_CASE("u-components on the circle: u2 vanishes and the sum is zero") {
  const auto f = make_knot(KnotCurve::circle(Vec3::Zero(), 1.0, Vec3(0, 0, 1), 256));
  const auto v = potential_V_cosine(*f);
  for (int i = 0; i < f->size(); i += 37) {
    const auto u = u_components(*f, i, v);
    CHECK(u.u2.norm() < 1e-8);
    CHECK(u.gradient().norm() < 1e-6);
  }
}

TEST_CASE("the component sum reproduces the principal-value gradient") {
  for (const auto& curve :
       {KnotCurve::ellipse(2.0, 1.0, 256), KnotCurve::torus_knot(2, 3, 2.0, 1.0, 256)}) {
    const auto f = make_knot(curve);
    const auto pv = grad_E_pv(f);
    const auto v = potential_V_cosine(*f);
    const auto had = grad_E_hadamard(f, v, &pv);
    const double scale = 1.0 + pv.max_norm();
    CHECK(*std::max_element(had.route_residual.begin(), had.route_residual.end()) <
          1e-4 * scale);
  }
}

TEST_CASE("u3 is the tangential compensator of u1 by definition") {
  const auto f = make_knot(KnotCurve::ellipse(2.0, 1.0, 256));
  const auto v = potential_V_cosine(*f);
  const auto u = u_components(*f, 0, v);
  const Vec3 tau = f->d1()[0].normalized();
  CHECK((u.u3 + u.u1.dot(tau) * tau).norm() < 1e-12);
  // u1 + u3 and u2 + u4 are normal parts
  CHECK(std::abs((u.u1 + u.u3).dot(tau)) < 1e-10 * (1.0 + u.u1.norm()));
  CHECK(std::abs((u.u2 + u.u4).dot(tau)) < 1e-10 * (1.0 + u.u2.norm()));
}

TEST_CASE("inversion identities for all four components, and their cancellation") {
  // Ellipse moved away from the origin so the unit inversion is regular on it.
  const auto base = KnotCurve::ellipse(2.0, 1.0, 256);
  const auto moved = transform_curve(
      MoebiusTransform({Translation{Vec3(3.0, 0.6, 0.4)}}), SampledKnot(base));
  const auto pair = InversionPair::make(make_knot(moved));

  Rng rng(4);
  for (int rep = 0; rep < 10; ++rep) {
    const int i = rng.uniform_int(0, pair.f->size() - 1);
    for (const URule rule : {URule::u1, URule::u2, URule::u3, URule::u4}) {
      const Vec3 lhs = J_operator(rule, pair, i);
      const Vec3 rhs = J_rhs(rule, pair, i);
      CHECK((lhs - rhs).norm() < 1e-4 * (1.0 + rhs.norm()));
    }
    const Vec3 total = J_operator(URule::grad_e, pair, i);
    CHECK(total.norm() < 1e-4 * (1.0 + J_rhs(URule::u1, pair, i).norm()));
  }
}

TEST_CASE("inversion identity right side vanishes on an off-origin circle") {
  const auto pair = InversionPair::make(
      make_knot(KnotCurve::circle(Vec3(4, 1, 0.5), 1.2, Vec3(0, 0, 1), 256)));
  for (int i = 0; i < pair.f->size(); i += 61) {
    CHECK(J_rhs(URule::u1, pair, i).norm() < 1e-6);
    CHECK(J_operator(URule::u1, pair, i).norm() < 1e-4);
  }
}

TEST_CASE("weighted gradient is Moebius equivariant; the raw gradient is not") {
  const auto f = make_knot(KnotCurve::ellipse(2.0, 1.0, 256));
  const auto gf = grad_E_pv(f);
  const auto wf = weight_V3(potential_V_cosine(*f));
  const double rf = roundness(*f);
  const auto inv_grad_f = weighted_gradient(gf, wf, rf);
  const double scale = 0.0 + [&] {
    double m = 0.0;
    for (const Vec3& v : inv_grad_f.vectors) m = std::max(m, v.norm());
    return m;
  }();

  for (std::uint64_t seed = 2500; seed < 2510; ++seed) {
    const auto t = random_compact_preserving(seed, *f);
    const auto push = pushforward(t, *f, inv_grad_f.vectors);
    const auto gt = grad_E_pv(push.base);
    const auto wt = weight_V3(potential_V_cosine(*push.base));
    const auto inv_grad_t = weighted_gradient(gt, wt, roundness(*push.base));
    double worst = 0.0;
    for (int i = 0; i < f->size(); ++i) {
      worst = std::max(worst, (inv_grad_t.vectors[i] - push.vectors[i]).norm());
    }
    CHECK(worst / scale < 1e-4);
  }

  // Negative control: raw gradients scale by k^-2 while the pushforward
  // scales by k, so the mismatch under a homothety is exactly k^-3.
  const double k = 2.0;
  const auto fk = make_knot(transform_curve(MoebiusTransform({Homothety{k}}), *f));
  const auto gk = grad_E_pv(fk);
  CHECK(gk.max_norm() / (k * gf.max_norm()) == doctest::Approx(1.0 / (k * k * k)).epsilon(0.01));
}

TEST_CASE("weighted pairing identity and circle/degenerate guards") {
  const auto f = make_knot(KnotCurve::ellipse(2.0, 1.0, 256));
  const auto g = grad_E_pv(f);
  const auto w = weight_V3(potential_V_cosine(*f));
  const auto ig = weighted_gradient(g, w, roundness(*f));
  for (std::uint64_t seed = 10; seed < 14; ++seed) {
    const auto u = smooth_normal_field(f, seed);
    CHECK(weighted_inner(u, ig, w) ==
          doctest::Approx(l2_inner(u, g.g)).epsilon(1e-8));
  }

  const auto circ = make_knot(KnotCurve::circle(Vec3::Zero(), 1.0, Vec3(0, 0, 1), 256));
  const auto gc = grad_E_pv(circ);
  const auto wc = weight_V3(potential_V_cosine(*circ));
  const auto igc = weighted_gradient(gc, wc, roundness(*circ));
  for (const Vec3& v : igc.vectors) CHECK(v.norm() == 0.0);

  WeightFunction dipped = w;
  dipped.values[7] = 0.0;
  try {
    (void)weighted_gradient(g, dipped, roundness(*f));
    CHECK(false);
  } catch (const DegenerateWeightError& e) {
    REQUIRE(e.indices().size() == 1);
    CHECK(e.indices()[0] == 7);
  }
}

TEST_CASE("perturbed curves that break the knot invariants are rejected") {
  const auto curve = KnotCurve::ellipse(2.0, 1.0, 64);
  const auto f = make_knot(curve);
  TangentField u = smooth_normal_field(f, 3, 100.0);  // absurdly large field
  CHECK_THROWS_AS((void)directional_derivative(curve, u, 0.5), Error);
}
