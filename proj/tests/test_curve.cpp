#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mobknot/curve.hpp"
#include "oracles.hpp"

using namespace mobknot;

namespace {

double max_coeff_outside(const FourierSeries3& s, std::initializer_list<int> keep) {
  double worst = 0.0;
  for (int k = 0; k <= s.modes(); ++k) {
    bool kept = false;
    for (int kk : keep) kept |= (kk == k);
    if (kept) continue;
    worst = std::max({worst, s.cosc[k].cwiseAbs().maxCoeff(), s.sinc[k].cwiseAbs().maxCoeff()});
  }
  return worst;
}

double round_trip_error(const KnotCurve& c, const VecGrid& pts) {
  const SampledKnot f(c);
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    worst = std::max(worst, (f.points()[i] - pts[i]).norm());
    scale = std::max(scale, pts[i].norm());
  }
  return worst / scale;
}

}  // namespace

TEST_CASE("unit circle fit keeps only mode one") {
  const auto c = KnotCurve::circle(Vec3::Zero(), 1.0, Vec3(0, 0, 1), 256);
  VecGrid pts(256);
  for (int i = 0; i < 256; ++i) pts[i] = c.eval(i / 256.0);
  const auto refit = KnotCurve::from_samples(pts);
  CHECK(max_coeff_outside(refit.series(), {1}) < 1e-12);
  CHECK(refit.series().cosc[1].norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(round_trip_error(refit, pts) < 1e-12);
}

TEST_CASE("ellipse fit is mode one with amplitudes (2,1,0)") {
  const auto c = KnotCurve::ellipse(2.0, 1.0, 256);
  CHECK(max_coeff_outside(c.series(), {1}) < 1e-12);
  CHECK(c.series().cosc[1].x() == doctest::Approx(2.0));
  CHECK(c.series().sinc[1].y() == doctest::Approx(1.0));
}

TEST_CASE("(2,3) torus knot has the analytically expanded coefficients") {
  // (2 + cos(3*2pi t)) cos(2*2pi t) expands by product-to-sum into modes
  // {1, 2, 5}; z = sin(3*2pi t) is mode 3. Expected amplitudes are frozen
  // from that expansion.
  const auto c = KnotCurve::torus_knot(2, 3, 2.0, 1.0, 256);
  const auto& s = c.series();
  CHECK(max_coeff_outside(s, {1, 2, 3, 5}) < 1e-12);
  CHECK(s.cosc[1].x() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.sinc[1].y() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(s.cosc[2].x() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.sinc[2].y() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.sinc[3].z() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.cosc[5].x() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.sinc[5].y() == doctest::Approx(0.5).epsilon(1e-12));

  VecGrid pts(256);
  for (int i = 0; i < 256; ++i) {
    const double t = i / 256.0;
    const double w = 2.0 + std::cos(3 * kTwoPi * t);
    pts[i] = Vec3(w * std::cos(2 * kTwoPi * t), w * std::sin(2 * kTwoPi * t),
                  std::sin(3 * kTwoPi * t));
  }
  CHECK(round_trip_error(c, pts) < 1e-12);
}

TEST_CASE("circle derivatives: constant speed 2*pi, centripetal acceleration") {
  const SampledKnot f(KnotCurve::circle(Vec3::Zero(), 1.0, Vec3(0, 0, 1), 256));
  for (int i = 0; i < f.size(); i += 17) {
    CHECK(f.speed()[i] == doctest::Approx(kTwoPi).epsilon(1e-13));
    CHECK(f.d2()[i].norm() == doctest::Approx(kTwoPi * kTwoPi).epsilon(1e-13));
    CHECK(std::abs(f.d1()[i].dot(f.d2()[i])) < 1e-9);
  }
}

TEST_CASE("ellipse speed matches the hand-differentiated closed form") {
  const SampledKnot f(KnotCurve::ellipse(2.0, 1.0, 256));
  auto closed_form = [](double t) {
    const double s = std::sin(kTwoPi * t), c = std::cos(kTwoPi * t);
    return kTwoPi * std::sqrt(4.0 * s * s + c * c);
  };
  CHECK(f.speed()[0] == doctest::Approx(closed_form(0.0)).epsilon(1e-13));
  CHECK(f.speed()[64] == doctest::Approx(closed_form(0.25)).epsilon(1e-13));
}

TEST_CASE("arc distances: antipodal circle points and ellipse quarter by quadrature") {
  const SampledKnot circ(KnotCurve::circle(Vec3::Zero(), 1.0, Vec3(0, 0, 1), 256));
  CHECK(circ.arc_distance(0, 128) == doctest::Approx(M_PI).epsilon(1e-12));
  CHECK(circ.arc_distance(37, 37) == 0.0);

  const SampledKnot ell(KnotCurve::ellipse(2.0, 1.0, 256));
  const double quarter = oracles::integrate(
      [](double t) {
        const double s = std::sin(kTwoPi * t), c = std::cos(kTwoPi * t);
        return kTwoPi * std::sqrt(4.0 * s * s + c * c);
      },
      0.0, 0.25, 1e-13);
  CHECK(ell.arc_distance(0, 64) == doctest::Approx(quarter).epsilon(1e-9));
}

TEST_CASE("arc distance is symmetric, bounded by half length, triangle inequality") {
  const SampledKnot f(KnotCurve::torus_knot(2, 3, 2.0, 1.0, 128));
  const double bound = f.total_len() / 2 + f.total_len() / f.size();
  for (int i = 0; i < f.size(); i += 13) {
    for (int j = 0; j < f.size(); j += 17) {
      CHECK(f.arc_distance(i, j) == doctest::Approx(f.arc_distance(j, i)).epsilon(1e-14));
      CHECK(f.arc_distance(i, j) <= bound);
      const int k = (i * 5 + j * 3 + 29) % f.size();
      CHECK(f.arc_distance(i, j) <=
            f.arc_distance(i, k) + f.arc_distance(k, j) + 1e-12);
    }
  }
}

TEST_CASE("finite differences of the grid agree with spectral d1 at order h^2") {
  auto fd_error = [](int n) {
    const SampledKnot f(KnotCurve::torus_knot(2, 3, 2.0, 1.0, n));
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vec3 fd =
          (f.points()[(i + 1) % n] - f.points()[(i + n - 1) % n]) * (0.5 * n);
      worst = std::max(worst, (fd - f.d1()[i]).norm());
    }
    return worst;
  };
  const double e1 = fd_error(128), e2 = fd_error(256);
  CHECK(e1 / e2 > 3.5);  // second-order decay when N doubles
  CHECK(e2 < 1.0);
}

TEST_CASE("resample_by_arclength gives constant speed, keeps the image, idempotent") {
  const auto curve = KnotCurve::ellipse(2.0, 1.0, 256);
  const auto res = resample_by_arclength(curve);
  const SampledKnot f(res);
  const double len = f.total_len();
  for (int i = 0; i < f.size(); i += 7) {
    CHECK(f.speed()[i] == doctest::Approx(len).epsilon(1e-6));
  }
  CHECK(len == doctest::Approx(SampledKnot(curve).total_len()).epsilon(1e-9));

  // Image preservation: project every resampled grid point back onto the
  // source curve (dense seed + Newton on (c(t)-p).c'(t) = 0).
  double worst = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    const Vec3 p = f.points()[i];
    double best_t = 0.0, best = 1e300;
    for (int m = 0; m < 2048; ++m) {
      const double d = (p - curve.eval(m / 2048.0)).squaredNorm();
      if (d < best) {
        best = d;
        best_t = m / 2048.0;
      }
    }
    double t = best_t;
    for (int it = 0; it < 8; ++it) {
      const Vec3 c = curve.eval(t), c1 = curve.eval(t, 1), c2 = curve.eval(t, 2);
      const double g = (c - p).dot(c1);
      const double gp = c1.squaredNorm() + (c - p).dot(c2);
      t -= g / gp;
    }
    worst = std::max(worst, (p - curve.eval(t)).norm());
  }
  CHECK(worst < 1e-8 * len);

  const auto again = resample_by_arclength(res);
  const SampledKnot g(again);
  for (int i = 0; i < g.size(); i += 7) {
    CHECK(g.speed()[i] == doctest::Approx(f.speed()[i]).epsilon(1e-6));
  }
}

TEST_CASE("reparametrize keeps the image and the total length") {
  const auto curve = KnotCurve::torus_knot(2, 3, 2.0, 1.0, 256);
  const ReparamMap rho(0.3, 1.1);
  const auto rep = reparametrize(curve, rho);
  const SampledKnot f(rep), g(curve);
  CHECK(f.total_len() == doctest::Approx(g.total_len()).epsilon(1e-8));
  for (int i = 0; i < f.size(); i += 31) {
    const double t = i / 256.0;
    CHECK((f.points()[i] - curve.eval(rho(t))).norm() < 1e-9);
  }
}

TEST_CASE("reparam map validates its slope bound") {
  CHECK_THROWS_AS(ReparamMap(1.2, 0.0), InvalidArgumentError);
  const ReparamMap rho(0.7, 0.3);
  for (int i = 0; i < 64; ++i) CHECK(rho.deriv(i / 64.0) > 0.0);
}

TEST_CASE("roundness: zero for circles, matches the direct fit for the ellipse") {
  const SampledKnot circ(KnotCurve::circle(Vec3(1, 2, 3), 2.5, Vec3(1, 1, 0), 256));
  CHECK(roundness(circ) < 1e-10);

  const SampledKnot ell(KnotCurve::ellipse(2.0, 1.0, 256));
  // Independent recomputation: by symmetry the fit center is the origin in
  // the z = 0 plane and r^2 is the grid mean of |p|^2.
  double r2 = 0.0;
  for (const Vec3& p : ell.points()) r2 += p.squaredNorm();
  r2 /= ell.size();
  const double r = std::sqrt(r2);
  double acc = 0.0;
  for (const Vec3& p : ell.points()) {
    const double d = p.norm() - r;
    acc += d * d;
  }
  const double expected = std::sqrt(acc / ell.size()) / r;
  CHECK(roundness(ell) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(roundness(ell) > 0.1);
}

TEST_CASE("degenerate point clouds are rejected by the circle fit") {
  // A valid knot can't be collinear, so call fit_circle on a handmade grid
  // via from_samples of a thin ellipse instead: use direct API on the thin
  // case and expect the eigenvalue guard to trip only for exact degeneracy.
  const SampledKnot thin(KnotCurve::ellipse(2.0, 1e-3, 64));
  CHECK_NOTHROW(fit_circle(thin));
}

TEST_CASE("non-immersed and self-touching grids are rejected with indices") {
  // Cardioid: f'(pi) = 0, and t = pi lands on the grid.
  VecGrid cusp(64);
  for (int i = 0; i < 64; ++i) {
    const double t = kTwoPi * i / 64.0;
    cusp[i] = Vec3(std::cos(t) + 0.5 * std::cos(2 * t), std::sin(t) + 0.5 * std::sin(2 * t), 0.0);
  }
  CHECK_THROWS_AS((void)KnotCurve::from_samples(cusp), InvalidKnotError);

  // Figure eight through the origin twice.
  VecGrid eight(64);
  for (int i = 0; i < 64; ++i) {
    const double t = i / 64.0;
    eight[i] = Vec3(std::sin(2 * kTwoPi * t), std::sin(kTwoPi * t), 0.0);
  }
  try {
    (void)KnotCurve::from_samples(eight);
    CHECK(false);
  } catch (const InvalidKnotError& e) {
    CHECK(!e.indices().empty());
  }
}

TEST_CASE("preset parameter validation") {
  CHECK_THROWS_AS((void)KnotCurve::torus_knot(2, 4, 2.0, 1.0), InvalidArgumentError);
  CHECK_THROWS_AS((void)KnotCurve::torus_knot(2, 3, 1.0, 2.0), InvalidArgumentError);
  CHECK_THROWS_AS((void)KnotCurve::circle(Vec3::Zero(), -1.0, Vec3(0, 0, 1)),
                  InvalidArgumentError);
  CHECK_THROWS_AS((void)KnotCurve::perturbed_circle(0.2, 1), InvalidArgumentError);
}

TEST_CASE("param_at_arc inverts arc_of") {
  const SampledKnot f(KnotCurve::ellipse(2.0, 1.0, 256));
  for (int m = 0; m < 16; ++m) {
    const double s = f.total_len() * m / 16.0;
    const double u = f.param_at_arc(s);
    CHECK(f.arc_of(u) == doctest::Approx(s).epsilon(1e-12));
  }
}
