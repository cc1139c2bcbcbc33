#include "mobknot/gradient.hpp"

#include <algorithm>
#include <cmath>

#include "mobknot/energy.hpp"

namespace mobknot {

namespace {

// Curvature vector W = f''/|f'|^2 - (f',f'') f'/|f'|^4 (perpendicular to f').
Vec3 curvature_vector(const Vec3& v1, const Vec3& v2) {
  const double s2 = v1.squaredNorm();
  return v2 / s2 - (v1.dot(v2) / (s2 * s2)) * v1;
}

Vec3 project_out(const Vec3& v, const Vec3& dir) {
  return v - (v.dot(dir) / dir.squaredNorm()) * dir;
}

// Principal-value integrand of the gradient at base point i, evaluated at a
// parameter offset dt from the base node (chord differences in stable form).
Vec3 pv_integrand(const SampledKnot& f, int i, const Vec3& w_i, double dt) {
  const double ti = static_cast<double>(i) / f.size();
  const Vec3 delta = f.eval_diff_offset(ti, dt);
  const double chord2 = delta.squaredNorm();
  const Vec3 v1 = f.eval(ti + dt, 1);
  const Vec3 braces =
      2.0 * project_out(delta, f.d1()[i]) / chord2 - w_i;
  return braces * (v1.norm() / chord2);
}

}  // namespace

double GradientField::max_norm() const {
  double m = 0.0;
  for (const Vec3& v : g.vectors) m = std::max(m, v.norm());
  return m;
}

GradientField grad_E_pv(KnotRef f) {
  const SampledKnot& knot = *f;
  const int n = knot.size();
  const double h = knot.h();

  GradientField out;
  out.route = GradientRoute::pv;
  out.g.base = f;
  out.g.vectors.resize(n);

  std::vector<Vec3> row(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 w_i = curvature_vector(knot.d1()[i], knot.d2()[i]);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const Vec3 delta = knot.points()[j] - knot.points()[i];
      const double chord2 = delta.squaredNorm();
      const Vec3 braces = 2.0 * project_out(delta, knot.d1()[i]) / chord2 - w_i;
      row[j] = braces * (knot.speed()[j] / chord2);
    }
    row[i] = even_limit3(
        [&](double sig) {
          return Vec3(0.5 * (pv_integrand(knot, i, w_i, sig) +
                             pv_integrand(knot, i, w_i, -sig)));
        },
        h);
    const Vec3 sum = pairwise_sum(std::span<const Vec3>(row));
    out.g.vectors[i] = project_out(2.0 * h * sum, knot.d1()[i]);
  }
  return out;
}

UComponents u_components(const SampledKnot& f, int i, const PotentialProfile& v,
                         int oversample) {
  if (static_cast<int>(v.v.size()) != f.size()) {
    throw GridMismatchError("u_components: potential profile grid differs from the knot");
  }
  // The arc grid is oversampled: unlike the parameter grid, uniform arc
  // steps do not concentrate where an inverted knot packs its curvature.
  const int n = f.size() * std::max(1, oversample);
  const double len = f.total_len();
  const double d_arc = len / n;
  const double arc_i = f.cum_arclen()[i];
  const double ti = static_cast<double>(i) / f.size();
  const Vec3 w_i = curvature_vector(f.d1()[i], f.d2()[i]);

  // Regularized integrand of u1 at a signed arc offset from the base point.
  // The odd 1/sigma^3 part cancels only between nodes that sit at exactly
  // opposite arc offsets, and the kernel's derivative there is 1/sigma^4, so
  // the coarse arc inverse is polished with Newton steps on the stable
  // arc_diff residual until the offset is relatively exact.
  auto g1_at_offset = [&](double offset) {
    // Seed the parameter offset from the global arc inverse, picking the
    // period representative whose arc offset matches.
    double dt = f.param_at_arc(arc_i + offset) - ti;
    double best = 1e300;
    double seed = dt;
    for (const double cand : {dt - 1.0, dt, dt + 1.0}) {
      const double r = std::abs(f.arc_diff_offset(ti, cand) - offset);
      if (r < best) {
        best = r;
        seed = cand;
      }
    }
    dt = seed;
    // Newton in the offset itself: the quadrature divides by offset^3, so dt
    // must hold its precision relative to its own size, not the parameter's.
    for (int it = 0; it < 4; ++it) {
      const double r = f.arc_diff_offset(ti, dt) - offset;
      if (std::abs(r) < 1e-15 * (std::abs(offset) + 1e-300)) break;
      dt -= r / f.speed_at(ti + dt);
    }
    const Vec3 delta = f.eval_diff_offset(ti, dt);
    const double chord2 = delta.squaredNorm();
    return Vec3(2.0 * (delta / (chord2 * chord2) - w_i / (2.0 * chord2)));
  };

  std::vector<Vec3> nodes(n);
  for (int m = 1; m < n; ++m) {
    const double off = (m <= n / 2) ? m * d_arc : (m - n) * d_arc;
    nodes[m] = g1_at_offset(off);
  }
  nodes[0] = even_limit3(
      [&](double sig) {
        return Vec3(0.5 * (g1_at_offset(sig) + g1_at_offset(-sig)));
      },
      d_arc);

  UComponents u;
  u.u1 = d_arc * pairwise_sum(std::span<const Vec3>(nodes)) + v.v[i] * w_i;
  u.u2 = -(v.v[i] / f.d1()[i].squaredNorm()) * f.d2()[i];
  const Vec3 tau = f.d1()[i].normalized();
  u.u3 = -u.u1.dot(tau) * tau;
  u.u4 = -u.u2.dot(tau) * tau;
  return u;
}

GradientField grad_E_hadamard(KnotRef f, const PotentialProfile& v,
                              const GradientField* pv, int oversample) {
  const SampledKnot& knot = *f;
  GradientField out;
  out.route = GradientRoute::hadamard;
  out.g.base = f;
  out.g.vectors.resize(knot.size());
  for (int i = 0; i < knot.size(); ++i) {
    out.g.vectors[i] = u_components(knot, i, v, oversample).gradient();
  }
  if (pv != nullptr) {
    out.route_residual.resize(knot.size());
    for (int i = 0; i < knot.size(); ++i) {
      out.route_residual[i] = (out.g.vectors[i] - pv->g.vectors[i]).norm();
    }
  }
  return out;
}

TangentField weighted_gradient(const GradientField& g, const WeightFunction& phi,
                               double roundness_value, double circle_tol,
                               double floor_factor) {
  const SampledKnot& f = *g.g.base;
  TangentField out;
  out.base = g.g.base;
  out.vectors.assign(f.size(), Vec3::Zero());
  if (roundness_value < circle_tol) {
    return out;  // round circle: the gradient is defined to vanish
  }
  if (phi.size() != f.size()) {
    throw GridMismatchError("weighted_gradient: weight grid differs from the knot");
  }

  std::vector<double> sorted = phi.values;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  const double floor = floor_factor * median;
  std::vector<int> degenerate;
  for (int i = 0; i < f.size(); ++i) {
    if (!(phi.values[i] > floor)) degenerate.push_back(i);
  }
  if (!degenerate.empty()) {
    throw DegenerateWeightError("weighted_gradient: weight below floor on a non-circular knot",
                                degenerate);
  }
  for (int i = 0; i < f.size(); ++i) {
    out.vectors[i] = g.g.vectors[i] / phi.values[i];
  }
  return out;
}

InversionPair InversionPair::make(KnotRef f) {
  const double scale = f->diameter();
  for (const Vec3& p : f->points()) {
    if (p.norm() < MoebiusTransform::kPoleTol * scale) {
      throw PoleError("inversion identity requires the curve to avoid the origin");
    }
  }
  InversionPair pair;
  pair.f = std::move(f);
  const MoebiusTransform inv({SphereInversion{Vec3::Zero(), 1.0}});
  pair.inverted = make_knot(transform_curve(inv, *pair.f));
  pair.v_f = potential_V_cosine(*pair.f);
  pair.v_inverted = potential_V_cosine(*pair.inverted);
  return pair;
}

Vec3 u_rule_value(URule rule, const SampledKnot& f, int i, const PotentialProfile& v,
                  int oversample) {
  const UComponents u = u_components(f, i, v, oversample);
  if (rule == URule::grad_e) {
    return u.gradient();
  }
  switch (rule) {
    case URule::u1: return u.u1;
    case URule::u2: return u.u2;
    case URule::u3: return u.u3;
    default: return u.u4;
  }
}

Vec3 J_operator(URule rule, const InversionPair& pair, int i) {
  const Vec3 u_f = u_rule_value(rule, *pair.f, i, pair.v_f);
  const Vec3 u_inv = u_rule_value(rule, *pair.inverted, i, pair.v_inverted);
  const Vec3& p = pair.f->points()[i];
  const double p2 = p.squaredNorm();
  return u_inv - p2 * p2 * u_f + 2.0 * p2 * u_f.dot(p) * p;
}

Vec3 J_rhs(URule rule, const InversionPair& pair, int i) {
  const Vec3& p = pair.f->points()[i];
  const Vec3& v1 = pair.f->d1()[i];
  const double vv = pair.v_f.v[i];
  const double p2 = p.squaredNorm();
  const double pf = p.dot(v1);
  const double s2 = v1.squaredNorm();
  switch (rule) {
    case URule::u1:
      return -2.0 * vv * p2 * p;
    case URule::u2:
      return 2.0 * vv * p2 * p - (8.0 * vv * pf * pf / s2) * p +
             (4.0 * vv * p2 * pf / s2) * v1;
    case URule::u3:
    case URule::u4:
      return (4.0 * vv * pf * pf / s2) * p - (2.0 * vv * p2 * pf / s2) * v1;
    default:
      return Vec3::Zero();  // the four contributions cancel
  }
}

double directional_derivative(const KnotCurve& f, const TangentField& u, double eps) {
  const SampledKnot base(f);
  if (static_cast<int>(u.vectors.size()) != base.size()) {
    throw GridMismatchError("directional_derivative: field grid differs from the knot");
  }
  double umax = 0.0;
  for (const Vec3& v : u.vectors) umax = std::max(umax, v.norm());
  if (!(umax > 0.0)) return 0.0;
  if (eps <= 0.0) eps = 1e-5 * base.total_len() / umax;

  VecGrid plus(base.size()), minus(base.size());
  for (int i = 0; i < base.size(); ++i) {
    plus[i] = base.points()[i] + eps * u.vectors[i];
    minus[i] = base.points()[i] - eps * u.vectors[i];
  }
  const double e_plus = energy_E_cosine(SampledKnot(KnotCurve::from_samples(plus))).value;
  const double e_minus = energy_E_cosine(SampledKnot(KnotCurve::from_samples(minus))).value;
  return (e_plus - e_minus) / (2.0 * eps);
}

}  // namespace mobknot
