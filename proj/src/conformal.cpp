#include "mobknot/conformal.hpp"

#include <algorithm>
#include <cmath>

namespace mobknot {

namespace {

double clamp(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

// Curvature at grid index i, in arc-length units.
double kappa_at(const SampledKnot& f, int i) {
  const Vec3& v1 = f.d1()[i];
  const Vec3& v2 = f.d2()[i];
  const double sp = f.speed()[i];
  return v1.cross(v2).norm() / (sp * sp * sp);
}

// (pi/L) cot(pi x / L) - 1/x: the finite remainder of the circle-comparison
// kernel's antiderivative after the 1/x counterterm. Smooth and O(x) small.
double cot_counterterm(double x, double len) {
  const double arg = M_PI * x / len;
  return (M_PI / len) / std::tan(arg) - 1.0 / x;
}

}  // namespace

double one_minus_cos_angle(const Vec3& ps, const Vec3& tau_s, const Vec3& pt,
                           const Vec3& tau_t) {
  const Vec3 d = pt - ps;
  const double d2 = d.squaredNorm();
  if (!(d2 > 0.0)) throw InvalidArgumentError("conformal angle needs distinct points");
  const Vec3 a = tau_s.normalized();
  const Vec3 b = tau_t.normalized();
  // 1 - <R_e a, b> for unit vectors equals |R_e a - b|^2 / 2 (R_e = reflection
  // across the chord direction). The squared-norm form keeps tiny angles
  // accurate: kernels like sin(theta) sample this with a sqrt, which would
  // blow plain-subtraction roundoff up to ~1e-8.
  const Vec3 ra = (2.0 * d.dot(a) / d2) * d - a;
  return clamp(0.5 * (ra - b).squaredNorm(), 0.0, 2.0);
}

double conformal_angle(const SampledKnot& f, int i, int j) {
  if (i == j) throw InvalidArgumentError("conformal angle is undefined on the diagonal");
  const double omc =
      one_minus_cos_angle(f.points()[i], f.d1()[i], f.points()[j], f.d1()[j]);
  return std::acos(clamp(1.0 - omc, -1.0, 1.0));
}

AngleField conformal_angle_field(const SampledKnot& f) {
  const int n = f.size();
  AngleField out;
  out.n = n;
  out.theta.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double th = conformal_angle(f, i, j);
      out.theta[static_cast<std::size_t>(i) * n + j] = th;
      out.theta[static_cast<std::size_t>(j) * n + i] = th;
    }
  }
  return out;
}

CircleRecord tangent_circle_through(const Vec3& p, const Vec3& dir, const Vec3& q) {
  const Vec3 chord = q - p;
  const double clen = chord.norm();
  if (!(clen > 0.0)) throw InvalidArgumentError("tangent_circle_through: p == q");
  const Vec3 d = dir.normalized();

  CircleRecord rec;
  const Vec3 perp = chord - chord.dot(d) * d;
  if (perp.norm() <= 1e-13 * clen) {
    rec.is_line = true;
    rec.line_dir = d;
    return rec;
  }
  const Vec3 m = perp.normalized();
  const double a = chord.squaredNorm() / (2.0 * chord.dot(m));
  rec.center = p + a * m;
  rec.radius = std::abs(a);
  rec.normal = d.cross(m);  // tangent at p comes out as +dir with this axis
  return rec;
}

PotentialProfile potential_V_cosine(const SampledKnot& f) {
  const int n = f.size();
  const double h = f.h();
  PotentialProfile out;
  out.method = PotentialMethod::cosine;
  out.v.resize(n);
  std::vector<double> row(n);
  for (int i = 0; i < n; ++i) {
    row[i] = 0.0;  // continuous extension of the integrand vanishes on the diagonal
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const Vec3 d = f.points()[j] - f.points()[i];
      const double omc =
          one_minus_cos_angle(f.points()[i], f.d1()[i], f.points()[j], f.d1()[j]);
      row[j] = omc / d.squaredNorm() * f.speed()[j];
    }
    out.v[i] = h * pairwise_sum(std::span<const double>(row));
  }
  return out;
}

double potential_V_cosine_at(const SampledKnot& f, double s) {
  const int n = f.size();
  const double h = f.h();
  const Vec3 ps = f.eval(s);
  const Vec3 ts = f.eval(s, 1);
  std::vector<double> row(n, 0.0);
  for (int j = 1; j < n; ++j) {
    const double t = s + j * h;
    const Vec3 pt = f.eval(t);
    const Vec3 tt = f.eval(t, 1);
    const Vec3 d = pt - ps;
    row[j] = one_minus_cos_angle(ps, ts, pt, tt) / d.squaredNorm() * tt.norm();
  }
  return h * pairwise_sum(std::span<const double>(row));
}

double mu_potential_at(const SampledKnot& f, double s, const MuKernel& mu, int oversample) {
  if (oversample < 1) throw InvalidArgumentError("oversample factor must be >= 1");
  const int nq = f.size() * oversample;
  const double hq = 1.0 / nq;
  const Vec3 ps = f.eval(s);
  const Vec3 ts = f.eval(s, 1);

  auto integrand_at = [&](double t) {
    const Vec3 pt = f.eval(t);
    const Vec3 tt = f.eval(t, 1);
    const Vec3 d = pt - ps;
    const double omc = one_minus_cos_angle(ps, ts, pt, tt);
    return mu.from_omc(omc) / d.squaredNorm() * tt.norm();
  };

  std::vector<double> row(nq);
  for (int j = 1; j < nq; ++j) row[j] = integrand_at(s + j * hq);
  row[0] = even_limit(
      [&](double sig) { return 0.5 * (integrand_at(s + sig) + integrand_at(s - sig)); }, hq);
  return hq * pairwise_sum(std::span<const double>(row));
}

namespace {

// Truncated potential with the cut at exact arc eps on both sides; no range
// precondition (the Hadamard ladder legitimately descends below the grid
// spacing, the public entry point enforces the documented domain).
//
// The integrand splits as
//   |f'(t)| / chord^2 = m(t) + |f'(t)| (pi/L)^2 / sin^2(pi d/L),
//   m(t) = |f'(t)| [ 1/chord^2 - (pi/L)^2 / sin^2(pi d/L) ],
// where m extends smoothly through the diagonal and the antipode, so its
// full-period trapezoid is spectral and the window near the cut is handled
// by Gauss-Legendre panels. The circle-comparison part integrates in closed
// form to cot terms that absorb the 2/eps counterterm exactly.
double truncated_value(const SampledKnot& f, int i, double eps) {
  const int n = f.size();
  const double len = f.total_len();
  const Vec3 pi_pt = f.points()[i];
  const double arc_i = f.cum_arclen()[i];
  const double ti = static_cast<double>(i) / n;

  // Window integrand in product form,
  //   m = sp (S - chord)(S + chord) / (chord^2 S^2),  S = (L/pi) sin(pi d/L),
  // with S - chord = (S - d) + (d - chord), S - d by series, and chord and d
  // from the per-mode difference forms. Plain evaluation of
  // 1/chord^2 - 1/S^2 loses everything to cancellation once the Gauss nodes
  // sit far below the grid scale.
  auto m_offgrid = [&](double t) {
    const double sp = f.eval(t, 1).norm();
    const double d = std::abs(f.arc_diff(t, ti));
    const double chord = f.eval_diff(t, ti).norm();
    const double x = M_PI * d / len;
    double phi1;  // 1 - sin(x)/x
    if (x < 0.01) {
      const double x2 = x * x;
      phi1 = x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0));
    } else {
      phi1 = 1.0 - std::sin(x) / x;
    }
    const double s_cmp = (len / M_PI) * std::sin(x);
    const double s_minus_chord = -d * phi1 + (d - chord);
    return sp * s_minus_chord * (s_cmp + chord) / (chord * chord * s_cmp * s_cmp);
  };

  const double h = f.h();
  std::vector<double> row(n);
  for (int j = 0; j < n; ++j) {
    if (j == i) {
      const double kap = kappa_at(f, i);
      row[j] = f.speed()[i] * (kap * kap / 12.0 - M_PI * M_PI / (3.0 * len * len));
      continue;
    }
    const Vec3 d = f.points()[j] - pi_pt;
    const double darc = f.arc_distance(i, j);
    const double sn = std::sin(M_PI * darc / len);
    row[j] = f.speed()[j] *
             (1.0 / d.squaredNorm() - (M_PI / len) * (M_PI / len) / (sn * sn));
  }
  const double full = h * pairwise_sum(std::span<const double>(row));

  double t_plus = f.param_at_arc(arc_i + eps);
  double t_minus = f.param_at_arc(arc_i - eps);
  // unwrap so the window brackets t_i
  while (t_plus < ti) t_plus += 1.0;
  while (t_minus > ti) t_minus -= 1.0;
  const int panels = std::max(1, static_cast<int>(std::ceil((t_plus - t_minus) * n / 8.0)));
  const double window_part = gauss_legendre(m_offgrid, t_minus, ti, panels) +
                             gauss_legendre(m_offgrid, ti, t_plus, panels);

  return full - window_part + 2.0 * cot_counterterm(eps, len);
}

}  // namespace

double potential_V_truncated(const SampledKnot& f, int i, double eps) {
  const double len = f.total_len();
  const double h_arc = len / f.size();
  if (!(eps >= 2.0 * h_arc * (1.0 - 1e-9))) {
    throw InvalidArgumentError("truncated potential: eps below two grid spacings");
  }
  if (!(eps < 0.5 * len)) {
    throw InvalidArgumentError("truncated potential: eps must be below half the length");
  }
  return truncated_value(f, i, eps);
}

HadamardV potential_V_hadamard(const SampledKnot& f, int i, const HadamardConfig& cfg) {
  const double len = f.total_len();

  std::vector<double> xs, ys;  // fine to coarse
  for (int k = cfg.levels - 1; k >= 0; --k) {
    const double eps = cfg.coarsest_fraction * len * std::pow(cfg.ratio, k);
    if (!(eps < 0.5 * len)) continue;
    xs.push_back(eps);
    ys.push_back(truncated_value(f, i, eps));
  }
  if (xs.size() < 3) {
    throw InvalidArgumentError("hadamard potential: eps ladder has fewer than 3 levels");
  }

  const int n_fit = std::min<int>(cfg.fit_points, static_cast<int>(xs.size()));
  HadamardV out;
  out.value = extrapolate_to_zero(std::span<const double>(xs.data(), n_fit),
                                  std::span<const double>(ys.data(), n_fit), n_fit - 1);
  const int n_quad = std::min<int>(3, static_cast<int>(xs.size()));
  const double quad = extrapolate_to_zero(std::span<const double>(xs.data(), n_quad),
                                          std::span<const double>(ys.data(), n_quad), 2);
  out.fit_residual = std::abs(out.value - quad);
  out.flagged = !(out.fit_residual <= cfg.residual_tol);
  return out;
}

PotentialProfile potential_V_hadamard_profile(const SampledKnot& f,
                                              const HadamardConfig& cfg) {
  const int n = f.size();
  PotentialProfile out;
  out.method = PotentialMethod::hadamard;
  out.v.resize(n);
  out.flagged.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    const HadamardV hv = potential_V_hadamard(f, i, cfg);
    out.v[i] = hv.value;
    out.flagged[i] = hv.flagged ? 1 : 0;
    out.max_fit_residual = std::max(out.max_fit_residual, hv.fit_residual);
  }
  return out;
}

std::vector<double> v_scaling_residual(const MoebiusTransform& t, const SampledKnot& f) {
  const SampledKnot g(transform_curve(t, f));
  const PotentialProfile vf = potential_V_cosine(f);
  const PotentialProfile vg = potential_V_cosine(g);
  std::vector<double> res(f.size());
  for (int i = 0; i < f.size(); ++i) {
    const double lam = t.conformal_factor(f.points()[i]);
    res[i] = std::abs(vg.v[i] - vf.v[i] / (lam * lam));
  }
  return res;
}

}  // namespace mobknot
