#include "mobknot/metric.hpp"

#include <cmath>

namespace mobknot {

namespace {

// DFT of a scalar grid (modes 0..N/2-1), same conventions as the curve fit.
void fit_grid(const std::vector<double>& v, std::vector<double>& cosc,
              std::vector<double>& sinc) {
  const int n = static_cast<int>(v.size());
  const int m = n / 2 - 1;
  cosc.assign(m + 1, 0.0);
  sinc.assign(m + 1, 0.0);
  for (int k = 0; k <= m; ++k) {
    double ca = 0.0, sa = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = kTwoPi * k * i / n;
      ca += std::cos(a) * v[i];
      sa += std::sin(a) * v[i];
    }
    const double scale = (k == 0 ? 1.0 : 2.0) / n;
    cosc[k] = scale * ca;
    sinc[k] = (k == 0) ? 0.0 : scale * sa;
  }
}

double eval_grid_deriv(const std::vector<double>& cosc, const std::vector<double>& sinc,
                       double t) {
  double acc = 0.0;
  for (std::size_t k = 1; k < cosc.size(); ++k) {
    const double w = kTwoPi * static_cast<double>(k);
    const double a = w * t;
    acc += w * (-cosc[k] * std::sin(a) + sinc[k] * std::cos(a));
  }
  return acc;
}

}  // namespace

TangentField project_normal(const VecGrid& raw, KnotRef base) {
  if (static_cast<int>(raw.size()) != base->size()) {
    throw GridMismatchError("project_normal: raw grid size differs from the knot grid");
  }
  TangentField out;
  out.base = std::move(base);
  out.vectors.resize(raw.size());
  for (int i = 0; i < out.base->size(); ++i) {
    const Vec3& tp = out.base->d1()[i];
    out.vectors[i] = raw[i] - (raw[i].dot(tp) / tp.squaredNorm()) * tp;
  }
  return out;
}

void require_same_base(const TangentField& u, const TangentField& v) {
  if (!u.base || !v.base || u.base->content_hash() != v.base->content_hash()) {
    throw GridMismatchError("tangent fields live on different knots");
  }
}

double l2_inner(const TangentField& u, const TangentField& v) {
  require_same_base(u, v);
  const SampledKnot& f = *u.base;
  std::vector<double> terms(f.size());
  for (int i = 0; i < f.size(); ++i) {
    terms[i] = u.vectors[i].dot(v.vectors[i]) * f.speed()[i];
  }
  return f.h() * pairwise_sum(std::span<const double>(terms));
}

double weighted_inner(const TangentField& u, const TangentField& v,
                      const WeightFunction& phi) {
  require_same_base(u, v);
  const SampledKnot& f = *u.base;
  if (phi.size() != f.size()) {
    throw GridMismatchError("weight function grid differs from the knot grid");
  }
  std::vector<double> terms(f.size());
  for (int i = 0; i < f.size(); ++i) {
    terms[i] = u.vectors[i].dot(v.vectors[i]) * phi.values[i] * f.speed()[i];
  }
  return f.h() * pairwise_sum(std::span<const double>(terms));
}

WeightFunction weight_V3(const PotentialProfile& profile) {
  WeightFunction w;
  w.kind = WeightKind::v_cubed;
  w.param_independent = true;
  w.values.resize(profile.v.size());
  for (std::size_t i = 0; i < profile.v.size(); ++i) {
    w.values[i] = profile.v[i] * profile.v[i] * profile.v[i];
  }
  return w;
}

WeightFunction weight_phi0(const SampledKnot& f) {
  WeightFunction w;
  w.kind = WeightKind::phi0;
  w.param_independent = false;
  w.values.resize(f.size());
  for (int i = 0; i < f.size(); ++i) {
    const double sp = f.speed()[i];
    w.values[i] = 1.0 / (sp * sp * sp);
  }
  return w;
}

WeightFunction weight_psi_mu(const SampledKnot& f, const MuKernel& mu, int oversample) {
  const int n = f.size();
  // Oversampled view of the same curve; zero-padding the modes is exact.
  // Kernels like sin(theta) have cone points where the conformal angle hits
  // 0 off the diagonal, and the trapezoid error they shed decays only like
  // h^1.5; the fine grid buys those digits back.
  const SampledKnot fine(f.curve().padded_to(n * oversample));
  const int nq = fine.size();
  const double hq = fine.h();

  WeightFunction w;
  w.kind = WeightKind::psi_cubed;
  w.param_independent = true;
  w.mu_name = mu.name();
  w.values.resize(n);

  std::vector<double> row(nq);
  for (int i = 0; i < n; ++i) {
    const int iq = i * oversample;
    const Vec3& ps = fine.points()[iq];
    const Vec3& ts = fine.d1()[iq];
    for (int j = 0; j < nq; ++j) {
      if (j == iq) continue;
      const Vec3 d = fine.points()[j] - ps;
      const double omc = one_minus_cos_angle(ps, ts, fine.points()[j], fine.d1()[j]);
      row[j] = mu.from_omc(omc) / d.squaredNorm() * fine.speed()[j];
    }
    const double s = static_cast<double>(i) / n;
    row[iq] = even_limit(
        [&](double sig) {
          double acc = 0.0;
          for (const double t : {s + sig, s - sig}) {
            const Vec3 pt = fine.eval(t);
            const Vec3 tt = fine.eval(t, 1);
            const double omc = one_minus_cos_angle(ps, ts, pt, tt);
            acc += mu.from_omc(omc) / (pt - ps).squaredNorm() * tt.norm();
          }
          return 0.5 * acc;
        },
        hq);
    const double psi = hq * pairwise_sum(std::span<const double>(row));
    w.values[i] = psi * psi * psi;
  }
  return w;
}

FrenetData frenet(const SampledKnot& f) {
  const int n = f.size();
  FrenetData fd;
  fd.kappa.resize(n);
  fd.tau.resize(n);
  fd.kappa_prime.resize(n);
  fd.tau_defined.assign(n, 1);

  const double kappa_tol = 1e-6 / f.total_len();
  for (int i = 0; i < n; ++i) {
    const Vec3& v1 = f.d1()[i];
    const Vec3& v2 = f.d2()[i];
    const Vec3& v3 = f.d3()[i];
    const double sp = f.speed()[i];
    const Vec3 cr = v1.cross(v2);
    fd.kappa[i] = cr.norm() / (sp * sp * sp);
    if (fd.kappa[i] > kappa_tol) {
      fd.tau[i] = cr.dot(v3) / cr.squaredNorm();
    } else {
      fd.tau[i] = 0.0;
      fd.tau_defined[i] = 0;
    }
  }

  fit_grid(fd.kappa, fd.kappa_cos, fd.kappa_sin);
  for (int i = 0; i < n; ++i) {
    fd.kappa_prime[i] =
        eval_grid_deriv(fd.kappa_cos, fd.kappa_sin, static_cast<double>(i) / n) /
        f.speed()[i];
  }
  return fd;
}

WeightFunction weight_conformal(const FrenetData& fd, const SampledKnot& f) {
  const int n = f.size();
  if (static_cast<int>(fd.kappa.size()) != n) {
    throw GridMismatchError("frenet data grid differs from the knot grid");
  }
  WeightFunction w;
  w.kind = WeightKind::conformal_arclength;
  w.param_independent = true;
  w.values.resize(n);
  w.degenerate_flags.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    const double kp = fd.kappa_prime[i];
    double arg = kp * kp;
    if (fd.tau_defined[i]) {
      arg += fd.kappa[i] * fd.kappa[i] * fd.tau[i] * fd.tau[i];
    } else {
      w.degenerate_flags[i] = 1;
    }
    w.values[i] = std::pow(arg, 0.75);
  }
  return w;
}

double phi0_at(const SampledKnot& f, double s) {
  const double sp = f.eval(s, 1).norm();
  return 1.0 / (sp * sp * sp);
}

double conformal_weight_at(const FrenetData& fd, const SampledKnot& f, double s) {
  const Vec3 v1 = f.eval(s, 1);
  const Vec3 v2 = f.eval(s, 2);
  const Vec3 v3 = f.eval(s, 3);
  const double sp = v1.norm();
  const Vec3 cr = v1.cross(v2);
  const double kappa = cr.norm() / (sp * sp * sp);
  const double kp = eval_grid_deriv(fd.kappa_cos, fd.kappa_sin, s) / sp;
  double arg = kp * kp;
  if (kappa > 1e-6 / f.total_len()) {
    const double tau = cr.dot(v3) / cr.squaredNorm();
    arg += kappa * kappa * tau * tau;
  }
  return std::pow(arg, 0.75);
}

std::vector<double> check_weight_condition(const WeightBuilder& builder,
                                           const MoebiusTransform& t,
                                           const SampledKnot& f) {
  const SampledKnot g(transform_curve(t, f));
  const WeightFunction wf = builder(f);
  const WeightFunction wg = builder(g);
  std::vector<double> res(f.size());
  for (int i = 0; i < f.size(); ++i) {
    const double lam = t.conformal_factor(f.points()[i]);
    const double lam6 = std::pow(lam, 6.0);
    res[i] = std::abs(wg.values[i] * lam6 - wf.values[i]);
  }
  return res;
}

}  // namespace mobknot
