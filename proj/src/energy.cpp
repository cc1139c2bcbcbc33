#include "mobknot/energy.hpp"

#include <cmath>

namespace mobknot {

namespace {

double kappa_at(const SampledKnot& f, int i) {
  const Vec3& v1 = f.d1()[i];
  const Vec3& v2 = f.d2()[i];
  const double sp = f.speed()[i];
  return v1.cross(v2).norm() / (sp * sp * sp);
}

}  // namespace

std::string to_string(EnergyMethod m) {
  switch (m) {
    case EnergyMethod::cosine: return "cosine";
    case EnergyMethod::from_v: return "from_v";
    default: return "fhw";
  }
}

EnergyReport energy_E_cosine(const SampledKnot& f) {
  const int n = f.size();
  const double h = f.h();
  std::vector<double> row(n), rows(n);
  for (int i = 0; i < n; ++i) {
    row[i] = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const Vec3 d = f.points()[j] - f.points()[i];
      const double omc =
          one_minus_cos_angle(f.points()[i], f.d1()[i], f.points()[j], f.d1()[j]);
      row[j] = omc / d.squaredNorm() * f.speed()[j];
    }
    rows[i] = pairwise_sum(std::span<const double>(row)) * f.speed()[i];
  }
  EnergyReport rep;
  rep.method = EnergyMethod::cosine;
  rep.grid_size = n;
  rep.value = h * h * pairwise_sum(std::span<const double>(rows));
  return rep;
}

EnergyReport energy_E_from_V(const PotentialProfile& profile, const SampledKnot& f) {
  if (static_cast<int>(profile.v.size()) != f.size()) {
    throw GridMismatchError("potential profile grid differs from the knot grid");
  }
  std::vector<double> terms(f.size());
  for (int i = 0; i < f.size(); ++i) terms[i] = profile.v[i] * f.speed()[i];
  EnergyReport rep;
  rep.method = EnergyMethod::from_v;
  rep.grid_size = f.size();
  rep.value = f.h() * pairwise_sum(std::span<const double>(terms));
  return rep;
}

EnergyReport energy_E_fhw(const SampledKnot& f) {
  const int n = f.size();
  const double h = f.h();
  const double len = f.total_len();
  const double cmp_scale = (M_PI / len) * (M_PI / len);

  std::vector<double> row(n), rows(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) {
        const double kap = kappa_at(f, i);
        row[j] = (kap * kap / 12.0 - M_PI * M_PI / (3.0 * len * len)) * f.speed()[i];
        continue;
      }
      const double chord2 = (f.points()[j] - f.points()[i]).squaredNorm();
      const double sn = std::sin(M_PI * f.arc_distance(i, j) / len);
      row[j] = (1.0 / chord2 - cmp_scale / (sn * sn)) * f.speed()[j];
    }
    rows[i] = pairwise_sum(std::span<const double>(row)) * f.speed()[i];
  }
  EnergyReport rep;
  rep.method = EnergyMethod::fhw;
  rep.grid_size = n;
  rep.value = h * h * pairwise_sum(std::span<const double>(rows));
  rep.fhw_integral = rep.value + 4.0;
  return rep;
}

double energy_E_mu(const SampledKnot& f, const MuKernel& mu, int oversample) {
  const int n = f.size();
  const SampledKnot fine(f.curve().padded_to(n * oversample));
  const int nq = fine.size();
  const double hq = fine.h();

  // E_mu = int Psi_mu(s) |f'(s)| ds with the inner integral oversampled;
  // the outer integrand is smooth, so the base grid carries it.
  std::vector<double> row(nq), outer(n);
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
    outer[i] = hq * pairwise_sum(std::span<const double>(row)) * f.speed()[i];
  }
  return f.h() * pairwise_sum(std::span<const double>(outer));
}

double energy_from_weight(const SampledKnot& f, const WeightFunction& phi) {
  if (phi.size() != f.size()) {
    throw GridMismatchError("weight grid differs from the knot grid");
  }
  std::vector<double> terms(f.size());
  for (int i = 0; i < f.size(); ++i) {
    const double v = phi.values[i];
    if (v < -1e-10) {
      throw InvalidArgumentError("energy_from_weight: weight is negative on the grid");
    }
    terms[i] = std::cbrt(std::max(0.0, v)) * f.speed()[i];
  }
  return f.h() * pairwise_sum(std::span<const double>(terms));
}

}  // namespace mobknot
