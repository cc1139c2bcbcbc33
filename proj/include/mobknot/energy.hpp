#pragma once

#include <string>

#include "mobknot/conformal.hpp"
#include "mobknot/curve.hpp"
#include "mobknot/metric.hpp"
#include "mobknot/mu.hpp"

namespace mobknot {

enum class EnergyMethod { cosine, from_v, fhw };

struct EnergyReport {
  double value = 0.0;
  EnergyMethod method = EnergyMethod::cosine;
  int grid_size = 0;
  double cross_check = 0.0;       // |value - companion route| when computed
  bool has_cross_check = false;
  double fhw_integral = 0.0;      // fhw only: the raw double integral (= value + 4)
};

/// E = double integral of (1 - cos theta)/chord^2 |f'(s)||f'(t)|, diagonal 0.
EnergyReport energy_E_cosine(const SampledKnot& f);

/// E = int V(s) |f'(s)| ds from a precomputed potential profile.
EnergyReport energy_E_from_V(const PotentialProfile& profile, const SampledKnot& f);

/// The chord-arc form: E + 4 = double integral of
/// (1/chord^2 - 1/d_f^2) |f'(s)||f'(t)|. The 1/d_f^2 part has a kink at
/// antipodal arc distance, so it is split against the circle-comparison
/// kernel (pi/L)^2 csc^2(pi d/L), whose double integral is exactly -4 +
/// (the csc part of the smooth remainder): what is summed on the grid is the
/// smooth kernel 1/chord^2 - (pi/L)^2 csc^2(pi d/L) with diagonal value
/// kappa^2/12 - pi^2/(3 L^2), and the reported double integral is sum + 4.
EnergyReport energy_E_fhw(const SampledKnot& f);

/// Generalized kernel energy: double integral of
/// mu(theta) |f'(s)||f'(t)| / chord^2 on a grid oversampled by `oversample`,
/// with the diagonal entries at their continuous limits.
double energy_E_mu(const SampledKnot& f, const MuKernel& mu, int oversample = 4);

/// E_{Phi^(1/3)} = int Phi^(1/3) |f'| dt. Entries below -1e-10 are rejected;
/// small negative quadrature noise is clamped to zero.
double energy_from_weight(const SampledKnot& f, const WeightFunction& phi);

std::string to_string(EnergyMethod m);

}  // namespace mobknot
