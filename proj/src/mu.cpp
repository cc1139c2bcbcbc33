#include "mobknot/mu.hpp"

#include <algorithm>
#include <cmath>

namespace mobknot {

namespace {
double clampd(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }
}  // namespace

MuKernel MuKernel::custom(std::vector<double> thetas, std::vector<double> values) {
  if (thetas.size() != values.size() || thetas.size() < 4) {
    throw InvalidArgumentError("custom mu kernel: need matching tables with >= 4 nodes");
  }
  if (std::abs(thetas.front()) > 1e-12 || std::abs(thetas.back() - M_PI) > 1e-12) {
    throw InvalidArgumentError("custom mu kernel: table must span [0, pi]");
  }
  for (std::size_t k = 1; k < thetas.size(); ++k) {
    if (!(thetas[k] > thetas[k - 1])) {
      throw InvalidArgumentError("custom mu kernel: nodes must increase");
    }
  }
  double vmax = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgumentError("custom mu kernel: values must be finite and >= 0");
    }
    vmax = std::max(vmax, v);
  }
  if (values.front() > 1e-12 * std::max(1.0, vmax)) {
    throw InvalidArgumentError("custom mu kernel: mu(0) must vanish");
  }
  for (std::size_t k = 1; k + 1 < thetas.size(); ++k) {
    if (!(values[k] > 0.0)) {
      throw InvalidArgumentError("custom mu kernel: mu must be positive on (0, pi)");
    }
  }
  // Growth guard near 0: estimate the small-angle exponent from the first
  // two positive nodes; mu must vanish at least like theta^(1/2 + eps), so
  // the fitted exponent has to clear 1/2 up to table resolution.
  std::size_t first = 0;
  for (std::size_t k = 1; k < thetas.size(); ++k) {
    if (values[k] > 0.0) {
      first = k;
      break;
    }
  }
  if (first > 0 && first + 1 < thetas.size() && values[first + 1] > 0.0) {
    const double p = std::log(values[first] / values[first + 1]) /
                     std::log(thetas[first] / thetas[first + 1]);
    if (p < 0.45) {
      throw InvalidArgumentError(
          "custom mu kernel: values near 0 decay slower than theta^0.51");
    }
  }

  MuKernel mu(Tag::custom);
  mu.thetas_ = std::move(thetas);
  mu.values_ = std::move(values);
  return mu;
}

std::string MuKernel::name() const {
  switch (tag_) {
    case Tag::one_minus_cos: return "one_minus_cos";
    case Tag::abs_sine: return "abs_sine";
    case Tag::acyclicity: return "acyclicity";
    default: return "custom";
  }
}

double MuKernel::from_omc(double omc) const {
  omc = clampd(omc, 0.0, 2.0);
  switch (tag_) {
    case Tag::one_minus_cos:
      return omc;
    case Tag::abs_sine:
      return std::sqrt(omc * (2.0 - omc));
    case Tag::acyclicity: {
      const double theta = std::acos(clampd(1.0 - omc, -1.0, 1.0));
      return 0.25 * M_PI * theta * (1.0 - std::sin(theta));
    }
    default: {
      const double theta = std::acos(clampd(1.0 - omc, -1.0, 1.0));
      return (*this)(theta);
    }
  }
}

double MuKernel::operator()(double theta) const {
  theta = clampd(theta, 0.0, M_PI);
  switch (tag_) {
    case Tag::one_minus_cos:
      return 1.0 - std::cos(theta);
    case Tag::abs_sine:
      return std::sin(theta);
    case Tag::acyclicity:
      return 0.25 * M_PI * theta * (1.0 - std::sin(theta));
    default: {
      const auto it = std::upper_bound(thetas_.begin(), thetas_.end(), theta);
      if (it == thetas_.begin()) return values_.front();
      if (it == thetas_.end()) return values_.back();
      const std::size_t k = static_cast<std::size_t>(it - thetas_.begin());
      const double t = (theta - thetas_[k - 1]) / (thetas_[k] - thetas_[k - 1]);
      return (1.0 - t) * values_[k - 1] + t * values_[k];
    }
  }
}

}  // namespace mobknot
