#pragma once

#include <string>
#include <vector>

#include "mobknot/errors.hpp"

namespace mobknot {

/// Angle kernel mu : [0, pi] -> R>=0 for the generalized energies and the
/// derived weight functions. Built-ins evaluate straight from
/// omc = 1 - cos(theta), which avoids an acos/cos round trip; custom kernels
/// are sampled tables with linear interpolation.
///
/// Custom tables must vanish at 0 at least like theta^0.51: small-angle
/// entries are checked against the scale of mu(theta)/theta^0.51 on the rest
/// of the table.
class MuKernel {
public:
  enum class Tag { one_minus_cos, abs_sine, acyclicity, custom };

  static MuKernel one_minus_cos() { return MuKernel(Tag::one_minus_cos); }
  static MuKernel abs_sine() { return MuKernel(Tag::abs_sine); }
  static MuKernel acyclicity() { return MuKernel(Tag::acyclicity); }
  static MuKernel custom(std::vector<double> thetas, std::vector<double> values);

  Tag tag() const { return tag_; }
  std::string name() const;

  /// Evaluate mu at the angle with 1 - cos(theta) = omc, omc in [0, 2].
  double from_omc(double omc) const;

  /// Evaluate mu at theta in [0, pi].
  double operator()(double theta) const;

private:
  explicit MuKernel(Tag tag) : tag_(tag) {}

  Tag tag_;
  std::vector<double> thetas_, values_;  // custom only
};

}  // namespace mobknot
