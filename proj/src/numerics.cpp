#include "mobknot/numerics.hpp"

#include <array>
#include <cmath>

namespace mobknot {

namespace {

template <typename T>
T pairwise_impl(std::span<const T> x, T zero) {
  if (x.size() <= 8) {
    T acc = zero;
    for (const auto& v : x) acc += v;
    return acc;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_impl(x.first(half), zero) + pairwise_impl(x.subspan(half), zero);
}

// 16-point Gauss-Legendre nodes/weights on [-1, 1]; symmetric halves.
constexpr std::array<double, 8> kGlNode = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr std::array<double, 8> kGlWeight = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

}  // namespace

double pairwise_sum(std::span<const double> x) { return pairwise_impl(x, 0.0); }

Vec3 pairwise_sum(std::span<const Vec3> x) { return pairwise_impl(x, Vec3(Vec3::Zero())); }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  have_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

Vec3 Rng::unit_vector() {
  const double z = 2.0 * uniform() - 1.0;
  const double phi = kTwoPi * uniform();
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

Mat3 Rng::rotation() {
  Eigen::Vector4d q;
  for (int i = 0; i < 4; ++i) q[i] = normal();
  q.normalize();
  return Eigen::Quaterniond(q[0], q[1], q[2], q[3]).toRotationMatrix();
}

double extrapolate_to_zero(std::span<const double> xs, std::span<const double> ys,
                           int degree, double* max_residual) {
  const int n = static_cast<int>(xs.size());
  const int m = degree + 1;
  Eigen::MatrixXd a(n, m);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    double p = 1.0;
    for (int k = 0; k < m; ++k) {
      a(i, k) = p;
      p *= xs[i];
    }
    b[i] = ys[i];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  if (max_residual != nullptr) {
    *max_residual = (a * c - b).cwiseAbs().maxCoeff();
  }
  return c[0];
}

double even_limit(const std::function<double(double)>& symmetric_avg, double sigma0) {
  const std::array<double, 4> xs = {sigma0, 0.5 * sigma0, 0.25 * sigma0, 0.125 * sigma0};
  std::array<double, 4> ys;
  for (int k = 0; k < 4; ++k) ys[k] = symmetric_avg(xs[k]);
  return extrapolate_to_zero(xs, ys, 3);
}

Vec3 even_limit3(const std::function<Vec3(double)>& symmetric_avg, double sigma0) {
  const std::array<double, 4> xs = {sigma0, 0.5 * sigma0, 0.25 * sigma0, 0.125 * sigma0};
  std::array<Vec3, 4> ys;
  for (int k = 0; k < 4; ++k) ys[k] = symmetric_avg(xs[k]);
  Vec3 out;
  for (int c = 0; c < 3; ++c) {
    const std::array<double, 4> yc = {ys[0][c], ys[1][c], ys[2][c], ys[3][c]};
    out[c] = extrapolate_to_zero(xs, yc, 3);
  }
  return out;
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                      int n_panels) {
  std::vector<double> contributions;
  contributions.reserve(static_cast<std::size_t>(n_panels) * 16);
  const double panel = (b - a) / n_panels;
  for (int p = 0; p < n_panels; ++p) {
    const double mid = a + (p + 0.5) * panel;
    const double half = 0.5 * panel;
    for (int k = 0; k < 8; ++k) {
      contributions.push_back(kGlWeight[k] * half * f(mid - half * kGlNode[k]));
      contributions.push_back(kGlWeight[k] * half * f(mid + half * kGlNode[k]));
    }
  }
  return pairwise_sum(contributions);
}

}  // namespace mobknot
