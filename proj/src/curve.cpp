#include "mobknot/curve.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mobknot {

namespace {

struct TrigTables {
  std::vector<double> cos_v, sin_v;
};

// cos/sin(2*pi*m/N) for m = 0..N-1. Grid sums index these as (k*i) % N,
// which keeps the discrete orthogonality exact in the table lookups.
TrigTables trig_tables(int n) {
  TrigTables t;
  t.cos_v.resize(n);
  t.sin_v.resize(n);
  for (int m = 0; m < n; ++m) {
    const double a = kTwoPi * m / n;
    t.cos_v[m] = std::cos(a);
    t.sin_v[m] = std::sin(a);
  }
  return t;
}

FourierSeries3 fit_series(const VecGrid& pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 8 || n % 2 != 0) {
    throw InvalidArgumentError("from_samples: need an even number of samples, at least 8");
  }
  const int m = n / 2 - 1;
  const TrigTables tt = trig_tables(n);

  FourierSeries3 s;
  s.cosc.assign(m + 1, Vec3::Zero());
  s.sinc.assign(m + 1, Vec3::Zero());
  for (int k = 0; k <= m; ++k) {
    Vec3 ca = Vec3::Zero(), sa = Vec3::Zero();
    for (int i = 0; i < n; ++i) {
      const int idx = static_cast<int>((static_cast<long long>(k) * i) % n);
      ca += tt.cos_v[idx] * pts[i];
      sa += tt.sin_v[idx] * pts[i];
    }
    const double scale = (k == 0 ? 1.0 : 2.0) / n;
    s.cosc[k] = scale * ca;
    s.sinc[k] = (k == 0) ? Vec3::Zero() : Vec3(scale * sa);
  }
  return s;
}

// Scalar analogue of fit_series for the speed grid.
void fit_scalar(const std::vector<double>& v, std::vector<double>& cosc,
                std::vector<double>& sinc) {
  const int n = static_cast<int>(v.size());
  const int m = n / 2 - 1;
  const TrigTables tt = trig_tables(n);
  cosc.assign(m + 1, 0.0);
  sinc.assign(m + 1, 0.0);
  for (int k = 0; k <= m; ++k) {
    double ca = 0.0, sa = 0.0;
    for (int i = 0; i < n; ++i) {
      const int idx = static_cast<int>((static_cast<long long>(k) * i) % n);
      ca += tt.cos_v[idx] * v[i];
      sa += tt.sin_v[idx] * v[i];
    }
    const double scale = (k == 0 ? 1.0 : 2.0) / n;
    cosc[k] = scale * ca;
    sinc[k] = (k == 0) ? 0.0 : scale * sa;
  }
}

std::uint64_t fnv1a(const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

ReparamMap::ReparamMap(double a_, double b_) : a(a_), b(b_) {
  if (!(std::abs(a) < 1.0)) {
    throw InvalidArgumentError("ReparamMap: |a| must be < 1 to stay a diffeomorphism");
  }
}

double ReparamMap::operator()(double t) const {
  return t + a * std::sin(kTwoPi * t + b) / kTwoPi;
}

double ReparamMap::deriv(double t) const { return 1.0 + a * std::cos(kTwoPi * t + b); }

Vec3 FourierSeries3::eval(double t, int order) const {
  const int m = modes();
  const double th = kTwoPi * t;
  const double c1 = std::cos(th), s1 = std::sin(th);
  double ck = 1.0, sk = 0.0;
  Vec3 acc = (order == 0) ? cosc[0] : Vec3(Vec3::Zero());
  for (int k = 1; k <= m; ++k) {
    const double cn = ck * c1 - sk * s1;
    const double sn = sk * c1 + ck * s1;
    ck = cn;
    sk = sn;
    const double w = kTwoPi * k;
    switch (order) {
      case 0: acc += ck * cosc[k] + sk * sinc[k]; break;
      case 1: acc += w * (-sk * cosc[k] + ck * sinc[k]); break;
      case 2: acc += (w * w) * (-ck * cosc[k] - sk * sinc[k]); break;
      case 3: acc += (w * w * w) * (sk * cosc[k] - ck * sinc[k]); break;
      default: throw InvalidArgumentError("FourierSeries3::eval: order must be 0..3");
    }
  }
  return acc;
}

KnotCurve KnotCurve::from_samples(const VecGrid& points) {
  KnotCurve c(fit_series(points), static_cast<int>(points.size()));
  validate_knot(SampledKnot(c));
  return c;
}

KnotCurve KnotCurve::from_coeffs(FourierSeries3 series, int grid_size) {
  if (grid_size < 8 || grid_size % 2 != 0) {
    throw InvalidArgumentError("from_coeffs: grid_size must be even and at least 8");
  }
  if (series.modes() > grid_size / 2 - 1) {
    throw InvalidArgumentError("from_coeffs: more modes than the grid can carry");
  }
  if (series.sinc.size() != series.cosc.size()) {
    throw InvalidArgumentError("from_coeffs: cos/sin coefficient lists differ in length");
  }
  // Pad so modes() == grid_size/2 - 1 always holds internally.
  series.cosc.resize(grid_size / 2, Vec3::Zero());
  series.sinc.resize(grid_size / 2, Vec3::Zero());
  KnotCurve c(std::move(series), grid_size);
  validate_knot(SampledKnot(c));
  return c;
}

KnotCurve KnotCurve::with_grid_size(int n) const {
  if (n < 8 || n % 2 != 0) {
    throw InvalidArgumentError("with_grid_size: grid size must be even and at least 8");
  }
  VecGrid pts(n);
  for (int i = 0; i < n; ++i) pts[i] = eval(static_cast<double>(i) / n);
  return from_samples(pts);
}

KnotCurve KnotCurve::padded_to(int n) const {
  if (n < grid_size_ || n % 2 != 0) {
    throw InvalidArgumentError("padded_to: target grid must be even and not coarser");
  }
  FourierSeries3 s = series_;
  s.cosc.resize(n / 2, Vec3::Zero());
  s.sinc.resize(n / 2, Vec3::Zero());
  return KnotCurve(std::move(s), n);
}

KnotCurve KnotCurve::circle(const Vec3& center, double radius, const Vec3& axis,
                            int grid_size) {
  if (radius <= 0.0) throw InvalidArgumentError("circle: radius must be positive");
  if (axis.norm() == 0.0) throw InvalidArgumentError("circle: axis must be nonzero");
  const Vec3 n = axis.normalized();
  Vec3 seed = (std::abs(n.z()) < 0.9) ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
  const Vec3 e1 = (seed - seed.dot(n) * n).normalized();
  const Vec3 e2 = n.cross(e1);

  FourierSeries3 s;
  s.cosc.assign(2, Vec3::Zero());
  s.sinc.assign(2, Vec3::Zero());
  s.cosc[0] = center;
  s.cosc[1] = radius * e1;
  s.sinc[1] = radius * e2;
  return from_coeffs(std::move(s), grid_size);
}

KnotCurve KnotCurve::ellipse(double a, double b, int grid_size) {
  if (a <= 0.0 || b <= 0.0) throw InvalidArgumentError("ellipse: semiaxes must be positive");
  FourierSeries3 s;
  s.cosc.assign(2, Vec3::Zero());
  s.sinc.assign(2, Vec3::Zero());
  s.cosc[1] = Vec3(a, 0, 0);
  s.sinc[1] = Vec3(0, b, 0);
  return from_coeffs(std::move(s), grid_size);
}

KnotCurve KnotCurve::torus_knot(int p, int q, double big_radius, double small_radius,
                                int grid_size) {
  if (p < 1 || q < 1 || std::gcd(p, q) != 1) {
    throw InvalidArgumentError("torus_knot: p, q must be positive and coprime");
  }
  if (!(big_radius > small_radius && small_radius > 0.0)) {
    throw InvalidArgumentError("torus_knot: need R > r > 0");
  }
  VecGrid pts(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    const double t = static_cast<double>(i) / grid_size;
    const double lon = kTwoPi * p * t;
    const double mer = kTwoPi * q * t;
    const double w = big_radius + small_radius * std::cos(mer);
    pts[i] = Vec3(w * std::cos(lon), w * std::sin(lon), small_radius * std::sin(mer));
  }
  return from_samples(pts);
}

KnotCurve KnotCurve::perturbed_circle(double amplitude, int mode, int grid_size) {
  if (mode < 2) throw InvalidArgumentError("perturbed_circle: mode must be >= 2");
  if (!(amplitude >= 0.0 && amplitude < 0.9)) {
    throw InvalidArgumentError("perturbed_circle: amplitude must be in [0, 0.9)");
  }
  VecGrid pts(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    const double t = static_cast<double>(i) / grid_size;
    const double r = 1.0 + amplitude * std::cos(kTwoPi * mode * t);
    pts[i] = Vec3(r * std::cos(kTwoPi * t), r * std::sin(kTwoPi * t),
                  amplitude * std::sin(kTwoPi * mode * t));
  }
  return from_samples(pts);
}

SampledKnot::SampledKnot(KnotCurve curve) : curve_(std::move(curve)), n_(curve_.grid_size()) {
  const int n = n_;
  const int m = curve_.modes();
  const TrigTables tt = trig_tables(n);
  const auto& cosc = curve_.series().cosc;
  const auto& sinc = curve_.series().sinc;

  points_.assign(n, Vec3::Zero());
  d1_.assign(n, Vec3::Zero());
  d2_.assign(n, Vec3::Zero());
  d3_.assign(n, Vec3::Zero());
  for (int i = 0; i < n; ++i) {
    Vec3 p = cosc[0], v1 = Vec3::Zero(), v2 = Vec3::Zero(), v3 = Vec3::Zero();
    for (int k = 1; k <= m; ++k) {
      const int idx = static_cast<int>((static_cast<long long>(k) * i) % n);
      const double ck = tt.cos_v[idx], sk = tt.sin_v[idx];
      const double w = kTwoPi * k;
      p += ck * cosc[k] + sk * sinc[k];
      v1 += w * (-sk * cosc[k] + ck * sinc[k]);
      v2 += (w * w) * (-ck * cosc[k] - sk * sinc[k]);
      v3 += (w * w * w) * (sk * cosc[k] - ck * sinc[k]);
    }
    points_[i] = p;
    d1_[i] = v1;
    d2_[i] = v2;
    d3_[i] = v3;
  }

  speed_.resize(n);
  for (int i = 0; i < n; ++i) speed_[i] = d1_[i].norm();

  fit_scalar(speed_, sp_cos_, sp_sin_);
  total_len_ = sp_cos_[0];

  cum_.resize(n);
  for (int i = 0; i < n; ++i) cum_[i] = arc_of(static_cast<double>(i) / n);

  centroid_ = pairwise_sum(std::span<const Vec3>(points_)) / n;
  double maxd = 0.0;
  for (const Vec3& p : points_) maxd = std::max(maxd, (p - centroid_).norm());
  diameter_ = 2.0 * maxd;

  hash_ = fnv1a(points_.data(), points_.size() * sizeof(Vec3));
}

double SampledKnot::arc_of(double t) const {
  const int m = static_cast<int>(sp_cos_.size()) - 1;
  double acc = sp_cos_[0] * t;
  const double th = kTwoPi * t;
  const double c1 = std::cos(th), s1 = std::sin(th);
  double ck = 1.0, sk = 0.0;
  for (int k = 1; k <= m; ++k) {
    const double cn = ck * c1 - sk * s1;
    const double sn = sk * c1 + ck * s1;
    ck = cn;
    sk = sn;
    const double w = kTwoPi * k;
    acc += (sp_cos_[k] * sk - sp_sin_[k] * (ck - 1.0)) / w;
  }
  return acc;
}

double SampledKnot::speed_at(double t) const {
  const int m = static_cast<int>(sp_cos_.size()) - 1;
  double acc = sp_cos_[0];
  const double th = kTwoPi * t;
  const double c1 = std::cos(th), s1 = std::sin(th);
  double ck = 1.0, sk = 0.0;
  for (int k = 1; k <= m; ++k) {
    const double cn = ck * c1 - sk * s1;
    const double sn = sk * c1 + ck * s1;
    ck = cn;
    sk = sn;
    acc += sp_cos_[k] * ck + sp_sin_[k] * sk;
  }
  return acc;
}

double SampledKnot::param_at_arc(double s) const {
  const double len = total_len_;
  double target = std::fmod(s, len);
  if (target < 0.0) target += len;

  // arc_of(u) - L*u is bounded by the oscillatory part, so the solution lies
  // within +-0.5 of the constant-speed guess. Newton with a bisection guard.
  double u = target / len;
  double lo = u - 0.5, hi = u + 0.5;
  for (int it = 0; it < 80; ++it) {
    const double fu = arc_of(u) - target;
    if (std::abs(fu) < 1e-14 * len) break;
    if (fu > 0.0) {
      hi = u;
    } else {
      lo = u;
    }
    const double dv = speed_at(u);
    double next = u - fu / dv;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    u = next;
  }
  double out = std::fmod(u, 1.0);
  if (out < 0.0) out += 1.0;
  return out;
}

Vec3 SampledKnot::eval_diff(double t, double s) const { return eval_diff_offset(s, t - s); }

double SampledKnot::arc_diff(double t, double s) const { return arc_diff_offset(s, t - s); }

Vec3 SampledKnot::eval_diff_offset(double s, double dt) const {
  // f(s+dt) - f(s) = sum_k 2 sin(pi k dt) [ -A_k sin(pi k (2s+dt)) + B_k cos(pi k (2s+dt)) ]
  const auto& cosc = curve_.series().cosc;
  const auto& sinc = curve_.series().sinc;
  const int m = curve_.modes();
  const double du = M_PI * dt;
  const double su = M_PI * (2.0 * s + dt);
  const double cd1 = std::cos(du), sd1 = std::sin(du);
  const double cs1 = std::cos(su), ss1 = std::sin(su);
  double cdk = 1.0, sdk = 0.0, csk = 1.0, ssk = 0.0;
  Vec3 acc = Vec3::Zero();
  for (int k = 1; k <= m; ++k) {
    double tmp = cdk * cd1 - sdk * sd1;
    sdk = sdk * cd1 + cdk * sd1;
    cdk = tmp;
    tmp = csk * cs1 - ssk * ss1;
    ssk = ssk * cs1 + csk * ss1;
    csk = tmp;
    acc += (2.0 * sdk) * (-ssk * cosc[k] + csk * sinc[k]);
  }
  return acc;
}

double SampledKnot::arc_diff_offset(double s, double dt) const {
  const int m = static_cast<int>(sp_cos_.size()) - 1;
  const double du = M_PI * dt;
  const double su = M_PI * (2.0 * s + dt);
  const double cd1 = std::cos(du), sd1 = std::sin(du);
  const double cs1 = std::cos(su), ss1 = std::sin(su);
  double cdk = 1.0, sdk = 0.0, csk = 1.0, ssk = 0.0;
  double acc = sp_cos_[0] * dt;
  for (int k = 1; k <= m; ++k) {
    double tmp = cdk * cd1 - sdk * sd1;
    sdk = sdk * cd1 + cdk * sd1;
    cdk = tmp;
    tmp = csk * cs1 - ssk * ss1;
    ssk = ssk * cs1 + csk * ss1;
    csk = tmp;
    acc += (2.0 * sdk) / (kTwoPi * k) * (sp_cos_[k] * csk + sp_sin_[k] * ssk);
  }
  return acc;
}

double SampledKnot::arc_forward(int i, int j) const {
  const double ci = cum_[i], cj = cum_[j];
  double d = cj - ci;
  if (d < 0.0) d += total_len_;
  return d;
}

double SampledKnot::arc_distance(int i, int j) const {
  const double fwd = arc_forward(i, j);
  return std::min(fwd, total_len_ - fwd);
}

KnotRef make_knot(KnotCurve curve) {
  return std::make_shared<const SampledKnot>(std::move(curve));
}

void validate_knot(const SampledKnot& f) {
  const int n = f.size();
  const double len = f.total_len();
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw InvalidKnotError("knot has non-finite or zero length");
  }

  const double immersion_floor = 1e-8 * len;
  for (int i = 0; i < n; ++i) {
    if (!(f.speed()[i] > immersion_floor)) {
      throw InvalidKnotError("knot is not immersed at grid scale: |f'| below 1e-8 * length",
                             {i});
    }
  }

  for (int i = 1; i < n; ++i) {
    if (!(f.cum_arclen()[i] > f.cum_arclen()[i - 1])) {
      throw InvalidKnotError("cumulative arc length is not strictly increasing", {i});
    }
  }

  const double window = 4.0 * len / n;
  const double embed_floor = 1e-6 * len;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (f.arc_distance(i, j) <= window) continue;
      if ((f.points()[i] - f.points()[j]).norm() <= embed_floor) {
        throw InvalidKnotError(
            "knot grid self-touches: distant parameters map to nearby points", {i, j});
      }
    }
  }
}

KnotCurve resample_by_arclength(const KnotCurve& curve) {
  const SampledKnot f(curve);
  const int n = f.size();
  const double len = f.total_len();
  VecGrid pts(n);
  for (int ipt = 0; ipt < n; ++ipt) {
    const double u = f.param_at_arc(ipt * len / n);
    pts[ipt] = f.eval(u);
  }
  KnotCurve out = KnotCurve::from_samples(pts);

  const SampledKnot check(out);
  const double dev =
      *std::max_element(check.speed().begin(), check.speed().end()) -
      *std::min_element(check.speed().begin(), check.speed().end());
  if (!(dev < 1e-4 * check.total_len())) {
    throw InvalidKnotError("resample_by_arclength: monotone inversion of arc length failed");
  }
  return out;
}

KnotCurve reparametrize(const KnotCurve& curve, const ReparamMap& rho) {
  const int n = curve.grid_size();
  VecGrid pts(n);
  for (int i = 0; i < n; ++i) {
    pts[i] = curve.eval(rho(static_cast<double>(i) / n));
  }
  return KnotCurve::from_samples(pts);
}

CircleFit fit_circle(const SampledKnot& f) {
  const int n = f.size();
  const Vec3 c = f.centroid();

  Mat3 second = Mat3::Zero();
  for (const Vec3& p : f.points()) {
    const Vec3 d = p - c;
    second += d * d.transpose();
  }
  second /= n;

  Eigen::SelfAdjointEigenSolver<Mat3> es(second);
  const Vec3 evals = es.eigenvalues();  // ascending
  if (!(evals[1] > 1e-18 * std::max(1.0, evals[2]))) {
    throw InvalidArgumentError("fit_circle: degenerate (collinear or coincident) points");
  }
  const Vec3 normal = es.eigenvectors().col(0);
  const Vec3 e1 = es.eigenvectors().col(2);
  const Vec3 e2 = es.eigenvectors().col(1);

  // Kasa fit in plane coordinates: |q|^2 = 2*a*u + 2*b*v + g.
  Eigen::MatrixXd lhs(n, 3);
  Eigen::VectorXd rhs(n);
  std::vector<double> u(n), v(n), w(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 d = f.points()[i] - c;
    u[i] = d.dot(e1);
    v[i] = d.dot(e2);
    w[i] = d.dot(normal);
    lhs(i, 0) = 2.0 * u[i];
    lhs(i, 1) = 2.0 * v[i];
    lhs(i, 2) = 1.0;
    rhs[i] = u[i] * u[i] + v[i] * v[i];
  }
  const Eigen::Vector3d sol = lhs.colPivHouseholderQr().solve(rhs);
  const double ca = sol[0], cb = sol[1];
  const double r2 = sol[2] + ca * ca + cb * cb;
  if (!(r2 > 0.0)) {
    throw InvalidArgumentError("fit_circle: algebraic fit produced non-positive radius");
  }
  const double r = std::sqrt(r2);

  std::vector<double> sq(n);
  for (int i = 0; i < n; ++i) {
    const double radial = std::hypot(u[i] - ca, v[i] - cb) - r;
    sq[i] = radial * radial + w[i] * w[i];
  }

  CircleFit fit;
  fit.center = c + ca * e1 + cb * e2;
  fit.normal = normal;
  fit.radius = r;
  fit.rms = std::sqrt(pairwise_sum(std::span<const double>(sq)) / n);
  return fit;
}

double roundness(const SampledKnot& f) {
  const CircleFit fit = fit_circle(f);
  return fit.rms / fit.radius;
}

}  // namespace mobknot
