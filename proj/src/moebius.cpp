#include "mobknot/moebius.hpp"

#include <cmath>

namespace mobknot {

namespace {

void check_pole(const SphereInversion& inv, const Vec3& q) {
  if ((q - inv.center).norm() < MoebiusTransform::kPoleTol * inv.radius) {
    throw PoleError("point hits a sphere-inversion center; image not compact");
  }
}

Vec3 apply_primitive(const Primitive& prim, const Vec3& q) {
  return std::visit(
      [&](const auto& p) -> Vec3 {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Translation>) {
          return q + p.v;
        } else if constexpr (std::is_same_v<T, Rotation>) {
          return p.m * q;
        } else if constexpr (std::is_same_v<T, Homothety>) {
          return p.k * q;
        } else {
          check_pole(p, q);
          const Vec3 d = q - p.center;
          return p.center + (p.radius * p.radius / d.squaredNorm()) * d;
        }
      },
      prim);
}

double primitive_factor(const Primitive& prim, const Vec3& q) {
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Translation>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, Rotation>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, Homothety>) {
          return std::sqrt(p.k);
        } else {
          check_pole(p, q);
          return p.radius / (p.center - q).norm();
        }
      },
      prim);
}

Mat3 primitive_jacobian(const Primitive& prim, const Vec3& q) {
  return std::visit(
      [&](const auto& p) -> Mat3 {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Translation>) {
          return Mat3::Identity();
        } else if constexpr (std::is_same_v<T, Rotation>) {
          return p.m;
        } else if constexpr (std::is_same_v<T, Homothety>) {
          return p.k * Mat3::Identity();
        } else {
          check_pole(p, q);
          const Vec3 d = q - p.center;
          const Vec3 n = d.normalized();
          const double s = p.radius * p.radius / d.squaredNorm();
          return s * (Mat3::Identity() - 2.0 * (n * n.transpose()));
        }
      },
      prim);
}

}  // namespace

MoebiusTransform::MoebiusTransform(std::vector<Primitive> word) : word_(std::move(word)) {
  for (const Primitive& prim : word_) {
    if (const auto* h = std::get_if<Homothety>(&prim)) {
      if (!(h->k > 0.0)) throw InvalidArgumentError("homothety factor must be positive");
    }
    if (const auto* inv = std::get_if<SphereInversion>(&prim)) {
      if (!(inv->radius > 0.0)) {
        throw InvalidArgumentError("inversion radius must be positive");
      }
    }
    if (const auto* rot = std::get_if<Rotation>(&prim)) {
      const Mat3 err = rot->m * rot->m.transpose() - Mat3::Identity();
      if (err.cwiseAbs().maxCoeff() > 1e-10) {
        throw InvalidArgumentError("rotation matrix is not orthogonal");
      }
    }
  }
}

MoebiusTransform& MoebiusTransform::push(Primitive p) {
  word_.push_back(std::move(p));
  return *this;
}

Vec3 MoebiusTransform::apply(const Vec3& p) const {
  Vec3 q = p;
  for (const Primitive& prim : word_) q = apply_primitive(prim, q);
  return q;
}

double MoebiusTransform::conformal_factor(const Vec3& p) const {
  Vec3 q = p;
  double f = 1.0;
  for (const Primitive& prim : word_) {
    f *= primitive_factor(prim, q);
    q = apply_primitive(prim, q);
  }
  return f;
}

Mat3 MoebiusTransform::jacobian(const Vec3& p) const {
  Vec3 q = p;
  Mat3 j = Mat3::Identity();
  for (const Primitive& prim : word_) {
    j = primitive_jacobian(prim, q) * j;
    q = apply_primitive(prim, q);
  }
  return j;
}

double distance_identity_residual(const MoebiusTransform& t, const Vec3& p, const Vec3& q) {
  const double lhs = (t.apply(p) - t.apply(q)).norm();
  const double rhs = t.conformal_factor(p) * t.conformal_factor(q) * (p - q).norm();
  return std::abs(lhs - rhs);
}

KnotCurve transform_curve(const MoebiusTransform& t, const SampledKnot& f) {
  // Stricter pole guard than the per-primitive one: measure against the
  // running image's own scale.
  VecGrid pts = f.points();
  for (const Primitive& prim : t.word()) {
    if (const auto* inv = std::get_if<SphereInversion>(&prim)) {
      double scale = 0.0;
      for (const Vec3& p : pts) scale = std::max(scale, (p - inv->center).norm());
      for (const Vec3& p : pts) {
        if ((p - inv->center).norm() < MoebiusTransform::kPoleTol * scale) {
          throw PoleError("inversion center lies on the curve; image not compact");
        }
      }
    }
    for (Vec3& p : pts) p = apply_primitive(prim, p);
  }
  return KnotCurve::from_samples(pts);
}

std::vector<double> speed_identity_residual(const MoebiusTransform& t, const SampledKnot& f) {
  const SampledKnot g(transform_curve(t, f));
  std::vector<double> res(f.size());
  for (int i = 0; i < f.size(); ++i) {
    const double factor = t.conformal_factor(f.points()[i]);
    res[i] = std::abs(g.speed()[i] - factor * factor * f.speed()[i]);
  }
  return res;
}

PushforwardField pushforward(const MoebiusTransform& t, const SampledKnot& f,
                             const VecGrid& u) {
  if (static_cast<int>(u.size()) != f.size()) {
    throw GridMismatchError("pushforward: field and knot grids differ");
  }
  PushforwardField out;
  out.base = make_knot(transform_curve(t, f));
  out.vectors.resize(u.size());
  for (int i = 0; i < f.size(); ++i) {
    Vec3 w = t.jacobian(f.points()[i]) * u[i];
    const Vec3& tp = out.base->d1()[i];
    w -= (w.dot(tp) / tp.squaredNorm()) * tp;  // absorb refit error only
    out.vectors[i] = w;
  }
  return out;
}

MoebiusTransform random_compact_preserving(std::uint64_t seed, const SampledKnot& f) {
  Rng rng(seed);
  const int n_prims = rng.uniform_int(1, 4);

  VecGrid pts = f.points();
  auto centroid_of = [](const VecGrid& g) {
    Vec3 c = Vec3::Zero();
    for (const Vec3& p : g) c += p;
    return Vec3(c / static_cast<double>(g.size()));
  };
  auto radius_about = [](const VecGrid& g, const Vec3& c) {
    double r = 0.0;
    for (const Vec3& p : g) r = std::max(r, (p - c).norm());
    return r;
  };

  MoebiusTransform t;
  for (int k = 0; k < n_prims; ++k) {
    const Vec3 c = centroid_of(pts);
    const double diam = 2.0 * radius_about(pts, c);
    const int kind = rng.uniform_int(0, 3);
    Primitive prim;
    switch (kind) {
      case 0:
        prim = Translation{rng.unit_vector() * (0.5 * diam * rng.uniform())};
        break;
      case 1:
        prim = Rotation{rng.rotation()};
        break;
      case 2:
        prim = Homothety{std::exp(rng.uniform(std::log(0.5), std::log(2.0)))};
        break;
      default: {
        // Centroid distance 2.5 diameters keeps the center at least two
        // diameters from every point of the running image.
        const Vec3 center = c + rng.unit_vector() * (diam * rng.uniform(2.5, 3.5));
        const double dist = (center - c).norm();
        prim = SphereInversion{center, dist * rng.uniform(0.75, 1.25)};
        break;
      }
    }
    for (Vec3& p : pts) p = apply_primitive(prim, p);
    t.push(std::move(prim));
  }
  return t;
}

}  // namespace mobknot
