#pragma once

// Spheres and hyperplanes in chart coordinates. Umbilical hypersurfaces of
// the conformal models are exactly these, so every boundary piece in the
// library is a ChartSurface together with an orientation.

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "spaceform/core.hpp"
#include "spaceform/geometry.hpp"
#include "spaceform/rng.hpp"

namespace spaceform {

/// Surface membership tolerance in chart coordinates.
inline constexpr double kSurfaceTol = 1e-10;

class ChartSurface {
 public:
  enum class Kind { Sphere, Plane };

  /// Sphere |x - c| = r. With inside_negative the enclosed ball is the
  /// negative side (outward normal points away from c).
  static ChartSurface sphere(Vec center, double radius, bool inside_negative = true) {
    if (!(radius > 0.0)) throw ConfigError("sphere radius must be positive");
    ChartSurface s;
    s.kind_ = Kind::Sphere;
    s.center_ = std::move(center);
    s.radius_ = radius;
    s.orientation_ = inside_negative ? 1.0 : -1.0;
    return s;
  }

  /// Hyperplane <n, x> = offset; the normal points to the positive side.
  static ChartSurface plane(Vec normal, double offset) {
    const double len = norm(normal);
    if (!(len > 0.0)) throw ConfigError("plane normal must be nonzero");
    ChartSurface s;
    s.kind_ = Kind::Plane;
    s.normal_ = scaled(1.0 / len, normal);
    s.offset_ = offset / len;
    return s;
  }

  Kind kind() const { return kind_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const Vec& plane_normal() const { return normal_; }
  double offset() const { return offset_; }
  double orientation() const { return orientation_; }

  /// Signed residual: zero on the surface, negative on the inner side.
  double residual(std::span<const double> x) const {
    if (kind_ == Kind::Sphere) return orientation_ * (norm(minus(x, center_)) - radius_);
    return dot(normal_, x) - offset_;
  }

  template <class S>
  S residual_expr(std::span<const S> x) const {
    if (kind_ == Kind::Sphere) {
      S d2(0.0);
      for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - center_[i]) * (x[i] - center_[i]);
      using std::sqrt;
      return orientation_ * (sqrt(d2) - radius_);
    }
    S s(-offset_);
    for (std::size_t i = 0; i < x.size(); ++i) s += normal_[i] * x[i];
    return s;
  }

  /// Flat unit normal pointing to the positive (outer) side.
  Vec outward_normal(std::span<const double> x) const {
    if (kind_ == Kind::Sphere) return scaled(orientation_, normalized(minus(x, center_)));
    return normal_;
  }

  /// Flat principal curvature with respect to outward_normal (positive for a
  /// sphere seen from inside).
  double flat_curvature() const { return kind_ == Kind::Sphere ? orientation_ / radius_ : 0.0; }

  Vec project(std::span<const double> x) const {
    if (kind_ == Kind::Sphere) return axpy(radius_, normalized(minus(x, center_)), center_);
    return axpy(-residual(x), normal_, x);
  }

  bool on_surface(std::span<const double> x, double tol = kSurfaceTol) const { return std::abs(residual(x)) < tol; }

 private:
  Kind kind_ = Kind::Plane;
  Vec center_;
  double radius_ = 0.0;
  Vec normal_;
  double offset_ = 0.0;
  double orientation_ = 1.0;
};

/// Unit normal with respect to g in chart components: flat normal / w.
inline Vec conformal_normal(const SpaceFormModel& model, const ChartSurface& s, std::span<const double> x) {
  return scaled(1.0 / model.conformal_factor(x), s.outward_normal(x));
}

/// Principal curvature of an umbilical chart surface in the metric g:
/// kappa = (kappa_flat + d_n ln w) / w.
inline double conformal_curvature(const SpaceFormModel& model, const ChartSurface& s, std::span<const double> x) {
  const Vec n = s.outward_normal(x);
  return (s.flat_curvature() + dot(model.grad_log_factor(x), n)) / model.conformal_factor(x);
}

/// Standard normal deviate (Box-Muller, cosine branch only).
inline double gaussian(CounterRng& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Vec random_direction(CounterRng& rng, int dim) {
  Vec d(static_cast<std::size_t>(dim));
  double len = 0.0;
  while (len < 1e-8) {
    for (double& c : d) c = gaussian(rng);
    len = norm(d);
  }
  return scaled(1.0 / len, d);
}

/// Chart distance to the ideal boundary (unbounded for the stereographic chart).
inline double chart_margin(const SpaceFormModel& model, std::span<const double> p) {
  switch (model.chart()) {
    case Chart::PoincareBall: return 1.0 - norm(p);
    case Chart::UpperHalfSpace: return p.back();
    case Chart::Stereographic: return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

/// Orthonormal basis of the orthogonal complement of the unit vector n.
inline std::vector<Vec> tangent_basis(std::span<const double> n) {
  const int d = static_cast<int>(n.size());
  std::vector<Vec> basis;
  for (int a = 0; a < d && static_cast<int>(basis.size()) < d - 1; ++a) {
    Vec e = unit_vector(d, a);
    e = axpy(-dot(e, n), n, e);
    for (const Vec& b : basis) e = axpy(-dot(e, b), b, e);
    if (norm(e) > 1e-6) basis.push_back(normalized(e));
  }
  return basis;
}

/// Random surface point at chart margin at least `margin`. Planes are
/// sampled in a box of half-width `extent` around the foot of the origin.
inline Vec sample_on_surface(const SpaceFormModel& model, const ChartSurface& s, CounterRng& rng,
                             double margin = 0.02, double extent = 1.5) {
  const int d = model.dim();
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Vec p;
    if (s.kind() == ChartSurface::Kind::Sphere) {
      p = axpy(s.radius(), random_direction(rng, d), s.center());
    } else {
      p = scaled(s.offset(), s.plane_normal());
      for (const Vec& t : tangent_basis(s.plane_normal())) p = axpy(rng.uniform(-extent, extent), t, p);
    }
    if (chart_margin(model, p) > margin) return p;
  }
  throw ConfigError("surface has no points inside the chart domain");
}

}  // namespace spaceform
