#pragma once

// Conformal models of hyperbolic space and the sphere.
//
// Every chart carries a metric g = w(x)^2 * (flat metric):
//   Poincare ball        w = 2 / (1 - |x|^2)      K = -1
//   upper half-space     w = 1 / x_{n+1}          K = -1
//   stereographic        w = 2 / (1 + |x|^2)      K = +1
// The dimension is runtime data (any n+1 >= 2).

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "spaceform/core.hpp"
#include "spaceform/jet.hpp"

namespace spaceform {

enum class Chart { PoincareBall, UpperHalfSpace, Stereographic };

inline std::string to_string(Chart c) {
  switch (c) {
    case Chart::PoincareBall: return "poincare-ball";
    case Chart::UpperHalfSpace: return "upper-half-space";
    case Chart::Stereographic: return "stereographic";
  }
  return "?";
}

/// Points this close to the ideal boundary are rejected, not clamped.
inline constexpr double kChartMargin = 1e-12;

class SpaceFormModel {
 public:
  SpaceFormModel(int curvature, Chart chart, int dim) : curvature_(curvature), chart_(chart), dim_(dim) {
    if (curvature != -1 && curvature != 1) throw ConfigError("curvature must be -1 or +1");
    if (dim < 2) throw ConfigError("ambient dimension must be at least 2");
    const bool hyperbolic_chart = chart == Chart::PoincareBall || chart == Chart::UpperHalfSpace;
    if (hyperbolic_chart && curvature != -1) throw ConfigError(to_string(chart) + " chart requires K = -1");
    if (chart == Chart::Stereographic && curvature != 1) throw ConfigError("stereographic chart requires K = +1");
  }

  static SpaceFormModel poincare_ball(int dim) { return {-1, Chart::PoincareBall, dim}; }
  static SpaceFormModel upper_half_space(int dim) { return {-1, Chart::UpperHalfSpace, dim}; }
  static SpaceFormModel stereographic(int dim) { return {1, Chart::Stereographic, dim}; }

  int curvature() const { return curvature_; }
  Chart chart() const { return chart_; }
  int dim() const { return dim_; }

  bool contains(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim_) return false;
    for (double c : p)
      if (!std::isfinite(c)) return false;
    switch (chart_) {
      case Chart::PoincareBall: return 1.0 - norm(p) > kChartMargin;
      case Chart::UpperHalfSpace: return p.back() > kChartMargin;
      case Chart::Stereographic: return true;
    }
    return false;
  }

  void require_inside(std::span<const double> p) const {
    if (!contains(p)) throw DomainError("point outside the " + to_string(chart_) + " chart domain");
  }

  /// Conformal factor as a closed-form expression (no domain check).
  template <class S>
  S factor_expr(std::span<const S> x) const {
    switch (chart_) {
      case Chart::PoincareBall: return 2.0 / (1.0 - sum_of_squares(x));
      case Chart::UpperHalfSpace: return 1.0 / x.back();
      case Chart::Stereographic: return 2.0 / (1.0 + sum_of_squares(x));
    }
    return S(0.0);
  }

  double conformal_factor(std::span<const double> p) const {
    require_inside(p);
    return factor_expr(p);
  }

  /// Flat gradient of ln w, evaluated in closed form per chart.
  Vec grad_log_factor(std::span<const double> p) const {
    require_inside(p);
    Vec out(p.size(), 0.0);
    switch (chart_) {
      case Chart::PoincareBall: {
        const double s = 2.0 / (1.0 - dot(p, p));
        for (std::size_t i = 0; i < p.size(); ++i) out[i] = s * p[i];
        break;
      }
      case Chart::UpperHalfSpace: out.back() = -1.0 / p.back(); break;
      case Chart::Stereographic: {
        const double s = -2.0 / (1.0 + dot(p, p));
        for (std::size_t i = 0; i < p.size(); ++i) out[i] = s * p[i];
        break;
      }
    }
    return out;
  }

  double metric_inner(std::span<const double> p, std::span<const double> v, std::span<const double> u) const {
    const double w = conformal_factor(p);
    return w * w * dot(v, u);
  }

  double metric_norm(std::span<const double> p, std::span<const double> v) const {
    return std::sqrt(metric_inner(p, v, v));
  }

  bool operator==(const SpaceFormModel&) const = default;

 private:
  int curvature_;
  Chart chart_;
  int dim_;
};

inline double conformal_factor(const SpaceFormModel& model, std::span<const double> p) {
  return model.conformal_factor(p);
}

inline double metric_inner(const SpaceFormModel& model, std::span<const double> p, std::span<const double> v,
                           std::span<const double> u) {
  return model.metric_inner(p, v, u);
}

/// Riemannian distance between two chart points.
///
/// Uses d = 2 asinh(s) with s = sinh(d/2) in closed form, which is the
/// standard cosh-distance formula rewritten to stay accurate for nearby points.
inline double geodesic_distance(const SpaceFormModel& model, std::span<const double> x, std::span<const double> y) {
  model.require_inside(x);
  model.require_inside(y);
  const double chord = norm(minus(x, y));
  switch (model.chart()) {
    case Chart::PoincareBall:
      return 2.0 * std::asinh(chord / std::sqrt((1.0 - dot(x, x)) * (1.0 - dot(y, y))));
    case Chart::UpperHalfSpace: return 2.0 * std::asinh(chord / (2.0 * std::sqrt(x.back() * y.back())));
    case Chart::Stereographic: {
      // Half the chord between the lifts to the unit sphere.
      const double half = chord / std::sqrt((1.0 + dot(x, x)) * (1.0 + dot(y, y)));
      return 2.0 * std::atan2(half, std::sqrt(std::max(0.0, 1.0 - half * half)));
    }
  }
  return 0.0;
}

/// psi'(d(base, x)) in closed chart form: cosh d for K = -1, cos d for K = +1.
template <class S>
S distance_profile(const SpaceFormModel& model, std::span<const double> base, std::span<const S> x) {
  S chord2(0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const S d = x[i] - base[i];
    chord2 += d * d;
  }
  switch (model.chart()) {
    case Chart::PoincareBall:
      return 1.0 + 2.0 * chord2 / ((1.0 - sum_of_squares(x)) * (1.0 - dot(base, base)));
    case Chart::UpperHalfSpace: return 1.0 + chord2 / (2.0 * base.back() * x.back());
    case Chart::Stereographic:
      return 1.0 - 2.0 * chord2 / ((1.0 + sum_of_squares(x)) * (1.0 + dot(base, base)));
  }
  return S(0.0);
}

inline double cosh_or_cos_distance_from(const SpaceFormModel& model, std::span<const double> base,
                                        std::span<const double> p) {
  model.require_inside(base);
  model.require_inside(p);
  return distance_profile(model, base, p);
}

/// Isometry from the upper half-space to the Poincare ball: reflection in the
/// plane x_{n+1} = 0 followed by inversion in the sphere of radius sqrt(2)
/// about E_{n+1}.
template <class S>
std::vector<S> halfspace_to_ball_expr(std::span<const S> x) {
  const std::size_t d = x.size();
  S denom(0.0);
  for (std::size_t i = 0; i + 1 < d; ++i) denom += x[i] * x[i];
  denom += (x[d - 1] + 1.0) * (x[d - 1] + 1.0);
  std::vector<S> y(d);
  for (std::size_t i = 0; i + 1 < d; ++i) y[i] = 2.0 * x[i] / denom;
  y[d - 1] = (sum_of_squares(x) - 1.0) / denom;
  return y;
}

/// Inverse of halfspace_to_ball (both reflections are involutions).
template <class S>
std::vector<S> ball_to_halfspace_expr(std::span<const S> x) {
  const std::size_t d = x.size();
  S dist2(0.0);
  for (std::size_t i = 0; i + 1 < d; ++i) dist2 += x[i] * x[i];
  dist2 += (x[d - 1] - 1.0) * (x[d - 1] - 1.0);
  std::vector<S> y(d);
  for (std::size_t i = 0; i + 1 < d; ++i) y[i] = 2.0 * x[i] / dist2;
  y[d - 1] = -(1.0 + 2.0 * (x[d - 1] - 1.0) / dist2);
  return y;
}

inline Vec halfspace_to_ball(std::span<const double> x) {
  SpaceFormModel::upper_half_space(static_cast<int>(x.size())).require_inside(x);
  return halfspace_to_ball_expr(x);
}

inline Vec ball_to_halfspace(std::span<const double> x) {
  SpaceFormModel::poincare_ball(static_cast<int>(x.size())).require_inside(x);
  return ball_to_halfspace_expr(x);
}

/// Radial profile of the warped-product form dr^2 + psi(r)^2 g_sphere.
struct WarpedProfile {
  int curvature;

  double psi(double r) const { return curvature < 0 ? std::sinh(r) : std::sin(r); }
  double dpsi(double r) const { return curvature < 0 ? std::cosh(r) : std::cos(r); }
  double ddpsi(double r) const { return curvature < 0 ? std::sinh(r) : -std::sin(r); }
  double dddpsi(double r) const { return curvature < 0 ? std::cosh(r) : -std::cos(r); }
};

inline WarpedProfile warped_profile(int curvature) {
  if (curvature != -1 && curvature != 1) throw ConfigError("warped profile requires K = -1 or K = +1");
  return WarpedProfile{curvature};
}

}  // namespace spaceform
