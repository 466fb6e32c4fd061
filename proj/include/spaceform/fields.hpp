#pragma once

// The four umbilical support cases and their conformal Killing data.
//
//   1  geodesic sphere in H (ball chart)        kappa = coth R   M = sinh R
//   2  equidistant / horosphere in H (half-space) kappa = cos a  M = -sec a
//   3  totally geodesic plane in H (ball chart)  kappa = 0        M = -1
//   4  geodesic sphere in S (stereographic)      kappa = cot R    M = sin R
//
// X is conformal Killing with 1/2 L_X g = V g, Y is Killing, and V satisfies
// Hess V = -K V g with d_N V = kappa V on the support.

#include <cctype>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "spaceform/core.hpp"
#include "spaceform/diffops.hpp"
#include "spaceform/geometry.hpp"
#include "spaceform/rng.hpp"
#include "spaceform/surfaces.hpp"

namespace spaceform {

enum class CaseId { GeodesicSphereH = 1, EquidistantH = 2, GeodesicPlaneH = 3, GeodesicSphereS = 4 };

inline constexpr CaseId kAllCases[] = {CaseId::GeodesicSphereH, CaseId::EquidistantH, CaseId::GeodesicPlaneH,
                                       CaseId::GeodesicSphereS};

inline std::string to_string(CaseId id) {
  switch (id) {
    case CaseId::GeodesicSphereH: return "geodesic-sphere-h";
    case CaseId::EquidistantH: return "equidistant-h";
    case CaseId::GeodesicPlaneH: return "geodesic-plane-h";
    case CaseId::GeodesicSphereS: return "geodesic-sphere-s";
  }
  return "?";
}

/// Accepts "1".."4" or the names printed by to_string (case-insensitive).
inline CaseId parse_case(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (CaseId id : kAllCases)
    if (s == to_string(id) || s == std::to_string(static_cast<int>(id))) return id;
  throw ConfigError("unknown case '" + s + "'");
}

/// Support surface with the data the identities need: the surface in some
/// chart, its principal curvature and a potential V with d_N V = kappa V.
struct Support {
  SpaceFormModel model;
  ChartSurface surface;
  double kappa;
  ScalarField V;
};

struct SurfacePoint {
  Vec point;
  Vec normal;  // chart components of the g-unit outward normal
};

class UmbilicalCase {
 public:
  static UmbilicalCase make(CaseId id, double param, int dim = 2) {
    if (!std::isfinite(param)) throw ConfigError("case parameter must be finite");
    switch (id) {
      case CaseId::GeodesicSphereH: {
        if (!(param > 0.0)) throw ConfigError("geodesic sphere radius R must be positive");
        const double rr = std::tanh(param / 2.0);
        return UmbilicalCase(id, param, 1.0 / std::tanh(param), std::sinh(param), rr,
                             SpaceFormModel::poincare_ball(dim), ChartSurface::sphere(Vec(dim, 0.0), rr));
      }
      case CaseId::EquidistantH: {
        if (!(param >= 0.0 && param < std::numbers::pi / 2))
          throw ConfigError("equidistant angle alpha must lie in [0, pi/2)");
        Vec n(dim, 0.0);
        n[0] = -std::sin(param);
        n[dim - 1] = -std::cos(param);
        return UmbilicalCase(id, param, std::cos(param), -1.0 / std::cos(param), 0.0,
                             SpaceFormModel::upper_half_space(dim), ChartSurface::plane(n, -std::cos(param)));
      }
      case CaseId::GeodesicPlaneH:
        return UmbilicalCase(id, 0.0, 0.0, -1.0, 0.0, SpaceFormModel::poincare_ball(dim),
                             ChartSurface::plane(scaled(-1.0, unit_vector(dim, dim - 1)), 0.0));
      case CaseId::GeodesicSphereS: {
        if (!(param > 0.0 && param <= std::numbers::pi / 2))
          throw ConfigError("spherical cap radius R must lie in (0, pi/2]");
        const double rr = std::tan(param / 2.0);
        return UmbilicalCase(id, param, std::cos(param) / std::sin(param), std::sin(param), rr,
                             SpaceFormModel::stereographic(dim), ChartSurface::sphere(Vec(dim, 0.0), rr));
      }
    }
    throw ConfigError("unknown case");
  }

  CaseId id() const { return id_; }
  int index() const { return static_cast<int>(id_); }
  double param() const { return param_; }
  double kappa() const { return kappa_; }
  double minkowski() const { return minkowski_; }
  double chart_radius() const { return chart_radius_; }
  const SpaceFormModel& model() const { return model_; }
  const ChartSurface& support_surface() const { return surface_; }
  int dim() const { return model_.dim(); }

  /// Geodesic-sphere cases carry the half-ball restriction x_{n+1} > 0.
  bool has_half_ball_flag() const { return id_ == CaseId::GeodesicSphereH || id_ == CaseId::GeodesicSphereS; }

  template <class S>
  S V_expr(std::span<const S> x) const {
    const S& xn = x.back();
    switch (id_) {
      case CaseId::GeodesicSphereH: return 2.0 * xn / (1.0 - sum_of_squares(x));
      case CaseId::EquidistantH: return 1.0 / xn;
      case CaseId::GeodesicPlaneH: return (1.0 + sum_of_squares(x)) / (1.0 - sum_of_squares(x));
      case CaseId::GeodesicSphereS: return 2.0 * xn / (1.0 + sum_of_squares(x));
    }
    return S(0.0);
  }

  template <class S>
  std::vector<S> X_expr(std::span<const S> x) const {
    std::vector<S> out(x.begin(), x.end());
    const S& xn = x.back();
    switch (id_) {
      case CaseId::GeodesicSphereH:
      case CaseId::GeodesicSphereS: {
        const double r2 = chart_radius_ * chart_radius_;
        const double s = id_ == CaseId::GeodesicSphereH ? 2.0 / (1.0 - r2) : 2.0 / (1.0 + r2);
        for (auto& c : out) c = s * (xn * c);
        out.back() -= s * 0.5 * (sum_of_squares(x) + r2);
        break;
      }
      case CaseId::EquidistantH: out.back() -= 1.0; break;
      case CaseId::GeodesicPlaneH: break;
    }
    return out;
  }

  template <class S>
  std::vector<S> Y_expr(std::span<const S> x) const {
    std::vector<S> out(x.begin(), x.end());
    const S xn = x.back();
    switch (id_) {
      case CaseId::GeodesicSphereH:
      case CaseId::GeodesicPlaneH:
        for (auto& c : out) c = -(xn * c);
        out.back() += 0.5 * (1.0 + sum_of_squares(x));
        break;
      case CaseId::EquidistantH: break;
      case CaseId::GeodesicSphereS:
        for (auto& c : out) c = xn * c;
        out.back() += 0.5 * (1.0 - sum_of_squares(x));
        break;
    }
    return out;
  }

  ScalarField V_field() const {
    return ScalarField::closed_form([c = *this](auto x) { return c.V_expr(x); });
  }
  VectorField X_field() const {
    return VectorField::closed_form([c = *this](auto x) { return c.X_expr(x); });
  }
  VectorField Y_field() const {
    return VectorField::closed_form([c = *this](auto x) { return c.Y_expr(x); });
  }

  double eval_V(std::span<const double> p) const {
    model_.require_inside(p);
    return V_expr(p);
  }
  Vec eval_X(std::span<const double> p) const {
    model_.require_inside(p);
    return X_expr(p);
  }
  Vec eval_Y(std::span<const double> p) const {
    model_.require_inside(p);
    return Y_expr(p);
  }

  /// Zero on the support, negative inside B^int, positive outside.
  double surface_residual(std::span<const double> p) const { return surface_.residual(p); }

  SurfacePoint support_normal(std::span<const double> p) const {
    require_on_surface(p);
    return {Vec(p.begin(), p.end()), conformal_normal(model_, surface_, p)};
  }

  /// g(N, Y) at a support point, cross-checked against V / M.
  double normal_potential_ratio(std::span<const double> p) const {
    const SurfacePoint sp = support_normal(p);
    const double lhs = model_.metric_inner(p, sp.normal, eval_Y(p));
    const double rhs = eval_V(p) / minkowski_;
    if (std::abs(lhs - rhs) > 1e-10 * std::max(1.0, std::abs(rhs)))
      throw NumericalError("g(N, Y) disagrees with V / M");
    return lhs;
  }

  Support support() const { return {model_, surface_, kappa_, V_field()}; }

  /// Support data in the Poincare ball chart. Case 2 is transported through
  /// the half-space to ball isometry; the ball-chart image of L_alpha is the
  /// sphere with center (tan a / 2, 0, ..., 1/2) and radius sec a / 2.
  Support ball_support() const {
    switch (id_) {
      case CaseId::GeodesicSphereH:
      case CaseId::GeodesicPlaneH: return support();
      case CaseId::EquidistantH: {
        const int d = dim();
        Vec c(d, 0.0);
        c[0] = std::tan(param_) / 2.0;
        c[d - 1] = 0.5;
        ScalarField v = ScalarField::closed_form([](auto x) {
          const auto y = ball_to_halfspace_expr(x);
          return 1.0 / y.back();
        });
        return {SpaceFormModel::poincare_ball(d), ChartSurface::sphere(c, 0.5 / std::cos(param_)), kappa_, v};
      }
      case CaseId::GeodesicSphereS: break;
    }
    throw ConfigError("the spherical case has no ball-chart support");
  }

  /// Random point of the chart domain (identities hold on the whole chart).
  Vec sample_interior(CounterRng& rng) const {
    const int d = dim();
    Vec p(d);
    switch (model_.chart()) {
      case Chart::PoincareBall: {
        const double r = 0.95 * std::pow(rng.uniform(), 1.0 / d);
        return scaled(r, random_direction(rng, d));
      }
      case Chart::UpperHalfSpace:
        for (int i = 0; i + 1 < d; ++i) p[i] = rng.uniform(-2.0, 2.0);
        p[d - 1] = rng.uniform(0.05, 3.0);
        return p;
      case Chart::Stereographic:
        for (double& c : p) c = rng.uniform(-2.0, 2.0);
        return p;
    }
    return p;
  }

  /// Random point of the support surface inside the chart domain.
  Vec sample_surface(CounterRng& rng) const {
    const int d = dim();
    switch (id_) {
      case CaseId::GeodesicSphereH:
      case CaseId::GeodesicSphereS: return scaled(chart_radius_, random_direction(rng, d));
      case CaseId::EquidistantH: {
        const double sa = std::sin(param_), ca = std::cos(param_);
        for (;;) {
          Vec p(d, 0.0);
          const double t = rng.uniform(-1.5, 1.5);
          p[0] = ca * sa + t * ca;
          p[d - 1] = ca * ca - t * sa;
          for (int i = 1; i + 1 < d; ++i) p[i] = rng.uniform(-1.5, 1.5);
          if (p[d - 1] > 0.1) return p;
        }
      }
      case CaseId::GeodesicPlaneH: {
        Vec p(d, 0.0);
        const Vec dir = random_direction(rng, d - 1);
        const double r = 0.9 * std::pow(rng.uniform(), 1.0 / std::max(1, d - 1));
        for (int i = 0; i + 1 < d; ++i) p[i] = r * dir[i];
        return p;
      }
    }
    return Vec(d, 0.0);
  }

 private:
  UmbilicalCase(CaseId id, double param, double kappa, double minkowski, double chart_radius, SpaceFormModel model,
                ChartSurface surface)
      : id_(id),
        param_(param),
        kappa_(kappa),
        minkowski_(minkowski),
        chart_radius_(chart_radius),
        model_(model),
        surface_(std::move(surface)) {}

  void require_on_surface(std::span<const double> p) const {
    model_.require_inside(p);
    if (!surface_.on_surface(p)) throw PreconditionError("point is not on the support surface");
  }

  CaseId id_;
  double param_;
  double kappa_;
  double minkowski_;
  double chart_radius_;
  SpaceFormModel model_;
  ChartSurface surface_;
};

inline UmbilicalCase make_case(CaseId id, double param, int dim = 2) { return UmbilicalCase::make(id, param, dim); }

}  // namespace spaceform
