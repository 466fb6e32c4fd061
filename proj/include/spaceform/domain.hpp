#pragma once

// Planar cap domains: Omega = {support residual < 0} ∩ {inside a closed
// curve}. Sigma is the part of the curve inside B^int, T the part of the
// support inside the curve, and the corner set consists of the two crossing
// points P and Q. Both arcs are parametrized by s in [0, 1] from P to Q,
// which gives the transfinite map F(s, t) = (1 - t) T(s) + t Sigma(s) used
// for volume quadrature and meshing.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>

#include "spaceform/core.hpp"
#include "spaceform/fields.hpp"
#include "spaceform/geometry.hpp"
#include "spaceform/quadrature.hpp"
#include "spaceform/surfaces.hpp"

namespace spaceform {

/// Closed counter-clockwise curve r(a) = r0 (1 + eps cos(k (a - phase)))
/// around a center; eps = 0 is a circle.
class PlaneCurve {
 public:
  static PlaneCurve circle(Vec center, double radius) { return star(std::move(center), radius, 0.0, 0, 0.0); }

  static PlaneCurve star(Vec center, double r0, double eps, int k, double phase) {
    if (center.size() != 2) throw ConfigError("plane curves live in dimension 2");
    if (!(r0 > 0.0) || !(std::abs(eps) < 0.5)) throw ConfigError("curve radius must be positive, |eps| < 1/2");
    PlaneCurve c;
    c.center_ = std::move(center);
    c.r0_ = r0;
    c.eps_ = eps;
    c.k_ = k;
    c.phase_ = phase;
    return c;
  }

  bool is_circle() const { return eps_ == 0.0 || k_ == 0; }
  const Vec& center() const { return center_; }
  double base_radius() const { return r0_; }
  double eps() const { return eps_; }

  double radius(double a) const { return r0_ * (1.0 + eps_ * std::cos(k_ * (a - phase_))); }

  Vec point(double a) const {
    const double r = radius(a);
    return {center_[0] + r * std::cos(a), center_[1] + r * std::sin(a)};
  }
  Vec d1(double a) const {
    const double r = radius(a), rp = -r0_ * eps_ * k_ * std::sin(k_ * (a - phase_));
    return {rp * std::cos(a) - r * std::sin(a), rp * std::sin(a) + r * std::cos(a)};
  }
  Vec d2(double a) const {
    const double r = radius(a), rp = -r0_ * eps_ * k_ * std::sin(k_ * (a - phase_));
    const double rpp = -r0_ * eps_ * k_ * k_ * std::cos(k_ * (a - phase_));
    return {(rpp - r) * std::cos(a) - 2.0 * rp * std::sin(a), (rpp - r) * std::sin(a) + 2.0 * rp * std::cos(a)};
  }

  /// Negative inside, zero on the curve.
  double residual(std::span<const double> x) const {
    const double dx = x[0] - center_[0], dy = x[1] - center_[1];
    return std::hypot(dx, dy) - radius(std::atan2(dy, dx));
  }

  double angle_of(std::span<const double> x) const { return std::atan2(x[1] - center_[1], x[0] - center_[0]); }

 private:
  Vec center_;
  double r0_ = 1.0;
  double eps_ = 0.0;
  int k_ = 0;
  double phase_ = 0.0;
};

inline double cross2(std::span<const double> a, std::span<const double> b) { return a[0] * b[1] - a[1] * b[0]; }

/// Flat outward normal of a boundary arc traversed with Omega on the side
/// given by `omega_left`.
inline Vec arc_normal(std::span<const double> tangent, bool omega_left) {
  const double len = norm(tangent);
  const Vec right{tangent[1] / len, -tangent[0] / len};
  return omega_left ? right : scaled(-1.0, right);
}

struct BoundaryPoint {
  Vec x;
  Vec normal;      // g-unit outward normal, chart components
  double weight;   // quadrature weight times the induced length element
  double s;        // arc parameter
};

/// Orthonormal frame at a corner point (all g-unit, chart components).
struct CornerFrame {
  Vec x;
  Vec mu;      // outward conormal of Sigma
  Vec nu;      // outward normal of Sigma
  Vec N;       // outward normal of the support
  Vec nu_bar;  // outward conormal of T
};

class LensDomain {
 public:
  LensDomain(Support support, PlaneCurve sigma) : support_(std::move(support)), sigma_(std::move(sigma)) {
    if (support_.model.dim() != 2) throw ConfigError("cap domains are implemented in ambient dimension 2");
    locate_corners();
    setup_t_arc();
    validate();
  }

  const SpaceFormModel& model() const { return support_.model; }
  const Support& support() const { return support_; }
  const PlaneCurve& sigma_curve() const { return sigma_; }

  bool contains(std::span<const double> x) const {
    return model().contains(x) && support_.surface.residual(x) < 0.0 && sigma_.residual(x) < 0.0;
  }

  // Sigma arc.
  Vec sigma_point(double s) const { return sigma_.point(a0_ + s * da_); }
  Vec sigma_d1(double s) const { return scaled(da_, sigma_.d1(a0_ + s * da_)); }
  Vec sigma_d2(double s) const { return scaled(da_ * da_, sigma_.d2(a0_ + s * da_)); }

  /// Flat outward normal of Sigma (Omega lies inside the curve).
  Vec sigma_flat_normal(double s) const {
    const Vec d = sigma_.d1(a0_ + s * da_);
    return arc_normal(d, true);
  }

  /// Geodesic curvature of Sigma in g with respect to its outward normal.
  double sigma_curvature(double s) const {
    const Vec d = sigma_d1(s), dd = sigma_d2(s);
    const double kflat = cross2(d, dd) / std::pow(norm(d), 3);
    const Vec x = sigma_point(s);
    return (kflat + dot(model().grad_log_factor(x), sigma_flat_normal(s))) / model().conformal_factor(x);
  }

  // T arc.
  Vec t_point(double s) const {
    if (t_on_sphere_) {
      const double b = b0_ + s * db_;
      const auto& c = support_.surface.center();
      const double r = support_.surface.radius();
      return {c[0] + r * std::cos(b), c[1] + r * std::sin(b)};
    }
    return axpy(s, minus(q_, p_), p_);
  }
  Vec t_d1(double s) const {
    if (t_on_sphere_) {
      const double b = b0_ + s * db_, r = support_.surface.radius();
      return {-db_ * r * std::sin(b), db_ * r * std::cos(b)};
    }
    return minus(q_, p_);
  }

  const Vec& corner_p() const { return p_; }
  const Vec& corner_q() const { return q_; }

  Vec map(double s, double t) const { return axpy(t, minus(sigma_point(s), t_point(s)), t_point(s)); }

  /// Flat Jacobian determinant of the transfinite map (positive orientation).
  double map_jacobian(double s, double t) const {
    const Vec ds = axpy(t, sigma_d1(s), scaled(1.0 - t, t_d1(s)));
    const Vec dt = minus(sigma_point(s), t_point(s));
    return orientation_ * cross2(ds, dt);
  }

  /// Boundary quadrature nodes on Sigma with dA = w ds_flat.
  std::vector<BoundaryPoint> sigma_nodes(int level) const {
    std::vector<BoundaryPoint> out;
    const Rule1d r = composite_rule(level);
    for (std::size_t k = 0; k < r.nodes.size(); ++k) {
      const double s = r.nodes[k];
      const Vec x = sigma_point(s);
      const double w = model().conformal_factor(x);
      out.push_back({x, scaled(1.0 / w, sigma_flat_normal(s)), r.weights[k] * norm(sigma_d1(s)) * w, s});
    }
    return out;
  }

  std::vector<BoundaryPoint> t_nodes(int level) const {
    std::vector<BoundaryPoint> out;
    const Rule1d r = composite_rule(level);
    for (std::size_t k = 0; k < r.nodes.size(); ++k) {
      const double s = r.nodes[k];
      const Vec x = t_point(s);
      const double w = model().conformal_factor(x);
      out.push_back({x, conformal_normal(model(), support_.surface, x), r.weights[k] * norm(t_d1(s)) * w, s});
    }
    return out;
  }

  double integrate_sigma(int level, const std::function<double(const BoundaryPoint&)>& f) const {
    double sum = 0.0;
    for (const auto& b : sigma_nodes(level)) sum += b.weight * f(b);
    return sum;
  }

  double integrate_t(int level, const std::function<double(const BoundaryPoint&)>& f) const {
    double sum = 0.0;
    for (const auto& b : t_nodes(level)) sum += b.weight * f(b);
    return sum;
  }

  /// Volume integral with dvol = w^2 dx.
  double integrate_volume(int level, const std::function<double(const Vec&)>& f) const {
    const Rule1d r = composite_rule(level);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
      for (std::size_t j = 0; j < r.nodes.size(); ++j) {
        const Vec x = map(r.nodes[i], r.nodes[j]);
        const double w = model().conformal_factor(x);
        sum += r.weights[i] * r.weights[j] * map_jacobian(r.nodes[i], r.nodes[j]) * w * w * f(x);
      }
    return sum;
  }

  /// Frames at P (s = 0) and Q (s = 1).
  std::array<CornerFrame, 2> corners() const {
    std::array<CornerFrame, 2> out;
    for (int k = 0; k < 2; ++k) {
      const double s = k;
      const double dir = k == 0 ? -1.0 : 1.0;
      const Vec x = k == 0 ? p_ : q_;
      const double w = model().conformal_factor(x);
      out[k].x = x;
      out[k].mu = scaled(dir / (w * norm(sigma_d1(s))), sigma_d1(s));
      out[k].nu = scaled(1.0 / w, sigma_flat_normal(s));
      out[k].N = conformal_normal(model(), support_.surface, x);
      out[k].nu_bar = scaled(dir / (w * norm(t_d1(s))), t_d1(s));
    }
    return out;
  }

  /// Sum over the corner set (the zero-dimensional Gamma of a planar domain).
  double sum_gamma(const std::function<double(const CornerFrame&)>& f) const {
    double sum = 0.0;
    for (const auto& c : corners()) sum += f(c);
    return sum;
  }

 private:
  void locate_corners() {
    const ChartSurface& S = support_.surface;
    const int n = 4096;
    std::vector<double> roots;
    auto g = [&](double a) { return S.residual(sigma_.point(a)); };
    const double two_pi = 2.0 * std::numbers::pi;
    for (int i = 0; i < n; ++i) {
      double lo = two_pi * i / n, hi = two_pi * (i + 1) / n;
      double glo = g(lo), ghi = g(hi);
      if (glo == 0.0) {
        roots.push_back(lo);
        continue;
      }
      if ((glo < 0.0) == (ghi < 0.0) || ghi == 0.0) continue;
      for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    if (roots.size() != 2) throw ConfigError("Sigma must cross the support surface exactly twice (found " +
                                             std::to_string(roots.size()) + " crossings)");
    double a = roots[0], b = roots[1];
    // Sigma is the arc inside B^int; traverse it counter-clockwise.
    if (S.residual(sigma_.point(0.5 * (a + b))) < 0.0) {
      a0_ = a;
      da_ = b - a;
    } else {
      a0_ = b;
      da_ = a + two_pi - b;
    }
    p_ = sigma_.point(a0_);
    q_ = sigma_.point(a0_ + da_);
  }

  void setup_t_arc() {
    const ChartSurface& S = support_.surface;
    t_on_sphere_ = S.kind() == ChartSurface::Kind::Sphere;
    if (!t_on_sphere_) return;
    const auto& c = S.center();
    const double bp = std::atan2(p_[1] - c[1], p_[0] - c[0]);
    double bq = std::atan2(q_[1] - c[1], q_[0] - c[0]);
    if (bq < bp) bq += 2.0 * std::numbers::pi;
    b0_ = bp;
    db_ = bq - bp;
    const double mid = bp + 0.5 * db_;
    const double r = S.radius();
    const Vec m{c[0] + r * std::cos(mid), c[1] + r * std::sin(mid)};
    if (sigma_.residual(m) >= 0.0) db_ -= 2.0 * std::numbers::pi;
  }

  void validate() {
    for (int i = 0; i <= 64; ++i) {
      const double s = i / 64.0;
      if (chart_margin(model(), sigma_point(s)) < 1e-3 || chart_margin(model(), t_point(s)) < 1e-3)
        throw ConfigError("cap domain is not compactly contained in the chart");
    }
    orientation_ = 1.0;
    const double ref = map_jacobian(0.5, 0.5);
    orientation_ = ref > 0.0 ? 1.0 : -1.0;
    for (int i = 1; i < 32; ++i)
      for (int j = 0; j <= 8; ++j)
        if (!(map_jacobian(i / 32.0, j / 8.0) > 0.0)) throw ConfigError("transfinite map of the cap folds over");
  }

  Support support_;
  PlaneCurve sigma_;
  double a0_ = 0.0, da_ = 0.0;
  bool t_on_sphere_ = false;
  double b0_ = 0.0, db_ = 0.0;
  Vec p_, q_;
  double orientation_ = 1.0;
};

/// Sigma carrier of a cap: a circle or a star perturbation of one.
struct CapSpec {
  Vec center;
  double radius = 0.0;
  double eps = 0.0;
  int lobes = 0;
  double phase = 0.0;

  PlaneCurve curve() const { return PlaneCurve::star(center, radius, eps, lobes, phase); }
};

inline LensDomain make_cap(const UmbilicalCase& c, const CapSpec& cap) { return LensDomain(c.support(), cap.curve()); }

/// Contact angle from a corner frame: mu = sin(theta) N + cos(theta) nu_bar.
inline double contact_angle(const SpaceFormModel& model, const CornerFrame& f, double tol = 1e-8) {
  const double mu2 = model.metric_inner(f.x, f.mu, f.mu);
  const double mu_nu = model.metric_inner(f.x, f.mu, f.nu);
  if (std::abs(mu2 - 1.0) > tol || std::abs(mu_nu) > tol)
    throw PreconditionError("conormal is not a unit vector orthogonal to the normal");
  const double theta = std::atan2(model.metric_inner(f.x, f.mu, f.N), model.metric_inner(f.x, f.mu, f.nu_bar));
  if (!(theta > 0.0 && theta < std::numbers::pi)) throw PreconditionError("contact angle outside (0, pi)");
  return theta;
}

}  // namespace spaceform
