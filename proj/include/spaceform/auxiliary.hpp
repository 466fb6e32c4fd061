#pragma once

// The auxiliary function phi with
//   Hess phi = (1/(n+1) - K phi) g   everywhere,
//   d_N phi  = kappa phi + c~        on the support.
// Every instance has the form phi = s * psi'(d(b, x)) + K/(n+1) for a base
// point b and scale s; the cases differ only in b, s and the chart.

#include <cmath>
#include <span>

#include "spaceform/core.hpp"
#include "spaceform/diffops.hpp"
#include "spaceform/fields.hpp"
#include "spaceform/geometry.hpp"
#include "spaceform/report.hpp"
#include "spaceform/rng.hpp"
#include "spaceform/surfaces.hpp"

namespace spaceform {

inline double solve_c0(const UmbilicalCase& c, double c_tilde) {
  const double n1 = c.dim();
  const double k = c.kappa();
  switch (c.id()) {
    case CaseId::GeodesicSphereH: return (c_tilde - k / n1) / ((1.0 - k * k) * std::sinh(c.param()));
    case CaseId::EquidistantH: return 1.0 / n1 - c_tilde / std::cos(c.param());
    case CaseId::GeodesicPlaneH: return c_tilde / (1.0 + std::sqrt(1.0 + c_tilde * c_tilde));
    case CaseId::GeodesicSphereS: return -(c_tilde + k / n1) / (std::sin(c.param()) * (1.0 + k * k));
  }
  return 0.0;
}

class AuxFunction {
 public:
  AuxFunction(Support support, double c_tilde, double c0, Vec base, double scale)
      : support_(std::move(support)), c_tilde_(c_tilde), c0_(c0), base_(std::move(base)), scale_(scale) {
    support_.model.require_inside(base_);
  }

  /// The closed-form phi for one of the four cases. Case 2 lives in the ball
  /// chart; the others in the case's own chart.
  static AuxFunction for_case(const UmbilicalCase& c, double c_tilde) {
    const double c0 = solve_c0(c, c_tilde);
    const int d = c.dim();
    switch (c.id()) {
      case CaseId::GeodesicSphereH:
      case CaseId::GeodesicSphereS: return AuxFunction(c.support(), c_tilde, c0, Vec(d, 0.0), c0);
      case CaseId::EquidistantH: return AuxFunction(c.ball_support(), c_tilde, c0, Vec(d, 0.0), c0);
      case CaseId::GeodesicPlaneH: {
        if (!(std::abs(c0) < 1.0)) throw NumericalError("axial base point left the ball");
        return AuxFunction(c.support(), c_tilde, c0, scaled(c0, unit_vector(d, d - 1)), 1.0);
      }
    }
    throw ConfigError("unknown case");
  }

  template <class S>
  S expr(std::span<const S> x) const {
    const SpaceFormModel& m = support_.model;
    return scale_ * distance_profile(m, base_, x) + static_cast<double>(m.curvature()) / m.dim();
  }

  double eval(std::span<const double> p) const {
    support_.model.require_inside(p);
    return expr(p);
  }

  ScalarField field() const {
    return ScalarField::closed_form([a = *this](auto x) { return a.expr(x); });
  }

  const Support& support() const { return support_; }
  const SpaceFormModel& model() const { return support_.model; }
  double c_tilde() const { return c_tilde_; }
  double c0() const { return c0_; }
  const Vec& base_point() const { return base_; }
  double scale() const { return scale_; }

 private:
  Support support_;
  double c_tilde_;
  double c0_;
  Vec base_;
  double scale_;
};

inline Jet2 eval_phi(const AuxFunction& aux, std::span<const double> p) {
  aux.model().require_inside(p);
  return aux.field().jet(p);
}

/// Frame max norm of Hess phi - (1/(n+1) - K phi) g at p.
inline double resolvent_interior_residual(const AuxFunction& aux, std::span<const double> p) {
  const SpaceFormModel& m = aux.model();
  const Jet2 j = aux.field().jet(p);
  Matrix r = covariant_hessian(m, p, j);
  const double w2 = std::pow(m.conformal_factor(p), 2);
  const double target = 1.0 / m.dim() - m.curvature() * j.v;
  r.diagonal().array() -= target * w2;
  return frame_max_norm(m, p, r);
}

/// |d_N phi - kappa phi - c~| at a support point.
inline double resolvent_robin_residual(const AuxFunction& aux, std::span<const double> p) {
  const Support& s = aux.support();
  const Jet2 j = aux.field().jet(p);
  const Vec n = conformal_normal(s.model, s.surface, p);
  return std::abs(dot(n, j.gradient(s.model.dim())) - s.kappa * j.v - aux.c_tilde());
}

inline VerificationReport verify_resolvent(const AuxFunction& aux, int sample_count, CounterRng& rng,
                                           double tol = 1e-9) {
  const Support& s = aux.support();
  const int d = s.model.dim();
  double interior = 0.0, robin = 0.0;
  for (int i = 0; i < sample_count; ++i) {
    Vec p;
    do {
      p = Vec(d);
      for (double& c : p) c = rng.uniform(-1.0, 1.0);
      if (s.model.chart() == Chart::UpperHalfSpace) p.back() = rng.uniform(0.05, 3.0);
    } while (chart_margin(s.model, p) < 0.02);
    interior = std::max(interior, resolvent_interior_residual(aux, p));
    robin = std::max(robin, resolvent_robin_residual(aux, sample_on_surface(s.model, s.surface, rng)));
  }
  VerificationReport rep;
  rep.add(make_check("resolvent.hessian", interior, 0.0, interior, tol)
              .input("c_tilde", aux.c_tilde())
              .input("c0", aux.c0())
              .input("samples", sample_count));
  rep.add(make_check("resolvent.robin", robin, 0.0, robin, tol)
              .input("c_tilde", aux.c_tilde())
              .input("c0", aux.c0())
              .input("samples", sample_count));
  return rep;
}

}  // namespace spaceform
