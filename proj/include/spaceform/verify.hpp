#pragma once

// Identity and rigidity checks on cap domains: P-function, the integral
// identity with free constant a, divergence and Minkowski formulas, the
// mean-curvature balance, the boundary Hessian identity and rigidity.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "spaceform/auxiliary.hpp"
#include "spaceform/bvp.hpp"
#include "spaceform/diffops.hpp"
#include "spaceform/domain.hpp"
#include "spaceform/fields.hpp"
#include "spaceform/report.hpp"

namespace spaceform {

// ---------------------------------------------------------------- P-function

/// P_u = 1/2 g(grad u, grad u) - u/(n+1) + K/2 u^2.
class PFunctionField {
 public:
  PFunctionField(ScalarField u, SpaceFormModel model) : u_(std::move(u)), model_(model) {}

  double value(std::span<const double> p) const {
    const Jet2 j = u_.jet(p);
    const double w = model_.conformal_factor(p);
    const Vec g = j.gradient(model_.dim());
    return 0.5 * dot(g, g) / (w * w) - j.v / model_.dim() + 0.5 * model_.curvature() * j.v * j.v;
  }

  /// Laplacian of P from third derivatives of u.
  double laplacian_direct(std::span<const double> p) const {
    model_.require_inside(p);
    const Jet1<Jet2> u3 = u_.jet3(p);
    const auto x = seed_jet2(p);
    const Jet2 w = model_.factor_expr(std::span<const Jet2>(x));
    Jet2 grad2(0.0);
    for (int i = 0; i < model_.dim(); ++i) grad2 += u3.g[i] * u3.g[i];
    const Jet2& u = u3.v;
    const Jet2 P = 0.5 * grad2 / (w * w) - u / static_cast<double>(model_.dim()) +
                   0.5 * static_cast<double>(model_.curvature()) * u * u;
    return laplace_beltrami(model_, p, P);
  }

  /// |Hess u - (Lap u/(n+1)) g|^2, equal to Lap P when Lap u + (n+1)K u = 1.
  double bochner(std::span<const double> p) const {
    const Matrix H = covariant_hessian(model_, u_, p);
    const double w2 = std::pow(model_.conformal_factor(p), 2);
    const int d = model_.dim();
    const double lap = H.trace() / w2;
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const double t = H(i, j) - (i == j ? lap * w2 / d : 0.0);
        s += t * t;
      }
    return s / (w2 * w2);
  }

  double laplacian(std::span<const double> p) const {
    return u_.has_third_order() ? laplacian_direct(p) : bochner(p);
  }

  const ScalarField& u() const { return u_; }
  const SpaceFormModel& model() const { return model_; }

 private:
  ScalarField u_;
  SpaceFormModel model_;
};

inline PFunctionField p_function(ScalarField u, const SpaceFormModel& model) { return {std::move(u), model}; }

// --------------------------------------------------------- integral identity

struct IdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_residual = 0.0;
  double rel_residual = 0.0;  // abs_residual / |lhs|, or abs_residual when |lhs| <= 1e-12
  int quadrature_level = 0;
  double a_constant = 0.0;
  double sigma_wronskian = 0.0;
};

/// Throws unless V satisfies d_N V = kappa V along T.
inline void require_robin_potential(const LensDomain& D, const ScalarField& V, int level, double tol = 1e-8) {
  const double kappa = D.support().kappa;
  for (const auto& b : D.t_nodes(std::min(level, 4))) {
    const Jet2 j = V.jet(b.x);
    const double r = dot(b.normal, j.gradient(2)) - kappa * j.v;
    if (!(std::abs(r) <= tol * std::max(1.0, std::abs(j.v))))
      throw PreconditionError("V violates its Robin condition on T (residual " + std::to_string(r) + ")");
  }
}

namespace detail {

// V (u - phi)_nu - V_nu (u - phi) at a Sigma node.
inline double wronskian(const BoundaryPoint& b, const Jet2& u, const Jet2& phi, const Jet2& V) {
  const Vec gu = u.gradient(2), gp = phi.gradient(2), gv = V.gradient(2);
  const double d_nu = dot(b.normal, gu) - dot(b.normal, gp);
  return V.v * d_nu - dot(b.normal, gv) * (u.v - phi.v);
}

}  // namespace detail

inline double sigma_wronskian_integral(const LensDomain& D, const ScalarField& u, const AuxFunction& aux,
                                       const ScalarField& V, int level = 4) {
  const ScalarField phi = aux.field();
  return D.integrate_sigma(level, [&](const BoundaryPoint& b) {
    return detail::wronskian(b, u.jet(b.x), phi.jet(b.x), V.jet(b.x));
  });
}

/// lhs = int_Omega -V u Lap P_u dvol,
/// rhs = 1/2 int_Sigma (|grad u|^2 - a) [V (u - phi)_nu - V_nu (u - phi)] dA.
inline IdentityReport check_integral_identity(const LensDomain& D, const ScalarField& u, const AuxFunction& aux,
                                              const ScalarField& V, double a, int level) {
  require_robin_potential(D, V, level);
  const SpaceFormModel& m = D.model();
  const PFunctionField P(u, m);
  const ScalarField phi = aux.field();
  IdentityReport r;
  r.a_constant = a;
  r.quadrature_level = level;
  r.lhs = D.integrate_volume(level, [&](const Vec& x) { return -V.value(x) * u.value(x) * P.laplacian(x); });
  r.rhs = 0.5 * D.integrate_sigma(level, [&](const BoundaryPoint& b) {
    const Jet2 ju = u.jet(b.x);
    const Vec g = ju.gradient(2);
    const double w = m.conformal_factor(b.x);
    return (dot(g, g) / (w * w) - a) * detail::wronskian(b, ju, phi.jet(b.x), V.jet(b.x));
  });
  r.sigma_wronskian = sigma_wronskian_integral(D, u, aux, V, level);
  r.abs_residual = std::abs(r.lhs - r.rhs);
  r.rel_residual = std::abs(r.lhs) > 1e-12 ? r.abs_residual / std::abs(r.lhs) : r.abs_residual;
  return r;
}

inline CheckRecord to_record(const IdentityReport& r, const std::string& name, double tol) {
  CheckRecord c = make_check(name, r.lhs, r.rhs, r.abs_residual, tol);
  c.input("a", r.a_constant).input("level", r.quadrature_level).input("sigma_wronskian", r.sigma_wronskian);
  return c;
}

// ------------------------------------------------------ boundary formulas

namespace detail {

inline std::string case_label(const UmbilicalCase& c) { return std::to_string(c.index()); }

inline void require_matching_support(const UmbilicalCase& c, const LensDomain& D) {
  if (!(c.model() == D.model()) || !c.support_surface().on_surface(D.corner_p()) ||
      !c.support_surface().on_surface(D.corner_q()))
    throw ConfigError("Sigma does not close against the support surface of case " + case_label(c));
}

}  // namespace detail

/// int_Sigma g(nu, Y) dA = -(1/M) int_T V dA and
/// int_Sigma H g(nu, Y) dA = -sum_Gamma g(mu, Y).
inline VerificationReport check_divergence_formulas(const UmbilicalCase& c, const LensDomain& D, int level,
                                                    double tol = 1e-7) {
  detail::require_matching_support(c, D);
  const SpaceFormModel& m = D.model();
  const double a1 = D.integrate_sigma(level, [&](const BoundaryPoint& b) {
    return m.metric_inner(b.x, b.normal, c.eval_Y(b.x));
  });
  const double b1 = -D.integrate_t(level, [&](const BoundaryPoint& b) { return c.eval_V(b.x); }) / c.minkowski();
  const double a2 = D.integrate_sigma(level, [&](const BoundaryPoint& b) {
    return D.sigma_curvature(b.s) * m.metric_inner(b.x, b.normal, c.eval_Y(b.x));
  });
  const double b2 = -D.sum_gamma([&](const CornerFrame& f) { return m.metric_inner(f.x, f.mu, c.eval_Y(f.x)); });
  VerificationReport rep;
  rep.add(make_check("divergence.flux", a1, b1, std::abs(a1 - b1), tol).label("case", detail::case_label(c)));
  rep.add(make_check("divergence.curvature", a2, b2, std::abs(a2 - b2), tol).label("case", detail::case_label(c)));
  return rep;
}

/// Angle at both corners; throws if they differ by more than tol.
inline double measured_contact_angle(const LensDomain& D, double tol = 1e-8) {
  const auto f = D.corners();
  const double t0 = contact_angle(D.model(), f[0]), t1 = contact_angle(D.model(), f[1]);
  if (std::abs(t0 - t1) > tol) throw PreconditionError("contact angle is not constant along Gamma");
  return 0.5 * (t0 + t1);
}

namespace detail {

inline void require_angle(const LensDomain& D, double theta) {
  const double measured = measured_contact_angle(D);
  if (std::abs(measured - theta) > 1e-8)
    throw PreconditionError("Sigma meets the support at " + std::to_string(measured) + ", not at the given angle");
}

}  // namespace detail

/// int_Sigma n (V + M cos(theta) g(nu, Y)) dA = int_Sigma H g(nu, X) dA.
inline VerificationReport check_minkowski(const UmbilicalCase& c, const LensDomain& D, double theta, int level = 7,
                                          double tol = 1e-6) {
  detail::require_matching_support(c, D);
  detail::require_angle(D, theta);
  const SpaceFormModel& m = D.model();
  const double n = m.dim() - 1;
  const double lhs = D.integrate_sigma(level, [&](const BoundaryPoint& b) {
    return n * (c.eval_V(b.x) + c.minkowski() * std::cos(theta) * m.metric_inner(b.x, b.normal, c.eval_Y(b.x)));
  });
  const double rhs = D.integrate_sigma(level, [&](const BoundaryPoint& b) {
    return D.sigma_curvature(b.s) * m.metric_inner(b.x, b.normal, c.eval_X(b.x));
  });
  VerificationReport rep;
  rep.add(make_check("minkowski", lhs, rhs, std::abs(lhs - rhs), tol)
              .label("case", detail::case_label(c))
              .input("theta", theta));
  return rep;
}

/// Length-weighted mean of the curvature of Sigma and its largest deviation.
struct SigmaCurvature {
  double mean;
  double spread;
};

inline SigmaCurvature sigma_mean_curvature(const LensDomain& D, int level = 5) {
  const auto nodes = D.sigma_nodes(level);
  double area = 0.0, sum = 0.0;
  for (const auto& b : nodes) {
    area += b.weight;
    sum += b.weight * D.sigma_curvature(b.s);
  }
  const double mean = sum / area;
  double spread = 0.0;
  for (const auto& b : nodes) spread = std::max(spread, std::abs(D.sigma_curvature(b.s) - mean));
  return {mean, spread};
}

/// H (int_Omega V + n/(n+1) cos(theta) (int_T V)^2 / (M sum_Gamma g(mu, Y)))
///   = n/(n+1) int_Sigma V, with H the mean curvature of Sigma.
inline VerificationReport mean_curvature_balance(const UmbilicalCase& c, const LensDomain& D, double theta,
                                                 int level = 7, double tol = 1e-6) {
  detail::require_matching_support(c, D);
  detail::require_angle(D, theta);
  const SpaceFormModel& m = D.model();
  const double n = m.dim() - 1, n1 = m.dim();
  const double gamma_y = D.sum_gamma([&](const CornerFrame& f) { return m.metric_inner(f.x, f.mu, c.eval_Y(f.x)); });
  if (std::abs(gamma_y) < 1e-12) throw ConfigError("degenerate configuration: sum over Gamma of g(mu, Y) vanishes");
  const double vol = D.integrate_volume(level, [&](const Vec& x) { return c.eval_V(x); });
  const double tv = D.integrate_t(level, [&](const BoundaryPoint& b) { return c.eval_V(b.x); });
  const double sv = D.integrate_sigma(level, [&](const BoundaryPoint& b) { return c.eval_V(b.x); });
  const SigmaCurvature H = sigma_mean_curvature(D, level);
  const double lhs = H.mean * (vol + n / n1 * std::cos(theta) * tv * tv / (c.minkowski() * gamma_y));
  const double rhs = n / n1 * sv;
  VerificationReport rep;
  rep.add(make_check("mean_curvature_balance", lhs, rhs, std::abs(lhs - rhs), tol)
              .label("case", detail::case_label(c))
              .input("theta", theta)
              .input("H", H.mean)
              .input("H_spread", H.spread));
  return rep;
}

// ---------------------------------------------------- boundary Hessian

/// max |Hess u(N, Z)| over T samples and a g-orthonormal tangent basis Z.
inline VerificationReport boundary_hessian_check(const ScalarField& u, const Support& support, double c_tilde,
                                                 const std::vector<Vec>& samples, double tol = 1e-8) {
  const SpaceFormModel& m = support.model;
  double worst = 0.0, worst_robin = 0.0;
  for (const Vec& p : samples) {
    const Vec N = conformal_normal(m, support.surface, p);
    const Jet2 j = u.jet(p);
    const double robin = dot(N, j.gradient(m.dim())) - support.kappa * j.v - c_tilde;
    worst_robin = std::max(worst_robin, std::abs(robin));
    if (!(std::abs(robin) <= 1e-8))
      throw PreconditionError("u violates the Robin condition on T (residual " + std::to_string(robin) + ")");
    const Matrix H = covariant_hessian(m, p, j);
    const double w = m.conformal_factor(p);
    for (const Vec& t : tangent_basis(normalized(N))) {
      double s = 0.0;
      for (int a = 0; a < m.dim(); ++a)
        for (int b = 0; b < m.dim(); ++b) s += N[a] * H(a, b) * t[b] / w;
      worst = std::max(worst, std::abs(s));
    }
  }
  VerificationReport rep;
  rep.add(make_check("boundary_hessian", worst, 0.0, worst, tol)
              .input("samples", static_cast<double>(samples.size()))
              .input("robin_residual", worst_robin));
  return rep;
}

// ------------------------------------------------------------- rigidity

enum class FluxRecovery { FacetGradient, GalerkinResidual };

struct RigidityOptions {
  double threshold = 0.05;
  FluxRecovery recovery = FluxRecovery::FacetGradient;
};

struct RigidityReport {
  double c_mean = 0.0;
  double c_stddev = 0.0;
  double inferred_curvature = std::numeric_limits<double>::quiet_NaN();
  double predicted_angle = std::numeric_limits<double>::quiet_NaN();
  double measured_angle = std::numeric_limits<double>::quiet_NaN();
  double min_u = 0.0;
  bool condition_met = false;  // overdetermined condition holds to the threshold
  bool angle_defined = false;  // |c~ / c| < 1
  std::string status;
};

namespace detail {

struct FluxSample {
  double value;
  double weight;
  bool corner;  // corner rows mix Sigma and T terms: counted in the mean only
};

inline std::vector<FluxSample> facet_flux(const BvpSolution& sol, const LensDomain& D) {
  const Mesh& mesh = sol.mesh;
  const int d = sol.model.dim();
  std::map<std::pair<int, int>, int> owner;
  for (std::size_t k = 0; k < mesh.simplices.size(); ++k)
    for (int e = 0; e < 3; ++e) {
      const int a = mesh.simplices[k][e], b = mesh.simplices[k][(e + 1) % 3];
      owner[{std::min(a, b), std::max(a, b)}] = static_cast<int>(k);
    }
  std::vector<FluxSample> out;
  for (const auto& f : mesh.facets) {
    if (f.tag != FacetTag::Sigma) continue;
    const auto it = owner.find({std::min(f.v[0], f.v[1]), std::max(f.v[0], f.v[1])});
    if (it == owner.end()) throw NumericalError("Sigma facet without an adjacent simplex");
    const Vec& a = mesh.vertices[f.v[0]];
    const Vec& b = mesh.vertices[f.v[1]];
    const Vec mid = scaled(0.5, axpy(1.0, a, b));
    const Vec n = arc_normal(D.sigma_curve().d1(D.sigma_curve().angle_of(mid)), true);
    const double w = sol.model.conformal_factor(mid);
    const Vec g = element_gradient(mesh, sol.values, mesh.simplices[it->second]);
    out.push_back({dot(g, n) / w, norm(minus(b, a)) * std::pow(w, d - 1), false});
  }
  return out;
}

inline std::vector<FluxSample> residual_flux(const BvpSolution& sol) {
  const SigmaFlux f = sigma_flux(sol);
  std::vector<FluxSample> out;
  for (std::size_t i = 0; i < f.flux.size(); ++i) out.push_back({f.flux[i] / f.weight[i], f.weight[i], f.corner[i]});
  return out;
}

}  // namespace detail

/// Statistics of d_nu u over Sigma and the angle law they imply.
inline RigidityReport rigidity_check(const BvpSolution& sol, const LensDomain& D, const RigidityOptions& opt = {}) {
  const auto samples =
      opt.recovery == FluxRecovery::FacetGradient ? detail::facet_flux(sol, D) : detail::residual_flux(sol);
  if (samples.empty()) throw ConfigError("solution has no Sigma facets");
  double sw = 0.0, s1 = 0.0;
  for (const auto& s : samples) {
    sw += s.weight;
    s1 += s.weight * s.value;
  }
  RigidityReport r;
  r.c_mean = s1 / sw;
  double s2 = 0.0, w2 = 0.0;
  for (const auto& s : samples)
    if (!s.corner) {
      s2 += s.weight * (s.value - r.c_mean) * (s.value - r.c_mean);
      w2 += s.weight;
    }
  r.c_stddev = std::sqrt(s2 / w2);
  r.min_u = *std::min_element(sol.values.begin(), sol.values.end());
  r.measured_angle = measured_contact_angle(D, 1e-6);
  const double ratio = r.c_stddev / std::abs(r.c_mean);
  r.condition_met = r.c_mean > 0.0 && ratio < opt.threshold;
  if (r.c_mean <= 0.0 && ratio < opt.threshold)
    throw InconsistencyError("normal derivative on Sigma is constant but nonpositive (c = " + std::to_string(r.c_mean) +
                             ")");
  if (r.c_mean > 0.0) r.inferred_curvature = 1.0 / (sol.model.dim() * r.c_mean);
  const double cos_pred = -sol.params.c_tilde / r.c_mean;
  r.angle_defined = std::abs(cos_pred) < 1.0;
  if (r.angle_defined) r.predicted_angle = std::acos(cos_pred);
  r.status = r.condition_met ? "overdetermined condition met" : "overdetermined condition not met";
  return r;
}

inline VerificationReport to_report(const RigidityReport& r, double c_exact, double curvature_exact,
                                    double angle_exact, double rel_tol = 0.02, double angle_tol_deg = 2.0) {
  VerificationReport rep;
  const double to_deg = 180.0 / std::numbers::pi;
  rep.add(make_check("rigidity.c", r.c_mean, c_exact, std::abs(r.c_mean - c_exact) / std::abs(c_exact), rel_tol)
              .input("c_stddev", r.c_stddev)
              .label("status", r.status));
  rep.add(make_check("rigidity.curvature", r.inferred_curvature, curvature_exact,
                     std::abs(r.inferred_curvature - curvature_exact) / std::abs(curvature_exact), rel_tol));
  rep.add(make_check("rigidity.angle_deg", r.predicted_angle * to_deg, angle_exact * to_deg,
                     std::abs(r.predicted_angle - angle_exact) * to_deg, angle_tol_deg)
              .input("measured_deg", r.measured_angle * to_deg));
  return rep;
}

}  // namespace spaceform
