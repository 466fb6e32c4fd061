#pragma once

// Batch verification: each suite returns an ordered report; the numbering
// follows the acceptance list shipped with the CLI.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "spaceform/horolens.hpp"
#include "spaceform/auxiliary.hpp"
#include "spaceform/bvp.hpp"
#include "spaceform/diffops.hpp"
#include "spaceform/domain.hpp"
#include "spaceform/fields.hpp"
#include "spaceform/geometry.hpp"
#include "spaceform/mesh.hpp"
#include "spaceform/report.hpp"
#include "spaceform/verify.hpp"

namespace spaceform {

struct SuiteConfig {
  std::uint64_t seed = 20240601;
  int samples = 1000;
  std::vector<int> dims{2, 3};
  double R = 1.0;        // cases 1 and 4
  double alpha = 0.3;    // case 2
  std::vector<double> c_tilde_grid{-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<double> b_grid{0.1, 1.0 / 3.0, 0.45};
  double b = 0.25;                 // horosphere lens used by the identity and solver runs
  std::vector<double> a_grid;      // empty: {-1, 0, c^2, 5}
  int quad_level = 4;
  int fem_levels = 4;
};

inline std::vector<UmbilicalCase> suite_cases(const SuiteConfig& cfg, int dim) {
  return {make_case(CaseId::GeodesicSphereH, cfg.R, dim), make_case(CaseId::EquidistantH, cfg.alpha, dim),
          make_case(CaseId::GeodesicPlaneH, 0.0, dim), make_case(CaseId::GeodesicSphereS, cfg.R, dim)};
}

namespace detail {

inline CheckRecord& tag(CheckRecord& r, int criterion) { return r.label("criterion", std::to_string(criterion)); }

inline void add_tagged(VerificationReport& rep, CheckRecord r, int criterion) {
  tag(r, criterion);
  rep.add(std::move(r));
}

inline void append_tagged(VerificationReport& rep, const VerificationReport& part, int criterion) {
  for (CheckRecord r : part.records()) add_tagged(rep, std::move(r), criterion);
}

}  // namespace detail

// ------------------------------------------------------------------ 1

/// Conformal Killing data of one case. Residuals are frame norms, scaled by
/// max(1, |V|) where the identity is homogeneous in V.
inline VerificationReport field_identity_suite(const UmbilicalCase& c, int samples, CounterRng& rng,
                                               double tol = 1e-8) {
  const SpaceFormModel& m = c.model();
  const ScalarField V = c.V_field();
  const VectorField X = c.X_field(), Y = c.Y_field();
  const int d = m.dim();
  double lx = 0, ly = 0, dx = 0, dy = 0, hv = 0, rv = 0, tx = 0;
  for (int i = 0; i < samples; ++i) {
    const Vec p = c.sample_interior(rng);
    const double w2 = std::pow(m.conformal_factor(p), 2);
    const double v = V.value(p), scale = std::max(1.0, std::abs(v));
    Matrix L = lie_derivative_metric(m, X, p);
    L.diagonal().array() -= v * w2;
    lx = std::max(lx, frame_max_norm(m, p, L) / scale);
    ly = std::max(ly, frame_max_norm(m, p, lie_derivative_metric(m, Y, p)));
    dx = std::max(dx, std::abs(covariant_divergence(m, X, p) - d * v) / scale);
    dy = std::max(dy, std::abs(covariant_divergence(m, Y, p)));
    Matrix H = covariant_hessian(m, V, p);
    H.diagonal().array() += m.curvature() * v * w2;
    hv = std::max(hv, frame_max_norm(m, p, H) / scale);
  }
  for (int i = 0; i < samples; ++i) {
    const Vec p = c.sample_surface(rng);
    const auto sp = c.support_normal(p);
    const Jet2 j = V.jet(p);
    rv = std::max(rv, std::abs(dot(sp.normal, j.gradient(d)) - c.kappa() * j.v) / std::max(1.0, std::abs(j.v)));
    tx = std::max(tx, std::abs(m.metric_inner(p, c.eval_X(p), sp.normal)));
  }
  VerificationReport rep;
  auto add = [&](const char* name, double r) {
    rep.add(make_check(name, r, 0.0, r, tol)
                .label("case", std::to_string(c.index()))
                .input("dim", d)
                .input("param", c.param())
                .input("samples", samples));
  };
  add("fields.conformal_killing_X", lx);
  add("fields.killing_Y", ly);
  add("fields.div_X", dx);
  add("fields.div_Y", dy);
  add("fields.hessian_V", hv);
  add("fields.robin_V", rv);
  add("fields.X_tangent", tx);
  return rep;
}

inline VerificationReport criterion_fields(const SuiteConfig& cfg) {
  VerificationReport rep;
  for (int dim : cfg.dims)
    for (const auto& c : suite_cases(cfg, dim)) {
      CounterRng rng(cfg.seed, CounterRng::stream_id("fields") + 16 * dim + c.index());
      detail::append_tagged(rep, field_identity_suite(c, cfg.samples, rng), 1);
    }
  return rep;
}

// ------------------------------------------------------------------ 2

/// Sampled |Lap P_phi| for the auxiliary function, over the chart it lives in.
inline double phi_p_laplacian(const AuxFunction& aux, int samples, CounterRng& rng) {
  const SpaceFormModel& m = aux.model();
  const PFunctionField P(aux.field(), m);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    Vec p;
    do {
      p = Vec(m.dim());
      for (double& c : p) c = rng.uniform(-1.0, 1.0);
      if (m.chart() == Chart::UpperHalfSpace) p.back() = rng.uniform(0.05, 3.0);
    } while (chart_margin(m, p) < 0.02);
    worst = std::max(worst, std::abs(P.laplacian(p)));
  }
  return worst;
}

inline VerificationReport criterion_auxiliary(const SuiteConfig& cfg) {
  if (cfg.c_tilde_grid.empty()) throw ConfigError("empty c~ grid");
  VerificationReport rep;
  for (int dim : cfg.dims)
    for (const auto& c : suite_cases(cfg, dim))
      for (double ct : cfg.c_tilde_grid) {
        CounterRng rng(cfg.seed, CounterRng::stream_id("auxfn") + 16 * dim + c.index());
        const AuxFunction aux = AuxFunction::for_case(c, ct);
        VerificationReport part = verify_resolvent(aux, cfg.samples, rng);
        const double lp = phi_p_laplacian(aux, cfg.samples, rng);
        part.add(make_check("resolvent.p_laplacian", lp, 0.0, lp, 1e-8).input("c_tilde", ct).input("c0", aux.c0()));
        for (CheckRecord r : part.records()) {
          r.label("case", std::to_string(c.index())).input("dim", dim);
          detail::add_tagged(rep, std::move(r), 2);
        }
      }
  return rep;
}

// ------------------------------------------------------------------ 3

inline VerificationReport criterion_isometry(const SuiteConfig& cfg) {
  VerificationReport rep;
  CounterRng rng(cfg.seed, CounterRng::stream_id("isometry"));
  const auto half = SpaceFormModel::upper_half_space(3);
  const auto ball = SpaceFormModel::poincare_ball(3);
  double worst = 0.0;
  for (int i = 0; i < cfg.samples; ++i) {
    const Vec x{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.05, 3)};
    const Vec y{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.05, 3)};
    const double d = geodesic_distance(half, x, y);
    worst = std::max(worst, std::abs(geodesic_distance(ball, halfspace_to_ball(x), halfspace_to_ball(y)) - d) /
                                std::max(1.0, d));
  }
  detail::add_tagged(rep, make_check("isometry.distance", worst, 0.0, worst, 1e-12).input("pairs", cfg.samples), 3);
  for (double alpha : {0.0, cfg.alpha, 1.2}) {
    const double ta = std::tan(alpha);
    const double r = 0.5 / std::cos(alpha);
    double err = 0.0;
    for (int i = 0; i < cfg.samples; ++i) {
      // x_1 tan(alpha) + x_{n+1} = 1, kept inside the half-space.
      Vec x{rng.uniform(-3, 3), rng.uniform(-3, 3), 0.0};
      x[2] = 1.0 - x[0] * ta;
      if (x[2] <= 1e-2) continue;
      const Vec b = halfspace_to_ball(x);
      err = std::max(err, std::abs(std::hypot(b[0] - ta / 2, b[1], b[2] - 0.5) - r));
    }
    detail::add_tagged(rep, make_check("isometry.equidistant_sphere", err, 0.0, err, 1e-10).input("alpha", alpha), 3);
  }
  return rep;
}

// ------------------------------------------------------------------ 4

/// Closed-form residuals of the two-horosphere example.
inline VerificationReport horolens_report(const HoroLens& h, int samples, CounterRng& rng) {
  const LensDomain D = h.domain();
  const SpaceFormModel m = h.model();
  const ScalarField u = h.u_field();
  double pde = 0, dir = 0, neu = 0, rob = 0;
  for (int i = 0; i < samples; ++i) {
    const Vec x = D.map(rng.uniform(), rng.uniform());
    if (!D.contains(x)) continue;
    pde = std::max(pde, std::abs(laplace_beltrami(m, u, x) + m.dim() * m.curvature() * u.value(x) - 1.0));
  }
  const int level = std::max(2, static_cast<int>(std::ceil(std::log2(samples / 3.0))));
  for (const auto& b : D.sigma_nodes(level)) {
    const Jet2 j = u.jet(b.x);
    dir = std::max(dir, std::abs(j.v));
    neu = std::max(neu, std::abs(dot(b.normal, j.gradient(2)) - h.c()));
  }
  for (const auto& b : D.t_nodes(level)) {
    const Jet2 j = u.jet(b.x);
    rob = std::max(rob, std::abs(dot(b.normal, j.gradient(2)) - j.v - h.c_tilde()));
  }
  const double theta = measured_contact_angle(D);
  VerificationReport rep;
  auto add = [&](const char* name, double lhs, double rhs, double tol) {
    rep.add(make_check(name, lhs, rhs, std::abs(lhs - rhs), tol).input("b", h.b()).input("c_tilde", h.c_tilde()));
  };
  add("horolens.pde", pde, 0.0, 1e-10);
  add("horolens.dirichlet", dir, 0.0, 1e-12);
  add("horolens.neumann", neu, 0.0, 1e-10);
  add("horolens.robin", rob, 0.0, 1e-10);
  add("horolens.contact_angle", theta, h.theta(), 1e-8);
  return rep;
}

inline VerificationReport criterion_horolens(const SuiteConfig& cfg) {
  VerificationReport rep;
  for (double b : cfg.b_grid) {
    CounterRng rng(cfg.seed, CounterRng::stream_id("horolens"));
    detail::append_tagged(rep, horolens_report(HoroLens(b), cfg.samples, rng), 4);
  }
  return rep;
}

// ------------------------------------------------------------------ 5

/// |rhs| at levels 1..level must not increase, except below the noise floor.
inline constexpr double kIdentityNoiseFloor = 1e-13;

inline VerificationReport identity_series(const HoroLens& h, std::vector<double> a_grid, int level,
                                          const AuxFunction& aux) {
  if (a_grid.empty()) a_grid = {-1.0, 0.0, h.c() * h.c(), 5.0};
  if (level < 0) throw ConfigError("quadrature level must be nonnegative");
  const LensDomain D = h.domain();
  const ScalarField u = h.u_field(), V = h.support_potential();
  VerificationReport rep;
  // The identity integrands vanish pointwise for exact data, so the rule
  // itself is checked on int_Omega V against two levels finer.
  auto vol = [&](int l) { return D.integrate_volume(l, [&](const Vec& x) { return V.value(x); }); };
  const double coarse = vol(level), fine = vol(level + 2);
  rep.add(make_check("identity.quadrature", coarse, fine, std::abs(coarse - fine) / std::abs(fine), 1e-6)
              .input("level", level));
  for (double a : a_grid) {
    std::vector<IdentityReport> series;
    for (int l = std::min(1, level); l <= level; ++l) series.push_back(check_integral_identity(D, u, aux, V, a, l));
    const IdentityReport& r = series.back();
    int violations = 0;
    for (std::size_t k = 1; k < series.size(); ++k)
      if (std::abs(series[k].rhs) > std::max(std::abs(series[k - 1].rhs), kIdentityNoiseFloor)) ++violations;
    rep.add(make_check("identity.lhs", r.lhs, 0.0, std::abs(r.lhs), 1e-10).input("a", a).input("level", level));
    rep.add(make_check("identity.rhs", r.rhs, 0.0, std::abs(r.rhs), 1e-6).input("a", a).input("level", level));
    rep.add(make_check("identity.rhs_monotone", violations, 0.0, violations, 0.5).input("a", a).input("levels", level));
    rep.add(make_check("identity.sigma_wronskian", r.sigma_wronskian, 0.0, std::abs(r.sigma_wronskian), 1e-8)
                .input("a", a)
                .input("c_tilde_phi", aux.c_tilde()));
  }
  return rep;
}

inline VerificationReport criterion_identity(const SuiteConfig& cfg) {
  VerificationReport rep;
  const HoroLens h(cfg.b);
  detail::append_tagged(rep, identity_series(h, cfg.a_grid, cfg.quad_level, h.aux()), 5);
  return rep;
}

// ------------------------------------------------------------------ 6

inline VerificationReport criterion_boundary_hessian(const SuiteConfig& cfg) {
  VerificationReport rep;
  std::vector<double> bs = cfg.b_grid;
  bs.push_back(cfg.b);
  for (double b : bs) {
    const HoroLens h(b);
    const LensDomain D = h.domain();
    CounterRng rng(cfg.seed, CounterRng::stream_id("hessian"));
    std::vector<Vec> samples;
    for (int k = 0; k < cfg.samples; ++k) samples.push_back(D.t_point(rng.uniform()));
    const VerificationReport part = boundary_hessian_check(h.u_field(), h.support(), h.c_tilde(), samples);
    for (CheckRecord r : part.records()) detail::add_tagged(rep, std::move(r.input("b", b)), 6);
  }
  return rep;
}

// ------------------------------------------------------------------ 7

struct NamedCap {
  std::string name;
  UmbilicalCase c;
  CapSpec cap;
};

/// Umbilical caps: per case one cap crossing the support orthogonally and
/// one at another angle, plus the half-plane image of the horosphere lens.
inline std::vector<NamedCap> reference_caps(const SuiteConfig& cfg) {
  const double pi = std::numbers::pi;
  const auto c1 = make_case(CaseId::GeodesicSphereH, cfg.R);
  const auto c2 = make_case(CaseId::EquidistantH, cfg.alpha);
  const auto c3 = make_case(CaseId::GeodesicPlaneH, 0.0);
  const auto c4 = make_case(CaseId::GeodesicSphereS, cfg.R);
  auto on_sphere = [](const UmbilicalCase& c, double angle, double r, bool orthogonal) {
    const double rho = c.chart_radius();
    const double d = orthogonal ? std::hypot(rho, r) : rho;
    return CapSpec{Vec{d * std::cos(angle), d * std::sin(angle)}, r};
  };
  const Vec n2{std::sin(cfg.alpha), std::cos(cfg.alpha)};
  const Vec q2 = scaled(std::cos(cfg.alpha), n2);  // foot of the line on the normal through 0
  const double top = ball_to_halfspace(Vec{0.0, 1.0 - 2.0 * cfg.b})[1];
  const auto c2h = make_case(CaseId::EquidistantH, 0.0);
  return {
      {"case1.orthogonal", c1, on_sphere(c1, pi / 3, 0.15, true)},
      {"case1.oblique", c1, on_sphere(c1, pi / 3, 0.15, false)},
      {"case2.orthogonal", c2, {q2, 0.4}},
      {"case2.oblique", c2, {axpy(0.15, n2, q2), 0.4}},
      {"case3.orthogonal", c3, {Vec{0.2, 0.0}, 0.4}},
      {"case3.oblique", c3, {Vec{0.2, 0.1}, 0.4}},
      {"case4.orthogonal", c4, on_sphere(c4, pi / 2, 0.3, true)},
      {"case4.oblique", c4, on_sphere(c4, pi / 2, 0.3, false)},
      {"horolens.halfplane", c2h, {Vec{0.0, top / 2}, top / 2}},
  };
}

/// Constant-angle star perturbation of the oblique case-1 cap; not CMC.
inline NamedCap perturbed_cap(const SuiteConfig& cfg) {
  NamedCap nc = reference_caps(cfg)[1];
  nc.name = "case1.star";
  nc.cap.eps = 0.1;
  nc.cap.lobes = 3;
  nc.cap.phase = std::atan2(nc.cap.center[1], nc.cap.center[0]);
  return nc;
}

inline VerificationReport criterion_boundary_formulas(const SuiteConfig& cfg) {
  VerificationReport rep;
  for (const auto& nc : reference_caps(cfg)) {
    const LensDomain D = make_cap(nc.c, nc.cap);
    const double theta = measured_contact_angle(D);
    VerificationReport part = check_minkowski(nc.c, D, theta);
    part.append(mean_curvature_balance(nc.c, D, theta));
    for (CheckRecord r : part.records()) detail::add_tagged(rep, std::move(r.label("cap", nc.name)), 7);
  }
  const NamedCap star = perturbed_cap(cfg);
  const LensDomain P = make_cap(star.c, star.cap);
  const double theta = measured_contact_angle(P);
  const CheckRecord bal = mean_curvature_balance(star.c, P, theta).records().front();
  CheckRecord neg = make_lower_bound_check("mean_curvature_balance.negative_control", bal.residual, 1e-3);
  neg.label("cap", star.name).input("theta", theta).input("H_spread", bal.inputs.back().second);
  detail::add_tagged(rep, std::move(neg), 7);
  return rep;
}

// ------------------------------------------------------------------ 8

struct ConvergenceStudy {
  CsvTable table{{"level", "h", "l2_error", "c_mean", "c_stddev", "predicted_angle_deg", "measured_angle_deg"}};
  std::vector<double> errors;  // empty without an oracle
  RigidityReport finest;
  std::optional<BvpSolution> finest_solution;
};

/// Solves on levels 0..levels-1 and runs the rigidity check on each.
inline ConvergenceStudy convergence_study(const LensDomain& D, const BvpParams& params, int levels,
                                          const std::function<double(const Vec&)>& oracle = {},
                                          const RigidityOptions& opt = {}, const MeshOptions& mesh = {}) {
  if (levels < 1) throw ConfigError("need at least one mesh level");
  ConvergenceStudy out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double to_deg = 180.0 / std::numbers::pi;
  for (int level = 0; level < levels; ++level) {
    BvpSolution sol = solve_bvp(generate_cap_mesh(D, level, mesh), D.model(), params);
    const double err = oracle ? l2_error(sol, oracle) : nan;
    if (oracle) out.errors.push_back(err);
    out.finest = rigidity_check(sol, D, opt);
    out.table.add_row({static_cast<double>(level), sol.mesh.max_edge_length(), err, out.finest.c_mean,
                       out.finest.c_stddev, out.finest.predicted_angle * to_deg, out.finest.measured_angle * to_deg});
    out.finest_solution = std::move(sol);
  }
  return out;
}

inline VerificationReport solver_report(const HoroLens& h, const ConvergenceStudy& s) {
  VerificationReport rep;
  for (std::size_t k = 1; k < s.errors.size(); ++k) {
    const double order = std::log2(s.errors[k - 1] / s.errors[k]);
    rep.add(make_lower_bound_check("fem.order", order, 1.2)
                .input("level", static_cast<double>(k))
                .input("l2_error", s.errors[k])
                .input("b", h.b()));
  }
  rep.append(to_report(s.finest, h.c(), 1.0, h.theta()));
  return rep;
}

inline VerificationReport criterion_solver(const SuiteConfig& cfg) {
  const HoroLens h(cfg.b);
  const ConvergenceStudy s = convergence_study(h.domain(), BvpParams{1.0, h.c_tilde()}, cfg.fem_levels,
                                               [&](const Vec& x) { return h.u_expr(std::span<const double>(x)); });
  VerificationReport rep;
  detail::append_tagged(rep, solver_report(h, s), 8);
  return rep;
}

// ------------------------------------------------------------------ 9

inline VerificationReport criterion_coercivity(const SuiteConfig&) {
  const double pi = std::numbers::pi;
  VerificationReport rep;
  struct Small {
    double R, angle, r;
  };
  for (const Small& s : {Small{pi / 3, pi / 2, 0.3}, Small{pi / 3, pi / 2, 0.2}, Small{pi / 4, 0.0, 0.25}}) {
    const UmbilicalCase c = make_case(CaseId::GeodesicSphereS, s.R);
    const double rho = c.chart_radius();
    const LensDomain D(c.support(), PlaneCurve::circle(Vec{rho * std::cos(s.angle), rho * std::sin(s.angle)}, s.r));
    const EigenEstimate e = estimate_lambda1(generate_cap_mesh(D, 2), D.model());
    detail::add_tagged(rep, make_lower_bound_check("coercivity.lambda1", e.lambda1, D.model().dim())
                                .input("R", s.R)
                                .input("r", s.r),
                       9);
  }
  // Cap reaching past the equator of the sphere.
  const UmbilicalCase c = make_case(CaseId::GeodesicSphereS, pi / 2);
  const LensDomain big(c.support(), PlaneCurve::circle(Vec{0.0, -0.5}, 1.3));
  const Mesh mesh = generate_cap_mesh(big, 2);
  const double lambda = estimate_lambda1(mesh, big.model()).lambda1;
  bool raised = false;
  try {
    solve_bvp(mesh, big.model(), BvpParams{c.kappa(), 0.1});
  } catch (const CoercivityError&) {
    raised = true;
  }
  detail::add_tagged(rep, make_check("coercivity.error_raised", lambda, big.model().dim(), raised ? 0.0 : 1.0, 0.5)
                              .input("R", pi / 2)
                              .input("r", 1.3),
                     9);
  return rep;
}

// ------------------------------------------------------------------ all

inline constexpr int kCriterionCount = 9;  // criterion 10 compares two runs of these

inline VerificationReport run_criterion(int k, const SuiteConfig& cfg) {
  switch (k) {
    case 1: return criterion_fields(cfg);
    case 2: return criterion_auxiliary(cfg);
    case 3: return criterion_isometry(cfg);
    case 4: return criterion_horolens(cfg);
    case 5: return criterion_identity(cfg);
    case 6: return criterion_boundary_hessian(cfg);
    case 7: return criterion_boundary_formulas(cfg);
    case 8: return criterion_solver(cfg);
    case 9: return criterion_coercivity(cfg);
  }
  throw ConfigError("unknown criterion " + std::to_string(k));
}

inline VerificationReport full_suite(const SuiteConfig& cfg) {
  VerificationReport rep;
  for (int k = 1; k <= kCriterionCount; ++k) rep.append(run_criterion(k, cfg));
  return rep;
}

}  // namespace spaceform
