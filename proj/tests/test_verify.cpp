#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spaceform/horolens.hpp"
#include "spaceform/verify.hpp"

using namespace spaceform;

namespace {

// Cap whose carrier circle meets the support circle (centre c, radius rho) in
// the direction `angle`; orthogonal when `orthogonal` is set, else centred on
// the support.
CapSpec sphere_cap(const UmbilicalCase& c, double angle, double r, bool orthogonal) {
  const double rho = c.chart_radius();
  const double d = orthogonal ? std::hypot(rho, r) : rho;
  return {Vec{d * std::cos(angle), d * std::sin(angle)}, r};
}

struct CapCase {
  UmbilicalCase c;
  CapSpec cap;
};

std::vector<CapCase> umbilical_caps() {
  const double pi = std::numbers::pi;
  const auto c1 = make_case(CaseId::GeodesicSphereH, 1.0);
  const auto c2 = make_case(CaseId::EquidistantH, 0.3);
  const auto c3 = make_case(CaseId::GeodesicPlaneH, 0.0);
  const auto c4 = make_case(CaseId::GeodesicSphereS, pi / 3);
  // Unit normal of the case-2 line and a point on it.
  const Vec n2{std::sin(0.3), std::cos(0.3)}, q2{0.0, 1.0};
  return {
      {c1, sphere_cap(c1, pi / 3, 0.15, false)},
      {c1, sphere_cap(c1, pi / 3, 0.15, true)},
      {c2, {axpy(0.15, n2, q2), 0.4}},
      {c2, {q2, 0.4}},
      {c3, {Vec{0.2, 0.1}, 0.4}},
      {c3, {Vec{0.2, 0.0}, 0.4}},
      {c4, sphere_cap(c4, pi / 2, 0.3, false)},
      {c4, sphere_cap(c4, pi / 2, 0.3, true)},
  };
}

}  // namespace

TEST(PFunction, ZeroFieldHasZeroP) {
  const auto m = SpaceFormModel::poincare_ball(2);
  const auto P = p_function(ScalarField::constant(0.0), m);
  EXPECT_EQ(P.value(Vec{0.3, 0.1}), 0.0);
  EXPECT_EQ(P.laplacian(Vec{0.3, 0.1}), 0.0);
}

TEST(PFunction, HoroLensSolutionIsPFunctionHarmonic) {
  const HoroLens h(0.25);
  const auto P = p_function(h.u_field(), h.model());
  CounterRng rng(21, 0);
  for (int k = 0; k < 1000; ++k) {
    const Vec x{rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)};
    if (norm(x) > 0.9) continue;
    EXPECT_LT(std::abs(P.laplacian_direct(x)), 1e-8);
    EXPECT_LT(std::abs(P.bochner(x)), 1e-8);
  }
}

TEST(PFunction, DirectAndBochnerAgreeOnNonUmbilicalSolution) {
  // y^2 - 1/2 solves Lap u - 2u = 1 in the upper half-plane; its traceless
  // Hessian does not vanish.
  const auto m = SpaceFormModel::upper_half_space(2);
  const auto u = ScalarField::closed_form([](auto x) { return x[1] * x[1] - 0.5; });
  const auto P = p_function(u, m);
  CounterRng rng(22, 0);
  for (int k = 0; k < 200; ++k) {
    const Vec x{rng.uniform(-2.0, 2.0), rng.uniform(0.1, 3.0)};
    EXPECT_NEAR(laplace_beltrami(m, u, x) - 2.0 * u.value(x), 1.0, 1e-10);
    const double a = P.laplacian_direct(x), b = P.bochner(x);
    EXPECT_NEAR(a, b, 1e-9 * std::max(1.0, std::abs(b)));
    EXPECT_GT(b, 1e-6);
  }
}

TEST(IntegralIdentity, HoroLensHoldsForEveryA) {
  const HoroLens h(0.25);
  const LensDomain D = h.domain();
  const auto u = h.u_field();
  for (double a : {-1.0, 0.0, 0.25, 5.0}) {
    const IdentityReport r = check_integral_identity(D, u, h.aux(), h.support_potential(), a, 4);
    EXPECT_LT(std::abs(r.lhs), 1e-10);
    EXPECT_LT(std::abs(r.rhs), 1e-6) << a;
    EXPECT_LT(std::abs(r.sigma_wronskian), 1e-8);
  }
}

TEST(IntegralIdentity, WrongRobinPotentialIsRejected) {
  const HoroLens h(0.25);
  const auto V3 = ScalarField::closed_form([](auto x) {
    const auto s = sum_of_squares(x);
    return (1.0 + s) / (1.0 - s);
  });
  EXPECT_THROW(check_integral_identity(h.domain(), h.u_field(), h.aux(), V3, 0.0, 3), PreconditionError);
}

TEST(IntegralIdentity, WronskianNegativeControls) {
  const HoroLens h(0.1);
  const LensDomain D = h.domain();
  const AuxFunction aux = h.aux();
  EXPECT_EQ(sigma_wronskian_integral(D, aux.field(), aux, h.support_potential(), 3), 0.0);
  const double c0 = 0.5 + h.c_tilde();
  const AuxFunction flipped(aux.support(), -h.c_tilde(), c0, aux.base_point(), c0);
  EXPECT_GT(std::abs(sigma_wronskian_integral(D, h.u_field(), flipped, h.support_potential(), 4)), 1e-3);
}

TEST(BoundaryHessian, HoroLensAndPhi) {
  const HoroLens h(0.1);
  const LensDomain D = h.domain();
  CounterRng rng(23, 0);
  std::vector<Vec> samples;
  for (int k = 0; k < 1000; ++k) samples.push_back(D.t_point(rng.uniform()));
  EXPECT_TRUE(boundary_hessian_check(h.u_field(), h.support(), h.c_tilde(), samples).all_pass());
  const AuxFunction aux = h.aux();
  EXPECT_LT(boundary_hessian_check(aux.field(), h.support(), h.c_tilde(), samples).max_residual(), 1e-9);
  EXPECT_THROW(boundary_hessian_check(h.u_field(), h.support(), h.c_tilde() + 1e-3, samples), PreconditionError);
}

TEST(ContactAngle, Examples) {
  EXPECT_NEAR(measured_contact_angle(HoroLens(1.0 / 3.0).domain()), std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(std::cos(measured_contact_angle(HoroLens(0.1).domain())), -7.0 / 9.0, 1e-10);
  for (const auto& cc : umbilical_caps()) {
    const LensDomain D = make_cap(cc.c, cc.cap);
    EXPECT_NO_THROW(measured_contact_angle(D));
  }
  const auto c3 = make_case(CaseId::GeodesicPlaneH, 0.0);
  EXPECT_NEAR(measured_contact_angle(make_cap(c3, {Vec{0.2, 0.0}, 0.4})), std::numbers::pi / 2, 1e-10);
}

TEST(BoundaryFormulas, UmbilicalCapsInAllCases) {
  for (const auto& cc : umbilical_caps()) {
    const LensDomain D = make_cap(cc.c, cc.cap);
    const double theta = measured_contact_angle(D);
    const auto div = check_divergence_formulas(cc.c, D, 5);
    EXPECT_TRUE(div.all_pass()) << to_string(cc.c.id()) << " " << div.max_residual();
    const auto mink = check_minkowski(cc.c, D, theta);
    EXPECT_TRUE(mink.all_pass()) << to_string(cc.c.id()) << " " << mink.max_residual();
    const auto bal = mean_curvature_balance(cc.c, D, theta);
    EXPECT_TRUE(bal.all_pass()) << to_string(cc.c.id()) << " " << bal.max_residual();
  }
}

TEST(BoundaryFormulas, ShrinkingCapSendsBothSidesToZero) {
  const auto c3 = make_case(CaseId::GeodesicPlaneH, 0.0);
  double prev = 1.0;
  for (double r : {0.2, 0.1, 0.05}) {
    const auto rep = check_divergence_formulas(c3, make_cap(c3, {Vec{0.1, 0.02}, r}), 5);
    EXPECT_LT(std::abs(rep.records()[0].lhs), prev);
    prev = std::abs(rep.records()[0].lhs);
    EXPECT_TRUE(rep.all_pass());
  }
}

TEST(BoundaryFormulas, PreconditionsAndNegativeControl) {
  const auto c1 = make_case(CaseId::GeodesicSphereH, 1.0);
  const LensDomain D = make_cap(c1, sphere_cap(c1, std::numbers::pi / 3, 0.15, false));
  EXPECT_THROW(check_minkowski(c1, D, 1.0), PreconditionError);
  // Star perturbation symmetric about the lens axis: constant angle, not CMC.
  CapSpec star = sphere_cap(c1, std::numbers::pi / 3, 0.15, false);
  star.eps = 0.1;
  star.lobes = 3;
  star.phase = std::numbers::pi / 3;
  const LensDomain P = make_cap(c1, star);
  const double theta = measured_contact_angle(P);
  EXPECT_TRUE(check_minkowski(c1, P, theta).all_pass());
  EXPECT_GT(mean_curvature_balance(c1, P, theta).max_residual(), 1e-3);
  // Supports must match.
  EXPECT_THROW(check_divergence_formulas(make_case(CaseId::GeodesicSphereH, 1.2), D, 4), ConfigError);
}

TEST(BoundaryFormulas, HoroLensInTheHalfPlane) {
  // Image of the horosphere lens under the ball-to-half-space isometry: the
  // support becomes the line x2 = 1, the Sigma horosphere a circle tangent to
  // the ideal boundary.
  for (double b : {0.1, 0.25, 1.0 / 3.0}) {
    const HoroLens h(b);
    const double top = ball_to_halfspace(Vec{0.0, 1.0 - 2.0 * b})[1];
    const auto c2 = make_case(CaseId::EquidistantH, 0.0);
    const LensDomain D = make_cap(c2, {Vec{0.0, top / 2}, top / 2});
    const double theta = measured_contact_angle(D);
    EXPECT_NEAR(theta, h.theta(), 1e-9);
    const auto div = check_divergence_formulas(c2, D, 7);
    for (const auto& r : div.records()) EXPECT_TRUE(r.pass) << r.name << " " << r.lhs << " " << r.rhs << " b=" << b;
    EXPECT_TRUE(check_minkowski(c2, D, theta).all_pass());
    const auto bal = mean_curvature_balance(c2, D, theta);
    EXPECT_TRUE(bal.all_pass()) << bal.max_residual();
    EXPECT_NEAR(sigma_mean_curvature(D).mean, 1.0, 1e-12);
  }
}

TEST(Rigidity, HoroLensFiniteElements) {
  const HoroLens h(0.25);
  const LensDomain D = h.domain();
  const BvpSolution sol = solve_bvp(generate_cap_mesh(D, 3), D.model(), BvpParams{1.0, h.c_tilde()});
  for (FluxRecovery rec : {FluxRecovery::FacetGradient, FluxRecovery::GalerkinResidual}) {
    const RigidityReport r = rigidity_check(sol, D, {0.05, rec});
    EXPECT_TRUE(r.condition_met);
    EXPECT_NEAR(r.c_mean, 0.5, 0.01);
    EXPECT_NEAR(r.inferred_curvature, 1.0, 0.02);
    EXPECT_NEAR(r.predicted_angle, h.theta(), 2.0 * std::numbers::pi / 180);
    EXPECT_NEAR(r.measured_angle, h.theta(), 1e-9);
    EXPECT_LT(r.min_u, 1e-12);
  }
}

TEST(Rigidity, PerturbedCapFailsTheCondition) {
  const auto c1 = make_case(CaseId::GeodesicSphereH, 1.0);
  CapSpec star = sphere_cap(c1, std::numbers::pi / 3, 0.15, false);
  star.eps = 0.2;
  star.lobes = 3;
  star.phase = std::numbers::pi / 3;
  const LensDomain D = make_cap(c1, star);
  const BvpSolution sol = solve_bvp(generate_cap_mesh(D, 3), D.model(), BvpParams{c1.kappa(), 0.2});
  const RigidityReport r = rigidity_check(sol, D);
  EXPECT_FALSE(r.condition_met);
  EXPECT_EQ(r.status, "overdetermined condition not met");
}
