#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "spaceform/horolens.hpp"
#include "spaceform/bvp.hpp"
#include "spaceform/domain.hpp"
#include "spaceform/mesh.hpp"

using namespace spaceform;

namespace {

double exact_u(const HoroLens& h, const Vec& x) { return h.u_expr(std::span<const double>(x)); }

// Circle of radius r centred on the support sphere of a geodesic-sphere case.
LensDomain sphere_cap(CaseId id, double R, double angle, double r) {
  const UmbilicalCase c = make_case(id, R);
  const double rho = c.chart_radius();
  return LensDomain(c.support(), PlaneCurve::circle(Vec{rho * std::cos(angle), rho * std::sin(angle)}, r));
}

}  // namespace

TEST(HoroLens, ConstantsMatchClosedForms) {
  const HoroLens h(0.1);
  EXPECT_NEAR(h.c_tilde(), 0.7 / 1.8, 1e-15);
  EXPECT_NEAR(h.cos_theta(), -0.7 / 0.9, 1e-15);
  EXPECT_NEAR(h.potential_beta(), 1.0, 1e-12);
  EXPECT_THROW(HoroLens(0.6), ConfigError);
}

TEST(HoroLens, ExactSolutionSatisfiesTheProblem) {
  const HoroLens h(0.2);
  const LensDomain D = h.domain();
  const ScalarField u = h.u_field();
  const SpaceFormModel m = h.model();
  for (const auto& b : D.sigma_nodes(2)) EXPECT_NEAR(u.value(b.x), 0.0, 1e-13);
  for (const auto& b : D.t_nodes(2)) {
    const Jet2 j = u.jet(b.x);
    EXPECT_NEAR(dot(b.normal, j.gradient(2)), j.v + h.c_tilde(), 1e-11);
  }
  CounterRng rng(3, 0);
  for (int k = 0; k < 50; ++k) {
    const Vec x = D.map(rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95));
    EXPECT_NEAR(laplace_beltrami(m, u, x) - 2.0 * u.value(x), 1.0, 1e-10);
  }
  // Robin data of the adapted potential along the whole support arc.
  for (const auto& b : D.t_nodes(2)) {
    const Jet2 j = h.support_potential().jet(b.x);
    EXPECT_NEAR(dot(b.normal, j.gradient(2)), j.v, 1e-11);
  }
}

TEST(LensDomain, CornerAngleMatchesHoroLens) {
  for (double b : {0.1, 0.25, 1.0 / 3.0, 0.4}) {
    const HoroLens h(b);
    const LensDomain D = h.domain();
    for (const auto& f : D.corners()) EXPECT_NEAR(contact_angle(D.model(), f), h.theta(), 1e-9) << b;
  }
}

TEST(LensDomain, RejectsNonCrossingCurve) {
  const UmbilicalCase c = make_case(CaseId::GeodesicSphereH, 1.0);
  EXPECT_THROW(LensDomain(c.support(), PlaneCurve::circle(Vec{0.0, 0.0}, 0.1)), ConfigError);
}

TEST(LensDomain, VolumeQuadratureConverges) {
  // Flat area of a lens between two circles, closed form.
  const HoroLens h(0.25);
  const LensDomain D = h.domain();
  const double r1 = 0.5, r2 = 0.75, d = 0.75;
  auto seg = [&](double r, double a, double b) {
    const double x = (d * d + a * a - b * b) / (2.0 * d);
    return r * r * std::acos(x / r) - x * std::sqrt(r * r - x * x);
  };
  const double flat = seg(r1, r1, r2) + seg(r2, r2, r1);
  // Integrate w^{-2} so the conformal weight cancels.
  const double got = D.integrate_volume(5, [&](const Vec& x) { return std::pow(D.model().conformal_factor(x), -2); });
  EXPECT_NEAR(got, flat, 1e-10);
}

TEST(Mesh, ValidAcrossLevelsAndGrading) {
  const HoroLens h(0.1);
  const LensDomain D = h.domain();
  for (int level = 0; level <= 3; ++level)
    for (bool graded : {false, true}) {
      MeshOptions opt;
      opt.graded = graded;
      const Mesh mesh = generate_cap_mesh(D, level, opt);
      EXPECT_NO_THROW(validate_mesh(mesh, D));
      EXPECT_EQ(mesh.corners.size(), 2u);
    }
  for (CaseId id : {CaseId::GeodesicSphereH, CaseId::GeodesicSphereS}) {
    const LensDomain D2 = sphere_cap(id, 1.0, std::numbers::pi / 3, 0.15);
    EXPECT_NO_THROW(validate_mesh(generate_cap_mesh(D2, 2), D2));
  }
}

TEST(Mesh, RoundTripIsExact) {
  const Mesh mesh = generate_cap_mesh(HoroLens(0.2).domain(), 1);
  std::stringstream ss;
  write_mesh(ss, mesh);
  const Mesh back = read_mesh(ss);
  ASSERT_EQ(back.vertices.size(), mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) EXPECT_EQ(back.vertices[i], mesh.vertices[i]);
  EXPECT_EQ(back.simplices, mesh.simplices);
  EXPECT_EQ(back.corners, mesh.corners);
  std::stringstream bad("2 3 1");
  EXPECT_THROW(read_mesh(bad), ConfigError);
}

TEST(Bvp, EmptyDirichletSetIsRejected) {
  Mesh mesh = generate_cap_mesh(HoroLens(0.2).domain(), 0);
  for (auto& f : mesh.facets) f.tag = FacetTag::T;
  EXPECT_THROW(assemble(mesh, SpaceFormModel::poincare_ball(2), BvpParams{1.0, 0.1}), ConfigError);
}

TEST(Bvp, MassMatrixIntegratesVolume) {
  const HoroLens h(0.25);
  const LensDomain D = h.domain();
  const Mesh mesh = generate_cap_mesh(D, 3);
  // Free rows of M times the all-ones vector equal the load of the source 1.
  const LinearSystem sys = assemble(mesh, D.model(), BvpParams{0.0, 0.0, 1.0});
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(sys.M.rows());
  EXPECT_LT(std::abs(sys.M.sum() - ones.dot(sys.M * ones)), 1e-12);
  EXPECT_GT(sys.M.sum(), 0.0);
  EXPECT_LT(sys.M.sum(), D.integrate_volume(5, [](const Vec&) { return 1.0; }));
}

TEST(Bvp, ZeroDataGivesZeroSolution) {
  const HoroLens h(0.2);
  const LensDomain D = h.domain();
  const BvpSolution sol = solve_bvp(generate_cap_mesh(D, 1), D.model(), BvpParams{1.0, 0.0, 0.0});
  for (double v : sol.values) EXPECT_EQ(v, 0.0);
}

TEST(Bvp, HoroLensConvergesAtSecondOrder) {
  const HoroLens h(0.25);
  const LensDomain D = h.domain();
  std::vector<double> err;
  for (int level = 0; level <= 3; ++level) {
    const BvpSolution sol = solve_bvp(generate_cap_mesh(D, level), D.model(), BvpParams{1.0, h.c_tilde()});
    EXPECT_LT(sol.galerkin_residual, 1e-9);
    err.push_back(l2_error(sol, [&](const Vec& x) { return exact_u(h, x); }));
  }
  for (std::size_t k = 1; k < err.size(); ++k) EXPECT_GT(std::log2(err[k - 1] / err[k]), 1.2) << k;
  EXPECT_LT(err.back(), 1e-3);
}

TEST(Bvp, NonpositiveRobinDataGivesNegativeSolution) {
  const UmbilicalCase c = make_case(CaseId::GeodesicSphereH, 1.0);
  const LensDomain D = sphere_cap(CaseId::GeodesicSphereH, 1.0, std::numbers::pi / 3, 0.15);
  for (double ct : {0.0, -0.3}) {
    const BvpSolution sol = solve_bvp(generate_cap_mesh(D, 2), D.model(), BvpParams{c.kappa(), ct});
    const auto sigma = sol.mesh.sigma_vertices();
    for (std::size_t v = 0; v < sol.values.size(); ++v) {
      if (!sigma[v]) {
        EXPECT_LT(sol.values[v], 0.0);
      }
    }
  }
}

TEST(Bvp, SmallSphericalCapIsCoercive) {
  const LensDomain D = sphere_cap(CaseId::GeodesicSphereS, std::numbers::pi / 3, std::numbers::pi / 2, 0.3);
  const EigenEstimate e = estimate_lambda1(generate_cap_mesh(D, 2), D.model());
  EXPECT_GT(e.lambda1, 2.0);
}

TEST(Bvp, OversizedSphericalDomainIsNotCoercive) {
  const UmbilicalCase c = make_case(CaseId::GeodesicSphereS, std::numbers::pi / 2);
  const LensDomain D(c.support(), PlaneCurve::circle(Vec{0.0, -0.5}, 1.3));
  const Mesh mesh = generate_cap_mesh(D, 2);
  EXPECT_LT(estimate_lambda1(mesh, D.model()).lambda1, 2.0);
  EXPECT_THROW(solve_bvp(mesh, D.model(), BvpParams{c.kappa(), 0.1}), CoercivityError);
}
