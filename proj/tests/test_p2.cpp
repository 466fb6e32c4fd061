#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spaceform/horolens.hpp"
#include "spaceform/p2.hpp"
#include "spaceform/verify.hpp"

using namespace spaceform;

namespace {

// Four-lobed star around an orthogonal-ish case-1 cap; the corner angle drops
// below a right angle, so Sigma is not umbilical.
LensDomain star_cap(const UmbilicalCase& c) {
  const double rho = c.chart_radius(), an = std::numbers::pi / 3;
  return make_cap(c, CapSpec{Vec{rho * std::cos(an), rho * std::sin(an)}, 0.15, 0.2, 4, an});
}

}  // namespace

TEST(P2, HoroLensConverges) {
  const HoroLens h(0.25);
  const LensDomain D = h.domain();
  std::vector<double> err;
  for (int level = 0; level <= 3; ++level) {
    const P2Solution sol = solve_bvp_p2(generate_cap_mesh(D, level), D.model(), BvpParams{1.0, h.c_tilde()});
    err.push_back(l2_error(sol, [&](const Vec& x) { return h.u_expr(std::span<const double>(x)); }));
  }
  for (std::size_t k = 1; k < err.size(); ++k) EXPECT_GT(std::log2(err[k - 1] / err[k]), 1.8) << k;
}

TEST(P2, FieldInterpolatesNodalValues) {
  const HoroLens h(0.2);
  const LensDomain D = h.domain();
  const P2Solution sol = solve_bvp_p2(generate_cap_mesh(D, 1), D.model(), BvpParams{1.0, h.c_tilde()});
  const ScalarField u = p2_field(sol);
  for (std::size_t v = 0; v < sol.mesh.num_vertices(); v += 7)
    EXPECT_NEAR(u.value(sol.mesh.vertices[v]), sol.values[v], 1e-12);
}

TEST(P2, NonUmbilicalSolutionHasPositivePLaplacian) {
  const UmbilicalCase c = make_case(CaseId::GeodesicSphereH, 1.0);
  const LensDomain D = star_cap(c);
  const P2Solution sol = solve_bvp_p2(generate_cap_mesh(D, 3), D.model(), BvpParams{c.kappa(), -0.2});
  const PFunctionField P(p2_field(sol), D.model());
  CounterRng rng(5, 0);
  double sum = 0.0;
  for (int k = 0; k < 500; ++k) {
    const double lap = P.laplacian(D.map(rng.uniform(0.02, 0.98), rng.uniform(0.02, 0.98)));
    EXPECT_GE(lap, 0.0);
    sum += lap;
  }
  EXPECT_GT(sum / 500, 1e-3);
}

TEST(P2, PerturbedCapIdentityResidualShrinks) {
  const UmbilicalCase c = make_case(CaseId::GeodesicSphereH, 1.0);
  const LensDomain D = star_cap(c);
  const AuxFunction aux = AuxFunction::for_case(c, -0.2);
  double prev = 1e300;
  for (int level = 1; level <= 4; ++level) {
    const P2Solution sol = solve_bvp_p2(generate_cap_mesh(D, level), D.model(), BvpParams{c.kappa(), -0.2});
    const IdentityReport r = check_integral_identity(D, p2_field(sol), aux, c.V_field(), 0.0, level + 3);
    EXPECT_GT(r.lhs, 0.0);
    EXPECT_LT(r.rel_residual, prev) << level;
    prev = r.rel_residual;
  }
  EXPECT_LT(prev, 0.05);
}
