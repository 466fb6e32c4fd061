#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spaceform/auxiliary.hpp"
#include "spaceform/diffops.hpp"
#include "spaceform/fields.hpp"

using namespace spaceform;

namespace {

std::vector<UmbilicalCase> all_cases(int dim) {
  return {make_case(CaseId::GeodesicSphereH, 0.9, dim), make_case(CaseId::EquidistantH, 0.4, dim),
          make_case(CaseId::GeodesicPlaneH, 0.0, dim), make_case(CaseId::GeodesicSphereS, 1.1, dim)};
}

// Lower-index Hessian from the general Levi-Civita formula, with the metric
// derivatives taken by finite differences of w^2. Independent of the closed
// form Christoffel symbols used by the library.
Matrix hessian_oracle(const SpaceFormModel& m, const ScalarField& f, const Vec& p) {
  const int d = m.dim();
  const double h = 1e-5;
  auto g = [&](const Vec& q) { return std::pow(m.conformal_factor(q), 2); };
  Vec dg(d);
  for (int l = 0; l < d; ++l) {
    Vec a = p, b = p;
    a[l] += h;
    b[l] -= h;
    dg[l] = (g(a) - g(b)) / (2 * h);
  }
  const double gp = g(p);
  const Jet2 j = f.jet(p);
  Matrix H(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      double s = j.hess(i, k);
      for (int l = 0; l < d; ++l) {
        // Gamma^l_ik = 1/(2 g) (d_i g delta_kl + d_k g delta_il - d_l g delta_ik)
        const double gamma = ((i == l ? dg[k] : 0.0) + (k == l ? dg[i] : 0.0) - (i == k ? dg[l] : 0.0)) / (2 * gp);
        s -= gamma * j.grad(l);
      }
      H(i, k) = s;
    }
  return H;
}

Matrix fd_jacobian(const VectorField& z, const Vec& p, double h) {
  const int d = static_cast<int>(p.size());
  Matrix J(d, d);
  for (int i = 0; i < d; ++i) {
    Vec a = p, b = p;
    a[i] += h;
    b[i] -= h;
    const Vec za = z.value(a), zb = z.value(b);
    for (int j = 0; j < d; ++j) J(j, i) = (za[j] - zb[j]) / (2 * h);
  }
  return J;
}

}  // namespace

TEST(MakeCase, DerivedQuantities) {
  const auto c1 = make_case(CaseId::GeodesicSphereH, std::log(3.0));
  EXPECT_NEAR(c1.kappa(), 1.25, 1e-15);
  EXPECT_NEAR(c1.chart_radius(), 0.5, 1e-15);
  EXPECT_NEAR(c1.minkowski(), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(c1.chart_radius(), std::sqrt((std::cosh(c1.param()) - 1) / (std::cosh(c1.param()) + 1)), 1e-15);

  const auto c2 = make_case(CaseId::EquidistantH, 0.0);
  EXPECT_EQ(c2.kappa(), 1.0);
  EXPECT_EQ(c2.minkowski(), -1.0);

  const auto c3 = make_case(CaseId::GeodesicPlaneH, 0.0, 3);
  EXPECT_EQ(c3.kappa(), 0.0);
  EXPECT_EQ(c3.minkowski(), -1.0);

  const auto c4 = make_case(CaseId::GeodesicSphereS, std::numbers::pi / 2);
  EXPECT_NEAR(c4.kappa(), 0.0, 1e-15);
  EXPECT_NEAR(c4.chart_radius(), 1.0, 1e-15);
  const auto c4b = make_case(CaseId::GeodesicSphereS, 1.0);
  EXPECT_NEAR(c4b.chart_radius(), std::sqrt((1 - std::cos(1.0)) / (1 + std::cos(1.0))), 1e-15);
}

TEST(MakeCase, RejectsOutOfRangeParameters) {
  EXPECT_THROW(make_case(CaseId::GeodesicSphereH, 0.0), ConfigError);
  EXPECT_THROW(make_case(CaseId::GeodesicSphereH, -1.0), ConfigError);
  EXPECT_THROW(make_case(CaseId::EquidistantH, std::numbers::pi / 2), ConfigError);
  EXPECT_THROW(make_case(CaseId::EquidistantH, -0.1), ConfigError);
  EXPECT_THROW(make_case(CaseId::GeodesicSphereS, 1.6), ConfigError);
  EXPECT_THROW(make_case(CaseId::GeodesicSphereS, NAN), ConfigError);
  EXPECT_THROW(parse_case("geodesic-cylinder"), ConfigError);
  EXPECT_EQ(parse_case("3"), CaseId::GeodesicPlaneH);
  EXPECT_EQ(parse_case("Equidistant-H"), CaseId::EquidistantH);
}

TEST(FieldCatalog, PointExamples) {
  const auto c3 = make_case(CaseId::GeodesicPlaneH, 0.0, 3);
  const Vec o{0.0, 0.0, 0.0};
  EXPECT_EQ(c3.eval_V(o), 1.0);
  const Vec y = c3.eval_Y(o);
  EXPECT_EQ(y[0], 0.0);
  EXPECT_EQ(y[2], 0.5);
  const auto c2 = make_case(CaseId::EquidistantH, 0.7);
  EXPECT_EQ(c2.eval_V(Vec{3.0, 1.0}), 1.0);
  EXPECT_THROW(c2.eval_V(Vec{3.0, -1.0}), DomainError);
}

TEST(FieldCatalog, SurfaceResidualSigns) {
  EXPECT_NEAR(make_case(CaseId::GeodesicSphereH, 1.0).surface_residual(Vec{0.0, std::tanh(0.5)}), 0.0, 1e-16);
  EXPECT_LT(make_case(CaseId::EquidistantH, 0.3).surface_residual(Vec{0.0, 2.0}), 0.0);
  EXPECT_GT(make_case(CaseId::GeodesicPlaneH, 0.0).surface_residual(Vec{0.2, -0.1}), 0.0);
  EXPECT_LT(make_case(CaseId::GeodesicPlaneH, 0.0).surface_residual(Vec{0.2, 0.1}), 0.0);
  EXPECT_LT(make_case(CaseId::GeodesicSphereS, 1.0).surface_residual(Vec{0.1, 0.1}), 0.0);
}

TEST(FieldCatalog, SupportNormals) {
  const auto c3 = make_case(CaseId::GeodesicPlaneH, 0.0, 3);
  const auto sp = c3.support_normal(Vec{0.0, 0.0, 0.0});
  EXPECT_NEAR(sp.normal[2], -0.5, 1e-16);
  EXPECT_THROW(c3.support_normal(Vec{0.0, 0.0, 0.1}), PreconditionError);

  CounterRng rng(1, CounterRng::stream_id("normals"));
  for (const auto& c : all_cases(3)) {
    for (int i = 0; i < 100; ++i) {
      const Vec p = c.sample_surface(rng);
      const auto s = c.support_normal(p);
      EXPECT_NEAR(c.model().metric_inner(p, s.normal, s.normal), 1.0, 1e-12);
      // Outward: stepping along the normal leaves B^int.
      const Vec out = axpy(1e-6, s.normal, p);
      EXPECT_GT(c.surface_residual(out), 0.0);
    }
  }
  // Ball chart image of the equidistant support: the normal points away from
  // the point E_{n+1}-side interior.
  const auto bs = make_case(CaseId::EquidistantH, 0.5).ball_support();
  const Vec q = sample_on_surface(bs.model, bs.surface, rng);
  const Vec n = conformal_normal(bs.model, bs.surface, q);
  EXPECT_GT(bs.surface.residual(axpy(1e-6, n, q)), 0.0);
  EXPECT_LT(bs.surface.residual(Vec{0.0, 0.5}), 0.0);
}

TEST(FieldCatalog, SupportCurvatureMatchesKappa) {
  CounterRng rng(2, CounterRng::stream_id("kappa"));
  for (const auto& c : all_cases(2)) {
    for (int i = 0; i < 20; ++i) {
      const Vec p = c.sample_surface(rng);
      EXPECT_NEAR(conformal_curvature(c.model(), c.support_surface(), p), c.kappa(), 1e-12);
    }
  }
  const auto bs = make_case(CaseId::EquidistantH, 0.5).ball_support();
  for (int i = 0; i < 20; ++i) {
    const Vec p = sample_on_surface(bs.model, bs.surface, rng);
    EXPECT_NEAR(conformal_curvature(bs.model, bs.surface, p), std::cos(0.5), 1e-12);
  }
}

TEST(FieldCatalog, NormalPotentialRatio) {
  const auto c3 = make_case(CaseId::GeodesicPlaneH, 0.0);
  EXPECT_NEAR(c3.normal_potential_ratio(Vec{0.3, 0.0}), -c3.eval_V(Vec{0.3, 0.0}), 1e-14);
  const auto c2 = make_case(CaseId::EquidistantH, 0.0);
  EXPECT_NEAR(c2.normal_potential_ratio(Vec{0.8, 1.0}), -1.0, 1e-14);
  CounterRng rng(4, CounterRng::stream_id("ratio"));
  for (const auto& c : all_cases(3))
    for (int i = 0; i < 100; ++i) {
      const Vec p = c.sample_surface(rng);
      EXPECT_NO_THROW(c.normal_potential_ratio(p));
    }
}

TEST(FieldCatalog, ConformalKillingIdentities) {
  for (int dim : {2, 3}) {
    CounterRng rng(5, CounterRng::stream_id("ckf") + dim);
    for (const auto& c : all_cases(dim)) {
      const auto& m = c.model();
      const ScalarField V = c.V_field();
      const VectorField X = c.X_field(), Y = c.Y_field();
      for (int i = 0; i < 300; ++i) {
        const Vec p = c.sample_interior(rng);
        const double w2 = std::pow(m.conformal_factor(p), 2);
        const double v = V.value(p);
        Matrix lx = lie_derivative_metric(m, X, p);
        lx.diagonal().array() -= v * w2;
        EXPECT_LT(frame_max_norm(m, p, lx), 1e-8) << to_string(c.id());
        EXPECT_LT(frame_max_norm(m, p, lie_derivative_metric(m, Y, p)), 1e-8);
        EXPECT_NEAR(covariant_divergence(m, X, p), dim * v, 1e-8 * std::max(1.0, std::abs(v)));
        EXPECT_NEAR(covariant_divergence(m, Y, p), 0.0, 1e-8);
        Matrix hv = covariant_hessian(m, V, p);
        hv.diagonal().array() += m.curvature() * v * w2;
        EXPECT_LT(frame_max_norm(m, p, hv), 1e-8 * std::max(1.0, std::abs(v)));
      }
      for (int i = 0; i < 300; ++i) {
        const Vec p = c.sample_surface(rng);
        const auto sp = c.support_normal(p);
        EXPECT_NEAR(dot(sp.normal, V.gradient(p)), c.kappa() * V.value(p), 1e-8 * std::max(1.0, V.value(p)));
        EXPECT_NEAR(m.metric_inner(p, c.eval_X(p), sp.normal), 0.0, 1e-8);
      }
    }
  }
}

TEST(Diffops, Examples) {
  const auto ball = SpaceFormModel::poincare_ball(2);
  const Vec o{0.0, 0.0}, p{0.3, -0.2};
  const auto one = ScalarField::constant(4.0);
  for (double g : covariant_gradient(ball, one, p)) EXPECT_EQ(g, 0.0);
  EXPECT_EQ(covariant_hessian(ball, one, p).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(laplace_beltrami(ball, one, p), 0.0);
  const auto V3 = make_case(CaseId::GeodesicPlaneH, 0.0).V_field();
  for (double g : covariant_gradient(ball, V3, o)) EXPECT_EQ(g, 0.0);
  EXPECT_NEAR(laplace_beltrami(ball, V3, p), 2.0 * V3.value(p), 1e-12);
  // pairing g(grad f, e1) = d_1 f
  const Vec e1{1.0, 0.0};
  EXPECT_NEAR(ball.metric_inner(p, covariant_gradient(ball, V3, p), e1), V3.gradient(p)[0], 1e-14);
  const VectorField zero = VectorField::closed_form([](auto x) {
    using S = typename decltype(x)::value_type;
    return std::vector<S>(x.size(), S(0.0));
  });
  EXPECT_EQ(lie_derivative_metric(ball, zero, p).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(covariant_divergence(ball, zero, p), 0.0);
  const auto c2 = make_case(CaseId::EquidistantH, 0.2, 3);
  const Vec q{0.1, -0.4, 0.7};
  EXPECT_NEAR(covariant_divergence(c2.model(), c2.X_field(), q), 3.0 / 0.7, 1e-13);
  EXPECT_NEAR(covariant_divergence(c2.model(), c2.Y_field(), q), 0.0, 1e-13);
  EXPECT_THROW(laplace_beltrami(ball, V3, Vec{1.0, 0.0}), DomainError);
}

TEST(Diffops, HessianAgreesWithGeneralChristoffelFormula) {
  CounterRng rng(6, CounterRng::stream_id("christoffel"));
  for (const auto& c : all_cases(3)) {
    const ScalarField f = ScalarField::closed_form([](auto x) { return sin(x[0]) * exp(0.5 * x[1]) + x[2] * x[2]; });
    for (int i = 0; i < 50; ++i) {
      Vec p = c.sample_interior(rng);
      if (chart_margin(c.model(), p) < 0.05) continue;
      const Matrix a = covariant_hessian(c.model(), f, p), b = hessian_oracle(c.model(), f, p);
      EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-6 * std::max(1.0, b.cwiseAbs().maxCoeff()));
      EXPECT_NEAR(laplace_beltrami(c.model(), f, p), metric_trace(c.model(), p, a), 1e-12);
    }
  }
}

TEST(Diffops, VectorJacobianAgainstFiniteDifferences) {
  CounterRng rng(8, CounterRng::stream_id("jacobian"));
  for (const auto& c : all_cases(3)) {
    for (int i = 0; i < 20; ++i) {
      const Vec p = c.sample_interior(rng);
      if (chart_margin(c.model(), p) < 0.02) continue;
      for (const auto& z : {c.X_field(), c.Y_field()}) {
        const Matrix J = z.jet(p).jacobian, F = fd_jacobian(z, p, 1e-5);
        EXPECT_LT((J - F).cwiseAbs().maxCoeff(), 1e-6 * std::max(1.0, J.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST(FdCrosscheck, CatalogPotentialsSecondOrder) {
  CounterRng rng(9, CounterRng::stream_id("fd"));
  for (const auto& c : all_cases(2)) {
    const ScalarField V = c.V_field();
    for (int i = 0; i < 100; ++i) {
      const Vec p = c.sample_interior(rng);
      if (chart_margin(c.model(), p) < 0.2) continue;
      const FdReport r = fd_crosscheck(c.model(), V, p, 1e-4);
      EXPECT_LT(r.max_deviation(), 1e-6 * std::max(1.0, r.scale));
    }
  }
  const auto c1 = make_case(CaseId::GeodesicSphereH, 0.9);
  const Vec p{0.2, 0.3};
  const FdReport r = fd_crosscheck(c1.model(), c1.V_field(), p, 1e-4);
  EXPECT_LT(r.max_deviation(), 1e-6);
  // Second-order truncation: halving h cuts the Hessian deviation by about 4.
  const FdReport a = fd_crosscheck(c1.model(), c1.V_field(), p, 4e-3);
  const FdReport b = fd_crosscheck(c1.model(), c1.V_field(), p, 2e-3);
  EXPECT_NEAR(a.gradient_deviation / b.gradient_deviation, 4.0, 0.3);
}

TEST(Auxiliary, SolveC0Examples) {
  const auto c3 = make_case(CaseId::GeodesicPlaneH, 0.0);
  EXPECT_EQ(solve_c0(c3, 0.0), 0.0);
  EXPECT_NEAR(solve_c0(c3, 0.75), 1.0 / 3.0, 1e-15);
  const double c0 = solve_c0(c3, 0.75);
  EXPECT_NEAR(2 * c0 / (1 - c0 * c0), 0.75, 1e-15);
  EXPECT_NEAR(solve_c0(make_case(CaseId::EquidistantH, 0.0), 0.0), 0.5, 1e-16);
  for (double ct : {-50.0, -1.0, 1.0, 50.0}) EXPECT_LT(std::abs(solve_c0(c3, ct)), 1.0);
}

TEST(Auxiliary, PhiExamples) {
  const auto c3 = make_case(CaseId::GeodesicPlaneH, 0.0);
  const auto a0 = AuxFunction::for_case(c3, 0.0);
  for (const Vec& p : {Vec{0.0, 0.0}, Vec{0.3, -0.5}, Vec{-0.7, 0.1}})
    EXPECT_NEAR(a0.eval(p), c3.eval_V(p) - 0.5, 1e-14);
  const auto a2 = AuxFunction::for_case(make_case(CaseId::EquidistantH, 0.0), 0.0);
  EXPECT_NEAR(a2.eval(Vec{0.0, 0.0}), 0.0, 1e-16);
  const auto c4 = make_case(CaseId::GeodesicSphereS, 1.0);
  const auto a4 = AuxFunction::for_case(c4, -c4.kappa() / 2.0);
  EXPECT_EQ(a4.c0(), 0.0);
  EXPECT_NEAR(a4.eval(Vec{1.7, -0.4}), 0.5, 1e-15);
  const Jet2 j = eval_phi(a4, Vec{0.2, 0.1});
  EXPECT_EQ(j.grad(0), 0.0);
  EXPECT_NEAR(resolvent_interior_residual(a4, Vec{0.2, 0.1}), 0.0, 1e-15);
}

TEST(Auxiliary, ResolventSweep) {
  for (int dim : {2, 3}) {
    for (const auto& c : all_cases(dim)) {
      for (double ct : {-1.0, -0.5, 0.0, 0.25, 0.5, 0.75, 1.0}) {
        CounterRng rng(10, CounterRng::stream_id("resolvent"));
        const auto rep = verify_resolvent(AuxFunction::for_case(c, ct), 200, rng);
        EXPECT_TRUE(rep.all_pass()) << to_string(c.id()) << " c~=" << ct << " max " << rep.max_residual();
      }
    }
  }
}

TEST(Auxiliary, WrongRobinDataIsDetected) {
  const auto c = make_case(CaseId::GeodesicSphereH, 0.9);
  const auto good = AuxFunction::for_case(c, 0.5);
  const AuxFunction bad(good.support(), 0.6, good.c0(), good.base_point(), good.scale());
  CounterRng rng(12, 0);
  const auto rep = verify_resolvent(bad, 50, rng);
  EXPECT_TRUE(rep.records()[0].pass);
  EXPECT_FALSE(rep.records()[1].pass);
}
