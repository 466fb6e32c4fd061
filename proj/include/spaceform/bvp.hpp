#pragma once

// P1 Ritz-Galerkin discretization of the mixed problem
//
//   Lap u + (n+1) K u = 1 in Omega,  u = 0 on Sigma,  d_N u = kappa u + c~ on T,
//
// in weak form: for all v vanishing on Sigma,
//   int g(grad u, grad v) dvol - (n+1) K int u v dvol - kappa int_T u v dA
//     = -int v dvol + c~ int_T v dA,
// with dvol = w^d dx and dA = w^(d-1) ds.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "spaceform/core.hpp"
#include "spaceform/geometry.hpp"
#include "spaceform/mesh.hpp"
#include "spaceform/quadrature.hpp"

namespace spaceform {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct BvpParams {
  double kappa = 0.0;
  double c_tilde = 0.0;
  double source = 1.0;  // right side f of the interior equation
};

struct LinearSystem {
  SparseMatrix A;  // free-free block of the bilinear form
  SparseMatrix S;  // stiffness (Dirichlet energy), free-free
  SparseMatrix M;  // conformal mass, free-free
  Eigen::VectorXd b;
  std::vector<int> free_dofs;    // free index -> vertex
  std::vector<int> vertex_free;  // vertex -> free index or -1
};

struct ElementGeometry {
  double area;
  std::array<Vec, 3> grad;  // flat gradients of the barycentric coordinates
};

inline ElementGeometry element_geometry(const Mesh& mesh, const std::array<int, 3>& t) {
  const Vec& a = mesh.vertices[t[0]];
  const Vec& b = mesh.vertices[t[1]];
  const Vec& c = mesh.vertices[t[2]];
  const double det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
  ElementGeometry g;
  g.area = 0.5 * det;
  g.grad[0] = {(b[1] - c[1]) / det, (c[0] - b[0]) / det};
  g.grad[1] = {(c[1] - a[1]) / det, (a[0] - c[0]) / det};
  g.grad[2] = {(a[1] - b[1]) / det, (b[0] - a[0]) / det};
  return g;
}

inline Vec barycentric_point(const Mesh& mesh, const std::array<int, 3>& t, const std::array<double, 3>& l) {
  Vec x(2, 0.0);
  for (int k = 0; k < 3; ++k) x = axpy(l[k], mesh.vertices[t[k]], x);
  return x;
}

/// Assembles the system with the vertices flagged in `dirichlet` eliminated;
/// rows are added in fixed element order.
inline LinearSystem assemble_on(const Mesh& mesh, const SpaceFormModel& model, const BvpParams& p,
                                const std::vector<bool>& dirichlet) {
  const int d = model.dim();
  const double n1 = d, K = model.curvature();
  LinearSystem sys;
  sys.vertex_free.assign(mesh.num_vertices(), -1);
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    if (!dirichlet[v]) {
      sys.vertex_free[v] = static_cast<int>(sys.free_dofs.size());
      sys.free_dofs.push_back(static_cast<int>(v));
    }
  const int nf = static_cast<int>(sys.free_dofs.size());
  std::vector<Eigen::Triplet<double>> ts, tm, tr;
  sys.b = Eigen::VectorXd::Zero(nf);
  for (const auto& t : mesh.simplices) {
    const ElementGeometry g = element_geometry(mesh, t);
    double ws = 0.0;  // stiffness weight integral
    std::array<std::array<double, 3>, 3> mass{};
    std::array<double, 3> load{};
    for (const auto& q : triangle_rule3()) {
      const Vec x = barycentric_point(mesh, t, q.bary);
      const double w = model.conformal_factor(x);
      const double jw = q.weight * g.area;
      ws += jw * std::pow(w, d - 2);
      const double wv = jw * std::pow(w, d);
      for (int i = 0; i < 3; ++i) {
        load[i] += wv * q.bary[i];
        for (int j = 0; j < 3; ++j) mass[i][j] += wv * q.bary[i] * q.bary[j];
      }
    }
    for (int i = 0; i < 3; ++i) {
      const int fi = sys.vertex_free[t[i]];
      if (fi < 0) continue;
      sys.b[fi] -= p.source * load[i];
      for (int j = 0; j < 3; ++j) {
        const int fj = sys.vertex_free[t[j]];
        if (fj < 0) continue;
        ts.emplace_back(fi, fj, ws * dot(g.grad[i], g.grad[j]));
        tm.emplace_back(fi, fj, mass[i][j]);
      }
    }
  }
  const double gp = 0.5 / std::sqrt(3.0);
  for (const auto& f : mesh.facets) {
    if (f.tag != FacetTag::T) continue;
    const Vec& a = mesh.vertices[f.v[0]];
    const Vec& b = mesh.vertices[f.v[1]];
    const double len = norm(minus(b, a));
    for (double tq : {0.5 - gp, 0.5 + gp}) {
      const Vec x = axpy(tq, minus(b, a), a);
      const double wt = 0.5 * len * std::pow(model.conformal_factor(x), d - 1);
      const std::array<double, 2> phi{1.0 - tq, tq};
      for (int i = 0; i < 2; ++i) {
        const int fi = sys.vertex_free[f.v[i]];
        if (fi < 0) continue;
        sys.b[fi] += p.c_tilde * wt * phi[i];
        for (int j = 0; j < 2; ++j) {
          const int fj = sys.vertex_free[f.v[j]];
          if (fj >= 0) tr.emplace_back(fi, fj, wt * phi[i] * phi[j]);
        }
      }
    }
  }
  sys.S.resize(nf, nf);
  sys.M.resize(nf, nf);
  SparseMatrix R(nf, nf);
  sys.S.setFromTriplets(ts.begin(), ts.end());
  sys.M.setFromTriplets(tm.begin(), tm.end());
  R.setFromTriplets(tr.begin(), tr.end());
  sys.A = sys.S - (n1 * K) * sys.M - p.kappa * R;
  return sys;
}

inline LinearSystem assemble(const Mesh& mesh, const SpaceFormModel& model, const BvpParams& p) {
  const std::vector<bool> dirichlet = mesh.sigma_vertices();
  if (std::find(dirichlet.begin(), dirichlet.end(), true) == dirichlet.end())
    throw ConfigError("no Sigma facets: Dirichlet set is empty");
  return assemble_on(mesh, model, p, dirichlet);
}

struct CgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients. Nonpositive curvature p'Ap
/// means the form is not coercive on the discrete space.
inline CgResult conjugate_gradient(const SparseMatrix& A, const Eigen::VectorXd& b, double rel_tol = 1e-10,
                                   int max_iter = -1) {
  const int n = static_cast<int>(b.size());
  if (max_iter < 0) max_iter = 10 * n + 100;
  Eigen::VectorXd dinv(n);
  for (int i = 0; i < n; ++i) {
    const double a = A.coeff(i, i);
    if (!(a > 0.0)) throw CoercivityError("nonpositive diagonal entry: the form is not coercive");
    dinv[i] = 1.0 / a;
  }
  CgResult r;
  r.x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) return r;
  Eigen::VectorXd res = b, z = dinv.cwiseProduct(res), p = z;
  double rz = res.dot(z);
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd Ap = A * p;
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0))
      throw CoercivityError("conjugate gradients broke down (p'Ap <= 0): the form is not coercive");
    const double alpha = rz / pAp;
    r.x += alpha * p;
    res -= alpha * Ap;
    r.iterations = it;
    r.relative_residual = res.norm() / bnorm;
    if (r.relative_residual < rel_tol) return r;
    z = dinv.cwiseProduct(res);
    const double rz_new = res.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw NumericalError("conjugate gradients did not converge");
}

struct BvpSolution {
  Mesh mesh;
  SpaceFormModel model;
  BvpParams params;
  Vec values;  // one per vertex, zero on Sigma
  int cg_iterations = 0;
  double cg_residual = 0.0;
  double galerkin_residual = 0.0;  // max |A u - b| over free test functions
};

inline const char* kCoercivityHint =
    "the mixed form is not coercive: the first Dirichlet-Neumann eigenvalue of the domain does not exceed (n+1)K";

/// Definiteness is certified by a sparse Cholesky factorization before the
/// CG solve.
inline BvpSolution solve_bvp(const Mesh& mesh, const SpaceFormModel& model, const BvpParams& params) {
  const LinearSystem sys = assemble(mesh, model, params);
  Eigen::SimplicialLLT<SparseMatrix> llt(sys.A);
  if (llt.info() != Eigen::Success) throw CoercivityError(kCoercivityHint);
  CgResult cg;
  try {
    cg = conjugate_gradient(sys.A, sys.b);
  } catch (const CoercivityError&) {
    throw CoercivityError(kCoercivityHint);
  }
  BvpSolution sol{mesh, model, params, Vec(mesh.num_vertices(), 0.0), cg.iterations, cg.relative_residual, 0.0};
  for (std::size_t i = 0; i < sys.free_dofs.size(); ++i) sol.values[sys.free_dofs[i]] = cg.x[static_cast<int>(i)];
  sol.galerkin_residual = (sys.A * cg.x - sys.b).cwiseAbs().maxCoeff();
  for (double v : sol.values)
    if (!std::isfinite(v)) throw NumericalError("non-finite nodal value");
  return sol;
}

struct EigenEstimate {
  double lambda1;
  int iterations;
};

/// Smallest generalized eigenvalue of (stiffness, conformal mass) on the
/// Sigma-zero space by inverse power iteration.
inline EigenEstimate estimate_lambda1(const Mesh& mesh, const SpaceFormModel& model, int max_iter = 10000,
                                      double tol = 1e-12) {
  const LinearSystem sys = assemble(mesh, model, BvpParams{});
  Eigen::SimplicialLLT<SparseMatrix> llt(sys.S);
  if (llt.info() != Eigen::Success) throw NumericalError("stiffness matrix is singular");
  Eigen::VectorXd x = Eigen::VectorXd::Ones(sys.S.rows());
  double lambda = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    x = llt.solve(sys.M * x);
    x /= std::sqrt(x.dot(sys.M * x));
    const double next = x.dot(sys.S * x);
    if (it > 1 && std::abs(next - lambda) <= tol * next) return {next, it};
    lambda = next;
  }
  throw NumericalError("inverse iteration did not converge in " + std::to_string(max_iter) + " steps");
}

struct SigmaFlux {
  std::vector<int> vertex;     // Sigma vertices in mesh order
  std::vector<double> flux;    // int_Sigma d_nu u phi_i dA
  std::vector<double> weight;  // int_Sigma phi_i dA
  std::vector<bool> corner;
};

/// Normal derivative on Sigma recovered from the Galerkin residual of the
/// unreduced system (the variationally consistent flux).
inline SigmaFlux sigma_flux(const BvpSolution& sol) {
  const Mesh& mesh = sol.mesh;
  const int d = sol.model.dim();
  const LinearSystem full = assemble_on(mesh, sol.model, sol.params, std::vector<bool>(mesh.num_vertices(), false));
  Eigen::VectorXd u(static_cast<int>(mesh.num_vertices()));
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) u[static_cast<int>(v)] = sol.values[v];
  const Eigen::VectorXd r = full.A * u - full.b;
  std::vector<double> weight(mesh.num_vertices(), 0.0);
  for (const auto& f : mesh.facets) {
    if (f.tag != FacetTag::Sigma) continue;
    const Vec& a = mesh.vertices[f.v[0]];
    const Vec& b = mesh.vertices[f.v[1]];
    const double len = norm(minus(b, a));
    const double gp = 0.5 / std::sqrt(3.0);
    for (double tq : {0.5 - gp, 0.5 + gp}) {
      const double wt = 0.5 * len * std::pow(sol.model.conformal_factor(axpy(tq, minus(b, a), a)), d - 1);
      weight[f.v[0]] += wt * (1.0 - tq);
      weight[f.v[1]] += wt * tq;
    }
  }
  SigmaFlux out;
  const std::vector<bool> sigma = mesh.sigma_vertices();
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (!sigma[v]) continue;
    out.vertex.push_back(static_cast<int>(v));
    out.flux.push_back(r[static_cast<int>(v)]);
    out.weight.push_back(weight[v]);
    out.corner.push_back(std::find(mesh.corners.begin(), mesh.corners.end(), static_cast<int>(v)) != mesh.corners.end());
  }
  return out;
}

/// Flat gradient of the P1 interpolant on one element.
inline Vec element_gradient(const Mesh& mesh, const Vec& values, const std::array<int, 3>& t) {
  const ElementGeometry g = element_geometry(mesh, t);
  Vec grad(2, 0.0);
  for (int k = 0; k < 3; ++k) grad = axpy(values[t[k]], g.grad[k], grad);
  return grad;
}

/// L2(dvol) distance between the P1 solution and a reference function.
inline double l2_error(const BvpSolution& sol, const std::function<double(const Vec&)>& exact) {
  const int d = sol.model.dim();
  double sum = 0.0;
  for (const auto& t : sol.mesh.simplices) {
    const double area = sol.mesh.signed_area(t);
    for (const auto& q : triangle_rule7()) {
      const Vec x = barycentric_point(sol.mesh, t, q.bary);
      double uh = 0.0;
      for (int k = 0; k < 3; ++k) uh += q.bary[k] * sol.values[t[k]];
      const double e = uh - exact(x);
      sum += q.weight * area * std::pow(sol.model.conformal_factor(x), d) * e * e;
    }
  }
  return std::sqrt(sum);
}

}  // namespace spaceform
