#pragma once

// Quadratic Lagrange elements on the same meshes, used where identity checks
// need second derivatives of a discrete solution. Edge midpoints are placed on
// the straight facets.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <map>
#include <memory>
#include <vector>

#include "spaceform/bvp.hpp"
#include "spaceform/mesh.hpp"

namespace spaceform {

struct P2Solution {
  Mesh mesh;
  SpaceFormModel model;
  BvpParams params;
  std::vector<std::array<int, 3>> element_edges;  // dof of local edge k = (k, k+1)
  Vec values;  // vertices first, then edges
};

namespace detail {

/// Bucket grid over the mesh bounding box for point location.
class SimplexLocator {
 public:
  explicit SimplexLocator(const Mesh& mesh) : mesh_(mesh) { build_grid(); }

  // Containing simplex, or the one the point is least outside of (points on
  // the curved boundary can sit just outside the polygonal mesh).
  int locate(std::span<const double> p) const {
    const int ci = cell(p[0], 0), cj = cell(p[1], 1);
    int best = -1;
    double best_score = -std::numeric_limits<double>::max();
    for (int r = 0; r <= n_; ++r) {
      for (int i = std::max(0, ci - r); i <= std::min(n_ - 1, ci + r); ++i)
        for (int j = std::max(0, cj - r); j <= std::min(n_ - 1, cj + r); ++j) {
          if (std::max(std::abs(i - ci), std::abs(j - cj)) != r) continue;
          for (int t : cells_[static_cast<std::size_t>(i) * n_ + j]) {
            const auto& tri = mesh_.simplices[t];
            const ElementGeometry g = element_geometry(mesh_, tri);
            double score = std::numeric_limits<double>::max();
            for (int k = 0; k < 3; ++k) {
              const Vec& o = mesh_.vertices[tri[(k + 1) % 3]];
              score = std::min(score, g.grad[k][0] * (p[0] - o[0]) + g.grad[k][1] * (p[1] - o[1]));
            }
            if (score > best_score) {
              best_score = score;
              best = t;
            }
          }
        }
      if (best >= 0 && (best_score >= 0.0 || r >= 1)) return best;
    }
    if (best < 0) throw DomainError("point is far from the mesh");
    return best;
  }

 private:
  void build_grid() {
    lo_ = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    hi_ = {-lo_[0], -lo_[1]};
    for (const auto& v : mesh_.vertices)
      for (int d = 0; d < 2; ++d) {
        lo_[d] = std::min(lo_[d], v[d]);
        hi_[d] = std::max(hi_[d], v[d]);
      }
    n_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh_.simplices.size()) / 2.0)));
    cells_.assign(static_cast<std::size_t>(n_) * n_, {});
    for (std::size_t t = 0; t < mesh_.simplices.size(); ++t) {
      std::array<int, 2> a{n_, n_}, b{-1, -1};
      for (int v : mesh_.simplices[t])
        for (int d = 0; d < 2; ++d) {
          const int c = cell(mesh_.vertices[v][d], d);
          a[d] = std::min(a[d], c);
          b[d] = std::max(b[d], c);
        }
      for (int i = a[0]; i <= b[0]; ++i)
        for (int j = a[1]; j <= b[1]; ++j) cells_[static_cast<std::size_t>(i) * n_ + j].push_back(static_cast<int>(t));
    }
  }

  int cell(double x, int d) const {
    const double f = (x - lo_[d]) / (hi_[d] - lo_[d]);
    return std::clamp(static_cast<int>(f * n_), 0, n_ - 1);
  }

  const Mesh& mesh_;
  std::array<double, 2> lo_{}, hi_{};
  int n_ = 1;
  std::vector<std::vector<int>> cells_;
};

// Local edge k joins local vertices k and k+1.
inline std::array<double, 6> p2_basis(const std::array<double, 3>& l) {
  return {l[0] * (2 * l[0] - 1), l[1] * (2 * l[1] - 1), l[2] * (2 * l[2] - 1),
          4 * l[0] * l[1],       4 * l[1] * l[2],       4 * l[2] * l[0]};
}

inline std::array<Vec, 6> p2_gradients(const std::array<double, 3>& l, const ElementGeometry& g) {
  std::array<Vec, 6> out;
  for (int k = 0; k < 3; ++k) out[k] = scaled(4 * l[k] - 1, g.grad[k]);
  for (int k = 0; k < 3; ++k) {
    const int j = (k + 1) % 3;
    out[3 + k] = axpy(4 * l[j], g.grad[k], scaled(4 * l[k], g.grad[j]));
  }
  return out;
}

}  // namespace detail

inline P2Solution solve_bvp_p2(const Mesh& mesh, const SpaceFormModel& model, const BvpParams& p) {
  const int d = model.dim();
  const int nv = static_cast<int>(mesh.num_vertices());
  P2Solution sol{mesh, model, p, {}, {}};
  std::map<std::pair<int, int>, int> edge_id;
  auto edge = [&](int a, int b) {
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    auto it = edge_id.find(key);
    if (it != edge_id.end()) return it->second;
    const int id = nv + static_cast<int>(edge_id.size());
    edge_id.emplace(key, id);
    return id;
  };
  for (const auto& t : mesh.simplices) sol.element_edges.push_back({edge(t[0], t[1]), edge(t[1], t[2]), edge(t[2], t[0])});
  const int ndof = nv + static_cast<int>(edge_id.size());
  std::vector<bool> fixed(ndof, false);
  bool any = false;
  for (const auto& f : mesh.facets)
    if (f.tag == FacetTag::Sigma) {
      fixed[f.v[0]] = fixed[f.v[1]] = fixed[edge(f.v[0], f.v[1])] = true;
      any = true;
    }
  if (!any) throw ConfigError("no Sigma facets: Dirichlet set is empty");
  std::vector<int> free_index(ndof, -1), free_dofs;
  for (int i = 0; i < ndof; ++i)
    if (!fixed[i]) {
      free_index[i] = static_cast<int>(free_dofs.size());
      free_dofs.push_back(i);
    }
  const double n1 = d, K = model.curvature();
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<int>(free_dofs.size()));
  for (std::size_t e = 0; e < mesh.simplices.size(); ++e) {
    const auto& t = mesh.simplices[e];
    const ElementGeometry g = element_geometry(mesh, t);
    std::array<int, 6> dof{t[0], t[1], t[2], sol.element_edges[e][0], sol.element_edges[e][1], sol.element_edges[e][2]};
    std::array<std::array<double, 6>, 6> a{};
    std::array<double, 6> load{};
    for (const auto& q : triangle_rule7()) {
      const Vec x = barycentric_point(mesh, t, q.bary);
      const double w = model.conformal_factor(x);
      const double jw = q.weight * g.area;
      const auto phi = detail::p2_basis(q.bary);
      const auto grad = detail::p2_gradients(q.bary, g);
      for (int i = 0; i < 6; ++i) {
        load[i] += jw * std::pow(w, d) * phi[i];
        for (int j = 0; j < 6; ++j)
          a[i][j] += jw * (std::pow(w, d - 2) * dot(grad[i], grad[j]) - n1 * K * std::pow(w, d) * phi[i] * phi[j]);
      }
    }
    for (int i = 0; i < 6; ++i) {
      const int fi = free_index[dof[i]];
      if (fi < 0) continue;
      rhs[fi] -= p.source * load[i];
      for (int j = 0; j < 6; ++j)
        if (free_index[dof[j]] >= 0) trip.emplace_back(fi, free_index[dof[j]], a[i][j]);
    }
  }
  const Rule1d gl = gauss_legendre(3);
  for (const auto& f : mesh.facets) {
    if (f.tag != FacetTag::T) continue;
    const Vec& a = mesh.vertices[f.v[0]];
    const Vec& b = mesh.vertices[f.v[1]];
    const double len = norm(minus(b, a));
    const std::array<int, 3> dof{f.v[0], f.v[1], edge(f.v[0], f.v[1])};
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double s = gl.nodes[k];
      const double wt = gl.weights[k] * len * std::pow(model.conformal_factor(axpy(s, minus(b, a), a)), d - 1);
      const std::array<double, 3> phi{(1 - s) * (1 - 2 * s), s * (2 * s - 1), 4 * s * (1 - s)};
      for (int i = 0; i < 3; ++i) {
        const int fi = free_index[dof[i]];
        if (fi < 0) continue;
        rhs[fi] += p.c_tilde * wt * phi[i];
        for (int j = 0; j < 3; ++j)
          if (free_index[dof[j]] >= 0) trip.emplace_back(fi, free_index[dof[j]], -p.kappa * wt * phi[i] * phi[j]);
      }
    }
  }
  SparseMatrix A(static_cast<int>(free_dofs.size()), static_cast<int>(free_dofs.size()));
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLLT<SparseMatrix> llt(A);
  if (llt.info() != Eigen::Success) throw CoercivityError(kCoercivityHint);
  const Eigen::VectorXd x = llt.solve(rhs);
  sol.values.assign(ndof, 0.0);
  for (std::size_t i = 0; i < free_dofs.size(); ++i) sol.values[free_dofs[i]] = x[static_cast<int>(i)];
  return sol;
}

namespace detail {

class P2Evaluator {
 public:
  explicit P2Evaluator(std::shared_ptr<const P2Solution> sol) : sol_(std::move(sol)), locator_(sol_->mesh) {}

  Jet2 jet(std::span<const double> p) const {
    const int e = locator_.locate(p);
    const Mesh& mesh = sol_->mesh;
    const auto& t = mesh.simplices[e];
    const ElementGeometry g = element_geometry(mesh, t);
    const auto x = seed_jet2(p);
    std::array<Jet2, 3> l;
    for (int k = 0; k < 3; ++k) {
      const Vec& o = mesh.vertices[t[(k + 1) % 3]];
      l[k] = g.grad[k][0] * (x[0] - o[0]) + g.grad[k][1] * (x[1] - o[1]);
    }
    Jet2 out(0.0);
    for (int k = 0; k < 3; ++k) {
      out += sol_->values[t[k]] * (l[k] * (2.0 * l[k] - 1.0));
      out += sol_->values[sol_->element_edges[e][k]] * (4.0 * l[k] * l[(k + 1) % 3]);
    }
    return out;
  }

 private:
  std::shared_ptr<const P2Solution> sol_;
  SimplexLocator locator_;
};

}  // namespace detail

/// Piecewise quadratic field with exact element jets.
inline ScalarField p2_field(const P2Solution& sol) {
  auto eval = std::make_shared<detail::P2Evaluator>(std::make_shared<const P2Solution>(sol));
  return ScalarField([eval](std::span<const double> p) { return eval->jet(p); });
}

/// L2(dvol) distance to a reference function.
inline double l2_error(const P2Solution& sol, const std::function<double(const Vec&)>& exact) {
  const int d = sol.model.dim();
  double sum = 0.0;
  for (std::size_t e = 0; e < sol.mesh.simplices.size(); ++e) {
    const auto& t = sol.mesh.simplices[e];
    const double area = sol.mesh.signed_area(t);
    for (const auto& q : triangle_rule7()) {
      const Vec x = barycentric_point(sol.mesh, t, q.bary);
      const auto phi = detail::p2_basis(q.bary);
      double uh = 0.0;
      for (int k = 0; k < 3; ++k) uh += phi[k] * sol.values[t[k]] + phi[3 + k] * sol.values[sol.element_edges[e][k]];
      const double err = uh - exact(x);
      sum += q.weight * area * std::pow(sol.model.conformal_factor(x), d) * err * err;
    }
  }
  return std::sqrt(sum);
}

}  // namespace spaceform
