#pragma once

// Triangle meshes of planar cap domains and the plain-text exchange format
//
//   dim nv ns nbf
//   x y                  (nv lines)
//   i j k                (ns lines)
//   i j S|T              (nbf lines)

#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "spaceform/core.hpp"
#include "spaceform/domain.hpp"

namespace spaceform {

enum class FacetTag { Sigma, T };

struct Facet {
  std::array<int, 2> v;
  FacetTag tag;
};

struct Mesh {
  int dim = 2;
  std::vector<Vec> vertices;
  std::vector<std::array<int, 3>> simplices;
  std::vector<Facet> facets;
  std::vector<int> corners;

  std::size_t num_vertices() const { return vertices.size(); }

  double signed_area(const std::array<int, 3>& t) const {
    const Vec& a = vertices[t[0]];
    const Vec& b = vertices[t[1]];
    const Vec& c = vertices[t[2]];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
  }

  /// Vertices lying on a Sigma facet (the Dirichlet set, corners included).
  std::vector<bool> sigma_vertices() const {
    std::vector<bool> out(vertices.size(), false);
    for (const auto& f : facets)
      if (f.tag == FacetTag::Sigma) out[f.v[0]] = out[f.v[1]] = true;
    return out;
  }

  double max_edge_length() const {
    double h = 0.0;
    for (const auto& t : simplices)
      for (int e = 0; e < 3; ++e) h = std::max(h, norm(minus(vertices[t[e]], vertices[t[(e + 1) % 3]])));
    return h;
  }
};

struct MeshOptions {
  int columns = 8;  // coarse intervals along the arcs
  int layers = 4;   // coarse intervals across the cap
  bool graded = false;
  double grading_ratio = 0.7;
};

/// Arc-parameter breakpoints: coarse intervals (optionally shrinking
/// geometrically toward both corners), each split into 2^level pieces.
inline std::vector<double> arc_breakpoints(int coarse, int level, bool graded, double ratio) {
  std::vector<double> lengths(coarse, 1.0);
  if (graded) {
    for (int i = 0; i < coarse; ++i) {
      const int from_end = std::min(i, coarse - 1 - i);
      lengths[i] = std::pow(ratio, (coarse - 1) / 2 - from_end);
    }
  }
  double total = 0.0;
  for (double l : lengths) total += l;
  std::vector<double> s{0.0};
  double acc = 0.0;
  const int sub = 1 << level;
  for (int i = 0; i < coarse; ++i) {
    for (int k = 1; k <= sub; ++k) s.push_back((acc + lengths[i] * k / sub) / total);
    acc += lengths[i];
  }
  s.back() = 1.0;
  return s;
}

/// Structured mesh on the transfinite image of [0,1]^2, with the two
/// degenerate columns collapsed onto the corner points. Boundary vertices lie
/// exactly on Sigma (t = 1) and T (t = 0).
inline Mesh generate_cap_mesh(const LensDomain& domain, int level, const MeshOptions& opt = {}) {
  if (level < 0 || level > 8) throw ConfigError("mesh level must lie in [0, 8]");
  if (opt.columns < 2 || opt.layers < 1) throw ConfigError("mesh needs at least 2 columns and 1 layer");
  const std::vector<double> s = arc_breakpoints(opt.columns, level, opt.graded, opt.grading_ratio);
  const int m = static_cast<int>(s.size()) - 1;
  const int L = opt.layers << level;
  Mesh mesh;
  mesh.dim = 2;
  mesh.vertices.push_back(domain.corner_p());
  for (int i = 1; i < m; ++i)
    for (int j = 0; j <= L; ++j) {
      const double t = static_cast<double>(j) / L;
      if (j == 0) mesh.vertices.push_back(domain.t_point(s[i]));
      else if (j == L) mesh.vertices.push_back(domain.sigma_point(s[i]));
      else mesh.vertices.push_back(domain.map(s[i], t));
    }
  mesh.vertices.push_back(domain.corner_q());
  const int P = 0, Q = static_cast<int>(mesh.vertices.size()) - 1;
  auto id = [&](int i, int j) {
    if (i == 0) return P;
    if (i == m) return Q;
    return 1 + (i - 1) * (L + 1) + j;
  };
  auto add = [&](int a, int b, int c) {
    std::array<int, 3> t{a, b, c};
    if (mesh.signed_area(t) < 0.0) std::swap(t[1], t[2]);
    mesh.simplices.push_back(t);
  };
  for (int j = 0; j < L; ++j) add(P, id(1, j), id(1, j + 1));
  for (int i = 1; i + 1 < m; ++i)
    for (int j = 0; j < L; ++j) {
      // Alternate diagonals so the pattern has no preferred direction.
      if ((i + j) % 2 == 0) {
        add(id(i, j), id(i + 1, j), id(i + 1, j + 1));
        add(id(i, j), id(i + 1, j + 1), id(i, j + 1));
      } else {
        add(id(i, j), id(i + 1, j), id(i, j + 1));
        add(id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
      }
    }
  for (int j = 0; j < L; ++j) add(Q, id(m - 1, j + 1), id(m - 1, j));
  for (int i = 0; i < m; ++i) {
    mesh.facets.push_back({{id(i, 0), id(i + 1, 0)}, FacetTag::T});
    mesh.facets.push_back({{id(i, L), id(i + 1, L)}, FacetTag::Sigma});
  }
  mesh.corners = {P, Q};
  return mesh;
}

/// Checks the structural invariants; throws NumericalError on violation.
inline void validate_mesh(const Mesh& mesh, const LensDomain& domain, double tol = 1e-10) {
  for (const auto& t : mesh.simplices)
    if (!(mesh.signed_area(t) > 1e-14)) throw NumericalError("degenerate or inverted simplex");
  for (const auto& f : mesh.facets)
    for (int v : f.v) {
      const Vec& x = mesh.vertices[v];
      const double r = f.tag == FacetTag::T ? domain.support().surface.residual(x) : domain.sigma_curve().residual(x);
      if (std::abs(r) > tol) throw NumericalError("boundary vertex is off its surface");
    }
  std::set<int> s_set, t_set;
  for (const auto& f : mesh.facets) (f.tag == FacetTag::Sigma ? s_set : t_set).insert({f.v[0], f.v[1]});
  std::vector<int> gamma;
  for (int v : s_set)
    if (t_set.count(v)) gamma.push_back(v);
  if (gamma != std::vector<int>(mesh.corners.begin(), mesh.corners.end()))
    throw NumericalError("corner set differs from the Sigma/T interface");
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    if (!s_set.count(static_cast<int>(v)) && !t_set.count(static_cast<int>(v)) && !domain.contains(mesh.vertices[v]))
      throw NumericalError("interior vertex outside the domain");
}

inline void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << mesh.dim << ' ' << mesh.vertices.size() << ' ' << mesh.simplices.size() << ' ' << mesh.facets.size() << '\n';
  char buf[64];
  for (const auto& v : mesh.vertices) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", v[k]);
      os << (k ? " " : "") << buf;
    }
    os << '\n';
  }
  for (const auto& t : mesh.simplices) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& f : mesh.facets) os << f.v[0] << ' ' << f.v[1] << ' ' << (f.tag == FacetTag::Sigma ? 'S' : 'T') << '\n';
}

inline Mesh read_mesh(std::istream& is) {
  Mesh mesh;
  std::size_t nv = 0, ns = 0, nb = 0;
  if (!(is >> mesh.dim >> nv >> ns >> nb) || mesh.dim != 2) throw ConfigError("bad mesh header");
  mesh.vertices.assign(nv, Vec(2));
  for (auto& v : mesh.vertices)
    if (!(is >> v[0] >> v[1])) throw ConfigError("truncated vertex block");
  mesh.simplices.resize(ns);
  for (auto& t : mesh.simplices)
    if (!(is >> t[0] >> t[1] >> t[2])) throw ConfigError("truncated simplex block");
  std::set<int> s_set, t_set;
  for (std::size_t i = 0; i < nb; ++i) {
    Facet f{};
    std::string tag;
    if (!(is >> f.v[0] >> f.v[1] >> tag) || (tag != "S" && tag != "T")) throw ConfigError("bad facet line");
    f.tag = tag == "S" ? FacetTag::Sigma : FacetTag::T;
    (f.tag == FacetTag::Sigma ? s_set : t_set).insert({f.v[0], f.v[1]});
    mesh.facets.push_back(f);
  }
  for (int v : s_set)
    if (t_set.count(v)) mesh.corners.push_back(v);
  return mesh;
}

}  // namespace spaceform
