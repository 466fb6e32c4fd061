#pragma once

// Gauss rules on [0, 1], composite panels and triangle rules.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "spaceform/core.hpp"

namespace spaceform {

struct Rule1d {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// q-point Gauss-Legendre rule on [0, 1] (Golub-Welsch).
inline Rule1d gauss_legendre(int q) {
  if (q < 1) throw ConfigError("Gauss rule needs at least one point");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(q, q);
  for (int k = 1; k < q; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Rule1d r;
  for (int k = 0; k < q; ++k) {
    r.nodes.push_back(0.5 * (es.eigenvalues()(k) + 1.0));
    r.weights.push_back(std::pow(es.eigenvectors()(0, k), 2));
  }
  return r;
}

/// Points per panel of the composite rules used for identity checks.
inline constexpr int kPanelPoints = 3;

/// Composite Gauss rule with 2^level equal panels on [0, 1].
inline Rule1d composite_rule(int level, int q = kPanelPoints) {
  if (level < 0 || level > 20) throw ConfigError("quadrature level must lie in [0, 20]");
  const Rule1d base = gauss_legendre(q);
  const int panels = 1 << level;
  const double h = 1.0 / panels;
  Rule1d r;
  for (int p = 0; p < panels; ++p)
    for (int k = 0; k < q; ++k) {
      r.nodes.push_back((p + base.nodes[k]) * h);
      r.weights.push_back(base.weights[k] * h);
    }
  return r;
}

struct TrianglePoint {
  std::array<double, 3> bary;
  double weight;  // weights sum to 1 (multiply by the area)
};

/// Degree-2 interior rule.
inline const std::vector<TrianglePoint>& triangle_rule3() {
  static const std::vector<TrianglePoint> r{{{2.0 / 3, 1.0 / 6, 1.0 / 6}, 1.0 / 3},
                                            {{1.0 / 6, 2.0 / 3, 1.0 / 6}, 1.0 / 3},
                                            {{1.0 / 6, 1.0 / 6, 2.0 / 3}, 1.0 / 3}};
  return r;
}

/// Degree-5 seven-point rule, used for error norms.
inline const std::vector<TrianglePoint>& triangle_rule7() {
  static const std::vector<TrianglePoint> r = [] {
    const double a1 = 0.059715871789770, b1 = 0.470142064105115;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456;
    const double w1 = 0.132394152788506, w2 = 0.125939180544827;
    return std::vector<TrianglePoint>{{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.225},
                                      {{a1, b1, b1}, w1},
                                      {{b1, a1, b1}, w1},
                                      {{b1, b1, a1}, w1},
                                      {{a2, b2, b2}, w2},
                                      {{b2, a2, b2}, w2},
                                      {{b2, b2, a2}, w2}};
  }();
  return r;
}

}  // namespace spaceform
