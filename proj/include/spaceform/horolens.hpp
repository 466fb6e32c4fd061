#pragma once

// Exact solution bounded by two horospheres in the Poincare ball:
//   L1: |x'|^2 + (x_{n+1} - 1/2)^2 = 1/4        (carries Sigma)
//   L2: |x'|^2 + (x_{n+1} + b)^2 = (1 - b)^2     (support, kappa = 1)
// with u = (V3 - V1 - 1)/(n+1), c = 1/(n+1), c~ = (1 - 3b)/((n+1)(1 - b))
// and cos(theta) = -(1 - 3b)/(1 - b).

#include <cmath>
#include <span>

#include "spaceform/auxiliary.hpp"
#include "spaceform/diffops.hpp"
#include "spaceform/domain.hpp"
#include "spaceform/fields.hpp"
#include "spaceform/geometry.hpp"

namespace spaceform {

class HoroLens {
 public:
  explicit HoroLens(double b, int dim = 2) : b_(b), dim_(dim) {
    if (!(b > 0.0 && b < 0.5)) throw ConfigError("b must lie in (0, 1/2)");
    if (dim < 2 || dim > kMaxDim) throw ConfigError("unsupported dimension");
  }

  double b() const { return b_; }
  int dim() const { return dim_; }
  double c() const { return 1.0 / dim_; }
  double c_tilde() const { return (1.0 - 3.0 * b_) / (dim_ * (1.0 - b_)); }
  double cos_theta() const { return -(1.0 - 3.0 * b_) / (1.0 - b_); }
  double theta() const { return std::acos(cos_theta()); }
  SpaceFormModel model() const { return SpaceFormModel::poincare_ball(dim_); }

  ChartSurface sigma_surface() const { return ChartSurface::sphere(scaled(0.5, e_top()), 0.5); }
  ChartSurface support_surface() const { return ChartSurface::sphere(scaled(-b_, e_top()), 1.0 - b_); }

  template <class S>
  S u_expr(std::span<const S> x) const {
    const S s = sum_of_squares(x);
    const S v3 = (1.0 + s) / (1.0 - s);
    const S v1 = 2.0 * x.back() / (1.0 - s);
    return (v3 - v1 - 1.0) / static_cast<double>(dim_);
  }

  ScalarField u_field() const {
    return ScalarField::closed_form([h = *this](auto x) { return h.u_expr(x); });
  }

  /// Potential adapted to L2: V3 + beta * 2 x_{n+1}/(1 - |x|^2), with beta
  /// fixed by d_N V = V at the top point of L2. Both summands satisfy
  /// Hess V = V g, so the combination does too.
  ScalarField support_potential() const {
    const double beta = potential_beta();
    return ScalarField::closed_form([beta](auto x) {
      const auto s = sum_of_squares(x);
      return (1.0 + s + 2.0 * beta * x.back()) / (1.0 - s);
    });
  }

  double potential_beta() const {
    const SpaceFormModel m = model();
    const Vec top = scaled(1.0 - 2.0 * b_, e_top());
    const Vec n = conformal_normal(m, support_surface(), top);
    auto robin = [&](const ScalarField& f) {
      const Jet2 j = f.jet(top);
      return dot(n, j.gradient(dim_)) - j.v;
    };
    const ScalarField v3 = ScalarField::closed_form([](auto x) {
      const auto s = sum_of_squares(x);
      return (1.0 + s) / (1.0 - s);
    });
    const ScalarField w = ScalarField::closed_form([](auto x) { return 2.0 * x.back() / (1.0 - sum_of_squares(x)); });
    return -robin(v3) / robin(w);
  }

  Support support() const { return {model(), support_surface(), 1.0, support_potential()}; }

  /// phi = c0 cosh d(x, o) - 1/(n+1) with o the top point of L2 and
  /// c0 = 1/(n+1) - c~ (the horosphere case of the equidistant formula).
  AuxFunction aux() const {
    const double c0 = 1.0 / dim_ - c_tilde();
    return AuxFunction(support(), c_tilde(), c0, scaled(1.0 - 2.0 * b_, e_top()), c0);
  }

  LensDomain domain() const {
    if (dim_ != 2) throw ConfigError("the lens domain is built in ambient dimension 2");
    return LensDomain(support(), PlaneCurve::circle(Vec{0.0, 0.5}, 0.5));
  }

 private:
  Vec e_top() const { return unit_vector(dim_, dim_ - 1); }

  double b_;
  int dim_;
};

}  // namespace spaceform
