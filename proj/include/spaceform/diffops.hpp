#pragma once

// Covariant calculus for g = w^2 * flat in chart coordinates.
//
// With sigma = ln w the Christoffel symbols are
//   Gamma^k_ij = delta_ik s_j + delta_jk s_i - delta_ij s_k,   s = grad sigma,
// and every operator below is written in those terms. Lower-index tensors
// are returned in chart components; divide by w^2 for orthonormal-frame
// components.

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "spaceform/core.hpp"
#include "spaceform/geometry.hpp"
#include "spaceform/jet.hpp"

namespace spaceform {

using Matrix = Eigen::MatrixXd;

/// Scalar function with exact value, gradient and Hessian at any chart point.
/// Closed-form fields may also provide a third-order evaluator (Jet1<Jet2>).
class ScalarField {
 public:
  using JetFn = std::function<Jet2(std::span<const double>)>;
  using Jet3Fn = std::function<Jet1<Jet2>(std::span<const double>)>;

  ScalarField() = default;
  explicit ScalarField(JetFn jet, Jet3Fn jet3 = {}) : jet_(std::move(jet)), jet3_(std::move(jet3)) {}

  /// Wraps a generic callable f(std::span<const S>) -> S.
  template <class F>
  static ScalarField closed_form(F f) {
    return ScalarField(
        [f](std::span<const double> p) {
          const auto x = seed_jet2(p);
          return f(std::span<const Jet2>(x));
        },
        [f](std::span<const double> p) {
          const auto x = seed_nested(p);
          return f(std::span<const Jet1<Jet2>>(x));
        });
  }

  static ScalarField constant(double c) {
    return closed_form([c](auto x) {
      using S = typename decltype(x)::value_type;
      return S(c);
    });
  }

  Jet2 jet(std::span<const double> p) const { return jet_(p); }
  double value(std::span<const double> p) const { return jet_(p).v; }
  Vec gradient(std::span<const double> p) const { return jet_(p).gradient(static_cast<int>(p.size())); }

  bool has_third_order() const { return static_cast<bool>(jet3_); }
  Jet1<Jet2> jet3(std::span<const double> p) const {
    if (!jet3_) throw PreconditionError("field has no third-order evaluator");
    return jet3_(p);
  }

 private:
  JetFn jet_;
  Jet3Fn jet3_;
};

struct VectorFieldJet {
  Vec value;
  Matrix jacobian;  // jacobian(j, i) = d Z^j / d x_i
};

class VectorField {
 public:
  using Fn = std::function<VectorFieldJet(std::span<const double>)>;

  VectorField() = default;
  explicit VectorField(Fn fn) : fn_(std::move(fn)) {}

  /// Wraps a generic callable f(std::span<const S>) -> std::vector<S>.
  template <class F>
  static VectorField closed_form(F f) {
    return VectorField([f](std::span<const double> p) {
      const auto x = seed_jet1(p);
      const auto z = f(std::span<const Jet1<double>>(x));
      const int dim = static_cast<int>(p.size());
      VectorFieldJet out{Vec(p.size()), Matrix(dim, dim)};
      for (int j = 0; j < dim; ++j) {
        out.value[j] = z[j].v;
        for (int i = 0; i < dim; ++i) out.jacobian(j, i) = z[j].n > i ? z[j].g[i] : 0.0;
      }
      return out;
    });
  }

  VectorFieldJet jet(std::span<const double> p) const { return fn_(p); }
  Vec value(std::span<const double> p) const { return fn_(p).value; }

 private:
  Fn fn_;
};

/// Lower-index Hessian from flat derivatives.
inline Matrix covariant_hessian(const SpaceFormModel& model, std::span<const double> p, const Jet2& f) {
  const Vec s = model.grad_log_factor(p);
  const int dim = model.dim();
  double sf = 0.0;
  for (int k = 0; k < dim; ++k) sf += s[k] * f.grad(k);
  Matrix h(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      h(i, j) = f.hess(i, j) - f.grad(i) * s[j] - f.grad(j) * s[i] + (i == j ? sf : 0.0);
  return h;
}

inline Matrix covariant_hessian(const SpaceFormModel& model, const ScalarField& f, std::span<const double> p) {
  model.require_inside(p);
  return covariant_hessian(model, p, f.jet(p));
}

inline Vec covariant_gradient(const SpaceFormModel& model, const ScalarField& f, std::span<const double> p) {
  const double w = model.conformal_factor(p);
  return scaled(1.0 / (w * w), f.gradient(p));
}

/// g-trace of a lower-index symmetric tensor.
inline double metric_trace(const SpaceFormModel& model, std::span<const double> p, const Matrix& lower) {
  const double w = model.conformal_factor(p);
  return lower.trace() / (w * w);
}

inline double laplace_beltrami(const SpaceFormModel& model, std::span<const double> p, const Jet2& f) {
  return metric_trace(model, p, covariant_hessian(model, p, f));
}

inline double laplace_beltrami(const SpaceFormModel& model, const ScalarField& f, std::span<const double> p) {
  model.require_inside(p);
  return laplace_beltrami(model, p, f.jet(p));
}

/// Symmetrized covariant derivative of Z, lowered: 1/2 (L_Z g)_ij.
inline Matrix lie_derivative_metric(const SpaceFormModel& model, const VectorFieldJet& z, std::span<const double> p) {
  const Vec s = model.grad_log_factor(p);
  const double w = model.conformal_factor(p);
  const int dim = model.dim();
  const double zs = dot(z.value, s);
  Matrix out(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      out(i, j) = w * w * (0.5 * (z.jacobian(j, i) + z.jacobian(i, j)) + (i == j ? zs : 0.0));
  return out;
}

inline Matrix lie_derivative_metric(const SpaceFormModel& model, const VectorField& z, std::span<const double> p) {
  model.require_inside(p);
  return lie_derivative_metric(model, z.jet(p), p);
}

inline double covariant_divergence(const SpaceFormModel& model, const VectorFieldJet& z, std::span<const double> p) {
  const Vec s = model.grad_log_factor(p);
  return z.jacobian.trace() + model.dim() * dot(z.value, s);
}

inline double covariant_divergence(const SpaceFormModel& model, const VectorField& z, std::span<const double> p) {
  model.require_inside(p);
  return covariant_divergence(model, z.jet(p), p);
}

/// Frame-component max norm of a lower-index tensor: max |T_ij| / w^2.
inline double frame_max_norm(const SpaceFormModel& model, std::span<const double> p, const Matrix& lower) {
  const double w = model.conformal_factor(p);
  return lower.cwiseAbs().maxCoeff() / (w * w);
}

struct FdReport {
  double gradient_deviation = 0.0;
  double hessian_deviation = 0.0;
  double scale = 0.0;  // max |AD entry|, for relative comparisons

  double max_deviation() const { return std::max(gradient_deviation, hessian_deviation); }
};

/// Compares the AD jet of f against centered finite differences with step h.
inline FdReport fd_crosscheck(const SpaceFormModel& model, const ScalarField& f, std::span<const double> p,
                              double h) {
  model.require_inside(p);
  const int dim = model.dim();
  const Jet2 j = f.jet(p);
  Vec q(p.begin(), p.end());
  auto at = [&](int a, double da, int b, double db) {
    q.assign(p.begin(), p.end());
    q[a] += da;
    if (b >= 0) q[b] += db;
    return f.value(q);
  };
  FdReport r;
  for (int i = 0; i < dim; ++i) {
    const double fd = (at(i, h, -1, 0.0) - at(i, -h, -1, 0.0)) / (2.0 * h);
    r.gradient_deviation = std::max(r.gradient_deviation, std::abs(fd - j.grad(i)));
    r.scale = std::max(r.scale, std::abs(j.grad(i)));
  }
  for (int i = 0; i < dim; ++i)
    for (int k = i; k < dim; ++k) {
      double fd;
      if (i == k) {
        fd = (at(i, h, -1, 0.0) - 2.0 * j.v + at(i, -h, -1, 0.0)) / (h * h);
      } else {
        fd = (at(i, h, k, h) - at(i, h, k, -h) - at(i, -h, k, h) + at(i, -h, k, -h)) / (4.0 * h * h);
      }
      r.hessian_deviation = std::max(r.hessian_deviation, std::abs(fd - j.hess(i, k)));
      r.scale = std::max(r.scale, std::abs(j.hess(i, k)));
    }
  return r;
}

}  // namespace spaceform
