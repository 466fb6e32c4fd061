#pragma once

// Forward-mode automatic differentiation.
//
// Jet2 is a second-order truncated Taylor value: value, gradient and the
// packed upper triangle of the Hessian, all with respect to the chart
// coordinates. Jet1<S> is a first-order jet over an arbitrary scalar S; the
// nested Jet1<Jet2> carries derivatives up to third order, which the
// P-function needs (its Hessian involves the gradient of u).
//
// Closed-form fields are written once as templates over the scalar type and
// evaluated with double, Jet1<double>, Jet2 or Jet1<Jet2>.

#include <array>
#include <cmath>
#include <span>
#include <type_traits>
#include <vector>

#include "spaceform/core.hpp"

namespace spaceform {

inline constexpr int kPackedHessian = kMaxDim * (kMaxDim + 1) / 2;

/// Index of (i, j) in the packed symmetric Hessian storage.
constexpr int packed_index(int i, int j) {
  return i <= j ? j * (j + 1) / 2 + i : i * (i + 1) / 2 + j;
}

class Jet2 {
 public:
  double v = 0.0;
  std::array<double, kMaxDim> g{};
  std::array<double, kPackedHessian> h{};
  int n = 0;

  Jet2() = default;
  Jet2(double c) : v(c) {}  // NOLINT(google-explicit-constructor): constants mix freely

  static Jet2 variable(double x, int axis, int dim) {
    Jet2 j(x);
    j.n = dim;
    j.g[static_cast<std::size_t>(axis)] = 1.0;
    return j;
  }

  double hess(int i, int j) const { return h[static_cast<std::size_t>(packed_index(i, j))]; }
  double grad(int i) const { return g[static_cast<std::size_t>(i)]; }

  Vec gradient(int dim) const { return Vec(g.begin(), g.begin() + dim); }

  /// Applies a scalar function with derivatives f0 = f(v), f1 = f'(v), f2 = f''(v).
  Jet2 chain(double f0, double f1, double f2) const {
    Jet2 r(f0);
    r.n = n;
    for (int i = 0; i < n; ++i) r.g[i] = f1 * g[i];
    for (int j = 0; j < n; ++j)
      for (int i = 0; i <= j; ++i) {
        const int k = packed_index(i, j);
        r.h[k] = f1 * h[k] + f2 * g[i] * g[j];
      }
    return r;
  }

  Jet2& operator+=(const Jet2& b) {
    n = std::max(n, b.n);
    v += b.v;
    for (int i = 0; i < n; ++i) g[i] += b.g[i];
    for (int k = 0; k < n * (n + 1) / 2; ++k) h[k] += b.h[k];
    return *this;
  }
  Jet2& operator-=(const Jet2& b) {
    n = std::max(n, b.n);
    v -= b.v;
    for (int i = 0; i < n; ++i) g[i] -= b.g[i];
    for (int k = 0; k < n * (n + 1) / 2; ++k) h[k] -= b.h[k];
    return *this;
  }
  Jet2& operator*=(double c) {
    v *= c;
    for (int i = 0; i < n; ++i) g[i] *= c;
    for (int k = 0; k < n * (n + 1) / 2; ++k) h[k] *= c;
    return *this;
  }
  Jet2& operator+=(double c) {
    v += c;
    return *this;
  }
  Jet2& operator-=(double c) {
    v -= c;
    return *this;
  }
};

inline Jet2 operator-(Jet2 a) {
  a *= -1.0;
  return a;
}
inline Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
inline Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
inline Jet2 operator+(Jet2 a, double c) { return a += c; }
inline Jet2 operator+(double c, Jet2 a) { return a += c; }
inline Jet2 operator-(Jet2 a, double c) { return a -= c; }
inline Jet2 operator-(double c, const Jet2& a) { return -a + c; }
inline Jet2 operator*(Jet2 a, double c) { return a *= c; }
inline Jet2 operator*(double c, Jet2 a) { return a *= c; }
inline Jet2 operator/(Jet2 a, double c) { return a *= 1.0 / c; }

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 r(a.v * b.v);
  r.n = std::max(a.n, b.n);
  const int n = r.n;
  for (int i = 0; i < n; ++i) r.g[i] = a.v * b.g[i] + b.v * a.g[i];
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      const int k = packed_index(i, j);
      r.h[k] = a.v * b.h[k] + b.v * a.h[k] + a.g[i] * b.g[j] + a.g[j] * b.g[i];
    }
  return r;
}
inline Jet2& operator*=(Jet2& a, const Jet2& b) { return a = a * b; }

inline Jet2 reciprocal(const Jet2& a) {
  const double r = 1.0 / a.v;
  return a.chain(r, -r * r, 2.0 * r * r * r);
}
inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }
inline Jet2 operator/(double c, const Jet2& b) { return c * reciprocal(b); }
inline Jet2& operator/=(Jet2& a, const Jet2& b) { return a = a / b; }

inline Jet2 sqrt(const Jet2& a) {
  const double s = std::sqrt(a.v);
  return a.chain(s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.v);
  return a.chain(e, e, e);
}
inline Jet2 log(const Jet2& a) { return a.chain(std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline Jet2 sin(const Jet2& a) {
  const double s = std::sin(a.v);
  return a.chain(s, std::cos(a.v), -s);
}
inline Jet2 cos(const Jet2& a) {
  const double c = std::cos(a.v);
  return a.chain(c, -std::sin(a.v), -c);
}
inline Jet2 sinh(const Jet2& a) {
  const double s = std::sinh(a.v);
  return a.chain(s, std::cosh(a.v), s);
}
inline Jet2 cosh(const Jet2& a) {
  const double c = std::cosh(a.v);
  return a.chain(c, std::sinh(a.v), c);
}

/// First-order jet over scalar S.
template <class S>
class Jet1 {
 public:
  S v{};
  std::array<S, kMaxDim> g{};
  int n = 0;

  Jet1() = default;
  Jet1(double c) : v(c) {}  // NOLINT(google-explicit-constructor)
  explicit Jet1(const S& value) requires(!std::is_same_v<S, double>) : v(value) {}

  Jet1 chain(const S& f0, const S& f1) const {
    Jet1 r;
    r.v = f0;
    r.n = n;
    for (int i = 0; i < n; ++i) r.g[i] = f1 * g[i];
    return r;
  }

  Jet1& operator+=(const Jet1& b) {
    n = std::max(n, b.n);
    v += b.v;
    for (int i = 0; i < n; ++i) g[i] += b.g[i];
    return *this;
  }
  Jet1& operator-=(const Jet1& b) {
    n = std::max(n, b.n);
    v -= b.v;
    for (int i = 0; i < n; ++i) g[i] -= b.g[i];
    return *this;
  }
  Jet1& operator*=(double c) {
    v *= c;
    for (int i = 0; i < n; ++i) g[i] *= c;
    return *this;
  }
  Jet1& operator+=(double c) {
    v += c;
    return *this;
  }
  Jet1& operator-=(double c) {
    v -= c;
    return *this;
  }
};

template <class S>
Jet1<S> operator-(Jet1<S> a) {
  a *= -1.0;
  return a;
}
template <class S>
Jet1<S> operator+(Jet1<S> a, const Jet1<S>& b) {
  return a += b;
}
template <class S>
Jet1<S> operator-(Jet1<S> a, const Jet1<S>& b) {
  return a -= b;
}
template <class S>
Jet1<S> operator+(Jet1<S> a, double c) {
  return a += c;
}
template <class S>
Jet1<S> operator+(double c, Jet1<S> a) {
  return a += c;
}
template <class S>
Jet1<S> operator-(Jet1<S> a, double c) {
  return a -= c;
}
template <class S>
Jet1<S> operator-(double c, const Jet1<S>& a) {
  return -a + c;
}
template <class S>
Jet1<S> operator*(Jet1<S> a, double c) {
  return a *= c;
}
template <class S>
Jet1<S> operator*(double c, Jet1<S> a) {
  return a *= c;
}
template <class S>
Jet1<S> operator/(Jet1<S> a, double c) {
  return a *= 1.0 / c;
}
template <class S>
Jet1<S> operator*(const Jet1<S>& a, const Jet1<S>& b) {
  Jet1<S> r;
  r.v = a.v * b.v;
  r.n = std::max(a.n, b.n);
  for (int i = 0; i < r.n; ++i) r.g[i] = a.v * b.g[i] + b.v * a.g[i];
  return r;
}
template <class S>
Jet1<S>& operator*=(Jet1<S>& a, const Jet1<S>& b) {
  return a = a * b;
}
template <class S>
Jet1<S> reciprocal(const Jet1<S>& a) {
  const S r = 1.0 / a.v;
  return a.chain(r, -(r * r));
}
template <class S>
Jet1<S> operator/(const Jet1<S>& a, const Jet1<S>& b) {
  return a * reciprocal(b);
}
template <class S>
Jet1<S> operator/(double c, const Jet1<S>& b) {
  return c * reciprocal(b);
}
template <class S>
Jet1<S>& operator/=(Jet1<S>& a, const Jet1<S>& b) {
  return a = a / b;
}

template <class S>
Jet1<S> sqrt(const Jet1<S>& a) {
  using std::sqrt;
  const S s = sqrt(a.v);
  return a.chain(s, 0.5 / s);
}
template <class S>
Jet1<S> exp(const Jet1<S>& a) {
  using std::exp;
  const S e = exp(a.v);
  return a.chain(e, e);
}
template <class S>
Jet1<S> log(const Jet1<S>& a) {
  using std::log;
  return a.chain(log(a.v), 1.0 / a.v);
}
template <class S>
Jet1<S> sin(const Jet1<S>& a) {
  using std::cos;
  using std::sin;
  return a.chain(sin(a.v), cos(a.v));
}
template <class S>
Jet1<S> cos(const Jet1<S>& a) {
  using std::cos;
  using std::sin;
  return a.chain(cos(a.v), -sin(a.v));
}
template <class S>
Jet1<S> sinh(const Jet1<S>& a) {
  using std::cosh;
  using std::sinh;
  return a.chain(sinh(a.v), cosh(a.v));
}
template <class S>
Jet1<S> cosh(const Jet1<S>& a) {
  using std::cosh;
  using std::sinh;
  return a.chain(cosh(a.v), sinh(a.v));
}

inline double value_of(double x) { return x; }
inline double value_of(const Jet2& x) { return x.v; }
template <class S>
double value_of(const Jet1<S>& x) {
  return value_of(x.v);
}

/// Jet2 seeds: coordinate i carries gradient e_i.
inline std::vector<Jet2> seed_jet2(std::span<const double> p) {
  const int dim = static_cast<int>(p.size());
  std::vector<Jet2> x;
  x.reserve(p.size());
  for (int i = 0; i < dim; ++i) x.push_back(Jet2::variable(p[i], i, dim));
  return x;
}

inline std::vector<Jet1<double>> seed_jet1(std::span<const double> p) {
  const int dim = static_cast<int>(p.size());
  std::vector<Jet1<double>> x(p.size());
  for (int i = 0; i < dim; ++i) {
    x[i].v = p[i];
    x[i].n = dim;
    x[i].g[i] = 1.0;
  }
  return x;
}

/// Nested seeds: the outer gradient of u evaluates to Jet2 values, i.e. the
/// gradient of u together with its own gradient and Hessian.
inline std::vector<Jet1<Jet2>> seed_nested(std::span<const double> p) {
  const int dim = static_cast<int>(p.size());
  std::vector<Jet1<Jet2>> x(p.size());
  for (int i = 0; i < dim; ++i) {
    x[i].v = Jet2::variable(p[i], i, dim);
    x[i].n = dim;
    x[i].g[i] = Jet2(1.0);
  }
  return x;
}

template <class S>
S sum_of_squares(std::span<const S> x) {
  S s(0.0);
  for (const S& xi : x) s += xi * xi;
  return s;
}

}  // namespace spaceform
