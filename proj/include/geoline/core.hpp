#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "dual.hpp"

namespace geoline {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
template <class T>
using VecT = Eigen::Matrix<T, Eigen::Dynamic, 1>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline int check_c(int c) {
  if (c != 1 && c != -1) throw Error("curvature c must be -1 or +1 (got " + std::to_string(c) + ")");
  return c;
}

// <u,v>_c = u0 v0 + c * sum_{i>=1} ui vi
template <class A, class B>
auto inner(const Eigen::MatrixBase<A>& u, const Eigen::MatrixBase<B>& v, int c) {
  using S = typename A::Scalar;
  if (u.size() != v.size()) throw Error("inner: dimension mismatch");
  S s = u(0) * v(0);
  S t = S(0.0);
  for (Eigen::Index i = 1; i < u.size(); ++i) t += u(i) * v(i);
  return S(s + double(c) * t);
}

// diag(1, c, ..., c)
inline Vec eta(int dim, int c) {
  Vec e = Vec::Constant(dim, double(c));
  e(0) = 1.0;
  return e;
}

template <class T>
T cos_c(const T& t, int c) {
  using std::cos;
  using std::cosh;
  return c > 0 ? T(cos(t)) : T(cosh(t));
}
template <class T>
T sin_c(const T& t, int c) {
  using std::sin;
  using std::sinh;
  return c > 0 ? T(sin(t)) : T(sinh(t));
}

inline int pair_index(int a, int b, int dim) {
  // packed upper triangle (0,1),(0,2),...,(dim-2,dim-1)
  return a * dim - a * (a + 1) / 2 + (b - a - 1);
}

struct Bivector {
  int dim = 0;
  Vec comp;

  Bivector() = default;
  explicit Bivector(int d) : dim(d), comp(Vec::Zero(d * (d - 1) / 2)) {}

  double operator()(int a, int b) const {
    if (a == b) return 0.0;
    return a < b ? comp(pair_index(a, b, dim)) : -comp(pair_index(b, a, dim));
  }
  Mat matrix() const {
    Mat m = Mat::Zero(dim, dim);
    for (int a = 0; a < dim; ++a)
      for (int b = a + 1; b < dim; ++b) {
        m(a, b) = comp(pair_index(a, b, dim));
        m(b, a) = -m(a, b);
      }
    return m;
  }
  Bivector& operator+=(const Bivector& o) {
    comp += o.comp;
    return *this;
  }
};

inline Bivector operator+(Bivector a, const Bivector& b) { return a += b; }
inline Bivector operator*(double s, Bivector b) {
  b.comp *= s;
  return b;
}

inline Bivector wedge(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) throw Error("wedge: dimension mismatch");
  int d = int(x.size());
  Bivector w(d);
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) w.comp(pair_index(a, b, d)) = x(a) * y(b) - x(b) * y(a);
  return w;
}

inline Bivector bivector_from_matrix(const Mat& m) {
  int d = int(m.rows());
  Bivector w(d);
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) w.comp(pair_index(a, b, d)) = m(a, b);
  return w;
}

// induced form on Lambda^2: sum_{a<b} eta_a eta_b B1_ab B2_ab
inline double biv_inner(const Bivector& b1, const Bivector& b2, int c) {
  check_c(c);
  if (b1.dim != b2.dim) throw Error("biv_inner: dimension mismatch");
  int d = b1.dim;
  double s = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      double w = (a == 0 ? 1.0 : double(c)) * double(c);
      int k = pair_index(a, b, d);
      s += w * b1.comp(k) * b2.comp(k);
    }
  return s;
}

namespace tol {
inline constexpr double constraint_check = 1e-8;
inline constexpr double near_null = 1e-10;
inline constexpr double key_equal = 1e-8;
}  // namespace tol

// e_1..e_n with <e_i,x>=<e_i,y>=0, <e_i,e_j>_c = c delta_ij
inline std::vector<Vec> complement_frame(const Vec& x, const Vec& y, int c) {
  check_c(c);
  int dim = int(x.size());
  int n = dim - 2;
  if (n < 1) throw Error("complement_frame: need dimension >= 3");
  double gram = inner(x, x, c) * inner(y, y, c) - std::pow(inner(x, y, c), 2);
  if (std::abs(gram) < tol::near_null) throw Error("complement_frame: degenerate plane");
  double xx = inner(x, x, c), yy = inner(y, y, c);
  if (std::abs(xx) < tol::near_null || std::abs(yy) < tol::near_null)
    throw Error("complement_frame: near-null leg");

  std::vector<Vec> frame;
  std::vector<bool> used(dim, false);
  while (int(frame.size()) < n) {
    // pick the standard basis candidate whose residual is least null
    int best = -1;
    double best_val = 0.0;
    Vec best_v;
    for (int k = 0; k < dim; ++k) {
      if (used[k]) continue;
      Vec v = Vec::Unit(dim, k);
      v -= inner(v, x, c) / xx * x;
      v -= inner(v, y, c) / yy * y;
      for (const Vec& e : frame) v -= inner(v, e, c) / double(c) * e;
      double s = std::abs(inner(v, v, c));
      if (s > best_val) {
        best_val = s;
        best = k;
        best_v = v;
      }
    }
    if (best < 0 || best_val < tol::near_null) throw Error("complement_frame: near-null direction");
    used[best] = true;
    double s = inner(best_v, best_v, c);
    if (s * c <= 0) throw Error("complement_frame: complement not of sign c");
    frame.push_back(best_v / std::sqrt(s / c));
  }
  return frame;
}

// small dense helpers on generic scalars

// Laplace expansion: pivoting on values would drop derivatives of a minor that vanishes in value
template <class M>
auto laplace_det(const M& a) {
  using T = typename M::Scalar;
  int n = int(a.rows());
  if (n == 1) return T(a(0, 0));
  if (n == 2) return T(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0));
  T det = T(0.0);
  for (int j = 0; j < n; ++j) {
    M m(n - 1, n - 1);
    for (int r = 1; r < n; ++r)
      for (int k = 0, q = 0; k < n; ++k)
        if (k != j) m(r - 1, q++) = a(r, k);
    T term = a(0, j) * laplace_det(m);
    det = (j % 2 == 0) ? T(det + term) : T(det - term);
  }
  return det;
}

template <class T>
T det_generic(Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> a) {
  int n = int(a.rows());
  T det = T(1.0);
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(value_of(a(i, k))) > std::abs(value_of(a(p, k)))) p = i;
    if (value_of(a(p, k)) == 0.0) {
      // singular in value only: the trailing block may still carry derivatives
      Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> rest = a.block(k, k, n - k, n - k);
      return T(det * laplace_det(rest));
    }
    if (p != k) {
      a.row(p).swap(a.row(k));
      det = -det;
    }
    det = det * a(k, k);
    for (int i = k + 1; i < n; ++i) {
      T f = a(i, k) / a(k, k);
      for (int j = k; j < n; ++j) a(i, j) = a(i, j) - f * a(k, j);
    }
  }
  return det;
}

// solve a x = b for generic scalars (partial pivoting on values)
template <class T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> solve_generic(
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> a, Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> b) {
  int n = int(a.rows());
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(value_of(a(i, k))) > std::abs(value_of(a(p, k)))) p = i;
    if (std::abs(value_of(a(p, k))) < 1e-300) throw Error("solve_generic: singular matrix");
    if (p != k) {
      a.row(p).swap(a.row(k));
      b.row(p).swap(b.row(k));
    }
    for (int i = k + 1; i < n; ++i) {
      T f = a(i, k) / a(k, k);
      for (int j = k; j < n; ++j) a(i, j) = a(i, j) - f * a(k, j);
      for (int j = 0; j < b.cols(); ++j) b(i, j) = b(i, j) - f * b(k, j);
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    for (int j = 0; j < b.cols(); ++j) {
      T s = b(k, j);
      for (int i = k + 1; i < n; ++i) s = s - a(k, i) * b(i, j);
      b(k, j) = s / a(k, k);
    }
  }
  return b;
}

}  // namespace geoline
