#pragma once

#include <cmath>
#include <type_traits>

#include <Eigen/Core>

namespace geoline {

// forward-mode dual number, nests as Dual<Dual<double>> for higher derivatives
template <class T>
struct Dual {
  T v{};
  T d{};

  Dual() = default;
  template <class U, std::enable_if_t<std::is_convertible_v<U, T>, int> = 0>
  Dual(const U& x) : v(x), d(0.0) {}
  Dual(const T& a, const T& b) : v(a), d(b) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
  Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
  friend Dual operator+(const Dual& a) { return a; }
  friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    T q = a.v / b.v;
    return {q, (a.d - q * b.d) / b.v};
  }

  friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
  friend bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
  friend bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }
  friend bool operator==(const Dual& a, const Dual& b) { return a.v == b.v; }
  friend bool operator!=(const Dual& a, const Dual& b) { return a.v != b.v; }

  friend Dual sqrt(const Dual& a) {
    using std::sqrt;
    T s = sqrt(a.v);
    return {s, a.d / (2.0 * s)};
  }
  friend Dual exp(const Dual& a) {
    using std::exp;
    T e = exp(a.v);
    return {e, a.d * e};
  }
  friend Dual log(const Dual& a) {
    using std::log;
    return {log(a.v), a.d / a.v};
  }
  friend Dual sin(const Dual& a) {
    using std::sin;
    using std::cos;
    return {sin(a.v), a.d * cos(a.v)};
  }
  friend Dual cos(const Dual& a) {
    using std::sin;
    using std::cos;
    return {cos(a.v), -(a.d * sin(a.v))};
  }
  friend Dual sinh(const Dual& a) {
    using std::sinh;
    using std::cosh;
    return {sinh(a.v), a.d * cosh(a.v)};
  }
  friend Dual cosh(const Dual& a) {
    using std::sinh;
    using std::cosh;
    return {cosh(a.v), a.d * sinh(a.v)};
  }
  friend Dual atanh(const Dual& a) {
    using std::atanh;
    return {atanh(a.v), a.d / (1.0 - a.v * a.v)};
  }
  friend Dual abs(const Dual& a) { return a.v < T(0.0) ? -a : a; }
};

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) {
  return value_of(x.v);
}

// lift/lower helpers for Eigen containers
template <class T, int R, int C>
Eigen::Matrix<T, R, C> values(const Eigen::Matrix<Dual<T>, R, C>& m) {
  return m.unaryExpr([](const Dual<T>& z) { return z.v; });
}
template <class T, int R, int C>
Eigen::Matrix<T, R, C> tangents(const Eigen::Matrix<Dual<T>, R, C>& m) {
  return m.unaryExpr([](const Dual<T>& z) { return z.d; });
}
template <class T>
T values(const Dual<T>& z) {
  return z.v;
}
template <class T>
T tangents(const Dual<T>& z) {
  return z.d;
}

template <class T, int R, int C>
Eigen::Matrix<Dual<T>, R, C> seed(const Eigen::Matrix<T, R, C>& m, int k) {
  Eigen::Matrix<Dual<T>, R, C> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.size(); ++i) out(i) = Dual<T>(m(i), T(i == k ? 1.0 : 0.0));
  return out;
}

template <class T, int R, int C>
Eigen::Matrix<Dual<T>, R, C> seed_direction(const Eigen::Matrix<T, R, C>& m,
                                            const Eigen::Matrix<double, R, C>& dir) {
  Eigen::Matrix<Dual<T>, R, C> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.size(); ++i) out(i) = Dual<T>(m(i), T(dir(i)));
  return out;
}

template <class T, int R, int C>
Eigen::Matrix<T, R, C> lift(const Eigen::Matrix<double, R, C>& m) {
  return m.unaryExpr([](double z) { return T(z); });
}

}  // namespace geoline

namespace Eigen {
template <class T>
struct NumTraits<geoline::Dual<T>> : GenericNumTraits<geoline::Dual<T>> {
  using Real = geoline::Dual<T>;
  using NonInteger = geoline::Dual<T>;
  using Nested = geoline::Dual<T>;
  using Literal = geoline::Dual<T>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2 * NumTraits<T>::ReadCost,
    AddCost = 2 * NumTraits<T>::AddCost,
    MulCost = 3 * NumTraits<T>::MulCost
  };
  static inline Real epsilon() { return Real(NumTraits<double>::epsilon()); }
  static inline Real dummy_precision() { return Real(1e-12); }
  static inline Real highest() { return Real(NumTraits<double>::highest()); }
  static inline Real lowest() { return Real(NumTraits<double>::lowest()); }
  static inline int digits10() { return NumTraits<double>::digits10(); }
};

template <class T, typename BinaryOp>
struct ScalarBinaryOpTraits<geoline::Dual<T>, double, BinaryOp> {
  using ReturnType = geoline::Dual<T>;
};
template <class T, typename BinaryOp>
struct ScalarBinaryOpTraits<double, geoline::Dual<T>, BinaryOp> {
  using ReturnType = geoline::Dual<T>;
};
}  // namespace Eigen
