#pragma once

// Reference implementations kept separate from the library code paths.

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline double ip(const Vec& u, const Vec& v, int c) {
  double s = u(0) * v(0);
  for (int i = 1; i < u.size(); ++i) s += c * u(i) * v(i);
  return s;
}

inline Mat eta(int d, int c) {
  Mat e = Mat::Identity(d, d) * double(c);
  e(0, 0) = 1;
  return e;
}

// generator of the one-parameter group moving x^y along the tangent (X,Y)
inline Mat transvection(const Vec& x, const Vec& y, const Vec& X, const Vec& Y, int c) {
  Mat e = eta(int(x.size()), c);
  return -Y * (e * x).transpose() + (1.0 / c) * X * (e * y).transpose() + x * (e * Y).transpose() -
         double(c) * y * (e * X).transpose();
}

inline Mat plane(const Vec& x, const Vec& y) { return x * y.transpose() - y * x.transpose(); }

// x^y at time t along the transvection geodesic
inline Mat transvection_plane(const Vec& x, const Vec& y, const Vec& X, const Vec& Y, int c, double t) {
  Mat E = (t * transvection(x, y, X, Y, c)).exp();
  return plane(E * x, E * y);
}

// principal curvatures of the geodesic sphere of radius r (umbilic)
inline double sphere_k(int c, double r) { return c > 0 ? 1.0 / std::tan(r) : 1.0 / std::tanh(r); }

// equidistant tube of radius r around a geodesic, n = 2, sorted ascending
inline std::pair<double, double> tube_k(int c, double r) {
  if (c > 0) return {-std::tan(r), 1.0 / std::tan(r)};
  return {std::tanh(r), 1.0 / std::tanh(r)};
}

// F for the sphere of radius r
inline double sphere_F(int c, double r) {
  return c > 0 ? 2 * M_PI * std::abs(std::sin(2 * r)) : 2 * M_PI * std::sinh(2 * r);
}

// Sylvester-style signature count
inline std::pair<int, int> signature(const Mat& g, double eps = 1e-9) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (g + g.transpose()));
  int p = 0, m = 0;
  for (int i = 0; i < g.rows(); ++i) {
    if (es.eigenvalues()(i) > eps) ++p;
    if (es.eigenvalues()(i) < -eps) ++m;
  }
  return {p, m};
}

}  // namespace oracle
