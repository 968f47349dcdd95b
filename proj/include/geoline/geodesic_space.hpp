#pragma once

#include <cmath>
#include <vector>

#include "core.hpp"

namespace geoline {

struct OrientedGeodesic {
  Vec x, y;
  int c = 1;
  Bivector key;

  int dim() const { return int(x.size()); }
  int n() const { return int(x.size()) - 2; }
};

struct GeodesicTangent {
  OrientedGeodesic base;
  Vec X, Y;
};

inline double constraint_residual(const Vec& x, const Vec& y, int c) {
  double r = std::abs(inner(x, x, c) - 1.0);
  r = std::max(r, std::abs(inner(y, y, c) - double(c)));
  r = std::max(r, std::abs(inner(x, y, c)));
  return r;
}

inline OrientedGeodesic make_geodesic(const Vec& x, const Vec& y, int c, double check = tol::constraint_check) {
  check_c(c);
  if (x.size() != y.size() || x.size() < 3) throw Error("make_geodesic: bad dimensions");
  if (!x.allFinite() || !y.allFinite()) throw Error("make_geodesic: non-finite input");
  if (constraint_residual(x, y, c) > check) throw Error("make_geodesic: constraint violation");
  if (c < 0 && x(0) <= 0.0) throw Error("make_geodesic: x on the wrong sheet (x0 <= 0)");
  OrientedGeodesic L;
  L.c = c;
  L.x = x / std::sqrt(inner(x, x, c));
  Vec yy = y - inner(y, L.x, c) * L.x;
  L.y = yy / std::sqrt(inner(yy, yy, c) / c);
  L.key = wedge(L.x, L.y);
  return L;
}

// flow along the geodesic itself: the plane does not change
inline OrientedGeodesic flow_in_plane(const OrientedGeodesic& L, double t) {
  int c = L.c;
  Vec x = L.x * cos_c(t, c) + L.y * sin_c(t, c);
  Vec y = -double(c) * L.x * sin_c(t, c) + L.y * cos_c(t, c);
  return make_geodesic(x, y, c);
}

inline bool same_geodesic(const OrientedGeodesic& a, const OrientedGeodesic& b, double tol = tol::key_equal) {
  if (a.c != b.c || a.dim() != b.dim()) return false;
  return (a.key.comp - b.key.comp).cwiseAbs().maxCoeff() <= tol;
}

inline bool same_representative(const OrientedGeodesic& a, const OrientedGeodesic& b, double tol = 1e-10) {
  if (a.c != b.c || a.dim() != b.dim()) return false;
  return (a.x - b.x).cwiseAbs().maxCoeff() <= tol && (a.y - b.y).cwiseAbs().maxCoeff() <= tol;
}

inline OrientedGeodesic canonical_rep(const OrientedGeodesic& L) {
  if (L.c != -1) throw Error("canonical_rep: only defined for c = -1; compare bivector keys instead");
  double p = L.x.dot(L.y);
  double e = L.x.squaredNorm() + L.y.squaredNorm();
  double t = 0.5 * std::atanh(-2.0 * p / e);
  Vec x = L.x * std::cosh(t) + L.y * std::sinh(t);
  Vec y = L.x * std::sinh(t) + L.y * std::cosh(t);
  return make_geodesic(x, y, -1);
}

// component of v orthogonal to the plane
template <class V>
V perp(const V& v, const V& x, const V& y, int c) {
  return v - inner(v, x, c) * x - double(c) * inner(v, y, c) * y;
}

inline GeodesicTangent tangent(const OrientedGeodesic& L, const Vec& X, const Vec& Y) {
  if (X.size() != L.x.size() || Y.size() != L.x.size()) throw Error("tangent: dimension mismatch");
  return {L, perp(X, L.x, L.y, L.c), perp(Y, L.x, L.y, L.c)};
}

inline void require_same_base(const GeodesicTangent& a, const GeodesicTangent& b) {
  if (!same_representative(a.base, b.base, 1e-10)) throw Error("tangents at different base points");
}

inline double metric_Ge(const GeodesicTangent& a, const GeodesicTangent& b) {
  require_same_base(a, b);
  int c = a.base.c;
  return inner(a.X, b.X, c) + double(c) * inner(a.Y, b.Y, c);
}

inline double metric_G(const GeodesicTangent& a, const GeodesicTangent& b) {
  require_same_base(a, b);
  int c = a.base.c;
  return inner(a.X, b.Y, c) + inner(b.X, a.Y, c);
}

inline double omega(const GeodesicTangent& a, const GeodesicTangent& b) {
  require_same_base(a, b);
  int c = a.base.c;
  return inner(a.X, b.Y, c) - inner(b.X, a.Y, c);
}

inline GeodesicTangent apply_Je(const GeodesicTangent& t) { return {t.base, t.Y, double(t.base.c) * t.X}; }
inline GeodesicTangent apply_J(const GeodesicTangent& t) { return {t.base, t.X, -t.Y}; }

inline GeodesicTangent operator+(const GeodesicTangent& a, const GeodesicTangent& b) {
  require_same_base(a, b);
  return {a.base, a.X + b.X, a.Y + b.Y};
}
inline GeodesicTangent operator*(double s, const GeodesicTangent& a) { return {a.base, s * a.X, s * a.Y}; }

// x^X + y^Y as an element of Lambda^2
inline Bivector tangent_bivector(const GeodesicTangent& t) {
  return wedge(t.base.x, t.X) + wedge(t.base.y, t.Y);
}

// recover (X,Y) at L from the tangential part of an antisymmetric matrix B (B_ab = coefficient of e_a^e_b)
inline GeodesicTangent tangent_from_matrix(const OrientedGeodesic& L, const Mat& B) {
  int c = L.c;
  Vec ex = eta(L.dim(), c).cwiseProduct(L.x);
  Vec ey = eta(L.dim(), c).cwiseProduct(L.y);
  Vec X = -perp(Vec(B * ex), L.x, L.y, c);
  Vec Y = -double(c) * perp(Vec(B * ey), L.x, L.y, c);
  return {L, X, Y};
}

// same tangent vector written against another representative of the same plane
inline GeodesicTangent rebase(const GeodesicTangent& t, const OrientedGeodesic& L) {
  if (!same_geodesic(t.base, L)) throw Error("rebase: different geodesics");
  return tangent_from_matrix(L, tangent_bivector(t).matrix());
}

inline std::vector<GeodesicTangent> frame_basis(const OrientedGeodesic& L, const std::vector<Vec>& e) {
  int n = L.n();
  Vec z = Vec::Zero(L.dim());
  std::vector<GeodesicTangent> E;
  E.reserve(2 * n);
  for (int i = 0; i < n; ++i) E.push_back({L, e[i], z});
  for (int i = 0; i < n; ++i) E.push_back({L, z, e[i]});
  return E;
}

inline std::vector<GeodesicTangent> frame_basis(const OrientedGeodesic& L) {
  return frame_basis(L, complement_frame(L.x, L.y, L.c));
}

// coefficients of t in the basis E_1..E_2n built on the frame e
inline Vec frame_coords(const GeodesicTangent& t, const std::vector<Vec>& e) {
  int n = int(e.size());
  int c = t.base.c;
  Vec a(2 * n);
  for (int i = 0; i < n; ++i) {
    a(i) = inner(t.X, e[i], c) / double(c);
    a(n + i) = inner(t.Y, e[i], c) / double(c);
  }
  return a;
}

inline GeodesicTangent from_frame_coords(const OrientedGeodesic& L, const std::vector<Vec>& e, const Vec& a) {
  int n = int(e.size());
  Vec X = Vec::Zero(L.dim()), Y = Vec::Zero(L.dim());
  for (int i = 0; i < n; ++i) {
    X += a(i) * e[i];
    Y += a(n + i) * e[i];
  }
  return {L, X, Y};
}

template <class F>
Mat gram(const std::vector<GeodesicTangent>& E, F&& form) {
  int m = int(E.size());
  Mat g(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) g(a, b) = form(E[a], E[b]);
  return g;
}

inline double isometry_defect(const Mat& M, int c) {
  Mat H = eta(int(M.rows()), c).asDiagonal();
  return (M.transpose() * H * M - H).cwiseAbs().maxCoeff();
}

inline OrientedGeodesic isometry_push(const Mat& M, const OrientedGeodesic& L) {
  if (M.rows() != L.dim() || M.cols() != L.dim()) throw Error("isometry_push: dimension mismatch");
  if (isometry_defect(M, L.c) > 1e-10) throw Error("isometry_push: map does not preserve the form");
  if (L.c < 0 && M(0, 0) <= 0.0) throw Error("isometry_push: map swaps the hyperboloid sheets");
  return make_geodesic(M * L.x, M * L.y, L.c);
}

inline GeodesicTangent push_tangent(const Mat& M, const GeodesicTangent& t) {
  return {isometry_push(M, t.base), M * t.X, M * t.Y};
}

}  // namespace geoline
