#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "curvature.hpp"

namespace geoline {

// point (x, v) of the tangent bundle of the hyperboloid, x0 > 0
struct TangentBundlePoint {
  Vec base, vec;
};

// (horizontal part, vertical part), both tangent at the base point
struct BundleTangent {
  Vec P, Kv;
};

inline double bundle_constraint_residual(const TangentBundlePoint& p) {
  return std::max(std::abs(inner(p.base, p.base, -1) - 1.0), std::abs(inner(p.vec, p.base, -1)));
}

inline double bundle_metric(const TangentBundlePoint& p, const BundleTangent& a, const BundleTangent& b) {
  for (const Vec* v : {&a.P, &a.Kv, &b.P, &b.Kv})
    if (v->size() != p.base.size()) throw Error("bundle_metric: dimension mismatch");
  return inner(a.P, b.Kv, -1) + inner(a.Kv, b.P, -1);
}

// ambient first-order jet (x, xdot, v, vdot) -> (P, Kv)
inline BundleTangent connection_split(const Vec& x, const Vec& xdot, const Vec& v, const Vec& vdot,
                                      double check = 1e-8) {
  if (std::abs(inner(x, x, -1) - 1.0) > check || std::abs(inner(xdot, x, -1)) > check ||
      std::abs(inner(v, x, -1)) > check || std::abs(inner(vdot, x, -1) + inner(v, xdot, -1)) > check)
    throw Error("connection_split: jet violates the bundle constraints");
  return {xdot - inner(xdot, x, -1) * x, vdot - inner(vdot, x, -1) * x};
}

namespace bundle {

// coordinates z = (w, xi) in R^{2m}, m = n+1: x = (sqrt(1+|w|^2), w), v = dx(w) xi
template <class T>
VecT<T> hyperboloid_point(const VecT<T>& w) {
  using std::sqrt;
  VecT<T> x(w.size() + 1);
  x(0) = sqrt(T(1.0) + w.dot(w));
  x.tail(w.size()) = w;
  return x;
}

// d x / d w_j as columns
template <class T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> hyperboloid_jacobian(const VecT<T>& w) {
  int m = int(w.size());
  using std::sqrt;
  T x0 = sqrt(T(1.0) + w.dot(w));
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> J(m + 1, m);
  J.setZero();
  for (int j = 0; j < m; ++j) {
    J(0, j) = w(j) / x0;
    J(j + 1, j) = T(1.0);
  }
  return J;
}

template <class T>
VecT<T> project(const VecT<T>& v, const VecT<T>& x) {
  return v - inner(v, x, -1) * x;
}

// coordinate Gram matrix of the neutral metric at z
template <class T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> metric(const VecT<T>& z) {
  int m = int(z.size()) / 2;
  VecT<T> w = z.head(m), xi = z.tail(m);
  using std::sqrt;
  T x0 = sqrt(T(1.0) + w.dot(w));
  T wx = w.dot(xi);
  VecT<T> x = hyperboloid_point(w);
  auto dx = hyperboloid_jacobian(w);
  // columns: P and Kv of the coordinate vectors d/dz_a
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> P(m + 1, 2 * m), K(m + 1, 2 * m);
  P.setZero();
  K.setZero();
  for (int j = 0; j < m; ++j) {
    P.col(j) = dx.col(j);
    VecT<T> dvw = VecT<T>::Zero(m + 1);
    dvw(0) = xi(j) / x0 - wx * w(j) / (x0 * x0 * x0);
    K.col(j) = project(dvw, x);
    K.col(m + j) = project(VecT<T>(dx.col(j)), x);
  }
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> g(2 * m, 2 * m);
  for (int a = 0; a < 2 * m; ++a)
    for (int b = 0; b < 2 * m; ++b)
      g(a, b) = inner(VecT<T>(P.col(a)), VecT<T>(K.col(b)), -1) + inner(VecT<T>(K.col(a)), VecT<T>(P.col(b)), -1);
  return g;
}

// Christoffel symbols gamma[k](i,j) of the neutral metric at z (exact metric derivatives)
inline Christoffel christoffel(const Vec& z) {
  int d = int(z.size());
  Mat g = metric<double>(z);
  std::vector<Mat> dg(d);
  for (int a = 0; a < d; ++a) dg[a] = tangents(metric<Dual<double>>(seed(z, a)));
  Mat gi = g.inverse();
  Christoffel G(d, Mat::Zero(d, d));
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = 0;
        for (int l = 0; l < d; ++l) s += gi(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        G[k](i, j) = 0.5 * s;
      }
  return G;
}

// coordinate vector V at z -> (P, Kv)
inline BundleTangent to_bundle_tangent(const Vec& z, const Vec& V) {
  int m = int(z.size()) / 2;
  Vec w = z.head(m), xi = z.tail(m);
  Vec x = hyperboloid_point<double>(w);
  Mat dx = hyperboloid_jacobian<double>(w);
  double x0 = x(0), wx = w.dot(xi);
  Vec dv = dx * V.tail(m);
  for (int j = 0; j < m; ++j) dv(0) += V(j) * (xi(j) / x0 - wx * w(j) / (x0 * x0 * x0));
  return {dx * V.head(m), project<double>(dv, x)};
}

inline Vec coords_of(const TangentBundlePoint& p) {
  int m = int(p.base.size()) - 1;
  Vec z(2 * m);
  z.head(m) = p.base.tail(m);
  z.tail(m) = p.vec.tail(m);
  return z;
}

}  // namespace bundle

// hyperbolic canonical representative on generic scalars
template <class T>
std::pair<VecT<T>, VecT<T>> canonical_section(const VecT<T>& x, const VecT<T>& y) {
  using std::atanh;
  using std::cosh;
  using std::sinh;
  T p = x.dot(y);
  T e = x.dot(x) + y.dot(y);
  T t = T(0.5) * atanh(T(-2.0) * p / e);
  return {VecT<T>(x * cosh(t) + y * sinh(t)), VecT<T>(x * sinh(t) + y * cosh(t))};
}

inline TangentBundlePoint embed_f(const OrientedGeodesic& L, double fibre_scale = 1.0) {
  if (L.c != -1) throw Error("embed_f: only defined for c = -1");
  OrientedGeodesic C = canonical_rep(L);
  return {C.x, -fibre_scale * C.y};
}

enum class Gauge { Canonical, Chart };

// embedding composed with the chart around L, in bundle coordinates
struct EmbeddingJets {
  Vec z;                    // F(0)
  Mat dF;                   // 2m x 2n
  std::vector<Mat> ddF;     // ddF[k](a,b)
};

inline EmbeddingJets embedding_jets(const Chart& chart, Gauge gauge, double fibre_scale = 1.0) {
  int n = chart.n(), m = n + 1, d = 2 * n;
  auto F = [&](auto u) {
    using T = typename decltype(u)::Scalar;
    auto [x, y] = chart.template section<T>(u);
    if (gauge == Gauge::Canonical) std::tie(x, y) = canonical_section<T>(x, y);
    VecT<T> z(2 * m);
    z.head(m) = x.tail(m);
    z.tail(m) = T(-fibre_scale) * y.tail(m);
    return z;
  };
  EmbeddingJets J;
  Vec u0 = Vec::Zero(d);
  J.z = F(u0);
  J.dF.resize(2 * m, d);
  J.ddF.assign(2 * m, Mat::Zero(d, d));
  for (int a = 0; a < d; ++a) {
    VecT<Dual<double>> ua = seed(u0, a);
    J.dF.col(a) = tangents(F(ua));
    for (int b = a; b < d; ++b) {
      auto r = F(seed(ua, b));
      for (int k = 0; k < 2 * m; ++k) J.ddF[k](a, b) = J.ddF[k](b, a) = r(k).d.d;
    }
  }
  return J;
}

struct EmbeddingSecondForm {
  EmbeddingJets jets;
  Mat induced;                       // dF^T Gbar dF in chart coordinates
  std::vector<std::vector<Vec>> normal;   // normal[a][b]: coordinate vector in the bundle
  Vec H;                             // coordinate mean curvature vector
  BundleTangent H_pk;
};

inline EmbeddingSecondForm embedding_second_form(const Chart& chart, Gauge gauge, double fibre_scale = 1.0) {
  if (chart.c() != -1) throw Error("embedding_second_form: only defined for c = -1");
  EmbeddingSecondForm S;
  S.jets = embedding_jets(chart, gauge, fibre_scale);
  const auto& J = S.jets;
  int D = int(J.z.size()), d = int(J.dF.cols());
  Mat Gb = bundle::metric<double>(J.z);
  Christoffel Gam = bundle::christoffel(J.z);
  S.induced = J.dF.transpose() * Gb * J.dF;
  Eigen::FullPivLU<Mat> lu(S.induced);
  if (lu.rank() < d) throw Error("embedding_second_form: degenerate induced metric");
  Mat ginv = S.induced.inverse();
  S.normal.assign(d, std::vector<Vec>(d));
  S.H = Vec::Zero(D);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Vec acc(D);
      Vec va = J.dF.col(a), vb = J.dF.col(b);
      for (int k = 0; k < D; ++k) acc(k) = J.ddF[k](a, b) + va.dot(Gam[k] * vb);
      Vec alpha = lu.solve(Vec(J.dF.transpose() * Gb * acc));
      S.normal[a][b] = acc - J.dF * alpha;
      S.H += ginv(a, b) * S.normal[a][b];
    }
  S.H_pk = bundle::to_bundle_tangent(J.z, S.H);
  return S;
}

inline double norm(const BundleTangent& b) { return std::sqrt(b.P.squaredNorm() + b.Kv.squaredNorm()); }

// df(X,Y) on the canonical representative
inline BundleTangent df(const GeodesicTangent& T) {
  OrientedGeodesic C = canonical_rep(T.base);
  GeodesicTangent t = rebase(T, C);
  return {-t.Y, -t.X};
}

// df through the chart and the exact embedding jets
inline BundleTangent df_numeric(const GeodesicTangent& T) {
  OrientedGeodesic C = canonical_rep(T.base);
  Chart chart(C);
  EmbeddingJets J = embedding_jets(chart, Gauge::Canonical);
  Vec w = chart.coords_at_base(T);
  return bundle::to_bundle_tangent(J.z, J.dF * w);
}

// closed-form second fundamental form (0, s (g(X1,X2) + g(Y1,Y2)) y); s = -1 matches the computed second form
inline BundleTangent second_form_closed(const GeodesicTangent& T1, const GeodesicTangent& T2, double sign = -1.0) {
  OrientedGeodesic C = canonical_rep(T1.base);
  GeodesicTangent a = rebase(T1, C), b = rebase(T2, C);
  double coef = inner(a.X, b.X, -1) + inner(a.Y, b.Y, -1);
  return {Vec::Zero(C.dim()), sign * coef * C.y};
}

inline BundleTangent second_form_f(const GeodesicTangent& T1, const GeodesicTangent& T2, Gauge gauge = Gauge::Canonical) {
  OrientedGeodesic C = canonical_rep(T1.base);
  Chart chart(C);
  EmbeddingSecondForm S = embedding_second_form(chart, gauge);
  Vec a = chart.coords_at_base(T1), b = chart.coords_at_base(T2);
  Vec V = Vec::Zero(S.jets.z.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j) V += a(i) * b(j) * S.normal[i][j];
  return bundle::to_bundle_tangent(S.jets.z, V);
}

inline BundleTangent mean_curvature_f(const OrientedGeodesic& L, Gauge gauge = Gauge::Canonical,
                                      double fibre_scale = 1.0) {
  Chart chart(canonical_rep(L));
  return embedding_second_form(chart, gauge, fibre_scale).H_pk;
}

}  // namespace geoline
