#pragma once

#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "geodesic_space.hpp"

namespace geoline {

enum class MetricKind { G, Ge };

inline const char* kind_name(MetricKind k) { return k == MetricKind::G ? "G" : "G_e"; }

class Chart {
 public:
  explicit Chart(const OrientedGeodesic& base, double radius = 0.1)
      : Chart(base, complement_frame(base.x, base.y, base.c), radius) {}

  Chart(const OrientedGeodesic& base, std::vector<Vec> frame, double radius = 0.1)
      : base_(base), frame_(std::move(frame)), radius_(radius) {
    if (int(frame_.size()) != base.n()) throw Error("Chart: frame size must equal n");
  }

  const OrientedGeodesic& base() const { return base_; }
  const std::vector<Vec>& frame() const { return frame_; }
  double radius() const { return radius_; }
  int n() const { return base_.n(); }
  int c() const { return base_.c; }

  // normalize(x + sum u_i e_i), orthonormalize(y + sum u_{n+i} e_i)
  template <class T>
  std::pair<VecT<T>, VecT<T>> section(const VecT<T>& u) const {
    int n = this->n(), c = this->c();
    VecT<T> x = lift<T>(Vec(base_.x));
    VecT<T> y = lift<T>(Vec(base_.y));
    for (int i = 0; i < n; ++i) {
      VecT<T> e = lift<T>(Vec(frame_[i]));
      x += u(i) * e;
      y += u(n + i) * e;
    }
    using std::sqrt;
    x /= sqrt(inner(x, x, c));
    y -= inner(y, x, c) * x;
    y /= sqrt(inner(y, y, c) / double(c));
    return {x, y};
  }

  OrientedGeodesic map(const Vec& u) const {
    auto [x, y] = section<double>(u);
    return make_geodesic(x, y, c());
  }

  // images of the coordinate vectors d/du^a at u
  std::vector<GeodesicTangent> differential(const Vec& u) const {
    int m = 2 * n(), c = this->c();
    OrientedGeodesic L = map(u);
    std::vector<GeodesicTangent> T;
    T.reserve(m);
    for (int a = 0; a < m; ++a) {
      auto [x, y] = section<Dual<double>>(seed(u, a));
      Vec dx = tangents(x), dy = tangents(y);
      T.push_back({L, perp(dy, L.x, L.y, c), Vec(-perp(dx, L.x, L.y, c))});
    }
    return T;
  }

  Mat metric(const Vec& u, MetricKind kind) const {
    auto T = differential(u);
    return kind == MetricKind::G ? gram(T, metric_G) : gram(T, metric_Ge);
  }

  // chart velocity w at u=0 for a tangent at the base
  Vec coords_at_base(const GeodesicTangent& t) const {
    GeodesicTangent s = rebase(t, base_);
    int n = this->n(), c = this->c();
    Vec w(2 * n);
    for (int i = 0; i < n; ++i) {
      w(i) = -inner(s.Y, frame_[i], c) / double(c);
      w(n + i) = inner(s.X, frame_[i], c) / double(c);
    }
    return w;
  }

 private:
  OrientedGeodesic base_;
  std::vector<Vec> frame_;
  double radius_;
};

// fully indexed 4-tensor with dimension m per slot
struct Tensor4 {
  int m = 0;
  std::vector<double> a;
  Tensor4() = default;
  explicit Tensor4(int m_) : m(m_), a(std::size_t(m_) * m_ * m_ * m_, 0.0) {}
  double& operator()(int i, int j, int k, int l) { return a[((std::size_t(i) * m + j) * m + k) * m + l]; }
  double operator()(int i, int j, int k, int l) const { return a[((std::size_t(i) * m + j) * m + k) * m + l]; }
  double max_abs() const {
    double r = 0;
    for (double v : a) r = std::max(r, std::abs(v));
    return r;
  }
};

using Christoffel = std::vector<Mat>;  // gamma[k](i,j)

struct RiemannData {
  Mat g;
  Christoffel gamma;
  Tensor4 up;  // R^a_{bcd}: component a of R(d_c,d_d) d_b
  Tensor4 rm;  // Rm(X,Y,Z,W) = g(R(X,Y)Z, W), stored in slot order X,Y,Z,W
  Mat ricci;   // Ric_{bd} = R^a_{bad}
};

// metric samples on a lattice u + h*k, k integer
class MetricLattice {
 public:
  MetricLattice(const Chart& chart, Vec u, MetricKind kind, double h)
      : chart_(chart), u_(std::move(u)), kind_(kind), h_(h), m_(2 * chart.n()) {}

  const Mat& at(const std::vector<int>& k) {
    auto it = cache_.find(k);
    if (it != cache_.end()) return it->second;
    Vec p = u_;
    for (int i = 0; i < m_; ++i) p(i) += h_ * k[i];
    return cache_.emplace(k, chart_.metric(p, kind_)).first->second;
  }

  Christoffel christoffel(const std::vector<int>& k) {
    const Mat g = at(k);
    std::vector<Mat> dg(m_);
    for (int l = 0; l < m_; ++l) {
      auto kp = k, km = k;
      kp[l] += 1;
      km[l] -= 1;
      dg[l] = (at(kp) - at(km)) / (2.0 * h_);
    }
    Eigen::FullPivLU<Mat> lu(g);
    if (!lu.isInvertible()) throw Error("christoffel: singular pulled-back Gram matrix");
    Mat ginv = lu.inverse();
    Christoffel G(m_, Mat::Zero(m_, m_));
    for (int i = 0; i < m_; ++i)
      for (int j = i; j < m_; ++j) {
        Vec s(m_);
        for (int l = 0; l < m_; ++l) s(l) = dg[i](j, l) + dg[j](i, l) - dg[l](i, j);
        Vec r = 0.5 * ginv * s;
        for (int kk = 0; kk < m_; ++kk) {
          G[kk](i, j) = r(kk);
          G[kk](j, i) = r(kk);
        }
      }
    return G;
  }

  int dim() const { return m_; }

 private:
  const Chart& chart_;
  Vec u_;
  MetricKind kind_;
  double h_;
  int m_;
  std::map<std::vector<int>, Mat> cache_;
};

inline Christoffel christoffel(const Chart& chart, const Vec& u, MetricKind kind, double h = 1e-3) {
  MetricLattice lat(chart, u, kind, h);
  return lat.christoffel(std::vector<int>(lat.dim(), 0));
}

inline RiemannData riemann(const Chart& chart, const Vec& u, MetricKind kind, double h = 1e-3) {
  MetricLattice lat(chart, u, kind, h);
  int m = lat.dim();
  std::vector<int> zero(m, 0);
  RiemannData R;
  R.g = lat.at(zero);
  R.gamma = lat.christoffel(zero);
  std::vector<Christoffel> dG(m);
  for (int c = 0; c < m; ++c) {
    auto kp = zero, km = zero;
    kp[c] = 1;
    km[c] = -1;
    Christoffel gp = lat.christoffel(kp), gm = lat.christoffel(km);
    dG[c].resize(m);
    for (int a = 0; a < m; ++a) dG[c][a] = (gp[a] - gm[a]) / (2.0 * h);
  }
  const Christoffel& G = R.gamma;
  R.up = Tensor4(m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) {
          double v = dG[c][a](d, b) - dG[d][a](c, b);
          for (int e = 0; e < m; ++e) v += G[a](c, e) * G[e](d, b) - G[a](d, e) * G[e](c, b);
          R.up(a, b, c, d) = v;
        }
  R.rm = Tensor4(m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      for (int z = 0; z < m; ++z)
        for (int w = 0; w < m; ++w) {
          double v = 0;
          for (int a = 0; a < m; ++a) v += R.g(w, a) * R.up(a, z, x, y);
          R.rm(x, y, z, w) = v;
        }
  R.ricci = Mat::Zero(m, m);
  for (int b = 0; b < m; ++b)
    for (int d = 0; d < m; ++d)
      for (int a = 0; a < m; ++a) R.ricci(b, d) += R.up(a, b, a, d);
  return R;
}

// (h o k)(X,Y,Z,W) = h(X,W)k(Y,Z) + h(Y,Z)k(X,W) - h(X,Z)k(Y,W) - h(Y,W)k(X,Z)
inline Tensor4 kulkarni_nomizu(const Mat& h, const Mat& k) {
  int m = int(h.rows());
  Tensor4 t(m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      for (int z = 0; z < m; ++z)
        for (int w = 0; w < m; ++w)
          t(x, y, z, w) = h(x, w) * k(y, z) + h(y, z) * k(x, w) - h(x, z) * k(y, w) - h(y, w) * k(x, z);
  return t;
}

inline Tensor4 transform4(const Tensor4& t, const Mat& D) {
  int m = t.m;
  // contract one slot at a time
  Tensor4 a = t, b(m);
  for (int slot = 0; slot < 4; ++slot) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            double v = 0;
            for (int p = 0; p < m; ++p) {
              int idx[4] = {i, j, k, l};
              int q = idx[slot];
              idx[slot] = p;
              v += a(idx[0], idx[1], idx[2], idx[3]) * D(p, q);
            }
            b(i, j, k, l) = v;
          }
    std::swap(a, b);
  }
  return a;
}

inline double scalar_curvature(const Mat& g, const Mat& ricci) { return (g.inverse() * ricci).trace(); }

struct WeylSample {
  std::array<int, 4> idx;
  double value;
};

struct KindCurvature {
  Mat g;       // Gram in frame basis
  Mat ricci;   // frame basis
  double scalar = 0;
  Tensor4 rm;  // frame basis
};

struct CurvatureReport {
  int n = 0, c = 0;
  KindCurvature G, Ge;
  Mat Ge_gram;
  double ricci_max_err = 0;       // max |Ric(G) - c n G_e|
  double ricci_Ge_max_err = 0;    // max |Ric(G_e) - c n G_e|
  double scalar_Ge_err = 0;       // |S(G_e) - 2 c n^2|
  double ric_E1E1 = 0, G_E1E1 = 0;
  double weyl_sup = 0;            // full formula, kind G
  double weyl_sample = 0;         // W(E1,E2,E2,E_{n+1})
  double weyl_sample_expected = 0;
  double weyl_reduced_vs_full = 0;
  double weyl_Ge_sup = 0;
  double christoffel_G_vs_Ge = 0;   // at u = 0, chart components
  double riemann_G_vs_Ge = 0;       // (1,3) components
  double antisymmetry = 0;
  double bianchi = 0;
  double step_halving = 0;          // max change of Gamma(G) when h -> h/2
  double scalar_trace_check = 0;
  std::vector<WeylSample> weyl_nonzero;
};

// Weyl with the full formula: Rm - P o g, P = (Ric - S/(2(m-1)) g)/(m-2)
inline Tensor4 weyl_full(const Tensor4& rm, const Mat& g, const Mat& ricci) {
  int m = int(g.rows());
  double S = scalar_curvature(g, ricci);
  Mat P = (ricci - S / (2.0 * (m - 1)) * g) / double(m - 2);
  Tensor4 kn = kulkarni_nomizu(P, g), w(m);
  for (std::size_t i = 0; i < w.a.size(); ++i) w.a[i] = rm.a[i] - kn.a[i];
  return w;
}

inline Tensor4 weyl_reduced(const Tensor4& rm, const Mat& g, const Mat& ricci) {
  int m = int(g.rows());
  Tensor4 kn = kulkarni_nomizu(ricci, g), w(m);
  for (std::size_t i = 0; i < w.a.size(); ++i) w.a[i] = rm.a[i] - kn.a[i] / double(m - 2);
  return w;
}

struct CurvatureOptions {
  double h = 1e-3;
  double weyl_threshold = 1e-6;
  bool step_halving = true;
};

// target: frame in which the report is expressed (defaults to the chart frame)
inline CurvatureReport curvature_report(const Chart& chart, const std::vector<Vec>& target,
                                        const CurvatureOptions& opt = {}) {
  const OrientedGeodesic& L = chart.base();
  int n = L.n(), c = L.c, m = 2 * n;
  if (n < 2) throw Error("curvature_report: need n >= 2");
  Vec u0 = Vec::Zero(m);
  auto T = chart.differential(u0);
  Mat C(m, m);
  for (int a = 0; a < m; ++a) C.col(a) = frame_coords(T[a], target);
  Mat D = C.inverse();  // E_p = sum_a D(a,p) d_a

  CurvatureReport rep;
  rep.n = n;
  rep.c = c;
  RiemannData rg = riemann(chart, u0, MetricKind::G, opt.h);
  RiemannData re = riemann(chart, u0, MetricKind::Ge, opt.h);

  auto to_frame = [&](const RiemannData& r) {
    KindCurvature k;
    k.g = D.transpose() * r.g * D;
    k.ricci = D.transpose() * r.ricci * D;
    k.scalar = scalar_curvature(r.g, r.ricci);
    k.rm = transform4(r.rm, D);
    return k;
  };
  rep.G = to_frame(rg);
  rep.Ge = to_frame(re);
  rep.Ge_gram = rep.Ge.g;

  Mat target_Ge = double(c * n) * rep.Ge.g;
  rep.ricci_max_err = (rep.G.ricci - target_Ge).cwiseAbs().maxCoeff();
  rep.ricci_Ge_max_err = (rep.Ge.ricci - target_Ge).cwiseAbs().maxCoeff();
  rep.scalar_Ge_err = std::abs(rep.Ge.scalar - 2.0 * c * n * n);
  rep.ric_E1E1 = rep.G.ricci(0, 0);
  rep.G_E1E1 = rep.G.g(0, 0);
  rep.scalar_trace_check = std::abs(rep.G.scalar - scalar_curvature(rep.G.g, rep.G.ricci));

  Tensor4 wf = weyl_full(rep.G.rm, rep.G.g, rep.G.ricci);
  Tensor4 wr = weyl_reduced(rep.G.rm, rep.G.g, rep.G.ricci);
  rep.weyl_sup = wf.max_abs();
  rep.weyl_sample = wf(0, 1, 1, n);
  rep.weyl_sample_expected = 1.0 - double(n) / (2.0 * n - 2.0);
  double d = 0;
  for (std::size_t i = 0; i < wf.a.size(); ++i) d = std::max(d, std::abs(wf.a[i] - wr.a[i]));
  rep.weyl_reduced_vs_full = d;
  rep.weyl_Ge_sup = weyl_full(rep.Ge.rm, rep.Ge.g, rep.Ge.ricci).max_abs();
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int p = 0; p < m; ++p)
        for (int q = p + 1; q < m; ++q) {
          if (p * m + q < a * m + b) continue;
          double v = wf(a, b, p, q);
          if (std::abs(v) > opt.weyl_threshold) rep.weyl_nonzero.push_back({{a, b, p, q}, v});
        }

  double cd = 0;
  for (int k = 0; k < m; ++k) cd = std::max(cd, (rg.gamma[k] - re.gamma[k]).cwiseAbs().maxCoeff());
  rep.christoffel_G_vs_Ge = cd;
  double rd = 0;
  for (std::size_t i = 0; i < rg.up.a.size(); ++i) rd = std::max(rd, std::abs(rg.up.a[i] - re.up.a[i]));
  rep.riemann_G_vs_Ge = rd;

  double as = 0, bi = 0;
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      for (int z = 0; z < m; ++z)
        for (int w = 0; w < m; ++w) {
          as = std::max(as, std::abs(rg.rm(x, y, z, w) + rg.rm(y, x, z, w)));
          bi = std::max(bi, std::abs(rg.rm(x, y, z, w) + rg.rm(y, z, x, w) + rg.rm(z, x, y, w)));
        }
  rep.antisymmetry = as;
  rep.bianchi = bi;

  if (opt.step_halving) {
    Christoffel g1 = christoffel(chart, u0, MetricKind::G, opt.h);
    Christoffel g2 = christoffel(chart, u0, MetricKind::G, opt.h / 2);
    double sh = 0;
    for (int k = 0; k < m; ++k) sh = std::max(sh, (g1[k] - g2[k]).cwiseAbs().maxCoeff());
    rep.step_halving = sh;
  }
  return rep;
}

inline CurvatureReport curvature_report(const OrientedGeodesic& L, const CurvatureOptions& opt = {}) {
  Chart chart(L);
  return curvature_report(chart, chart.frame(), opt);
}

}  // namespace geoline
