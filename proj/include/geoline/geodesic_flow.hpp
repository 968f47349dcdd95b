#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include <memory>

#include <Eigen/Dense>

#include "curvature.hpp"

namespace geoline {

struct CurveSample {
  double t = 0;
  OrientedGeodesic L;
  GeodesicTangent T;
  Vec x, xdot, y, ydot;
  double energy = 0;  // G(gamma', gamma')
};

struct GeodesicCurve {
  std::vector<CurveSample> samples;
  double dt = 0;
  int recenterings = 0;
  int rejected_steps = 0;
  double max_energy_drift = 0;  // |E(t) - E(0)| over samples
  double max_constraint = 0;
};

struct FlowOptions {
  double chart_radius = 0.1;
  double recenter_fraction = 0.5;
  double christoffel_h = 1e-4;
  MetricKind kind = MetricKind::Ge;
  double max_step_drift = 1e-8;
  int max_halvings = 8;
  // constant extra acceleration in chart coordinates (non-geodesic controls)
  std::optional<Vec> forcing;
};

namespace detail {

// in-plane rotation/boost of the representative by angle th
inline std::pair<Vec, Vec> rotate_rep(const Vec& x, const Vec& y, double th, int c) {
  double cc = cos_c(th, c), ss = sin_c(th, c);
  return {x * cc + y * ss, -double(c) * x * ss + y * cc};
}

struct ChartState {
  Vec u, w;
  double theta = 0;
};

struct FlowFrame {
  OrientedGeodesic L;   // rotated representative
  GeodesicTangent T;    // tangent against L
  Vec xdot, ydot;
  double energy;
};

class Stepper {
 public:
  Stepper(const Chart& chart, const FlowOptions& opt) : chart_(chart), opt_(opt) {}

  // derivative of (u, w, theta)
  void rhs(const ChartState& s, Vec& du, Vec& dw, double& dth) const {
    int m = int(s.u.size());
    int c = chart_.c();
    Christoffel G = christoffel(chart_, s.u, opt_.kind, opt_.christoffel_h);
    du = s.w;
    dw = Vec::Zero(m);
    for (int k = 0; k < m; ++k) dw(k) = -s.w.dot(G[k] * s.w);
    if (opt_.forcing) dw += *opt_.forcing;
    auto [x, y] = chart_.section<Dual<double>>(seed_direction(s.u, Vec(s.w)));
    dth = -double(c) * inner(Vec(tangents(x)), Vec(values(y)), c);
  }

  ChartState step(const ChartState& s, double h) const {
    auto add = [](const ChartState& a, const Vec& du, const Vec& dw, double dth, double f) {
      return ChartState{a.u + f * du, a.w + f * dw, a.theta + f * dth};
    };
    Vec u1, w1, u2, w2, u3, w3, u4, w4;
    double t1, t2, t3, t4;
    rhs(s, u1, w1, t1);
    rhs(add(s, u1, w1, t1, h / 2), u2, w2, t2);
    rhs(add(s, u2, w2, t2, h / 2), u3, w3, t3);
    rhs(add(s, u3, w3, t3, h), u4, w4, t4);
    return {s.u + h / 6 * (u1 + 2 * u2 + 2 * u3 + u4), s.w + h / 6 * (w1 + 2 * w2 + 2 * w3 + w4),
            s.theta + h / 6 * (t1 + 2 * t2 + 2 * t3 + t4)};
  }

  FlowFrame frame(const ChartState& s) const {
    int c = chart_.c();
    auto [xd, yd] = chart_.section<Dual<double>>(seed_direction(s.u, Vec(s.w)));
    Vec x = values(xd), y = values(yd), dx = tangents(xd), dy = tangents(yd);
    double dth = -double(c) * inner(dx, y, c);
    auto [xr, yr] = rotate_rep(x, y, s.theta, c);
    auto [dxr, dyr] = rotate_rep(dx, dy, s.theta, c);
    dxr += dth * yr;
    dyr -= double(c) * dth * xr;
    OrientedGeodesic L = make_geodesic(xr, yr, c);
    GeodesicTangent T{L, perp(dyr, L.x, L.y, c), Vec(-perp(dxr, L.x, L.y, c))};
    return {L, T, dxr, dyr, metric_G(T, T)};
  }

  const Chart& chart() const { return chart_; }

 private:
  const Chart& chart_;
  const FlowOptions& opt_;
};

}  // namespace detail

inline GeodesicCurve integrate_geodesic(const GeodesicTangent& T0, double t_end, double dt,
                                        const FlowOptions& opt = {}) {
  if (dt <= 0 || dt > 1e-2 + 1e-15) throw Error("integrate_geodesic: dt must be in (0, 1e-2]");
  if (t_end < 0) throw Error("integrate_geodesic: t_end must be >= 0");
  int m = 2 * T0.base.n();
  GeodesicCurve curve;
  curve.dt = dt;

  auto chart = std::make_unique<Chart>(T0.base, opt.chart_radius);
  detail::ChartState s{Vec::Zero(m), chart->coords_at_base(T0), 0.0};
  auto record = [&](double t, const detail::FlowFrame& f) {
    CurveSample cs;
    cs.t = t;
    cs.L = f.L;
    cs.T = f.T;
    cs.x = f.L.x;
    cs.y = f.L.y;
    cs.xdot = f.xdot;
    cs.ydot = f.ydot;
    cs.energy = f.energy;
    curve.max_constraint = std::max(curve.max_constraint, constraint_residual(f.L.x, f.L.y, f.L.c));
    curve.samples.push_back(std::move(cs));
  };

  detail::FlowFrame f0 = detail::Stepper(*chart, opt).frame(s);
  record(0.0, f0);
  double E0 = f0.energy;
  int nsteps = int(std::llround(t_end / dt));
  for (int k = 1; k <= nsteps; ++k) {
    // advance one output step, subdividing when the per-step energy drift is too large
    double remaining = dt;
    int sub = 1, halvings = 0;
    while (remaining > 0) {
      detail::Stepper st(*chart, opt);
      double h = dt / sub;
      double e_before = st.frame(s).energy;
      detail::ChartState trial = st.step(s, h);
      double e_after = st.frame(trial).energy;
      if (std::abs(e_after - e_before) > opt.max_step_drift && !opt.forcing) {
        if (++halvings > opt.max_halvings) throw Error("integrate_geodesic: energy drift per step too large");
        ++curve.rejected_steps;
        sub *= 2;
        continue;
      }
      s = trial;
      remaining -= h;
      if (remaining < 1e-15) remaining = 0;
      if (s.u.norm() > opt.recenter_fraction * chart->radius()) {
        detail::FlowFrame f = st.frame(s);
        auto next = std::make_unique<Chart>(f.L, opt.chart_radius);
        detail::ChartState ns{Vec::Zero(m), next->coords_at_base(f.T), 0.0};
        chart = std::move(next);
        s = ns;
        ++curve.recenterings;
      }
    }
    detail::FlowFrame f = detail::Stepper(*chart, opt).frame(s);
    record(k * dt, f);
    curve.max_energy_drift = std::max(curve.max_energy_drift, std::abs(f.energy - E0));
  }
  return curve;
}

inline double orthogonality_residual(const GeodesicCurve& curve) {
  double r = 0;
  for (const auto& s : curve.samples) r = std::max(r, std::abs(inner(s.xdot, s.y, s.L.c)));
  return r;
}

// 5-point (4th order) first and second derivatives over uniform samples; one-sided near the ends
template <class F>
auto sample_derivatives(F&& value, int k, int count, double dt) {
  using V = decltype(value(0));
  V d1, d2;
  if (k >= 2 && k + 2 < count) {
    d1 = (value(k - 2) - 8.0 * value(k - 1) + 8.0 * value(k + 1) - value(k + 2)) / (12.0 * dt);
    d2 = (-value(k - 2) + 16.0 * value(k - 1) - 30.0 * value(k) + 16.0 * value(k + 1) - value(k + 2)) /
         (12.0 * dt * dt);
  } else if (k < 2) {
    d1 = (-25.0 * value(k) + 48.0 * value(k + 1) - 36.0 * value(k + 2) + 16.0 * value(k + 3) -
          3.0 * value(k + 4)) / (12.0 * dt);
    d2 = (35.0 * value(k) - 104.0 * value(k + 1) + 114.0 * value(k + 2) - 56.0 * value(k + 3) +
          11.0 * value(k + 4)) / (12.0 * dt * dt);
  } else {
    d1 = (25.0 * value(k) - 48.0 * value(k - 1) + 36.0 * value(k - 2) - 16.0 * value(k - 3) +
          3.0 * value(k - 4)) / (12.0 * dt);
    d2 = (35.0 * value(k) - 104.0 * value(k - 1) + 114.0 * value(k - 2) - 56.0 * value(k - 3) +
          11.0 * value(k - 4)) / (12.0 * dt * dt);
  }
  return std::pair<V, V>{d1, d2};
}

// tangential part of the second derivative of x^y along the curve (G_e connection)
inline double geodesic_equation_residual(const GeodesicCurve& curve) {
  int S = int(curve.samples.size());
  if (S < 5) throw Error("geodesic_equation_residual: need at least 5 samples");
  double r = 0;
  // central stencils only; the one-sided second derivative is an order worse
  for (int k = 2; k + 2 < S; ++k) {
    auto B = [&](int i) -> Mat {
      const auto& s = curve.samples[i];
      return s.x * s.y.transpose() - s.y * s.x.transpose();
    };
    auto [d1, d2] = sample_derivatives(B, k, S, curve.dt);
    GeodesicTangent a = tangent_from_matrix(curve.samples[k].L, d2);
    r = std::max(r, std::sqrt(a.X.squaredNorm() + a.Y.squaredNorm()));
  }
  return r;
}

struct RuledSurfacePoint {
  double t = 0, theta = 0;
  Vec X, N;
  Mat first = Mat::Zero(2, 2);   // t_ij, order (t, theta)
  Mat second = Mat::Zero(2, 2);  // h_ij = -<X_i, N_j> (n = 2)
  Mat second_alt = Mat::Zero(2, 2);  // <X_ij, N>
  double H = 0;                  // n = 2: 1/2 t^ij h_ij; n > 2: norm of the mean curvature vector
  double normal_residual = 0;
  bool flag = false;
};

struct RuledSurface {
  int n = 0, c = 0;
  std::vector<RuledSurfacePoint> points;
  int degenerate_count = 0;
  double max_form_disagreement = 0;  // |h - h_alt|
};

inline std::vector<double> default_theta_grid(int c, int count) {
  std::vector<double> th(count);
  for (int j = 0; j < count; ++j)
    th[j] = c > 0 ? M_PI * j / count : -1.0 + 2.0 * j / (count - 1);
  return th;
}

namespace detail {

// vectors orthogonal to span(rows) under <,>_c, normalized to <v,v> = c
inline std::vector<Vec> normal_space(const std::vector<Vec>& span, int c) {
  int d = int(span[0].size());
  int k = int(span.size());
  Mat S(d, k);
  for (int j = 0; j < k; ++j) S.col(j) = span[j];
  Vec e = eta(d, c);
  Mat Gs = S.transpose() * e.asDiagonal() * S;
  Eigen::FullPivLU<Mat> lu(Gs);
  std::vector<Vec> out;
  std::vector<bool> used(d, false);
  while (int(out.size()) < d - k) {
    int best = -1;
    double bv = 0;
    Vec bvec;
    for (int a = 0; a < d; ++a) {
      if (used[a]) continue;
      Vec v = Vec::Unit(d, a);
      Vec coef = lu.solve(Vec(S.transpose() * e.asDiagonal() * v));
      v -= S * coef;
      for (const Vec& q : out) v -= inner(v, q, c) / double(c) * q;
      double s = std::abs(inner(v, v, c));
      if (s > bv) {
        bv = s;
        best = a;
        bvec = v;
      }
    }
    if (best < 0 || bv < 1e-14) break;
    used[best] = true;
    out.push_back(bvec / std::sqrt(std::abs(inner(bvec, bvec, c))));
  }
  return out;
}

// cofactor normal of three vectors in R^4, normalized to <N,N> = c
inline Vec cofactor_normal(const Vec& a, const Vec& b, const Vec& cvec, int c) {
  Mat M(3, 4);
  Vec e = eta(4, c);
  M.row(0) = a.cwiseProduct(e).transpose();
  M.row(1) = b.cwiseProduct(e).transpose();
  M.row(2) = cvec.cwiseProduct(e).transpose();
  Vec N(4);
  for (int k = 0; k < 4; ++k) {
    Mat minor(3, 3);
    int col = 0;
    for (int j = 0; j < 4; ++j) {
      if (j == k) continue;
      minor.col(col++) = M.col(j);
    }
    N(k) = ((k % 2) ? -1.0 : 1.0) * minor.determinant();
  }
  double s = inner(N, N, c) / double(c);
  if (s <= 0) return Vec::Zero(4);
  return N / std::sqrt(s);
}

}  // namespace detail

inline RuledSurface ruled_surface(const GeodesicCurve& curve, const std::vector<double>& theta_grid, int t_count) {
  int S = int(curve.samples.size());
  if (S < 9) throw Error("ruled_surface: need at least 9 curve samples");
  const int c = curve.samples[0].L.c;
  const int n = curve.samples[0].L.n();
  const double dt = curve.dt;
  RuledSurface rs;
  rs.n = n;
  rs.c = c;
  // interior sample indices so that the centered 5-point stencils apply (normal t-derivative needs +-2 more)
  int lo = 4, hi = S - 5;
  if (t_count > hi - lo + 1) t_count = hi - lo + 1;
  std::vector<int> ks(t_count);
  for (int i = 0; i < t_count; ++i)
    ks[i] = t_count == 1 ? lo : lo + int(std::llround(double(i) * (hi - lo) / (t_count - 1)));

  auto xs = [&](int i) -> Vec { return curve.samples[i].x; };
  auto ys = [&](int i) -> Vec { return curve.samples[i].y; };

  auto frame_at = [&](int k, double th) {
    double cc = cos_c(th, c), ss = sin_c(th, c);
    auto [xt, xtt] = sample_derivatives(xs, k, S, dt);
    auto [yt, ytt] = sample_derivatives(ys, k, S, dt);
    const Vec& x = curve.samples[k].x;
    const Vec& y = curve.samples[k].y;
    struct F {
      Vec X, Xt, Xth, Xtt, Xtth, Xthth;
    } f;
    f.X = x * cc + y * ss;
    f.Xt = xt * cc + yt * ss;
    f.Xth = -double(c) * x * ss + y * cc;
    f.Xtt = xtt * cc + ytt * ss;
    f.Xtth = -double(c) * xt * ss + yt * cc;
    f.Xthth = -double(c) * f.X;
    return f;
  };

  for (int k : ks) {
    for (double th : theta_grid) {
      RuledSurfacePoint p;
      p.t = curve.samples[k].t;
      p.theta = th;
      auto f = frame_at(k, th);
      p.X = f.X;
      std::array<Vec, 2> D = {f.Xt, f.Xth};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) p.first(i, j) = inner(D[i], D[j], c);
      double det = p.first.determinant();
      if (std::abs(det) < 1e-10) {
        p.flag = true;
        ++rs.degenerate_count;
        rs.points.push_back(std::move(p));
        continue;
      }
      Mat tinv = p.first.inverse();
      std::array<std::array<Vec, 2>, 2> DD = {{{f.Xtt, f.Xtth}, {f.Xtth, f.Xthth}}};
      if (n == 2) {
        auto normal_at = [&](int kk, double tth) {
          auto g = frame_at(kk, tth);
          return detail::cofactor_normal(g.X, g.Xt, g.Xth, c);
        };
        p.N = normal_at(k, th);
        // orientation is continuous in (t, theta) for the cofactor formula
        auto Nt = sample_derivatives([&](int i) -> Vec { return normal_at(i, th); }, k, S, dt).first;
        const double dth = 1e-3;
        Vec Nth = (normal_at(k, th - 2 * dth) - 8.0 * normal_at(k, th - dth) + 8.0 * normal_at(k, th + dth) -
                   normal_at(k, th + 2 * dth)) / (12.0 * dth);
        std::array<Vec, 2> dN = {Nt, Nth};
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            p.second(i, j) = -inner(D[i], dN[j], c);
            p.second_alt(i, j) = inner(DD[i][j], p.N, c);
          }
        rs.max_form_disagreement = std::max(rs.max_form_disagreement, (p.second - p.second_alt).cwiseAbs().maxCoeff());
        p.H = 0.5 * (tinv.cwiseProduct(p.second)).sum();
        p.normal_residual = std::max({std::abs(inner(p.N, f.X, c)), std::abs(inner(p.N, f.Xt, c)),
                                      std::abs(inner(p.N, f.Xth, c)), std::abs(inner(p.N, p.N, c) - c)});
      } else {
        auto nus = detail::normal_space({f.X, f.Xt, f.Xth}, c);
        double h2 = 0;
        for (const Vec& nu : nus) {
          Mat h(2, 2);
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) h(i, j) = inner(DD[i][j], nu, c);
          double Hn = 0.5 * (tinv.cwiseProduct(h)).sum();
          h2 += Hn * Hn;
        }
        p.H = std::sqrt(h2);
        if (!nus.empty()) p.N = nus[0];
      }
      rs.points.push_back(std::move(p));
    }
  }
  return rs;
}

inline double minimality_residual(const RuledSurface& rs) {
  double r = 0;
  for (const auto& p : rs.points)
    if (!p.flag) r = std::max(r, std::abs(p.H));
  return r;
}

inline double minimality_residual(const GeodesicCurve& curve, int t_count = 50, int theta_count = 20) {
  int c = curve.samples.at(0).L.c;
  return minimality_residual(ruled_surface(curve, default_theta_grid(c, theta_count), t_count));
}

}  // namespace geoline
