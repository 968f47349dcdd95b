#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "geodesic_space.hpp"

namespace geoline {

// small dynamic sizes live on the stack
template <class T>
using SVec = Eigen::Matrix<T, Eigen::Dynamic, 1, 0, 6, 1>;
template <class T>
using SMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6>;

template <class M>
auto small_det(M a) {
  using T = typename M::Scalar;
  int n = int(a.rows());
  if (n <= 5) return laplace_det(a);
  T det = T(1.0);
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(value_of(a(i, k))) > std::abs(value_of(a(p, k)))) p = i;
    if (value_of(a(p, k)) == 0.0) {
      M rest = a.block(k, k, n - k, n - k);
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

template <class M>
Vec dual_part(const M& m) {
  Vec v(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) v(i) = m(i).d;
  return v;
}
template <class M>
Mat dual_part_mat(const M& m) {
  Mat v(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i, j) = m(i, j).d;
  return v;
}

enum class Catalog { Sphere, Tube, BumpySphere, Graph };

inline const char* catalog_name(Catalog k) {
  switch (k) {
    case Catalog::Sphere: return "sphere";
    case Catalog::Tube: return "tube";
    case Catalog::BumpySphere: return "bumpy_sphere";
    case Catalog::Graph: return "graph";
  }
  return "?";
}

struct Axis {
  double min = 0, max = 1;
  int steps = 16;
};

// scalar bump f(u) moving the patch along its normal: phi_t = normalize(phi + t f N)
struct Bump {
  enum Kind { Harmonic, Fourier } kind = Harmonic;
  // Harmonic: (index into the real l=1..3 basis, coefficient); Fourier: (k, m, a, b) -> a cos(k s + m t) + b sin(k s + m t)
  std::vector<std::array<double, 4>> modes;
  double t = 0;
};

namespace detail {

template <class T>
T real_harmonic(int idx, const T& x, const T& y, const T& z) {
  switch (idx) {
    case 0: return x;
    case 1: return y;
    case 2: return z;
    case 3: return x * y;
    case 4: return x * z;
    case 5: return y * z;
    case 6: return x * x - y * y;
    case 7: return T(3.0) * z * z - T(1.0);
    case 8: return z * (T(5.0) * z * z - T(3.0));
    case 9: return x * (T(5.0) * z * z - T(1.0));
    case 10: return y * (T(5.0) * z * z - T(1.0));
    case 11: return x * y * z;
    case 12: return z * (x * x - y * y);
    case 13: return x * (x * x - T(3.0) * y * y);
    case 14: return y * (T(3.0) * x * x - y * y);
  }
  throw Error("real_harmonic: index out of range");
}

}  // namespace detail

inline constexpr int harmonic_count = 15;

struct HypersurfacePatch {
  Catalog catalog = Catalog::Sphere;
  std::string name;
  int n = 2;
  int c = 1;
  double r = 0.7;
  double eps = 0.0;
  // graph: psi(u) = 1/2 sum kappa_i u_i^2 + tau u_1 u_2 + gamma sum u_i^3
  std::vector<double> kappa;
  double tau = 0, gamma = 0;
  std::vector<Axis> grid;
  std::optional<Bump> bump;
  double orientation = 1.0;
  double rotate_normal = 0.0;  // nonzero only for the non-Gauss control section

  int dim() const { return n + 2; }

  template <class T>
  SVec<T> unit_sphere(const SVec<T>& u) const {
    using std::cos;
    using std::sin;
    // hyperspherical: u = (chi_1..chi_{n-1}, phi)
    SVec<T> s(n + 1);
    T prod = T(1.0);
    for (int i = 0; i < n - 1; ++i) {
      s(n - i) = prod * cos(u(i));
      prod = prod * sin(u(i));
    }
    s(0) = prod * cos(u(n - 1));
    s(1) = prod * sin(u(n - 1));
    return s;
  }

  template <class T>
  SVec<T> base_phi(const SVec<T>& u) const {
    using std::sqrt;
    SVec<T> p(n + 2);
    switch (catalog) {
      case Catalog::Sphere:
      case Catalog::BumpySphere: {
        SVec<T> s = unit_sphere(u);
        T rho = T(r);
        if (catalog == Catalog::BumpySphere) {
          if (n != 2) throw Error("bumpy_sphere: only n = 2");
          rho = T(r) * (T(1.0) + T(eps) * (T(3.0) * s(2) * s(2) - T(1.0) + s(0) * s(1)));
        }
        p(0) = cos_c(rho, c);
        p.tail(n + 1) = sin_c(rho, c) * s;
        return p;
      }
      case Catalog::Tube: {
        if (n != 2) throw Error("tube: only n = 2");
        using std::cos;
        using std::sin;
        T cr = T(cos_c(r, c)), sr = T(sin_c(r, c));
        p(0) = cr * cos_c(u(0), c);
        p(1) = cr * sin_c(u(0), c);
        p(2) = sr * cos(u(1));
        p(3) = sr * sin(u(1));
        return p;
      }
      case Catalog::Graph: {
        T psi = T(0.0);
        for (int i = 0; i < n; ++i) {
          double k = i < int(kappa.size()) ? kappa[i] : 0.0;
          psi = psi + T(0.5 * k) * u(i) * u(i) + T(gamma) * u(i) * u(i) * u(i);
        }
        if (n >= 2) psi = psi + T(tau) * u(0) * u(1);
        p.setZero();
        p(0) = T(1.0);
        for (int i = 0; i < n; ++i) p(i + 1) = u(i);
        p(n + 1) = psi;
        T nn = inner(p, p, c);
        if (value_of(nn) <= 0) throw Error("graph patch: point leaves the space form");
        return p / sqrt(nn);
      }
    }
    throw Error("unknown catalog");
  }

  template <class T>
  SMat<T> jacobian_of_base(const SVec<T>& u) const {
    SMat<T> J(n + 2, n);
    for (int i = 0; i < n; ++i) {
      SVec<Dual<T>> ud(n);
      for (int k = 0; k < n; ++k) ud(k) = Dual<T>(u(k), T(k == i ? 1.0 : 0.0));
      SVec<Dual<T>> pd = base_phi(ud);
      for (int a = 0; a < n + 2; ++a) J(a, i) = pd(a).d;
    }
    return J;
  }

  // unit normal from the cofactor of (p, columns of J), fixed orientation
  template <class T>
  SVec<T> cofactor_normal(const SVec<T>& p, const SMat<T>& J) const {
    int d = n + 2;
    SMat<T> M(n + 1, d);
    for (int a = 0; a < d; ++a) {
      double e = a == 0 ? 1.0 : double(c);
      M(0, a) = p(a) * e;
      for (int i = 0; i < n; ++i) M(i + 1, a) = J(a, i) * e;
    }
    SVec<T> N(d);
    for (int k = 0; k < d; ++k) {
      SMat<T> minor(n + 1, n + 1);
      for (int row = 0; row < n + 1; ++row) {
        int col = 0;
        for (int a = 0; a < d; ++a)
          if (a != k) minor(row, col++) = M(row, a);
      }
      N(k) = T((k % 2) ? -orientation : orientation) * small_det(minor);
    }
    using std::sqrt;
    T s = inner(N, N, c) / double(c);
    if (value_of(s) <= 0) throw Error("patch: degenerate normal (immersion rank drop)");
    return N / sqrt(s);
  }

  template <class T>
  T bump_value(const SVec<T>& u) const {
    T f = T(0.0);
    if (!bump) return f;
    if (bump->kind == Bump::Harmonic) {
      SVec<T> s = unit_sphere(u);
      for (const auto& m : bump->modes) f = f + T(m[1]) * detail::real_harmonic(int(m[0]), s(0), s(1), s(2));
    } else {
      using std::cos;
      using std::sin;
      for (const auto& m : bump->modes) {
        T arg = T(m[0]) * u(0) + T(m[1]) * u(1);
        f = f + T(m[2]) * cos(arg) + T(m[3]) * sin(arg);
      }
    }
    return f;
  }

  template <class T>
  SVec<T> phi(const SVec<T>& u) const {
    SVec<T> p = base_phi(u);
    if (!bump || bump->t == 0.0) return p;
    SVec<T> N = cofactor_normal(p, jacobian_of_base(u));
    SVec<T> q = p + T(bump->t) * bump_value(u) * N;
    using std::sqrt;
    return q / sqrt(inner(q, q, c));
  }

  template <class T>
  SMat<T> jacobian(const SVec<T>& u) const {
    SMat<T> J(n + 2, n);
    for (int i = 0; i < n; ++i) {
      SVec<Dual<T>> ud(n);
      for (int k = 0; k < n; ++k) ud(k) = Dual<T>(u(k), T(k == i ? 1.0 : 0.0));
      SVec<Dual<T>> pd = phi(ud);
      for (int a = 0; a < n + 2; ++a) J(a, i) = pd(a).d;
    }
    return J;
  }

  template <class T>
  SVec<T> normal(const SVec<T>& u) const {
    SVec<T> p = phi(u);
    SMat<T> J = jacobian(u);
    SVec<T> N = cofactor_normal(p, J);
    if (rotate_normal != 0.0) {
      using std::sqrt;
      SVec<T> t1 = J.col(n - 1);  // phi-direction on the sphere; the theta-direction would stay Lagrangian
      t1 = t1 / sqrt(inner(t1, t1, c) / double(c));
      N = std::cos(rotate_normal) * N + std::sin(rotate_normal) * t1;
    }
    return N;
  }

  // grid midpoints
  std::vector<Vec> sample_points(const std::vector<int>& steps) const {
    std::vector<Vec> out;
    std::vector<int> idx(n, 0);
    while (true) {
      Vec u(n);
      for (int a = 0; a < n; ++a) u(a) = grid[a].min + (idx[a] + 0.5) * (grid[a].max - grid[a].min) / steps[a];
      out.push_back(u);
      int a = 0;
      while (a < n && ++idx[a] == steps[a]) idx[a++] = 0;
      if (a == n) break;
    }
    return out;
  }
  std::vector<Vec> sample_points() const {
    std::vector<int> s;
    for (const auto& a : grid) s.push_back(a.steps);
    return sample_points(s);
  }
};

// fix the normal orientation against a reference direction at the grid centre
inline void orient(HypersurfacePatch& P) {
  Vec u(P.n);
  for (int a = 0; a < P.n; ++a) u(a) = 0.5 * (P.grid[a].min + P.grid[a].max);
  P.orientation = 1.0;
  SVec<double> us = u;
  SVec<double> N = P.cofactor_normal(P.base_phi(us), P.jacobian_of_base(us));
  SVec<double> ref(P.dim());
  int c = P.c;
  switch (P.catalog) {
    case Catalog::Sphere:
    case Catalog::BumpySphere: {
      SVec<double> s = P.unit_sphere(us);
      ref(0) = double(c) * sin_c(P.r, c);
      ref.tail(P.n + 1) = -cos_c(P.r, c) * s;
      break;
    }
    case Catalog::Tube: {
      ref << c * sin_c(P.r, c) * cos_c(u(0), c), c * sin_c(P.r, c) * sin_c(u(0), c), -cos_c(P.r, c) * std::cos(u(1)),
          -cos_c(P.r, c) * std::sin(u(1));
      break;
    }
    case Catalog::Graph:
      ref = SVec<double>::Unit(P.dim(), P.n + 1);
      break;
  }
  if (double(c) * inner(N, ref, c) < 0) P.orientation = -1.0;
}

// default catalog entries (n = 2 unless stated)
inline HypersurfacePatch make_sphere(int c, double r = 0.7, int n = 2) {
  HypersurfacePatch P;
  P.catalog = Catalog::Sphere;
  P.name = "sphere";
  P.n = n;
  P.c = check_c(c);
  P.r = r;
  for (int i = 0; i < n - 1; ++i) P.grid.push_back({0.0, M_PI, 64});
  P.grid.push_back({0.0, 2 * M_PI, 16});
  orient(P);
  return P;
}

inline HypersurfacePatch make_bumpy_sphere(int c, double r = 0.7, double eps = 0.05) {
  HypersurfacePatch P = make_sphere(c, r);
  P.catalog = Catalog::BumpySphere;
  P.name = "bumpy_sphere";
  P.eps = eps;
  P.grid[1].steps = 32;
  orient(P);
  return P;
}

inline HypersurfacePatch make_tube(int c, double r = 0.5) {
  HypersurfacePatch P;
  P.catalog = Catalog::Tube;
  P.name = "tube";
  P.n = 2;
  P.c = check_c(c);
  P.r = r;
  if (c > 0)
    P.grid = {{0.0, 2 * M_PI, 16}, {0.0, 2 * M_PI, 16}};
  else
    P.grid = {{-1.0, 1.0, 64}, {0.0, 2 * M_PI, 16}};
  orient(P);
  return P;
}

inline HypersurfacePatch make_graph(int c, int n = 2) {
  HypersurfacePatch P;
  P.catalog = Catalog::Graph;
  P.name = "graph";
  P.n = n;
  P.c = check_c(c);
  P.kappa = {1.0, 0.6, 0.8};
  P.kappa.resize(n, 0.7);
  P.tau = 0.2;
  P.gamma = 0.2;  // keeps the Hessian far from singular on the default grid
  for (int i = 0; i < n; ++i) P.grid.push_back({-0.2, 0.2, 32});
  orient(P);
  return P;
}

// ---------------------------------------------------------------------------------------------
// first and second fundamental forms on generic scalars

template <class T>
struct Forms {
  SMat<T> g, h;
};

template <class T>
Forms<T> fundamental_forms(const HypersurfacePatch& P, const SVec<T>& u) {
  int n = P.n, c = P.c;
  SMat<T> J = P.jacobian(u);
  SMat<T> dN(n + 2, n);
  for (int i = 0; i < n; ++i) {
    SVec<Dual<T>> ud(n);
    for (int k = 0; k < n; ++k) ud(k) = Dual<T>(u(k), T(k == i ? 1.0 : 0.0));
    SVec<Dual<T>> Nd = P.normal(ud);
    for (int a = 0; a < n + 2; ++a) dN(a, i) = Nd(a).d;
  }
  Forms<T> F;
  F.g.resize(n, n);
  F.h.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      F.g(i, j) = inner(SVec<T>(J.col(i)), SVec<T>(J.col(j)), c);
      F.h(i, j) = -inner(SVec<T>(dN.col(i)), SVec<T>(J.col(j)), c);
    }
  return F;
}

template <class T>
T gaussian_curvature(const HypersurfacePatch& P, const SVec<T>& u) {
  Forms<T> F = fundamental_forms(P, u);
  return small_det(F.h) / small_det(F.g);
}

struct PrincipalData {
  Vec u;
  Mat g, h, A;
  Vec k;       // ascending
  Mat E;       // columns e_i with g(e_i,e_j) = c delta_ij
  double K = 0, beta = 0;
  double self_adjoint_residual = 0;
  double det_residual = 0;
  bool flat = false;
};

inline PrincipalData shape_operator(const HypersurfacePatch& P, const Vec& u) {
  PrincipalData D;
  D.u = u;
  SVec<double> us = u;
  Forms<double> F = fundamental_forms(P, us);
  D.g = F.g;
  D.h = F.h;
  if (std::abs(D.g.determinant()) < 1e-14) throw Error("shape_operator: degenerate first fundamental form");
  D.self_adjoint_residual = (D.h - D.h.transpose()).cwiseAbs().maxCoeff();
  Mat hs = 0.5 * (D.h + D.h.transpose());
  D.A = D.g.lu().solve(hs);
  D.K = D.A.determinant();
  // c g is positive definite on spacelike tangents
  double c = P.c;
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(c * hs, c * D.g);
  D.k = es.eigenvalues();
  D.E = es.eigenvectors();
  for (int j = 0; j < D.E.cols(); ++j) {
    double s = D.E.col(j).dot(c * D.g * D.E.col(j));
    D.E.col(j) /= std::sqrt(s);
    for (int a = 0; a < D.E.rows(); ++a)
      if (std::abs(D.E(a, j)) > 1e-12) {
        if (D.E(a, j) < 0) D.E.col(j) *= -1;
        break;
      }
  }
  D.det_residual = std::abs(D.K - D.k.prod());
  D.flat = std::abs(D.K) < 1e-8;
  D.beta = D.flat ? 0.0 : -0.5 * std::log(std::abs(D.K));
  return D;
}

// ---------------------------------------------------------------------------------------------
// Gauss map

struct GaussMapJet {
  Vec u;
  OrientedGeodesic L;
  std::vector<GeodesicTangent> dPhi;
  Mat induced;                     // Phi^* G
  double decomposition_residual = 0;
  double lagrangian = 0;           // max |Omega(dPhi_i, dPhi_j)|
};

inline GaussMapJet gauss_map(const HypersurfacePatch& P, const Vec& u, const Mat* A = nullptr) {
  int n = P.n, c = P.c;
  GaussMapJet G;
  G.u = u;
  SVec<double> us = u;
  Vec p = P.phi(us), N = P.normal(us);
  Mat J = P.jacobian(us);
  Mat dN(n + 2, n);
  for (int i = 0; i < n; ++i) dN.col(i) = dual_part(P.normal(SVec<Dual<double>>(seed(Vec(u), i))));
  G.L = make_geodesic(p, N, c);
  for (int i = 0; i < n; ++i)
    G.dPhi.push_back({G.L, perp(Vec(dN.col(i)), G.L.x, G.L.y, c), Vec(-perp(Vec(J.col(i)), G.L.x, G.L.y, c))});
  G.induced = gram(G.dPhi, metric_G);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G.lagrangian = std::max(G.lagrangian, std::abs(omega(G.dPhi[i], G.dPhi[j])));
  if (A) {
    for (int i = 0; i < n; ++i) {
      Vec Ax = J * A->col(i);
      Bivector lhs = tangent_bivector(G.dPhi[i]);
      Bivector rhs = wedge(Vec(J.col(i)), G.L.y) + wedge(Ax, G.L.x);
      G.decomposition_residual = std::max(G.decomposition_residual, (lhs.comp - rhs.comp).cwiseAbs().maxCoeff());
    }
  }
  return G;
}

inline double tangent_norm(const GeodesicTangent& t) { return std::sqrt(t.X.squaredNorm() + t.Y.squaredNorm()); }

inline GeodesicTangent combine(const std::vector<GeodesicTangent>& basis, const Vec& coef, bool with_J) {
  const auto& L = basis.at(0).base;
  GeodesicTangent out{L, Vec::Zero(L.dim()), Vec::Zero(L.dim())};
  for (std::size_t k = 0; k < basis.size(); ++k) {
    out.X += coef(k) * basis[k].X;
    out.Y += coef(k) * (with_J ? -basis[k].Y : basis[k].Y);
  }
  return out;
}

struct GaussMeanCurvature {
  Vec u;
  GaussMapJet jet;
  PrincipalData principal;
  Vec b_direct;                 // H = sum b_k J dPhi_k
  Vec b_formula;                // -(1/n) (Phi^*G)^{-1} d beta
  GeodesicTangent H_direct, H_formula;
  double discrepancy = 0;       // relative
  double discrepancy_plus = 0;  // against the + sign
  double normal_fit_residual = 0;
  std::vector<Mat> hbar;        // hbar[k](i,j) = G(D_i dPhi_j, J dPhi_k)
  Vec dbeta;
};

// d_i d_j (phi ^ N) as an antisymmetric matrix
inline std::vector<std::vector<Mat>> bivector_hessian(const HypersurfacePatch& P, const Vec& u) {
  int n = P.n;
  std::vector<std::vector<Mat>> H(n, std::vector<Mat>(n));
  Vec uu = u;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      SVec<Dual<Dual<double>>> ud(n);
      for (int k = 0; k < n; ++k)
        ud(k) = Dual<Dual<double>>(Dual<double>(uu(k), k == i ? 1.0 : 0.0), Dual<double>(k == j ? 1.0 : 0.0, 0.0));
      auto p = P.phi(ud);
      auto N = P.normal(ud);
      int d = n + 2;
      Mat B(d, d);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) B(a, b) = (p(a) * N(b) - p(b) * N(a)).d.d;
      H[i][j] = H[j][i] = B;
    }
  return H;
}

inline Vec dbeta(const HypersurfacePatch& P, const Vec& u) {
  int n = P.n;
  Vec d(n);
  for (int i = 0; i < n; ++i) {
    auto K = gaussian_curvature(P, SVec<Dual<double>>(seed(Vec(u), i)));
    d(i) = -0.5 * K.d / K.v;
  }
  return d;
}

inline GaussMeanCurvature gauss_mean_curvature(const HypersurfacePatch& P, const Vec& u) {
  int n = P.n;
  GaussMeanCurvature R;
  R.u = u;
  R.principal = shape_operator(P, u);
  if (R.principal.flat) throw Error("gauss_mean_curvature: flat point");
  R.jet = gauss_map(P, u, &R.principal.A);
  const auto& dPhi = R.jet.dPhi;
  const auto& L = R.jet.L;
  int d = L.dim();
  Mat basis(2 * d, 2 * n);
  for (int k = 0; k < n; ++k) {
    basis.block(0, k, d, 1) = dPhi[k].X;
    basis.block(d, k, d, 1) = dPhi[k].Y;
    basis.block(0, n + k, d, 1) = dPhi[k].X;
    basis.block(d, n + k, d, 1) = -dPhi[k].Y;
  }
  auto qr = basis.colPivHouseholderQr();
  auto Hb = bivector_hessian(P, u);
  Mat Ginv = R.jet.induced.inverse();
  R.b_direct = Vec::Zero(n);
  R.hbar.assign(n, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      GeodesicTangent D = tangent_from_matrix(L, Hb[i][j]);
      Vec rhs(2 * d);
      rhs << D.X, D.Y;
      Vec coef = qr.solve(rhs);
      R.normal_fit_residual = std::max(R.normal_fit_residual, (basis * coef - rhs).norm());
      R.b_direct += Ginv(i, j) * coef.tail(n) / double(n);
      for (int k = 0; k < n; ++k) R.hbar[k](i, j) = metric_G(D, apply_J(dPhi[k]));
    }
  R.dbeta = dbeta(P, u);
  R.b_formula = -Ginv * R.dbeta / double(n);
  R.H_direct = combine(dPhi, R.b_direct, true);
  R.H_formula = combine(dPhi, R.b_formula, true);
  GeodesicTangent Hplus = combine(dPhi, Vec(-R.b_formula), true);
  double hn = std::max(tangent_norm(R.H_direct), 1e-300);
  R.discrepancy = tangent_norm({L, R.H_direct.X - R.H_formula.X, R.H_direct.Y - R.H_formula.Y}) / hn;
  R.discrepancy_plus = tangent_norm({L, R.H_direct.X - Hplus.X, R.H_direct.Y - Hplus.Y}) / hn;
  return R;
}

// ---------------------------------------------------------------------------------------------
// principal-frame identities

struct TriSymmetryCheck {
  double symmetry = 0;        // max over permutations
  double principal_identity = 0;  // |hbar(e_i,e_j,e_j) + g(e_j,e_j) e_i(k_j)|
  double principal_identity_unsigned = 0;  // |hbar(e_i,e_j,e_j) + e_i(k_j)|
  double induced_metric = 0;  // |Phi^*G(e_i,e_j) - 2 k_i g(e_i,e_i) delta_ij|
};

inline TriSymmetryCheck tri_symmetry(const HypersurfacePatch& P, const GaussMeanCurvature& R) {
  int n = P.n;
  TriSymmetryCheck T;
  auto hb = [&](int i, int j, int k) { return R.hbar[k](i, j); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = hb(i, j, k);
        for (double w : {hb(i, k, j), hb(j, i, k), hb(j, k, i), hb(k, i, j), hb(k, j, i)})
          T.symmetry = std::max(T.symmetry, std::abs(v - w));
      }
  const auto& D = R.principal;
  // derivatives of g and h along each coordinate
  std::vector<Mat> dg(n), dh(n);
  for (int a = 0; a < n; ++a) {
    auto F = fundamental_forms(P, SVec<Dual<double>>(seed(Vec(R.u), a)));
    dg[a] = dual_part_mat(F.g);
    Mat hd = dual_part_mat(F.h);
    dh[a] = 0.5 * (hd + hd.transpose());
  }
  for (int j = 0; j < n; ++j) {
    Vec e = D.E.col(j);
    double gee = e.dot(D.g * e);
    Vec dk(n);
    for (int a = 0; a < n; ++a) dk(a) = e.dot((dh[a] - D.k(j) * dg[a]) * e) / gee;
    for (int i = 0; i < n; ++i) {
      Vec ei = D.E.col(i);
      double eik = dk.dot(ei);
      double h3 = 0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int k = 0; k < n; ++k) h3 += hb(a, b, k) * ei(a) * e(b) * e(k);
      T.principal_identity = std::max(T.principal_identity, std::abs(h3 + gee * eik));
      T.principal_identity_unsigned = std::max(T.principal_identity_unsigned, std::abs(h3 + eik));
    }
  }
  Mat PG = D.E.transpose() * R.jet.induced * D.E;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double expect = i == j ? 2.0 * D.k(i) * D.E.col(i).dot(D.g * D.E.col(i)) : 0.0;
      T.induced_metric = std::max(T.induced_metric, std::abs(PG(i, j) - expect));
    }
  return T;
}

// ---------------------------------------------------------------------------------------------
// Maslov form and Hamiltonian residual

struct MaslovDiagnostics {
  double exactness = 0;        // against the angle -beta/n
  double exactness_plus = 0;   // against +beta/n
  double closedness = 0;
  double closedness_halved = 0;  // same with half the step
  double alpha_max = 0;
  double angle_min = 0, angle_max = 0;
  int flat_points = 0;
};

inline Vec maslov_form(const HypersurfacePatch& P, const Vec& u) {
  GaussMeanCurvature R = gauss_mean_curvature(P, u);
  Vec a(P.n);
  for (int i = 0; i < P.n; ++i) a(i) = omega(R.H_direct, R.jet.dPhi[i]);
  return a;
}

inline double closedness_at(const HypersurfacePatch& P, const Vec& u, double h) {
  int n = P.n;
  Mat D(n, n);
  for (int j = 0; j < n; ++j) {
    Vec e = Vec::Unit(n, j) * h;
    D.col(j) = (maslov_form(P, u + e) - maslov_form(P, u - e)) / (2 * h);
  }
  return (D - D.transpose()).cwiseAbs().maxCoeff();
}

inline MaslovDiagnostics maslov_diagnostics(const HypersurfacePatch& P, const std::vector<Vec>& pts, double h = 1e-3) {
  MaslovDiagnostics M;
  bool first = true;
  for (const Vec& u : pts) {
    PrincipalData D = shape_operator(P, u);
    if (D.flat) {
      ++M.flat_points;
      continue;
    }
    GaussMeanCurvature R = gauss_mean_curvature(P, u);
    double angle = -D.beta / P.n;
    if (first) M.angle_min = M.angle_max = angle;
    first = false;
    M.angle_min = std::min(M.angle_min, angle);
    M.angle_max = std::max(M.angle_max, angle);
    for (int i = 0; i < P.n; ++i) {
      double a = omega(R.H_direct, R.jet.dPhi[i]);
      M.alpha_max = std::max(M.alpha_max, std::abs(a));
      M.exactness = std::max(M.exactness, std::abs(a + R.dbeta(i) / P.n));
      M.exactness_plus = std::max(M.exactness_plus, std::abs(a - R.dbeta(i) / P.n));
    }
    M.closedness = std::max(M.closedness, closedness_at(P, u, h));
    M.closedness_halved = std::max(M.closedness_halved, closedness_at(P, u, h / 2));
  }
  return M;
}

struct HamiltonianResidual {
  double divJH = 0;
  double corollary = 0;
  double divJH_halved = 0;
  double corollary_halved = 0;
};

inline HamiltonianResidual hamiltonian_residual(const HypersurfacePatch& P, const Vec& u, double h = 1e-3) {
  int n = P.n;
  auto flux_JH = [&](const Vec& v) {
    GaussMeanCurvature R = gauss_mean_curvature(P, v);
    return Vec(std::sqrt(std::abs(R.jet.induced.determinant())) * R.b_direct);
  };
  auto flux_cor = [&](const Vec& v) {
    PrincipalData D = shape_operator(P, v);
    Vec ds(n);
    for (int a = 0; a < n; ++a) {
      auto K = gaussian_curvature(P, SVec<Dual<double>>(seed(Vec(v), a)));
      double sk = std::sqrt(std::abs(K.v));
      ds(a) = (K.v < 0 ? -K.d : K.d) / (2.0 * sk);
    }
    Vec W = D.A.lu().solve(Vec(D.g.lu().solve(ds)));
    return Vec(std::sqrt(std::abs(D.g.determinant())) * W);
  };
  auto div = [&](auto&& flux, double step) {
    double s = 0;
    for (int k = 0; k < n; ++k) {
      Vec e = Vec::Unit(n, k) * step;
      s += (flux(u + e)(k) - flux(u - e)(k)) / (2 * step);
    }
    return s;
  };
  GaussMeanCurvature R0 = gauss_mean_curvature(P, u);
  double volG = std::sqrt(std::abs(R0.jet.induced.determinant()));
  double volg = std::sqrt(std::abs(R0.principal.g.determinant()));
  double sk = std::sqrt(std::abs(R0.principal.K));
  HamiltonianResidual H;
  H.divJH = div(flux_JH, h) / volG;
  H.divJH_halved = div(flux_JH, h / 2) / volG;
  H.corollary = div(flux_cor, h) / volg / (2.0 * n * sk);
  H.corollary_halved = div(flux_cor, h / 2) / volg / (2.0 * n * sk);
  return H;
}

// ---------------------------------------------------------------------------------------------
// the functional and the Gauss-map volume

struct FunctionalVolume {
  double F = 0, Vol = 0;
  double identity_residual = 0;
  std::vector<int> steps;
  double last_change = 0;
  int flat_points = 0;
};

inline FunctionalVolume integrate_functional(const HypersurfacePatch& P, const std::vector<int>& steps) {
  FunctionalVolume R;
  R.steps = steps;
  double w = 1.0;
  for (int a = 0; a < P.n; ++a) w *= (P.grid[a].max - P.grid[a].min) / steps[a];
  double F = 0, V = 0;
  for (const Vec& u : P.sample_points(steps)) {
    SVec<double> us = u;
    Forms<double> f = fundamental_forms(P, us);
    double dg = f.g.determinant();
    double K = f.h.determinant() / dg;
    if (std::abs(K) < 1e-8) ++R.flat_points;
    F += std::sqrt(std::abs(K)) * std::sqrt(std::abs(dg));
    GaussMapJet G = gauss_map(P, u);
    V += std::sqrt(std::abs(G.induced.determinant()));
  }
  R.F = F * w;
  R.Vol = V * w;
  R.identity_residual = std::abs(R.Vol - std::pow(2.0, P.n / 2.0) * R.F) / std::abs(R.Vol);
  return R;
}

// doubles each axis until the relative change of F and Vol stays below rel_tol
inline FunctionalVolume functional_and_volume(const HypersurfacePatch& P, double rel_tol = 1e-7, int max_points = 1 << 20) {
  std::vector<int> steps;
  for (const auto& a : P.grid) steps.push_back(a.steps);
  FunctionalVolume cur = integrate_functional(P, steps);
  if (cur.flat_points > 0) throw Error("functional_and_volume: flat points on the grid");
  bool refined = true;
  while (refined) {
    refined = false;
    for (int a = 0; a < P.n; ++a) {
      std::vector<int> s = cur.steps;
      s[a] *= 2;
      long total = 1;
      for (int v : s) total *= v;
      if (total > max_points) continue;
      FunctionalVolume nxt = integrate_functional(P, s);
      double ch = std::max(std::abs(nxt.F - cur.F) / std::abs(nxt.F), std::abs(nxt.Vol - cur.Vol) / std::abs(nxt.Vol));
      nxt.last_change = ch;
      if (ch > rel_tol) {
        cur = nxt;
        refined = true;
      } else {
        cur.last_change = std::max(cur.last_change, ch);
      }
    }
  }
  return cur;
}

inline double closed_form_F_sphere(int c, double r) {
  return c > 0 ? 2 * M_PI * std::abs(std::sin(2 * r)) : 2 * M_PI * std::sinh(2 * r);
}

struct VariationDerivative {
  double dF = 0, dVol = 0;
  double F0 = 0;
  double consistency = 0;  // |dF - 2^{-n/2} dVol| / |dF|
};

inline VariationDerivative hamiltonian_variation_derivative(const HypersurfacePatch& P, const Bump& f, double dt,
                                                            const std::vector<int>& steps) {
  if (dt > 1e-3) throw Error("hamiltonian_variation_derivative: dt must be <= 1e-3");
  auto at = [&](double t) {
    HypersurfacePatch Q = P;
    Q.bump = f;
    Q.bump->t = t;
    return integrate_functional(Q, steps);
  };
  FunctionalVolume p = at(dt), m = at(-dt), z = at(0.0);
  VariationDerivative V;
  V.F0 = z.F;
  V.dF = (p.F - m.F) / (2 * dt);
  V.dVol = (p.Vol - m.Vol) / (2 * dt);
  double s = std::pow(2.0, -P.n / 2.0);
  V.consistency = std::abs(V.dF - s * V.dVol) / std::max(std::abs(V.dF), 1e-300);
  return V;
}

inline double lagrangian_residual(const HypersurfacePatch& P, const std::vector<Vec>& pts) {
  double r = 0;
  for (const Vec& u : pts) r = std::max(r, gauss_map(P, u).lagrangian);
  return r;
}

}  // namespace geoline
