#include <gtest/gtest.h>

#include <random>

#include <geoline/core.hpp>
#include <geoline/hypersurface.hpp>

#include "oracles.hpp"

using namespace geoline;

namespace {

Vec rnd(std::mt19937_64& r, int d) {
  std::normal_distribution<double> N;
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = N(r);
  return v;
}

}  // namespace

TEST(Core, CheckCRejectsFlatAndOtherValues) {
  EXPECT_EQ(check_c(1), 1);
  EXPECT_EQ(check_c(-1), -1);
  EXPECT_THROW(check_c(0), Error);
  EXPECT_THROW(check_c(2), Error);
}

TEST(Core, InnerMatchesOracle) {
  std::mt19937_64 r(1);
  for (int c : {-1, 1})
    for (int d : {3, 4, 6}) {
      Vec u = rnd(r, d), v = rnd(r, d);
      EXPECT_NEAR(inner(u, v, c), oracle::ip(u, v, c), 1e-14);
      EXPECT_NEAR(inner(u, v, c), u.dot(eta(d, c).asDiagonal() * v), 1e-14);
    }
}

TEST(Core, TrigIdentity) {
  for (int c : {-1, 1})
    for (double t : {-1.3, 0.0, 0.4, 2.2}) {
      double cc = cos_c(t, c), ss = sin_c(t, c);
      EXPECT_NEAR(cc * cc + c * ss * ss, 1.0, 1e-13);
    }
}

TEST(Core, WedgeIsAntisymmetricAndGramLike) {
  std::mt19937_64 r(2);
  for (int c : {-1, 1}) {
    Vec x = rnd(r, 5), y = rnd(r, 5);
    Bivector a = wedge(x, y), b = wedge(y, x);
    EXPECT_LT((a.comp + b.comp).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((a.matrix() - oracle::plane(x, y)).cwiseAbs().maxCoeff(), 1e-15);
    // <x^y, x^y> = det of the 2x2 Gram matrix
    double gram = oracle::ip(x, x, c) * oracle::ip(y, y, c) - std::pow(oracle::ip(x, y, c), 2);
    EXPECT_NEAR(biv_inner(a, a, c), gram, 1e-11 * (1 + std::abs(gram)));
    EXPECT_LT((bivector_from_matrix(a.matrix()).comp - a.comp).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Core, ComplementFrameIsOrthonormal) {
  for (int c : {-1, 1})
    for (int n : {1, 2, 3, 4}) {
      int d = n + 2;
      Vec x = Vec::Unit(d, 0), y = Vec::Unit(d, 1);
      auto e = complement_frame(x, y, c);
      ASSERT_EQ(int(e.size()), n);
      for (int i = 0; i < n; ++i) {
        EXPECT_NEAR(oracle::ip(e[i], x, c), 0.0, 1e-14);
        EXPECT_NEAR(oracle::ip(e[i], y, c), 0.0, 1e-14);
        for (int j = 0; j < n; ++j) EXPECT_NEAR(oracle::ip(e[i], e[j], c), i == j ? c : 0.0, 1e-13);
      }
    }
}

TEST(Core, GenericDeterminantAndSolve) {
  std::mt19937_64 r(3);
  for (int n : {1, 3, 5, 6}) {
    Mat a(n, n);
    for (int i = 0; i < n * n; ++i) a(i) = std::normal_distribution<double>()(r);
    EXPECT_NEAR(det_generic<double>(a), a.determinant(), 1e-11);
    Mat b = Mat::Random(n, 2);
    EXPECT_LT((solve_generic<double>(a, b) - a.lu().solve(b)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Core, DeterminantKeepsDerivativeOfValueSingularMatrix) {
  // det [[t, 1], [0, 1]] + ... with a zero pivot in value: d/dt det = 1 at t = 0
  using D = Dual<double>;
  Eigen::Matrix<D, Eigen::Dynamic, Eigen::Dynamic> a(3, 3);
  D t(0.0, 1.0);
  a << t, D(0.0), D(0.0), D(0.0), D(2.0), D(1.0), D(0.0), D(1.0), D(3.0);
  D d = det_generic<D>(a);
  EXPECT_DOUBLE_EQ(d.v, 0.0);
  EXPECT_NEAR(d.d, 5.0, 1e-14);
  SMat<D> s = a;
  D d2 = small_det(s);
  EXPECT_NEAR(d2.d, 5.0, 1e-14);
}

TEST(Dual, FirstAndSecondDerivatives) {
  using D = Dual<double>;
  using DD = Dual<D>;
  auto f = [](auto x) {
    using std::exp;
    using std::sin;
    using std::sqrt;
    return sin(x) * exp(x) + sqrt(x * x + 1.0);
  };
  double x0 = 0.7;
  D d = f(D(x0, 1.0));
  double df = std::cos(x0) * std::exp(x0) + std::sin(x0) * std::exp(x0) + x0 / std::sqrt(x0 * x0 + 1);
  EXPECT_NEAR(d.d, df, 1e-14);
  DD dd = f(DD(D(x0, 1.0), D(1.0, 0.0)));
  double d2f = 2 * std::cos(x0) * std::exp(x0) + 1.0 / std::pow(x0 * x0 + 1, 1.5);
  EXPECT_NEAR(dd.d.d, d2f, 1e-13);
}

TEST(Dual, SeedAndTangents) {
  Vec v(3);
  v << 1, 2, 3;
  auto s = seed(v, 1);
  EXPECT_EQ(tangents(s), Vec::Unit(3, 1));
  EXPECT_EQ(values(s), v);
}
