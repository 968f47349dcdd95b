#include <gtest/gtest.h>

#include <geoline/suites.hpp>

#include "oracles.hpp"

using namespace geoline;
using namespace geoline::suites;

namespace {

OrientedGeodesic hyperbolic(std::uint64_t s, int n) {
  Rng r(s);
  return random_geodesic(r, n, -1);
}

}  // namespace

TEST(TangentBundle, EmbeddingLandsInTheBundle) {
  for (int n : {1, 2, 3}) {
    OrientedGeodesic L = hyperbolic(1 + n, n);
    TangentBundlePoint p = embed_f(L);
    EXPECT_LT(bundle_constraint_residual(p), 1e-12);
    EXPECT_NEAR(inner(p.vec, p.vec, -1), -1.0, 1e-12);  // unit spacelike velocity
    for (double t : {-0.8, 0.3, 1.5}) {
      TangentBundlePoint q = embed_f(flow_in_plane(L, t));
      EXPECT_LT((p.base - q.base).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LT((p.vec - q.vec).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
  Rng r(3);
  EXPECT_THROW(embed_f(random_geodesic(r, 2, 1)), Error);
}

TEST(TangentBundle, NeutralSignature) {
  Vec z(6);
  z << 0.2, -0.1, 0.4, 0.3, 0.5, -0.2;
  auto sig = oracle::signature(bundle::metric<double>(z));
  EXPECT_EQ(sig.first, 3);
  EXPECT_EQ(sig.second, 3);
}

TEST(TangentBundle, ChristoffelMatchesFiniteDifferences) {
  Vec z(4);
  z << 0.3, -0.2, 0.1, 0.6;
  Christoffel G = bundle::christoffel(z);
  int d = 4;
  double h = 1e-5;
  std::vector<Mat> dg(d);
  for (int a = 0; a < d; ++a) {
    Vec zp = z, zm = z;
    zp(a) += h;
    zm(a) -= h;
    dg[a] = (bundle::metric<double>(zp) - bundle::metric<double>(zm)) / (2 * h);
  }
  Mat gi = bundle::metric<double>(z).inverse();
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = 0;
        for (int l = 0; l < d; ++l) s += gi(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        EXPECT_NEAR(G[k](i, j), 0.5 * s, 1e-8);
      }
}

TEST(TangentBundle, IsometricImmersion) {
  for (int n : {1, 2, 3}) {
    Rng r(10 + n);
    OrientedGeodesic L = random_geodesic(r, n, -1);
    TangentBundlePoint p = embed_f(L);
    for (int k = 0; k < 4; ++k) {
      GeodesicTangent a = random_tangent(r, L), b = random_tangent(r, L);
      double G = metric_G(rebase(a, canonical_rep(L)), rebase(b, canonical_rep(L)));
      EXPECT_NEAR(bundle_metric(p, df(a), df(b)), G, 1e-10);
      EXPECT_NEAR(bundle_metric(p, df_numeric(a), df_numeric(b)), G, 1e-10);
      // the two differ only by the in-plane drift of the canonical point, which pairs to zero
      BundleTangent u = df(a), v = df_numeric(a);
      Vec y = -p.vec;
      EXPECT_LT((u.Kv - v.Kv).cwiseAbs().maxCoeff(), 1e-10);
      Vec dP = v.P - u.P;
      EXPECT_LT((dP - inner(dP, y, -1) / inner(y, y, -1) * y).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(TangentBundle, ChartGaugeSecondForm) {
  for (int n : {1, 2, 3}) {
    Rng r(20 + n);
    OrientedGeodesic L = random_geodesic(r, n, -1);
    EXPECT_LT(norm(mean_curvature_f(L, Gauge::Chart)), 1e-6);
    for (int k = 0; k < 3; ++k) {
      GeodesicTangent a = random_tangent(r, L), b = random_tangent(r, L);
      EXPECT_LT(bdiff(second_form_f(a, b, Gauge::Chart), second_form_closed(a, b, -1.0)), 1e-5);
    }
  }
}

TEST(TangentBundle, CanonicalGaugeMeanCurvatureNorm) {
  // the canonical-representative gauge is not horizontal: |H| = 2n there
  for (int n : {1, 2, 3}) {
    OrientedGeodesic L = hyperbolic(30 + n, n);
    EXPECT_NEAR(norm(mean_curvature_f(L, Gauge::Canonical)), 2.0 * n, 1e-6);
  }
}

TEST(TangentBundle, ConnectionSplit) {
  Vec x(3), xdot(3), v(3), vdot(3);
  double s = 0.4;
  x << std::cosh(s), std::sinh(s), 0;
  xdot << std::sinh(s), std::cosh(s), 0;
  v << 0, 0, 1;
  vdot << 0, 0, 0.3;
  BundleTangent b = connection_split(x, xdot, v, vdot);
  EXPECT_LT((b.P - xdot).norm(), 1e-14);
  EXPECT_LT((b.Kv - vdot).norm(), 1e-14);
  Vec bad = v;
  bad(0) = 1;
  EXPECT_THROW(connection_split(x, xdot, bad, vdot), Error);
}
