#include <gtest/gtest.h>

#include <geoline/suites.hpp>

#include "oracles.hpp"

using namespace geoline;
using namespace geoline::suites;

namespace {

OrientedGeodesic sample(int n, int c, std::uint64_t s) {
  Rng r(s);
  return random_geodesic(r, n, c);
}

}  // namespace

TEST(Chart, CentreAndDifferential) {
  for (int c : {-1, 1}) {
    OrientedGeodesic L = sample(3, c, 1);
    Chart ch(L);
    EXPECT_TRUE(same_representative(ch.map(Vec::Zero(6)), L, 1e-14));
    auto T = ch.differential(Vec::Zero(6));
    const auto& e = ch.frame();
    Vec z = Vec::Zero(5);
    for (int i = 0; i < 3; ++i) {
      EXPECT_LT(tdiff(T[i], GeodesicTangent{L, z, -e[i]}), 1e-13);
      EXPECT_LT(tdiff(T[3 + i], GeodesicTangent{L, e[i], z}), 1e-13);
    }
    // coords_at_base inverts the differential
    GeodesicTangent t = T[1] + 0.5 * T[4];
    Vec w = ch.coords_at_base(t);
    Vec expect = Vec::Zero(6);
    expect(1) = 1;
    expect(4) = 0.5;
    EXPECT_LT((w - expect).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Chart, MetricsAtCentre) {
  for (int c : {-1, 1}) {
    Chart ch(sample(2, c, 2));
    Mat ge = ch.metric(Vec::Zero(4), MetricKind::Ge);
    Mat g = ch.metric(Vec::Zero(4), MetricKind::G);
    auto T = ch.differential(Vec::Zero(4));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        EXPECT_NEAR(ge(a, b), metric_Ge(T[a], T[b]), 1e-12);
        EXPECT_NEAR(g(a, b), metric_G(T[a], T[b]), 1e-12);
      }
    auto sig = oracle::signature(g);
    EXPECT_EQ(sig.first, 2);
    EXPECT_EQ(sig.second, 2);
  }
}

TEST(Curvature, TwoSphereOfOrientedGreatCircles) {
  // n = 1, c = 1: the oriented great circles of S^2 form a unit 2-sphere under G_e
  Chart ch(sample(1, 1, 3));
  RiemannData R = riemann(ch, Vec::Zero(2), MetricKind::Ge);
  Tensor4 model = kulkarni_nomizu(R.g, R.g);
  for (std::size_t i = 0; i < model.a.size(); ++i) EXPECT_NEAR(R.rm.a[i], 0.5 * model.a[i], 1e-5);  // O(h^2) differences
  EXPECT_NEAR(scalar_curvature(R.g, R.ricci), 2.0, 1e-5);
}

TEST(Curvature, KulkarniNomizuSymmetries) {
  Mat h = Mat::Random(4, 4), k = Mat::Random(4, 4);
  h = (h + h.transpose()).eval();
  k = (k + k.transpose()).eval();
  Tensor4 t = kulkarni_nomizu(h, k), s = kulkarni_nomizu(k, h);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          EXPECT_NEAR(t(a, b, c, d), -t(b, a, c, d), 1e-13);
          EXPECT_NEAR(t(a, b, c, d), t(c, d, a, b), 1e-13);
          EXPECT_NEAR(t(a, b, c, d), s(a, b, c, d), 1e-13);
          EXPECT_NEAR(t(a, b, c, d) + t(b, c, a, d) + t(c, a, b, d), 0.0, 1e-12);
        }
}

TEST(Curvature, ScalarFlatAndEinsteinCompanion) {
  for (int c : {-1, 1})
    for (int n : {2, 3}) {
      CurvatureReport rep = curvature_report(sample(n, c, 4 + n));
      EXPECT_LT(std::abs(rep.G.scalar), 1e-4) << "n=" << n << " c=" << c;
      EXPECT_LT(rep.ricci_Ge_max_err, 1e-4);
      EXPECT_LT(rep.scalar_Ge_err, 1e-3);
      EXPECT_NEAR(rep.Ge.scalar, 2.0 * c * n * n, 1e-3);
      EXPECT_LT(rep.antisymmetry, 1e-4);
      EXPECT_LT(rep.bianchi, 1e-4);
      EXPECT_LT(rep.step_halving, 1e-4);
      EXPECT_LT(rep.christoffel_G_vs_Ge, 1e-4);
    }
}

TEST(Curvature, WeylVanishesForNTwo) {
  for (int c : {-1, 1}) {
    CurvatureReport rep = curvature_report(sample(2, c, 9));
    EXPECT_LT(rep.weyl_sup, 1e-4);
    EXPECT_LT(rep.weyl_reduced_vs_full, 1e-4);
  }
}

TEST(Curvature, FrameRotationDoesNotChangeTensors) {
  OrientedGeodesic L = sample(2, -1, 12);
  Chart a(L);
  Mat Q(2, 2);
  double t = 0.7;
  Q << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  std::vector<Vec> f = {Q(0, 0) * a.frame()[0] + Q(0, 1) * a.frame()[1], Q(1, 0) * a.frame()[0] + Q(1, 1) * a.frame()[1]};
  Chart b(L, f);
  CurvatureReport ra = curvature_report(a, a.frame()), rb = curvature_report(b, a.frame());
  EXPECT_LT((ra.G.ricci - rb.G.ricci).cwiseAbs().maxCoeff(), 2e-4);
  EXPECT_LT((ra.Ge.ricci - rb.Ge.ricci).cwiseAbs().maxCoeff(), 2e-4);
  EXPECT_NEAR(ra.G.scalar, rb.G.scalar, 2e-4);
}

TEST(Curvature, RejectsNOne) { EXPECT_THROW(curvature_report(sample(1, 1, 1)), Error); }
