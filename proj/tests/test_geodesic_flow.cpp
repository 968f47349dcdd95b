#include <gtest/gtest.h>

#include <geoline/suites.hpp>

#include "oracles.hpp"

using namespace geoline;
using namespace geoline::suites;

namespace {

GeodesicTangent seed_tangent(std::uint64_t s, int n, int c, bool null_energy = false) {
  Rng r(s);
  OrientedGeodesic L = random_geodesic(r, n, c);
  return flow_seed(r, L, null_energy);
}

}  // namespace

TEST(Flow, MatchesTransvectionOracle) {
  for (int c : {-1, 1})
    for (int n : {1, 2, 3}) {
      GeodesicTangent T = seed_tangent(20 + n, n, c);
      GeodesicCurve cur = integrate_geodesic(T, 1.0, 0.01);
      for (std::size_t i : {std::size_t(25), std::size_t(50), cur.samples.size() - 1}) {
        double t = cur.samples[i].t;
        Mat P = oracle::transvection_plane(T.base.x, T.base.y, T.X, T.Y, c, t);
        Bivector want = bivector_from_matrix(P);
        EXPECT_LT((cur.samples[i].L.key.comp - want.comp).cwiseAbs().maxCoeff(), 1e-6)
            << "n=" << n << " c=" << c << " t=" << t;
      }
    }
}

TEST(Flow, EnergyAndOrthogonality) {
  for (int c : {-1, 1}) {
    for (bool null_energy : {false, true}) {
      GeodesicTangent T = seed_tangent(30, 2, c, null_energy);
      GeodesicCurve cur = integrate_geodesic(T, 1.0, 0.01);
      EXPECT_LT(cur.max_energy_drift, 1e-6);
      EXPECT_LT(orthogonality_residual(cur), 1e-6);
      EXPECT_LT(cur.max_constraint, 1e-10);
      if (null_energy) {
        EXPECT_NEAR(cur.samples[0].energy, 0.0, 1e-12);
      }
    }
  }
}

TEST(Flow, GreatCircleOnTheThreeSphere) {
  Vec e0 = Vec::Unit(4, 0), e1 = Vec::Unit(4, 1), e2 = Vec::Unit(4, 2);
  GeodesicTangent T{make_geodesic(e0, e1, 1), Vec::Zero(4), -e2};
  GeodesicCurve cur = integrate_geodesic(T, 1.0, 0.01);
  for (const auto& s : cur.samples) {
    Vec x = std::cos(s.t) * e0 + std::sin(s.t) * e2;
    EXPECT_LT((s.L.key.comp - wedge(x, e1).comp).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Flow, RuledSurfaceOfGeodesicIsMinimal) {
  for (int c : {-1, 1}) {
    GeodesicCurve cur = integrate_geodesic(seed_tangent(40, 2, c), 1.0, 0.01);
    RuledSurface rs = ruled_surface(cur, default_theta_grid(c, 12), 20);
    EXPECT_LT(minimality_residual(rs), 1e-3);
    for (const auto& p : rs.points) {
      if (p.flag) continue;
      EXPECT_LT(std::abs(p.first(0, 1)), 1e-6);
      EXPECT_NEAR(p.first(1, 1), double(c), 1e-8);  // <X_theta, X_theta> = c
      EXPECT_NEAR(inner(p.X, p.X, c), 1.0, 1e-10);
      EXPECT_NEAR(inner(p.X, p.N, c), 0.0, 1e-8);
    }
  }
}

TEST(Flow, ForcedCurveIsNotMinimal) {
  for (int c : {-1, 1}) {
    GeodesicTangent T = seed_tangent(50, 2, c);
    FlowOptions fo;
    Vec f = Vec::Zero(4);
    f(0) = 0.1;
    fo.forcing = f;
    GeodesicCurve cur = integrate_geodesic(T, 1.0, 0.01, fo);
    EXPECT_GT(minimality_residual(cur), 1e-2);
  }
}

TEST(Flow, RejectsLargeStep) {
  GeodesicTangent T = seed_tangent(60, 2, 1);
  EXPECT_THROW(integrate_geodesic(T, 1.0, 0.02), Error);
  EXPECT_THROW(integrate_geodesic(T, 1.0, 0.0), Error);
  EXPECT_THROW(integrate_geodesic(T, -1.0, 0.01), Error);
}

TEST(Flow, HelicoidsAreMinimalAndGeodesic) {
  for (int c : {-1, 1})
    for (double a : {0.5, 1.0, 2.0}) {
      GeodesicCurve hc = helicoid_curve(c, a);
      EXPECT_LT(minimality_residual(hc), 1e-6);
      EXPECT_LT(geodesic_equation_residual(hc), 1e-4);
    }
}

TEST(Flow, SampleDerivativesExactOnQuartics) {
  auto p = [](double t) { return 1 + 2 * t - t * t + 0.5 * t * t * t - 0.25 * t * t * t * t; };
  auto dp = [](double t) { return 2 - 2 * t + 1.5 * t * t - t * t * t; };
  auto ddp = [](double t) { return -2 + 3 * t - 3 * t * t; };
  double dt = 0.1;
  int count = 11;
  for (int k = 0; k < count; ++k) {
    auto [d1, d2] = sample_derivatives([&](int i) { return p(i * dt); }, k, count, dt);
    EXPECT_NEAR(d1, dp(k * dt), 1e-10) << k;
    EXPECT_NEAR(d2, ddp(k * dt), 1e-8) << k;
  }
}

TEST(Flow, Reparametrization) {
  GeodesicTangent T = seed_tangent(70, 2, -1);
  GeodesicCurve a = integrate_geodesic(T, 1.0, 0.01);
  GeodesicCurve b = integrate_geodesic(2.0 * T, 0.5, 0.005);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    EXPECT_LT((a.samples[i].L.key.comp - b.samples[i].L.key.comp).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Flow, GridCsvHeader) {
  GeodesicCurve hc = helicoid_curve(1, 1.0);
  std::string csv = grid_csv(ruled_surface(hc, default_theta_grid(1, 4), 5));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,theta,x0,x1,x2,x3,H,flag");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 4 * 5);
}
