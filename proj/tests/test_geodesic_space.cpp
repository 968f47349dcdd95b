#include <gtest/gtest.h>

#include <geoline/suites.hpp>

#include "oracles.hpp"

using namespace geoline;
using namespace geoline::suites;

namespace {

SuiteConfig cfg_for(const std::string& name) {
  SuiteConfig c;
  c.suite = name;
  c.seed = 11;
  return c;
}

}  // namespace

TEST(GeodesicSpace, MakeGeodesicValidates) {
  Vec x = Vec::Unit(4, 0), y = Vec::Unit(4, 1);
  EXPECT_NO_THROW(make_geodesic(x, y, 1));
  EXPECT_NO_THROW(make_geodesic(x, y, -1));
  EXPECT_THROW(make_geodesic(x, x, 1), Error);
  EXPECT_THROW(make_geodesic(-x, y, -1), Error);  // lower sheet
  EXPECT_THROW(make_geodesic(x, y, 0), Error);
  EXPECT_THROW(make_geodesic(Vec::Unit(3, 0), Vec::Unit(4, 1), 1), Error);
}

TEST(GeodesicSpace, InPlaneFlowKeepsThePlane) {
  for (int c : {-1, 1}) {
    Rng r(5);
    OrientedGeodesic L = random_geodesic(r, 3, c);
    for (double t : {-0.7, 0.3, 1.9}) {
      OrientedGeodesic M = flow_in_plane(L, t);
      EXPECT_TRUE(same_geodesic(L, M, 1e-12));
      EXPECT_LT(constraint_residual(M.x, M.y, c), 1e-12);
    }
  }
}

TEST(GeodesicSpace, CanonicalRepresentative) {
  Rng r(6);
  for (int k = 0; k < 10; ++k) {
    OrientedGeodesic L = random_geodesic(r, 2, -1);
    OrientedGeodesic C = canonical_rep(L);
    EXPECT_TRUE(same_geodesic(L, C, 1e-10));
    EXPECT_NEAR(C.x.dot(C.y), 0.0, 1e-12);
    // closest point to the origin: x0 minimal along the geodesic
    for (double t : {-0.1, 0.1}) EXPECT_GE(flow_in_plane(C, t).x(0), C.x(0) - 1e-14);
  }
  EXPECT_THROW(canonical_rep(make_geodesic(Vec::Unit(4, 0), Vec::Unit(4, 1), 1)), Error);
}

TEST(GeodesicSpace, TangentRoundTripAndRebase) {
  for (int c : {-1, 1}) {
    Rng r(7);
    OrientedGeodesic L = random_geodesic(r, 3, c);
    GeodesicTangent t = random_tangent(r, L);
    GeodesicTangent back = tangent_from_matrix(L, tangent_bivector(t).matrix());
    EXPECT_LT(tdiff(t, back), 1e-12);
    OrientedGeodesic M = flow_in_plane(L, 0.6);
    GeodesicTangent s = rebase(t, M);
    EXPECT_LT((tangent_bivector(s).comp - tangent_bivector(t).comp).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(GeodesicSpace, MetricsUnderRepresentativeChange) {
  // G_e and Omega depend only on the plane; G and J do not
  for (int c : {-1, 1}) {
    Rng r(8);
    OrientedGeodesic L = random_geodesic(r, 2, c);
    GeodesicTangent a = random_tangent(r, L), b = random_tangent(r, L);
    OrientedGeodesic M = flow_in_plane(L, 0.4);
    GeodesicTangent a2 = rebase(a, M), b2 = rebase(b, M);
    EXPECT_NEAR(metric_Ge(a, b), metric_Ge(a2, b2), 1e-12);
    EXPECT_NEAR(omega(a, b), omega(a2, b2), 1e-12);
    EXPECT_GT(std::abs(metric_G(a, b) - metric_G(a2, b2)), 1e-6);
  }
}

TEST(GeodesicSpace, ParaKahlerIdentities) {
  for (int c : {-1, 1})
    for (int n : {2, 3, 4}) {
      Rng r(9 + n);
      OrientedGeodesic L = random_geodesic(r, n, c);
      for (int k = 0; k < 5; ++k) {
        GeodesicTangent a = random_tangent(r, L), b = random_tangent(r, L);
        EXPECT_LT(tdiff(apply_J(apply_J(a)), a), 1e-14);
        EXPECT_LT(tdiff(apply_Je(apply_Je(a)), double(c) * a), 1e-14);
        EXPECT_NEAR(metric_G(apply_J(a), apply_J(b)), -metric_G(a, b), 1e-12);
        EXPECT_NEAR(omega(a, b), metric_G(apply_J(a), b), 1e-12);
        EXPECT_NEAR(metric_G(a, b), metric_Ge(a, apply_Je(b)), 1e-12);
        EXPECT_NEAR(omega(a, b), -omega(b, a), 1e-12);
      }
      auto sig = oracle::signature(gram(frame_basis(L), metric_G));
      EXPECT_EQ(sig.first, n);
      EXPECT_EQ(sig.second, n);
    }
}

TEST(GeodesicSpace, GeGramIsDiagonal) {
  // (e_i, 0) has G_e-norm c, (0, e_i) has norm c^2 = 1
  for (int c : {-1, 1}) {
    Rng r(10);
    OrientedGeodesic L = random_geodesic(r, 3, c);
    Mat g = gram(frame_basis(L), metric_Ge);
    Vec want(6);
    want << c, c, c, 1, 1, 1;
    EXPECT_LT((g - Mat(want.asDiagonal())).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(GeodesicSpace, FrameCoordinatesRoundTrip) {
  Rng r(11);
  OrientedGeodesic L = random_geodesic(r, 3, -1);
  auto e = complement_frame(L.x, L.y, L.c);
  GeodesicTangent t = random_tangent(r, L);
  EXPECT_LT(tdiff(from_frame_coords(L, e, frame_coords(t, e)), t), 1e-12);
}

TEST(GeodesicSpace, IsometriesPreserveEverything) {
  for (int c : {-1, 1}) {
    Rng r(12);
    OrientedGeodesic L = random_geodesic(r, 3, c);
    Mat M = random_isometry(r, 5, c);
    EXPECT_LT(isometry_defect(M, c), 1e-12);
    GeodesicTangent a = random_tangent(r, L), b = random_tangent(r, L);
    GeodesicTangent pa = push_tangent(M, a), pb = push_tangent(M, b);
    EXPECT_NEAR(metric_G(a, b), metric_G(pa, pb), 1e-10);
    EXPECT_NEAR(metric_Ge(a, b), metric_Ge(pa, pb), 1e-10);
    EXPECT_NEAR(omega(a, b), omega(pa, pb), 1e-10);
  }
  Mat bad = Mat::Identity(4, 4);
  bad(0, 0) = 2;
  EXPECT_THROW(isometry_push(bad, make_geodesic(Vec::Unit(4, 0), Vec::Unit(4, 1), 1)), Error);
}

TEST(GeodesicSpace, SeededInputsAreReproducible) {
  SuiteConfig c = cfg_for("parakahler-algebra");
  Rng a = trial_rng(c, "g", 3), b = trial_rng(c, "g", 3), d = trial_rng(c, "g", 4);
  OrientedGeodesic La = random_geodesic(a, 2, -1), Lb = random_geodesic(b, 2, -1), Ld = random_geodesic(d, 2, -1);
  EXPECT_TRUE(same_representative(La, Lb, 0.0));
  EXPECT_FALSE(same_geodesic(La, Ld));
}
