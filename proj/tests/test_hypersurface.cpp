#include <gtest/gtest.h>

#include <geoline/suites.hpp>

#include "oracles.hpp"

using namespace geoline;
using namespace geoline::suites;

namespace {

std::vector<Vec> probe(const HypersurfacePatch& P, int per_axis) {
  return P.sample_points(std::vector<int>(P.n, per_axis));
}

// the computed principal curvatures match the oracle up to the normal orientation
void expect_principal(const Vec& k, std::vector<double> want, double tol) {
  std::vector<double> neg;
  for (double w : want) neg.push_back(-w);
  std::sort(want.begin(), want.end());
  std::sort(neg.begin(), neg.end());
  double a = 0, b = 0;
  for (int i = 0; i < k.size(); ++i) {
    a = std::max(a, std::abs(k(i) - want[i]));
    b = std::max(b, std::abs(k(i) - neg[i]));
  }
  EXPECT_LT(std::min(a, b), tol) << k.transpose();
}

}  // namespace

TEST(Hypersurface, SpherePrincipalCurvatures) {
  for (int c : {-1, 1})
    for (int n : {2, 3}) {
      HypersurfacePatch P = make_sphere(c, 0.7, n);
      double k = oracle::sphere_k(c, 0.7);
      for (const Vec& u : probe(P, 3)) {
        PrincipalData D = shape_operator(P, u);
        expect_principal(D.k, std::vector<double>(n, k), 1e-8);
        EXPECT_NEAR(std::abs(D.K), std::pow(k, n), 1e-7);
        EXPECT_LT(D.self_adjoint_residual, 1e-10);
      }
    }
}

TEST(Hypersurface, TubePrincipalCurvatures) {
  for (int c : {-1, 1}) {
    HypersurfacePatch P = make_tube(c, 0.5);
    auto [k1, k2] = oracle::tube_k(c, 0.5);
    for (const Vec& u : probe(P, 4)) expect_principal(shape_operator(P, u).k, {k1, k2}, 1e-8);
  }
}

TEST(Hypersurface, TubeOnTheCentralCircle) {
  // regression: det of a dual matrix whose value has a zero pivot
  HypersurfacePatch P = make_tube(-1, 0.5);
  Vec u(2);
  u << 0.0, 0.3;
  EXPECT_NO_THROW(gauss_mean_curvature(P, u));
  EXPECT_NO_THROW(hamiltonian_residual(P, u));
}

TEST(Hypersurface, ConstantCurvatureExamplesAreMinimalLagrangian) {
  for (int c : {-1, 1})
    for (HypersurfacePatch P : {make_sphere(c), make_tube(c)}) {
      auto pts = probe(P, 4);
      EXPECT_LT(lagrangian_residual(P, pts), 1e-8);
      for (const Vec& u : pts) {
        GaussMeanCurvature R = gauss_mean_curvature(P, u);
        EXPECT_LT(tangent_norm(R.H_direct), 1e-5) << P.name;
        EXPECT_LT(R.jet.decomposition_residual, 1e-8);
      }
    }
}

TEST(Hypersurface, BumpySphereMeanCurvatureFormula) {
  for (int c : {-1, 1}) {
    HypersurfacePatch P = make_bumpy_sphere(c);
    auto pts = probe(P, 4);
    EXPECT_LT(lagrangian_residual(P, pts), 1e-6);
    double hmax = 0;
    for (const Vec& u : pts) {
      GaussMeanCurvature R = gauss_mean_curvature(P, u);
      hmax = std::max(hmax, tangent_norm(R.H_direct));
      EXPECT_LT(R.discrepancy, 1e-3);
      TriSymmetryCheck T = tri_symmetry(P, R);
      EXPECT_LT(T.symmetry, 1e-8);
      EXPECT_LT(T.principal_identity, 1e-6);
      EXPECT_LT(T.induced_metric, 1e-8);
    }
    EXPECT_GT(hmax, 1e-4);
    MaslovDiagnostics M = maslov_diagnostics(P, pts);
    EXPECT_LT(M.exactness, 1e-4);
  }
}

TEST(Hypersurface, RotatedNormalIsNotLagrangian) {
  HypersurfacePatch P = make_sphere(1);
  P.rotate_normal = 0.3;
  EXPECT_GT(lagrangian_residual(P, probe(P, 3)), 1e-3);
}

TEST(Hypersurface, VolumeIdentityAndSphereClosedForm) {
  for (int c : {-1, 1}) {
    HypersurfacePatch P = make_sphere(c);
    FunctionalVolume V = functional_and_volume(P, 1e-7);
    EXPECT_LT(V.identity_residual, 1e-6);
    double F = closed_form_F_sphere(c, P.r);
    EXPECT_NEAR(F, oracle::sphere_F(c, P.r), 1e-15);
    EXPECT_LT(std::abs(V.F - F) / F, 1e-6);
  }
}

TEST(Hypersurface, SmallVariationOfTheSphere) {
  HypersurfacePatch P = make_sphere(1);
  Bump b;
  b.kind = Bump::Fourier;
  b.modes = {{0.0, 1.0, 0.02, -0.01}};
  VariationDerivative V = hamiltonian_variation_derivative(P, b, 1e-3, {128, 32});
  // the sphere is critical for Hamiltonian variations
  EXPECT_LT(std::abs(V.dF) / V.F0, 1e-4);
  EXPECT_THROW(hamiltonian_variation_derivative(P, b, 1e-2, {16, 16}), Error);
}

TEST(Hypersurface, CorollaryOnBumpySphere) {
  HypersurfacePatch P = make_bumpy_sphere(1);
  double dmax = 0, cmax = 0, diff = 0;
  for (const Vec& u : probe(P, 3)) {
    HamiltonianResidual H = hamiltonian_residual(P, u);
    dmax = std::max(dmax, std::abs(H.divJH));
    cmax = std::max(cmax, std::abs(H.corollary));
    diff = std::max(diff, std::abs(H.divJH - H.corollary));
  }
  EXPECT_GT(dmax, 1e-4);
  EXPECT_LT(diff / std::max(dmax, cmax), 1e-3);
}

TEST(Hypersurface, PatchFromJson) {
  HypersurfacePatch P = patch_from_json(Json::parse(R"({"catalog":"tube","c":-1,"params":{"r":0.4},
      "grid":[{"min":-0.5,"max":0.5,"steps":8},{"min":0,"max":6.2,"steps":8}]})"));
  EXPECT_EQ(P.catalog, Catalog::Tube);
  EXPECT_EQ(P.c, -1);
  EXPECT_DOUBLE_EQ(P.r, 0.4);
  EXPECT_DOUBLE_EQ(P.grid[0].min, -0.5);
  HypersurfacePatch G = patch_from_json(
      Json::parse(R"({"catalog":"graph","params":{"kappa":[1,0.5],"tau":0.1},"grid":{"min":-0.1,"max":0.1,"steps":4}})"));
  EXPECT_DOUBLE_EQ(G.kappa[1], 0.5);
  EXPECT_DOUBLE_EQ(G.grid[1].max, 0.1);

  EXPECT_THROW(patch_from_json(Json::parse(R"({"catalog":"torus"})")), Error);
  EXPECT_THROW(patch_from_json(Json::parse(R"({"catalog":"sphere","c":0})")), Error);
  EXPECT_THROW(patch_from_json(Json::parse(R"({"catalog":"tube","n":3})")), Error);
  EXPECT_THROW(patch_from_json(Json::parse(R"({"catalog":"graph","params":{"kappa":[1]}})")), Error);
  EXPECT_THROW(patch_from_json(Json::parse(R"({"catalog":"sphere","grid":{"min":1,"max":0,"steps":4}})")), Error);
  EXPECT_THROW(load_patch("/nonexistent/patch.json"), Error);
}
