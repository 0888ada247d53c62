#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "tdcshell/errors.hpp"
#include "tdcshell/geometry.hpp"
#include "tdcshell/shell_mechanics.hpp"

#include "oracles.hpp"

using namespace tdcshell;
using namespace tdcshell::oracle;

TEST(Material, DerivedConstants) {
  const Material m{2.0e11, 0.3, 1.0, 0.01};
  EXPECT_DOUBLE_EQ(m.D_B(), 2.0e11 * 1e-6 / (12 * 0.91));
  EXPECT_DOUBLE_EQ(m.D_M(), 2.0e11 * 0.01 / 0.91);
  EXPECT_DOUBLE_EQ(m.D_shear(), 2.0e11 * 0.01 / 2.6);
  EXPECT_DOUBLE_EQ(m.mu(), 2.0e11 / 2.6);
  EXPECT_DOUBLE_EQ(m.lambda(), 2.0e11 * 0.3 / 0.91);
  EXPECT_NO_THROW(m.validate());
  EXPECT_THROW((Material{-1.0, 0.3, 1.0, 0.1}.validate()), ArgumentError);
  EXPECT_THROW((Material{1.0, 0.6, 1.0, 0.1}.validate()), ArgumentError);
  EXPECT_THROW((Material{1.0, 0.3, 1.0, 0.0}.validate()), ArgumentError);
}

TEST(ShellMechanics, FlatPlateLimits) {
  const auto plate = make_analytic(FlatPlate{});
  const SurfaceFrame f = frame_at(*plate, 0.4, 0.4, false);
  FieldPointState<double> s;
  s.grad_u_dir << 1.0, 2.0, 0.0, 3.0, 4.0, 0.0, 0.0, 0.0, 0.0;
  StrainState<double> e = strains(f, s);
  EXPECT_LT(e.eps_bend.norm(), 1e-15);
  EXPECT_LT(e.eps_shear.norm(), 1e-15);
  EXPECT_LT((e.eps_mem - sym(s.grad_u_dir)).norm(), 1e-15);

  FieldPointState<double> r;
  r.w = Vec3(0.3, -0.2, 0.0);
  e = strains(f, r);
  EXPECT_LT(e.eps_bend.norm(), 1e-15);
  EXPECT_LT(e.eps_mem.norm(), 1e-15);
  EXPECT_LT((e.eps_shear - sym((f.n * r.w.transpose()).eval())).norm(), 1e-15);
}

TEST(ShellMechanics, RigidTranslationOnCylinderIsStrainFree) {
  const auto geom = make_analytic(CylinderRoof{});
  const SurfaceFrame f = frame_at(*geom, 0.2, 0.7, false);
  FieldPointState<double> s;
  s.u = Vec3(1.0, -2.0, 0.5);
  const StrainState<double> e = strains(f, s);
  EXPECT_EQ(e.eps_mem.norm() + e.eps_bend.norm() + e.eps_shear.norm(), 0.0);
}

TEST(ShellMechanics, PureStretchOfPlate) {
  const auto plate = make_analytic(FlatPlate{});
  const SurfaceFrame f = frame_at(*plate, 0.5, 0.5, false);
  const Material mat{3.0, 0.25, 1.0, 0.2};
  FieldPointState<double> s;
  const double a = 1e-3;
  s.grad_u_dir(0, 0) = a;
  const StressResultants<double> r = stress_resultants(f, mat, s);
  EXPECT_NEAR(r.n_eff(0, 0), mat.D_M() * a, 1e-16);
  EXPECT_NEAR(r.n_eff(1, 1), mat.D_M() * 0.25 * a, 1e-16);
  EXPECT_NEAR(r.n_eff(2, 2), 0.0, 1e-16);
  EXPECT_EQ(r.m.norm(), 0.0);
  EXPECT_EQ(r.q.norm(), 0.0);
}

TEST(ShellMechanics, ZeroStateGivesZeroResultants) {
  const auto geom = make_analytic(FlowerShell{});
  const SurfaceFrame f = frame_at(*geom, 0.1, 0.2, false);
  const StressResultants<double> r = stress_resultants(f, Material{10.0, 0.3, 1.0, 0.1}, FieldPointState<double>{});
  EXPECT_EQ(r.m.norm() + r.n_eff.norm() + r.n_real.norm() + r.q.norm(), 0.0);
}

TEST(ShellMechanics, TensorFormMatchesComponentFormulas) {
  std::mt19937 gen(99);
  const Material mat{4.32e8, 0.3, 1.0, 0.25};
  const auto geoms = {make_analytic(CylinderRoof{}), make_analytic(HyperbolicParaboloid{}), make_analytic(FlowerShell{})};
  for (const auto& geom : geoms) {
    for (int k = 0; k < 100; ++k) {
      const ParamDomain d = geom->domain();
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      const SurfaceFrame f = frame_at(*geom, d.r0 + d.width_r() * uni(gen), d.s0 + d.width_s() * uni(gen), false);
      const FieldPointState<double> s = random_state(f, gen, false);
      const StressResultants<double> r = stress_resultants(f, mat, s);
      const ComponentResultants c = component_resultants(f, mat, s);
      const double sm = c.m.cwiseAbs().maxCoeff(), sn = c.n.cwiseAbs().maxCoeff(), sq = c.q.cwiseAbs().maxCoeff();
      EXPECT_LT((r.m - c.m).cwiseAbs().maxCoeff(), 1e-12 * sm);
      EXPECT_LT((r.n_eff - c.n).cwiseAbs().maxCoeff(), 1e-12 * sn);
      EXPECT_LT((r.q - c.q).cwiseAbs().maxCoeff(), 1e-12 * sq);
    }
  }
}

TEST(ShellMechanics, ResultantInvariants) {
  std::mt19937 gen(17);
  const Material mat{10.0, 0.3, 1.0, 0.1};
  const auto geom = make_analytic(FlowerShell{});
  for (int k = 0; k < 200; ++k) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const SurfaceFrame f = frame_at(*geom, uni(gen), uni(gen), false);
    const FieldPointState<double> s = random_state(f, gen);
    const StressResultants<double> r = stress_resultants(f, mat, s);
    const double sm = r.m.norm(), sn = r.n_eff.norm();
    EXPECT_LT((r.m - r.m.transpose()).norm(), 1e-12 * sm);
    EXPECT_LT((r.m * f.n).norm(), 1e-10 * sm);
    EXPECT_LT((r.n_eff * f.n).norm(), 1e-10 * sn);
    EXPECT_LT((f.P * r.q * f.P).norm(), 1e-10 * r.q.norm());
    EXPECT_LT((r.n_real - r.n_eff - f.H * r.m).norm(), 1e-12 * (sn + sm));
    // n_real has a zero eigenvalue: n_real * n = 0
    EXPECT_LT((r.n_real * f.n).norm(), 1e-10 * (sn + sm));
    const StrainState<double> e = strains(f, s);
    EXPECT_LT((f.P * e.eps_shear * f.P).norm(), 1e-12 * e.eps_shear.norm());
    // moment tensor has one zero eigenvalue
    Eigen::SelfAdjointEigenSolver<Mat3> es(r.m);
    const Vec3 ev = es.eigenvalues().cwiseAbs();
    EXPECT_LT(ev.minCoeff() / ev.maxCoeff(), 1e-8);
  }
}

TEST(ShellMechanics, ShearAngle) {
  std::mt19937 gen(23);
  const auto geom = make_analytic(HyperbolicParaboloid{});
  const SurfaceFrame f = frame_at(*geom, 0.1, -0.3, false);
  FieldPointState<double> s = random_state(f, gen);
  const Vec3 expected = s.w + s.grad_u_dir.transpose() * f.n;
  EXPECT_LT((shear_angle(f, s) - expected).norm(), 1e-15);
  EXPECT_LT(std::abs(shear_angle(f, s).dot(f.n)), 1e-10 * expected.norm());
  s.w = -s.grad_u_dir.transpose() * f.n;
  EXPECT_LT(shear_angle(f, s).norm(), 1e-15);
  FieldPointState<double> z;
  z.w = Vec3(1, 2, 3);
  EXPECT_EQ(shear_angle(f, z), z.w);
}

TEST(ShellMechanics, EnergyDensityIsNonNegative) {
  std::mt19937 gen(31);
  const Material mat{1.0, 0.45, 5.0 / 6.0, 0.3};
  const auto geom = make_analytic(CylinderRoof{});
  for (int k = 0; k < 500; ++k) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const SurfaceFrame f = frame_at(*geom, uni(gen), uni(gen), false);
    const EnergyDensity e = energy_density(f, mat, random_state(f, gen));
    EXPECT_GE(e.membrane, 0.0);
    EXPECT_GE(e.bending, 0.0);
    EXPECT_GE(e.shear, 0.0);
  }
}

TEST(ShellMechanics, JetAndDoubleEvaluationsAgree) {
  const auto geom = make_analytic(FlowerShell{});
  const FrameJet fj = frame_jet(geom->jet(0.3, 0.1));
  const SurfaceFrame f = frame_from_jet(fj, false);
  std::mt19937 gen(41);
  const FieldPointState<double> s = random_state(f, gen);
  FieldPointState<Jet> sj;
  for (int i = 0; i < 3; ++i) {
    sj.u[i] = s.u[i];
    sj.w[i] = s.w[i];
    for (int j = 0; j < 3; ++j) {
      sj.grad_u_dir(i, j) = s.grad_u_dir(i, j);
      sj.grad_w_dir(i, j) = s.grad_w_dir(i, j);
    }
  }
  const Material mat{10.0, 0.3, 1.0, 0.1};
  const auto rj = stress_resultants(fj, mat, sj);
  const auto rd = stress_resultants(f, mat, s);
  EXPECT_LT((values_of(rj.n_real) - rd.n_real).norm(), 1e-13 * rd.n_real.norm());
  EXPECT_LT((values_of(rj.q) - rd.q).norm(), 1e-13 * rd.q.norm());
}
