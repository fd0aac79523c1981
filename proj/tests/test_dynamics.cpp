#include "oracles.hpp"

#include <manifold_descent/dynamics.hpp>
#include <manifold_descent/errors.hpp>
#include <manifold_descent/integrate.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace manifold_descent;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

PhaseState st(std::initializer_list<double> x1, std::initializer_list<double> x2) {
  return {vec(x1), vec(x2)};
}

PhaseState random_state(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  PhaseState s{Vector(n), Vector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    s.x1(i) = u(rng);
    s.x2(i) = u(rng);
  }
  return s;
}

const Objective kUnit = Objective::unit_quadratic(1);
const Objective kDiag = Objective::spd_quadratic(vec({1, 4}).asDiagonal());

}  // namespace

TEST(Rhs, Examples) {
  auto d = rhs(MethodSpec::proposed(1.0, 0.9), kUnit, st({1}, {0}));
  EXPECT_EQ(d.x1, vec({0}));
  EXPECT_DOUBLE_EQ(d.x2(0), -1.9);

  d = rhs(MethodSpec::gd_flow(), kUnit, PhaseState{vec({3}), Vector()});
  EXPECT_EQ(d.x1, vec({-3}));
  EXPECT_EQ(d.x2.size(), 0);

  d = rhs(MethodSpec::pni(1.0, 0.9), kUnit, st({1}, {1}));
  EXPECT_DOUBLE_EQ(d.x2(0), -2.8);
}

TEST(Rhs, Errors) {
  EXPECT_THROW(rhs(MethodSpec::proposed(1, 0.9), kUnit, PhaseState{vec({1}), Vector()}), InputError);
  EXPECT_THROW(rhs(MethodSpec::proposed(1, 0.9), kUnit, st({1, 2}, {0, 0})), InputError);
  EXPECT_THROW(rhs(MethodSpec::proposed(1, 0.9), kUnit, st({NAN}, {0})), NumericError);
  EXPECT_THROW(rhs(MethodSpec::heavy_ball(), kDiag, st({1, 2}, {0})), InputError);
}

TEST(Rhs, NagScMatchesProposedExactly) {
  std::mt19937_64 rng(5);
  const auto nag = MethodSpec::nag_sc(1.0, 0.81);
  const auto prop = MethodSpec::proposed(1.0, 0.9);
  for (const Objective* obj : {&kUnit, &kDiag}) {
    for (int k = 0; k < 100; ++k) {
      const PhaseState s = random_state(rng, obj->dim());
      const PhaseState a = rhs(nag, *obj, s);
      const PhaseState b = rhs(prop, *obj, s);
      EXPECT_EQ(a.x1, b.x1);
      EXPECT_EQ(a.x2, b.x2);
    }
  }
}

TEST(Rhs, ProposedWithoutCurvatureIsDampedHeavyBall) {
  // x'' + 2 alpha x' + (1 + alpha beta) grad f = 0
  std::mt19937_64 rng(6);
  const double alpha = 1.0;
  const double beta = 0.9;
  for (const Objective* obj : {&kUnit, &kDiag}) {
    const Objective flat = obj->without_curvature();
    for (int k = 0; k < 100; ++k) {
      const PhaseState s = random_state(rng, obj->dim());
      const PhaseState d = rhs(MethodSpec::proposed(alpha, beta), flat, s);
      const Vector expected = -(2.0 * alpha) * s.x2 - (1.0 + alpha * beta) * obj->gradient(s.x1);
      EXPECT_LE((d.x2 - expected).norm(), 1e-14 * (1.0 + expected.norm()));
    }
  }
}

TEST(Rhs, TripleMomentumReducesToNagSc) {
  std::mt19937_64 rng(7);
  const double mu = 1.0;
  const double s = 0.81;
  const double gamma = 1.0 / (1.0 + std::sqrt(mu * s));
  for (const Objective* obj : {&kUnit, &kDiag}) {
    for (int k = 0; k < 100; ++k) {
      const PhaseState x = random_state(rng, obj->dim());
      const Vector tm = rhs(MethodSpec::triple_momentum(mu, s, gamma), *obj, x).x2;
      const Vector nag = rhs(MethodSpec::nag_sc(mu, s), *obj, x).x2;
      EXPECT_LE((tm - nag).norm(), 1e-13 * (1.0 + nag.norm()));
    }
  }
}

TEST(Rhs, EquilibriumIsFixedPoint) {
  const Objective shifted = Objective::shifted_quadratic(vec({1, 4}).asDiagonal(), vec({1, -2}));
  for (Family f : kAllFamilies) {
    MethodSpec m;
    m.family = f;
    PhaseState eq{shifted.minimizer(), is_second_order(f) ? Vector(Vector::Zero(2)) : Vector()};
    const PhaseState d = rhs(m, shifted, eq);
    EXPECT_LT(d.x1.norm(), 1e-14) << to_string(f);
    if (is_second_order(f)) EXPECT_LT(d.x2.norm(), 1e-14) << to_string(f);
  }
}

TEST(Rhs, Superposition) {
  std::mt19937_64 rng(8);
  for (const Objective* obj : {&kUnit, &kDiag}) {
    for (int k = 0; k < 100; ++k) {
      const PhaseState s = random_state(rng, obj->dim());
      for (double alpha : {0.5, 1.0, 10.0}) {
        for (double beta : {0.3, 0.9}) {
          const Vector prop = rhs(MethodSpec::proposed(alpha, beta), *obj, s).x2;
          const Vector pni = rhs(MethodSpec::pni(alpha, beta), *obj, s).x2;
          EXPECT_LE((prop - pni - control_transversal(*obj, s, alpha)).norm(), 1e-12 * (1.0 + prop.norm()));
          EXPECT_EQ(pni, control_pni(*obj, s, alpha, beta));
        }
      }
    }
  }
}

TEST(Controls, Examples) {
  EXPECT_DOUBLE_EQ(control_pni(kUnit, st({1}, {1}), 1.0, 0.9)(0), -2.8);
  const PhaseState on = st({2}, {-1.8});
  EXPECT_DOUBLE_EQ(control_pni(kUnit, on, 1.0, 0.9)(0), -0.9 * -1.8);
  EXPECT_EQ(control_pni(kUnit, st({0}, {0}), 1.0, 0.9), vec({0}));

  EXPECT_DOUBLE_EQ(control_transversal(kUnit, st({1}, {0}), 1.0)(0), -1.0);
  EXPECT_EQ(control_transversal(kUnit, st({0}, {0}), 1.0), vec({0}));
  const double sum = control_pni(kUnit, st({1}, {0}), 1.0, 0.9)(0) + control_transversal(kUnit, st({1}, {0}), 1.0)(0);
  EXPECT_DOUBLE_EQ(sum, rhs(MethodSpec::proposed(1.0, 0.9), kUnit, st({1}, {0})).x2(0));
}

TEST(Manifold, ResidualAndStorage) {
  const PhaseState on{vec({1, -2}), -0.9 * kDiag.gradient(vec({1, -2}))};
  EXPECT_LT(manifold_residual(kDiag, on, 0.9).norm(), 1e-15);
  EXPECT_EQ(storage(kDiag, on, 0.9), 0.0);
  EXPECT_DOUBLE_EQ(manifold_residual(kUnit, st({1}, {0}), 0.9)(0), 0.9);
  EXPECT_EQ(manifold_residual(kUnit, st({0}, {0}), 0.9), vec({0}));
  EXPECT_DOUBLE_EQ(storage(kUnit, st({1}, {0}), 0.9), 0.405);
  EXPECT_DOUBLE_EQ(storage(kUnit, st({2}, {0}), 0.9), 4.0 * storage(kUnit, st({1}, {0}), 0.9));
}

TEST(Lyapunov, Examples) {
  EXPECT_EQ(lyapunov_basic(kUnit, st({0}, {0}), 0.0), 0.0);
  EXPECT_DOUBLE_EQ(lyapunov_basic(kUnit, st({1}, {1}), 0.0), 1.0);
  EXPECT_EQ(lyapunov_exp(kUnit, st({0}, {0}), vec({0}), 0.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(lyapunov_exp(kUnit, st({1}, {0}), vec({0}), 0.0, 1.0), 1.0);
}

TEST(Lyapunov, BasicDerivativeAlongTransversalFlow) {
  // u2-only system: x'' = -alpha x' - grad f, so dV/dt = -alpha |x'|^2.
  const double alpha = 1.0;
  const MethodSpec m = MethodSpec::hbf(alpha);
  const double h = 1e-4;
  PhaseState prev{vec({1, -0.5}), vec({0.3, 0.2})};
  for (int k = 0; k < 50; ++k) {
    const PhaseState cur = step(Scheme::Rk4, m, kDiag, prev, h);
    const PhaseState next = step(Scheme::Rk4, m, kDiag, cur, h);
    const double dv = (lyapunov_basic(kDiag, next, 0.0) - lyapunov_basic(kDiag, prev, 0.0)) / (2 * h);
    EXPECT_NEAR(dv, -alpha * cur.x2.squaredNorm(), 1e-6);
    for (int j = 0; j < 100; ++j) prev = step(Scheme::Rk4, m, kDiag, prev, 1e-3);
  }
}

TEST(Lyapunov, ExpNonincreasingAlongProposed) {
  IntegratorConfig cfg;
  const Trajectory t = simulate(MethodSpec::proposed(1.0, 0.9), kUnit, st({1}, {0}), cfg);
  for (std::size_t k = 1; k < t.size(); ++k) EXPECT_LE(t.lyap_exp[k], t.lyap_exp[k - 1] + 1e-9);
}

TEST(SelectParams, Examples) {
  auto p = select_params(1.0, 0.81);
  EXPECT_DOUBLE_EQ(p.alpha, 1.0);
  EXPECT_DOUBLE_EQ(p.beta, 0.9);
  p = select_params(4.0, 0.25);
  EXPECT_DOUBLE_EQ(p.alpha, 2.0);
  EXPECT_DOUBLE_EQ(p.beta, 0.5);
  p = select_params(1.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(p.beta, 1.0);
  EXPECT_FALSE(p.warning.has_value());
  p = select_params(1.0, 0.5, 4.0);
  EXPECT_TRUE(p.warning.has_value());
  EXPECT_DOUBLE_EQ(p.beta, std::sqrt(0.5));
  EXPECT_THROW(select_params(0.0, 0.5), InputError);
  EXPECT_THROW(select_params(1.0, -0.5), InputError);
}

TEST(MethodSpec, NamesAndValidation) {
  for (Family f : kAllFamilies) EXPECT_EQ(family_from_string(to_string(f)), f);
  EXPECT_EQ(family_from_string("Nag_Sc"), Family::NagSc);
  EXPECT_EQ(family_from_string("tm"), Family::TripleMomentum);
  EXPECT_THROW(family_from_string("adam"), InputError);
  EXPECT_THROW(MethodSpec::proposed(-1.0, 0.9).validate(), InputError);
  EXPECT_THROW(MethodSpec::pni(1.0, 0.0).validate(), InputError);
  EXPECT_THROW(MethodSpec::hbf(-1.0).validate(), InputError);
  EXPECT_EQ(MethodSpec::proposed(1.0, 0.9).display_label(), "proposed(alpha=1,beta=0.9)");
  EXPECT_DOUBLE_EQ(MethodSpec::nag_sc(4.0, 0.25).effective_alpha(), 2.0);
  EXPECT_DOUBLE_EQ(MethodSpec::nag_sc(4.0, 0.25).effective_beta(), 0.5);
}

TEST(Oracle, ProposedRootsAreMinusOneAndMinusOnePointNine) {
  const auto md = oracle::modal(MethodSpec::proposed(1.0, 0.9), 1.0);
  const auto [r1, r2] = oracle::roots(md.damping, md.stiffness);
  EXPECT_NEAR(r1.real(), -1.0, 1e-14);
  EXPECT_NEAR(r2.real(), -1.9, 1e-14);
  EXPECT_EQ(r1.imag(), 0.0);
}
