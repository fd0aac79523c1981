#include <manifold_descent/errors.hpp>
#include <manifold_descent/objective.hpp>

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

Matrix diag(std::initializer_list<double> xs) { return vec(xs).asDiagonal(); }

Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 3.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

std::vector<Objective> builtins() {
  Matrix B(3, 3);
  B << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
  return {Objective::unit_quadratic(1), Objective::unit_quadratic(3),
          Objective::spd_quadratic(diag({1, 4})), Objective::spd_quadratic(B),
          Objective::shifted_quadratic(B, vec({1, -2, 0.5}))};
}

}  // namespace

TEST(Objective, ValueExamples) {
  EXPECT_DOUBLE_EQ(Objective::unit_quadratic(1).value(vec({2})), 2.0);
  EXPECT_DOUBLE_EQ(Objective::unit_quadratic(2).value(vec({0, 0})), 0.0);
  EXPECT_DOUBLE_EQ(Objective::spd_quadratic(diag({1, 4})).value(vec({1, 1})), 2.5);
}

TEST(Objective, GradientExamples) {
  EXPECT_EQ(Objective::unit_quadratic(1).gradient(vec({3})), vec({3}));
  EXPECT_EQ(Objective::spd_quadratic(diag({1, 4})).gradient(vec({1, 1})), vec({1, 4}));
  for (const Objective& obj : builtins()) {
    EXPECT_LT(obj.gradient(obj.minimizer()).norm(), 1e-12);
  }
}

TEST(Objective, HessianVecExamples) {
  EXPECT_EQ(Objective::unit_quadratic(1).hessian_vec(vec({-7}), vec({5})), vec({5}));
  const auto obj = Objective::spd_quadratic(diag({1, 4}));
  EXPECT_EQ(obj.hessian_vec(vec({0.2, 9}), vec({1, 1})), vec({1, 4}));
  EXPECT_EQ(obj.hessian_vec(vec({0.2, 9}), vec({0, 0})), vec({0, 0}));
}

TEST(Objective, ConvexityParams) {
  auto p = Objective::unit_quadratic(2).convexity_params();
  EXPECT_DOUBLE_EQ(p.mu, 1.0);
  EXPECT_DOUBLE_EQ(p.L, 1.0);
  p = Objective::spd_quadratic(diag({1, 4})).convexity_params();
  EXPECT_NEAR(p.mu, 1.0, 1e-14);
  EXPECT_NEAR(p.L, 4.0, 1e-14);
  p = Objective::spd_quadratic(diag({0.5, 10})).convexity_params();
  EXPECT_NEAR(p.mu, 0.5, 1e-14);
  EXPECT_NEAR(p.L, 10.0, 1e-14);
}

TEST(Objective, ShiftedMinimizer) {
  const auto obj = Objective::shifted_quadratic(diag({2, 4}), vec({2, -4}));
  EXPECT_NEAR((obj.minimizer() - vec({-1, 1})).norm(), 0.0, 1e-15);
  EXPECT_NEAR(obj.min_value(), -3.0, 1e-14);
  EXPECT_NEAR(obj.value(obj.minimizer()), obj.min_value(), 1e-14);
}

TEST(Objective, RejectsBadInput) {
  EXPECT_THROW(Objective::unit_quadratic(0), InputError);
  Matrix asym(2, 2);
  asym << 1, 0.5, 0, 1;
  EXPECT_THROW(Objective::spd_quadratic(asym), InputError);
  EXPECT_THROW(Objective::spd_quadratic(diag({1, -1})), InputError);
  EXPECT_THROW(Objective::spd_quadratic(diag({1, 0})), InputError);
  EXPECT_THROW(Objective::shifted_quadratic(diag({1, 1}), vec({1})), InputError);
  const auto obj = Objective::unit_quadratic(2);
  EXPECT_THROW((void)obj.value(vec({1})), InputError);
  EXPECT_THROW((void)obj.gradient(vec({1, 2, 3})), InputError);
  EXPECT_THROW((void)obj.hessian_vec(vec({1, 2}), vec({1})), InputError);
}

TEST(Objective, KindNames) {
  for (auto k : {ObjectiveKind::UnitQuadratic, ObjectiveKind::SpdQuadratic, ObjectiveKind::ShiftedQuadratic}) {
    EXPECT_EQ(objective_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(objective_kind_from_string("rosenbrock"), InputError);
}

TEST(Objective, WithoutCurvature) {
  const auto obj = Objective::spd_quadratic(diag({1, 4})).without_curvature();
  EXPECT_TRUE(obj.curvature_suppressed());
  EXPECT_EQ(obj.hessian_vec(vec({1, 1}), vec({3, 3})), vec({0, 0}));
  EXPECT_EQ(obj.gradient(vec({1, 1})), vec({1, 4}));
}

TEST(CheckDerivatives, Examples) {
  auto r = check_derivatives(Objective::unit_quadratic(1), vec({1.7}), 1e-5);
  EXPECT_LT(r.max_rel_err_grad, 1e-8);
  r = check_derivatives(Objective::spd_quadratic(diag({1, 4})), vec({0.3, -0.2}), 1e-5);
  EXPECT_LT(r.max_rel_err_hvp, 1e-8);
  r = check_derivatives(Objective::unit_quadratic(2), vec({0, 0}), 1e-5);
  EXPECT_TRUE(r.grad_absolute);
  EXPECT_LT(r.max_rel_err_grad, 1e-8);
  EXPECT_LT(r.max_rel_err_hvp, 1e-8);
}

TEST(CheckDerivatives, RejectsBadStep) {
  EXPECT_THROW(check_derivatives(Objective::unit_quadratic(1), vec({1}), 0.0), InputError);
  EXPECT_THROW(check_derivatives(Objective::unit_quadratic(1), vec({NAN}), 1e-5), InputError);
}

TEST(ObjectiveProperty, StrongConvexitySandwich) {
  std::mt19937_64 rng(11);
  for (const Objective& obj : builtins()) {
    const double mu = obj.convexity_params().mu;
    for (int k = 0; k < 200; ++k) {
      const Vector x = random_vector(rng, obj.dim());
      const Vector y = random_vector(rng, obj.dim());
      const double lower = obj.value(x) + obj.gradient(x).dot(y - x) + 0.5 * mu * (y - x).squaredNorm();
      EXPECT_GE(obj.value(y), lower - 1e-12);
    }
  }
}

TEST(ObjectiveProperty, LipschitzGradient) {
  std::mt19937_64 rng(12);
  for (const Objective& obj : builtins()) {
    const double L = obj.convexity_params().L;
    for (int k = 0; k < 200; ++k) {
      const Vector x = random_vector(rng, obj.dim());
      const Vector y = random_vector(rng, obj.dim());
      EXPECT_LE((obj.gradient(x) - obj.gradient(y)).norm(), L * (x - y).norm() + 1e-12);
    }
  }
}

TEST(ObjectiveProperty, HessianVecLinear) {
  std::mt19937_64 rng(13);
  for (const Objective& obj : builtins()) {
    for (int k = 0; k < 50; ++k) {
      const Vector x = random_vector(rng, obj.dim());
      const Vector v = random_vector(rng, obj.dim());
      const Vector w = random_vector(rng, obj.dim());
      const double a = 1.3;
      const double b = -0.4;
      const Vector lhs = obj.hessian_vec(x, a * v + b * w);
      const Vector rhs = a * obj.hessian_vec(x, v) + b * obj.hessian_vec(x, w);
      EXPECT_LE((lhs - rhs).norm(), 1e-12 * (1.0 + rhs.norm()));
    }
  }
}

TEST(ObjectiveProperty, FiniteDifferencesOnRandomPoints) {
  std::mt19937_64 rng(14);
  for (const Objective& obj : builtins()) {
    for (int k = 0; k < 100; ++k) {
      const auto r = check_derivatives(obj, random_vector(rng, obj.dim()), 1e-5);
      EXPECT_LT(r.max_rel_err_grad, 1e-6);
      EXPECT_LT(r.max_rel_err_hvp, 1e-6);
    }
  }
}
