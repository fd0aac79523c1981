#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>

namespace manifold_descent {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ObjectiveKind { UnitQuadratic, SpdQuadratic, ShiftedQuadratic };

std::string_view to_string(ObjectiveKind kind);
ObjectiveKind objective_kind_from_string(std::string_view name);

/// Strong-convexity modulus and gradient Lipschitz constant, 0 < mu <= L.
struct ConvexityParams {
  double mu = 1.0;
  double L = 1.0;
};

/// Smooth strongly convex quadratic f(x) = 1/2 x^T A x + b^T x.
///
/// Immutable after construction. The factories validate that A is exactly
/// symmetric and positive definite, and precompute the spectrum bounds and
/// the unique minimizer, so every downstream consumer sees consistent (mu, L).
class Objective {
 public:
  static Objective unit_quadratic(Eigen::Index dim);
  static Objective spd_quadratic(Matrix A);
  static Objective shifted_quadratic(Matrix A, Vector b);

  [[nodiscard]] ObjectiveKind kind() const noexcept { return kind_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return dim_; }
  [[nodiscard]] const Matrix& matrix() const noexcept { return A_; }
  [[nodiscard]] const Vector& offset() const noexcept { return b_; }

  [[nodiscard]] double value(const Vector& x) const;
  [[nodiscard]] Vector gradient(const Vector& x) const;
  /// Hessian applied to v. The Hessian is never materialized for callers.
  [[nodiscard]] Vector hessian_vec(const Vector& x, const Vector& v) const;

  [[nodiscard]] ConvexityParams convexity_params() const noexcept { return params_; }
  [[nodiscard]] const Vector& minimizer() const noexcept { return xstar_; }
  [[nodiscard]] double min_value() const noexcept { return fstar_; }

  /// Copy whose hessian_vec is identically zero. Value and gradient are
  /// unchanged. Used to reduce Hessian-damped families to their
  /// curvature-free counterparts.
  [[nodiscard]] Objective without_curvature() const;
  [[nodiscard]] bool curvature_suppressed() const noexcept { return no_curvature_; }

 private:
  Objective(ObjectiveKind kind, Matrix A, Vector b);
  void require_dim(const Vector& x, const char* what) const;

  ObjectiveKind kind_;
  Eigen::Index dim_;
  Matrix A_;
  Vector b_;
  ConvexityParams params_;
  Vector xstar_;
  double fstar_ = 0.0;
  bool no_curvature_ = false;
};

struct DerivativeCheck {
  double max_rel_err_grad = 0.0;
  double max_rel_err_hvp = 0.0;
  // Set when the reference vector was zero and the error is absolute.
  bool grad_absolute = false;
  bool hvp_absolute = false;
};

/// Central finite differences of value against gradient, and of gradient
/// against hessian_vec along every coordinate direction.
DerivativeCheck check_derivatives(const Objective& obj, const Vector& x, double h);

}  // namespace manifold_descent
