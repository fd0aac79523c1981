#include "manifold_descent/objective.hpp"

#include "manifold_descent/errors.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace manifold_descent {

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::UnitQuadratic: return "unit_quadratic";
    case ObjectiveKind::SpdQuadratic: return "spd_quadratic";
    case ObjectiveKind::ShiftedQuadratic: return "shifted_quadratic";
  }
  return "unknown";
}

ObjectiveKind objective_kind_from_string(std::string_view name) {
  if (name == "unit_quadratic") return ObjectiveKind::UnitQuadratic;
  if (name == "spd_quadratic") return ObjectiveKind::SpdQuadratic;
  if (name == "shifted_quadratic") return ObjectiveKind::ShiftedQuadratic;
  throw InputError("unknown objective kind '" + std::string(name) + "'");
}

Objective::Objective(ObjectiveKind kind, Matrix A, Vector b)
    : kind_(kind), dim_(A.rows()), A_(std::move(A)), b_(std::move(b)) {
  if (dim_ <= 0) throw InputError("objective dimension must be positive");
  if (A_.cols() != dim_) throw InputError("objective matrix must be square");
  if (b_.size() != dim_) throw InputError("objective offset length must equal dimension");
  if (!A_.allFinite() || !b_.allFinite()) throw InputError("objective data must be finite");
  for (Eigen::Index i = 0; i < dim_; ++i) {
    for (Eigen::Index j = i + 1; j < dim_; ++j) {
      if (A_(i, j) != A_(j, i)) throw InputError("objective matrix is not symmetric");
    }
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(A_, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericError("eigenvalue computation failed");
  params_.mu = eig.eigenvalues().minCoeff();
  params_.L = eig.eigenvalues().maxCoeff();
  if (!(params_.mu > 0.0)) throw InputError("objective matrix is not positive definite");

  Eigen::LLT<Matrix> llt(A_);
  if (llt.info() != Eigen::Success) throw InputError("objective matrix is not positive definite");
  xstar_ = llt.solve(-b_);
  fstar_ = 0.5 * b_.dot(xstar_);
}

Objective Objective::unit_quadratic(Eigen::Index dim) {
  if (dim <= 0) throw InputError("objective dimension must be positive");
  return Objective(ObjectiveKind::UnitQuadratic, Matrix::Identity(dim, dim), Vector::Zero(dim));
}

Objective Objective::spd_quadratic(Matrix A) {
  const auto n = A.rows();
  return Objective(ObjectiveKind::SpdQuadratic, std::move(A), Vector::Zero(n));
}

Objective Objective::shifted_quadratic(Matrix A, Vector b) {
  return Objective(ObjectiveKind::ShiftedQuadratic, std::move(A), std::move(b));
}

Objective Objective::without_curvature() const {
  Objective copy = *this;
  copy.no_curvature_ = true;
  return copy;
}

void Objective::require_dim(const Vector& x, const char* what) const {
  if (x.size() != dim_) {
    throw InputError(std::string(what) + " has length " + std::to_string(x.size()) +
                     ", objective dimension is " + std::to_string(dim_));
  }
}

double Objective::value(const Vector& x) const {
  require_dim(x, "x");
  switch (kind_) {
    case ObjectiveKind::UnitQuadratic: return 0.5 * x.squaredNorm();
    case ObjectiveKind::SpdQuadratic: return 0.5 * x.dot(A_ * x);
    case ObjectiveKind::ShiftedQuadratic: return 0.5 * x.dot(A_ * x) + b_.dot(x);
  }
  return 0.0;
}

Vector Objective::gradient(const Vector& x) const {
  require_dim(x, "x");
  switch (kind_) {
    case ObjectiveKind::UnitQuadratic: return x;
    case ObjectiveKind::SpdQuadratic: return A_ * x;
    case ObjectiveKind::ShiftedQuadratic: return A_ * x + b_;
  }
  return x;
}

Vector Objective::hessian_vec(const Vector& x, const Vector& v) const {
  require_dim(x, "x");
  require_dim(v, "v");
  if (no_curvature_) return Vector::Zero(dim_);
  if (kind_ == ObjectiveKind::UnitQuadratic) return v;
  return A_ * v;
}

namespace {

// ||approx - exact||_inf relative to ||exact||_inf, absolute when exact is zero.
double rel_err(const Vector& approx, const Vector& exact, bool& absolute) {
  const double err = (approx - exact).lpNorm<Eigen::Infinity>();
  const double scale = exact.lpNorm<Eigen::Infinity>();
  if (scale == 0.0) {
    absolute = true;
    return err;
  }
  return err / scale;
}

}  // namespace

DerivativeCheck check_derivatives(const Objective& obj, const Vector& x, double h) {
  if (!(h > 0.0)) throw InputError("finite-difference step must be positive");
  if (x.size() != obj.dim()) throw InputError("x has wrong dimension");
  if (!x.allFinite()) throw InputError("x must be finite");

  const Eigen::Index n = obj.dim();
  const Vector g = obj.gradient(x);
  Vector fd_grad(n);
  DerivativeCheck out;

  Vector xp = x;
  Vector xm = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    const double fp = obj.value(xp);
    const double fm = obj.value(xm);
    if (!std::isfinite(fp) || !std::isfinite(fm)) throw NumericError("non-finite objective value");
    fd_grad[i] = (fp - fm) / (2.0 * h);

    const Vector gp = obj.gradient(xp);
    const Vector gm = obj.gradient(xm);
    if (!gp.allFinite() || !gm.allFinite()) throw NumericError("non-finite gradient");
    const Vector fd_col = (gp - gm) / (2.0 * h);
    const Vector hv = obj.hessian_vec(x, Vector::Unit(n, i));
    bool abs_col = false;
    const double e = rel_err(fd_col, hv, abs_col);
    if (e > out.max_rel_err_hvp) out.max_rel_err_hvp = e;
    out.hvp_absolute = out.hvp_absolute || abs_col;

    xp[i] = x[i];
    xm[i] = x[i];
  }
  if (!g.allFinite()) throw NumericError("non-finite gradient");
  out.max_rel_err_grad = rel_err(fd_grad, g, out.grad_absolute);
  return out;
}

}  // namespace manifold_descent
