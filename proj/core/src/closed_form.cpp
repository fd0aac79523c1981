#include "manifold_descent/integrate.hpp"

#include <cmath>

namespace manifold_descent {

namespace {

struct LinearCoefficients {
  double hessian_damping;   // multiplies H x2
  double viscous_damping;   // multiplies x2
  double gradient_gain;     // multiplies grad f
};

LinearCoefficients coefficients(const MethodSpec& m) {
  switch (m.family) {
    case Family::HeavyBall: return {0.0, 0.0, 1.0};
    case Family::HBF: return {0.0, m.lambda, 1.0};
    case Family::PnI: return {m.beta, m.alpha, m.alpha * m.beta};
    case Family::Proposed: return {m.beta, 2.0 * m.alpha, 1.0 + m.alpha * m.beta};
    case Family::NagSc: {
      const double c = 1.0 + std::sqrt(m.mu * m.s);
      return {std::sqrt(m.s), 2.0 * std::sqrt(m.mu), c};
    }
    case Family::TripleMomentum: {
      const double c = 1.0 + std::sqrt(m.mu * m.s);
      return {m.gamma * c * std::sqrt(m.s), 2.0 * std::sqrt(m.mu), c};
    }
    case Family::GdFlow: break;
  }
  return {0.0, 0.0, 1.0};
}

double one_norm(const Matrix& M) { return M.cwiseAbs().colwise().sum().maxCoeff(); }

}  // namespace

Matrix system_matrix(const MethodSpec& method, const Objective& obj) {
  method.validate();
  const Eigen::Index n = obj.dim();
  const Matrix& A = obj.matrix();
  if (method.family == Family::GdFlow) return -A;

  const LinearCoefficients c = coefficients(method);
  const Matrix curvature = obj.curvature_suppressed() ? Matrix::Zero(n, n) : A;
  Matrix M = Matrix::Zero(2 * n, 2 * n);
  M.topRightCorner(n, n) = Matrix::Identity(n, n);
  M.bottomLeftCorner(n, n) = -c.gradient_gain * A;
  M.bottomRightCorner(n, n) =
      -c.viscous_damping * Matrix::Identity(n, n) - c.hessian_damping * curvature;
  return M;
}

Matrix matrix_exponential(const Matrix& M) {
  if (M.rows() != M.cols()) throw InputError("matrix exponential needs a square matrix");
  if (!M.allFinite()) throw NumericError("matrix exponential of a non-finite matrix");
  const Eigen::Index n = M.rows();

  // Scale so that ||M / 2^s||_1 <= 1/2, then the Taylor tail after k terms is
  // below 2^-(k+1)/(k+1)!, which reaches double precision by k = 18.
  const double norm = one_norm(M);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled = M / std::ldexp(1.0, squarings);

  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
    if (one_norm(term) <= 1e-18 * one_norm(result)) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

PhaseState closed_form_quadratic(const MethodSpec& method, const Objective& obj,
                                 const PhaseState& x0, double t) {
  const Eigen::Index n = obj.dim();
  if (x0.x1.size() != n) throw InputError("initial x1 does not match objective dimension");
  if (!(t >= 0.0)) throw InputError("closed form needs t >= 0");

  const Vector& xstar = obj.minimizer();
  const Matrix E = matrix_exponential(system_matrix(method, obj) * t);
  PhaseState out;
  if (method.family == Family::GdFlow) {
    out.x1 = xstar + E * (x0.x1 - xstar);
    return out;
  }
  Vector z(2 * n);
  z.head(n) = x0.x1 - xstar;
  if (x0.x2.size() == 0) {
    z.tail(n).setZero();
  } else if (x0.x2.size() == n) {
    z.tail(n) = x0.x2;
  } else {
    throw InputError("initial x2 does not match objective dimension");
  }
  const Vector zt = E * z;
  out.x1 = xstar + zt.head(n);
  out.x2 = zt.tail(n);
  return out;
}

}  // namespace manifold_descent
