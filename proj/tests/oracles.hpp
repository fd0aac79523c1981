#pragma once

// Closed-form reference solutions built from characteristic roots, kept
// separate from the library's matrix-exponential path.

#include <manifold_descent/dynamics.hpp>

#include <cmath>
#include <complex>
#include <utility>

namespace oracle {

using manifold_descent::Family;
using manifold_descent::MethodSpec;

// Along an eigen-direction of A with curvature a, every second-order family
// reduces to x'' + damping x' + stiffness x = 0.
struct Modal {
  double damping = 0.0;
  double stiffness = 0.0;
};

inline Modal modal(const MethodSpec& m, double a) {
  switch (m.family) {
    case Family::HeavyBall: return {0.0, a};
    case Family::HBF: return {m.lambda, a};
    case Family::PnI: return {m.beta * a + m.alpha, m.alpha * m.beta * a};
    case Family::Proposed: return {m.beta * a + 2.0 * m.alpha, (1.0 + m.alpha * m.beta) * a};
    case Family::NagSc: {
      const double al = std::sqrt(m.mu);
      const double be = std::sqrt(m.s);
      return {be * a + 2.0 * al, (1.0 + al * be) * a};
    }
    case Family::TripleMomentum: {
      const double c = 1.0 + std::sqrt(m.mu * m.s);
      return {2.0 * std::sqrt(m.mu) + m.gamma * c * std::sqrt(m.s) * a, c * a};
    }
    case Family::GdFlow: break;
  }
  return {};
}

inline std::pair<std::complex<double>, std::complex<double>> roots(double damping, double stiffness) {
  const std::complex<double> disc = std::sqrt(std::complex<double>(damping * damping - 4.0 * stiffness));
  return {(-damping + disc) / 2.0, (-damping - disc) / 2.0};
}

// Position and velocity at time t for x'' + d x' + k x = 0.
inline std::pair<double, double> oscillator(double d, double k, double x0, double v0, double t) {
  const double disc = d * d - 4.0 * k;
  if (std::abs(disc) <= 1e-14 * std::max(1.0, d * d)) {
    const double r = -d / 2.0;
    const double c = v0 - r * x0;
    const double e = std::exp(r * t);
    return {(x0 + c * t) * e, (r * (x0 + c * t) + c) * e};
  }
  const auto [r1, r2] = roots(d, k);
  const std::complex<double> c1 = (v0 - r2 * x0) / (r1 - r2);
  const std::complex<double> c2 = x0 - c1;
  const std::complex<double> e1 = std::exp(r1 * t);
  const std::complex<double> e2 = std::exp(r2 * t);
  return {(c1 * e1 + c2 * e2).real(), (c1 * r1 * e1 + c2 * r2 * e2).real()};
}

// Diagonal quadratic ½ xᵀ diag(a) x: per-coordinate exact state.
inline manifold_descent::PhaseState diagonal_solution(const MethodSpec& m, const Eigen::VectorXd& a,
                                                      const manifold_descent::PhaseState& x0,
                                                      double t) {
  manifold_descent::PhaseState out;
  out.x1.resize(a.size());
  if (m.family == Family::GdFlow) {
    for (Eigen::Index i = 0; i < a.size(); ++i) out.x1(i) = x0.x1(i) * std::exp(-a(i) * t);
    return out;
  }
  out.x2.resize(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const Modal md = modal(m, a(i));
    const double v0 = x0.x2.size() ? x0.x2(i) : 0.0;
    const auto [x, v] = oscillator(md.damping, md.stiffness, x0.x1(i), v0, t);
    out.x1(i) = x;
    out.x2(i) = v;
  }
  return out;
}

}  // namespace oracle
