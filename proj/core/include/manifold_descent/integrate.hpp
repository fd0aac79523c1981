#pragma once

#include "manifold_descent/dynamics.hpp"
#include "manifold_descent/errors.hpp"
#include "manifold_descent/objective.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace manifold_descent {

enum class Scheme { Euler, Rk4 };

std::string_view to_string(Scheme scheme);
Scheme scheme_from_string(std::string_view name);

struct IntegratorConfig {
  Scheme scheme = Scheme::Rk4;
  double h = 1e-3;
  double t_max = 10.0;
  /// Stop once ||grad f(x1)|| <= grad_tol. Zero disables the check.
  double grad_tol = 0.0;
  int record_every = 1;

  void validate() const;
};

enum class PerturbDistribution { UniformBall, Gaussian };
enum class PerturbTarget { X1, X2, Both };

std::string_view to_string(PerturbDistribution d);
std::string_view to_string(PerturbTarget t);
PerturbDistribution distribution_from_string(std::string_view name);
PerturbTarget target_from_string(std::string_view name);

/// Additive kick applied after every accepted step. delta == 0 disables it.
struct PerturbationSpec {
  double delta = 0.0;
  PerturbDistribution distribution = PerturbDistribution::Gaussian;
  std::uint64_t seed = 0;
  PerturbTarget target = PerturbTarget::Both;
};

enum class Termination { GradTol, TMax, Divergence };
std::string_view to_string(Termination t);

/// Sampled solution of one simulate() call. All per-sample vectors are aligned;
/// entry 0 is the initial condition at t = 0.
///
/// psi_norms and storage_vals are NaN for the first-order GdFlow family.
struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  std::vector<double> f_vals;
  std::vector<double> grad_norms;
  std::vector<double> psi_norms;
  std::vector<double> storage_vals;
  std::vector<double> lyap_basic;
  std::vector<double> lyap_exp;
  MethodSpec method;
  Termination terminated_by = Termination::TMax;
  double f_star = 0.0;
  Vector x_star;
  std::size_t steps_taken = 0;

  [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
  [[nodiscard]] const PhaseState& final_state() const { return states.back(); }
};

/// Raised by step() when the update leaves the finite range.
class DivergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

using RhsFn = std::function<PhaseState(const PhaseState&)>;

/// One explicit Euler or classical RK4 step. Throws DivergenceError when
/// the result is not finite.
PhaseState step(Scheme scheme, const RhsFn& f, const PhaseState& state, double h);
PhaseState step(Scheme scheme, const MethodSpec& method, const Objective& obj,
                const PhaseState& state, double h);

/// Fixed-step integration from x0 until grad_tol, t_max, or divergence.
///
/// Second-order families start at rest when x0.x2 is empty. A state counts as
/// diverged when it has a non-finite component or norm above kDivergenceNorm;
/// the trajectory is then truncated instead of throwing.
Trajectory simulate(const MethodSpec& method, const Objective& obj, const PhaseState& x0,
                    const IntegratorConfig& config,
                    const std::optional<PerturbationSpec>& perturbation = std::nullopt);

inline constexpr double kDivergenceNorm = 1e12;

/// Linear system matrix of `method` on a quadratic objective, in coordinates
/// shifted to the minimizer: (x1 - x*, x2) for second-order families, x1 - x*
/// for GdFlow.
Matrix system_matrix(const MethodSpec& method, const Objective& obj);

/// exp(M) by scaling and squaring of a truncated Taylor series.
/// Relative accuracy is about 1e-12 for the small systems used here.
Matrix matrix_exponential(const Matrix& M);

/// Exact state at time t for a quadratic objective, where every family is linear.
PhaseState closed_form_quadratic(const MethodSpec& method, const Objective& obj,
                                 const PhaseState& x0, double t);

}  // namespace manifold_descent
