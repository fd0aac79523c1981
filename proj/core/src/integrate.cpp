#include "manifold_descent/integrate.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace manifold_descent {

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::Euler ? "euler" : "rk4";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "euler") return Scheme::Euler;
  if (name == "rk4") return Scheme::Rk4;
  throw InputError("unknown integration scheme '" + std::string(name) + "'");
}

std::string_view to_string(PerturbDistribution d) {
  return d == PerturbDistribution::Gaussian ? "gaussian" : "uniform_ball";
}

std::string_view to_string(PerturbTarget t) {
  switch (t) {
    case PerturbTarget::X1: return "x1";
    case PerturbTarget::X2: return "x2";
    case PerturbTarget::Both: return "both";
  }
  return "both";
}

PerturbDistribution distribution_from_string(std::string_view name) {
  if (name == "gaussian") return PerturbDistribution::Gaussian;
  if (name == "uniform_ball") return PerturbDistribution::UniformBall;
  throw InputError("unknown perturbation distribution '" + std::string(name) + "'");
}

PerturbTarget target_from_string(std::string_view name) {
  if (name == "x1") return PerturbTarget::X1;
  if (name == "x2") return PerturbTarget::X2;
  if (name == "both") return PerturbTarget::Both;
  throw InputError("unknown perturbation target '" + std::string(name) + "'");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::GradTol: return "grad_tol";
    case Termination::TMax: return "t_max";
    case Termination::Divergence: return "divergence";
  }
  return "t_max";
}

void IntegratorConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("integrator step h must be positive");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InputError("integrator t_max must be positive");
  if (!(h < t_max)) throw InputError("integrator step h must be smaller than t_max");
  if (!(grad_tol >= 0.0)) throw InputError("grad_tol must be >= 0");
  if (record_every < 1) throw InputError("record_every must be >= 1");
}

namespace {

// a + c * b, with an empty velocity staying empty.
PhaseState axpy(const PhaseState& a, double c, const PhaseState& b) {
  PhaseState out;
  out.x1 = a.x1 + c * b.x1;
  if (a.second_order()) out.x2 = a.x2 + c * b.x2;
  return out;
}

class Perturber {
 public:
  explicit Perturber(const PerturbationSpec& spec) : spec_(spec), rng_(spec.seed) {}

  void apply(PhaseState& state) {
    const bool hit_x1 = spec_.target != PerturbTarget::X2;
    const bool hit_x2 = spec_.target != PerturbTarget::X1 && state.second_order();
    const Eigen::Index n1 = hit_x1 ? state.x1.size() : 0;
    const Eigen::Index n2 = hit_x2 ? state.x2.size() : 0;
    const Eigen::Index d = n1 + n2;
    if (d == 0) return;

    Vector kick(d);
    for (Eigen::Index i = 0; i < d; ++i) kick[i] = normal_(rng_);
    if (spec_.distribution == PerturbDistribution::UniformBall) {
      // Uniform direction, radius delta * U^(1/d).
      const double r = std::pow(uniform_(rng_), 1.0 / static_cast<double>(d));
      const double nrm = kick.norm();
      kick = nrm > 0.0 ? Vector(kick * (r / nrm)) : Vector::Zero(d);
    }
    kick *= spec_.delta;

    if (n1 > 0) state.x1 += kick.head(n1);
    if (n2 > 0) state.x2 += kick.tail(n2);
  }

 private:
  PerturbationSpec spec_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

bool diverged(const PhaseState& s) {
  return !s.all_finite() || s.norm() > kDivergenceNorm;
}

}  // namespace

PhaseState step(Scheme scheme, const RhsFn& f, const PhaseState& state, double h) {
  if (!(h > 0.0)) throw InputError("step size must be positive");
  if (!state.all_finite()) throw DivergenceError("step called on a non-finite state");

  PhaseState next;
  if (scheme == Scheme::Euler) {
    next = axpy(state, h, f(state));
  } else {
    const PhaseState k1 = f(state);
    const PhaseState k2 = f(axpy(state, 0.5 * h, k1));
    const PhaseState k3 = f(axpy(state, 0.5 * h, k2));
    const PhaseState k4 = f(axpy(state, h, k3));
    next.x1 = state.x1 + (h / 6.0) * (k1.x1 + 2.0 * k2.x1 + 2.0 * k3.x1 + k4.x1);
    if (state.second_order()) {
      next.x2 = state.x2 + (h / 6.0) * (k1.x2 + 2.0 * k2.x2 + 2.0 * k3.x2 + k4.x2);
    }
  }
  if (!next.all_finite()) throw DivergenceError("integration step produced non-finite values");
  return next;
}

PhaseState step(Scheme scheme, const MethodSpec& method, const Objective& obj,
                const PhaseState& state, double h) {
  return step(
      scheme, [&](const PhaseState& s) { return rhs(method, obj, s); }, state, h);
}

Trajectory simulate(const MethodSpec& method, const Objective& obj, const PhaseState& x0,
                    const IntegratorConfig& config,
                    const std::optional<PerturbationSpec>& perturbation) {
  method.validate();
  config.validate();
  if (x0.x1.size() != obj.dim()) throw InputError("initial x1 does not match objective dimension");

  PhaseState state;
  state.x1 = x0.x1;
  if (is_second_order(method.family)) {
    if (x0.x2.size() == 0) {
      state.x2 = Vector::Zero(obj.dim());
    } else if (x0.x2.size() != obj.dim()) {
      throw InputError("initial x2 does not match objective dimension");
    } else {
      state.x2 = x0.x2;
    }
  }
  if (!state.all_finite()) throw InputError("initial state must be finite");

  if (perturbation && perturbation->delta < 0.0) throw InputError("perturbation delta must be >= 0");
  std::optional<Perturber> perturber;
  if (perturbation && perturbation->delta > 0.0) perturber.emplace(*perturbation);

  Trajectory traj;
  traj.method = method;
  traj.f_star = obj.min_value();
  traj.x_star = obj.minimizer();
  const bool second = is_second_order(method.family);
  const double alpha = method.effective_alpha();
  const double beta = method.effective_beta();
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  auto record = [&](double t, const PhaseState& s) {
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.f_vals.push_back(obj.value(s.x1));
    traj.grad_norms.push_back(obj.gradient(s.x1).norm());
    if (second) {
      const double psi = manifold_residual(obj, s, beta).norm();
      traj.psi_norms.push_back(psi);
      traj.storage_vals.push_back(0.5 * psi * psi);
    } else {
      traj.psi_norms.push_back(kNaN);
      traj.storage_vals.push_back(kNaN);
    }
    traj.lyap_basic.push_back(lyapunov_basic(obj, s, traj.f_star));
    traj.lyap_exp.push_back(lyapunov_exp(obj, s, traj.x_star, traj.f_star, alpha));
  };

  auto converged = [&](const PhaseState& s) {
    return config.grad_tol > 0.0 && obj.gradient(s.x1).norm() <= config.grad_tol;
  };

  record(0.0, state);
  if (converged(state)) {
    traj.terminated_by = Termination::GradTol;
    return traj;
  }

  const auto n_steps =
      static_cast<std::size_t>(std::ceil(config.t_max / config.h - 1e-9));
  const RhsFn f = [&](const PhaseState& s) { return rhs(method, obj, s); };

  traj.terminated_by = Termination::TMax;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const bool last = k == n_steps;
    const double t_prev = static_cast<double>(k - 1) * config.h;
    const double t = last ? config.t_max : static_cast<double>(k) * config.h;
    PhaseState next;
    try {
      next = step(config.scheme, f, state, t - t_prev);
    } catch (const NumericError&) {
      traj.terminated_by = Termination::Divergence;
      break;
    }
    if (perturber) perturber->apply(next);
    traj.steps_taken = k;

    if (diverged(next)) {
      if (next.all_finite()) record(t, next);
      traj.terminated_by = Termination::Divergence;
      break;
    }
    state = std::move(next);

    const bool stop = converged(state);
    if (stop || last || k % static_cast<std::size_t>(config.record_every) == 0) record(t, state);
    if (stop) {
      traj.terminated_by = Termination::GradTol;
      break;
    }
  }
  return traj;
}

}  // namespace manifold_descent
