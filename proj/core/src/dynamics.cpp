#include "manifold_descent/dynamics.hpp"

#include "manifold_descent/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <string>

namespace manifold_descent {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::GdFlow: return "gd_flow";
    case Family::HeavyBall: return "heavy_ball";
    case Family::HBF: return "hbf";
    case Family::PnI: return "pni";
    case Family::Proposed: return "proposed";
    case Family::NagSc: return "nag_sc";
    case Family::TripleMomentum: return "triple_momentum";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  // Case and underscore insensitive: "NagSc", "nag_sc" and "NAGSC" all match.
  auto squash = [](std::string_view s) {
    std::string out;
    for (char c : s) {
      if (c == '_' || c == '-') continue;
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
  };
  const std::string key = squash(name);
  for (Family f : kAllFamilies) {
    if (squash(to_string(f)) == key) return f;
  }
  if (key == "gd" || key == "gradientflow") return Family::GdFlow;
  if (key == "hb") return Family::HeavyBall;
  if (key == "tm") return Family::TripleMomentum;
  throw InputError("unknown method family '" + std::string(name) + "'");
}

MethodSpec MethodSpec::gd_flow() {
  MethodSpec m;
  m.family = Family::GdFlow;
  return m;
}

MethodSpec MethodSpec::heavy_ball() {
  MethodSpec m;
  m.family = Family::HeavyBall;
  return m;
}

MethodSpec MethodSpec::hbf(double lambda) {
  MethodSpec m;
  m.family = Family::HBF;
  m.lambda = lambda;
  return m;
}

MethodSpec MethodSpec::pni(double alpha, double beta) {
  MethodSpec m;
  m.family = Family::PnI;
  m.alpha = alpha;
  m.beta = beta;
  return m;
}

MethodSpec MethodSpec::proposed(double alpha, double beta) {
  MethodSpec m;
  m.family = Family::Proposed;
  m.alpha = alpha;
  m.beta = beta;
  return m;
}

MethodSpec MethodSpec::nag_sc(double mu, double s) {
  MethodSpec m;
  m.family = Family::NagSc;
  m.mu = mu;
  m.s = s;
  return m;
}

MethodSpec MethodSpec::triple_momentum(double mu, double s, double gamma) {
  MethodSpec m;
  m.family = Family::TripleMomentum;
  m.mu = mu;
  m.s = s;
  m.gamma = gamma;
  return m;
}

double MethodSpec::effective_alpha() const {
  switch (family) {
    case Family::NagSc:
    case Family::TripleMomentum: return std::sqrt(mu);
    default: return alpha;
  }
}

double MethodSpec::effective_beta() const {
  switch (family) {
    case Family::NagSc:
    case Family::TripleMomentum: return std::sqrt(s);
    default: return beta;
  }
}

std::string MethodSpec::display_label() const {
  if (!label.empty()) return label;
  std::ostringstream os;
  os << to_string(family);
  switch (family) {
    case Family::GdFlow:
    case Family::HeavyBall: break;
    case Family::HBF: os << "(lambda=" << lambda << ")"; break;
    case Family::PnI:
    case Family::Proposed: os << "(alpha=" << alpha << ",beta=" << beta << ")"; break;
    case Family::NagSc: os << "(mu=" << mu << ",s=" << s << ")"; break;
    case Family::TripleMomentum:
      os << "(mu=" << mu << ",s=" << s << ",gamma=" << gamma << ")";
      break;
  }
  return os.str();
}

void MethodSpec::validate() const {
  auto positive = [this](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InputError(std::string(to_string(family)) + ": " + name + " must be positive and finite");
    }
  };
  switch (family) {
    case Family::GdFlow:
    case Family::HeavyBall: break;
    case Family::HBF:
      if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("hbf: lambda must be >= 0");
      break;
    case Family::PnI:
    case Family::Proposed:
      positive(alpha, "alpha");
      positive(beta, "beta");
      break;
    case Family::NagSc:
      positive(mu, "mu");
      positive(s, "s");
      break;
    case Family::TripleMomentum:
      positive(mu, "mu");
      positive(s, "s");
      positive(gamma, "gamma");
      break;
  }
}

namespace {

void require_second_order(const Objective& obj, const PhaseState& state) {
  if (state.x1.size() != obj.dim()) throw InputError("state x1 does not match objective dimension");
  if (!state.second_order()) throw InputError("second-order state requires a velocity x2");
  if (state.x2.size() != state.x1.size()) throw InputError("state x2 length differs from x1");
}

}  // namespace

PhaseState rhs(const MethodSpec& method, const Objective& obj, const PhaseState& state) {
  if (state.x1.size() != obj.dim()) throw InputError("state x1 does not match objective dimension");
  if (!state.all_finite()) throw NumericError("state contains non-finite values");

  if (method.family == Family::GdFlow) {
    return PhaseState{-obj.gradient(state.x1), Vector()};
  }
  require_second_order(obj, state);

  const Vector& x = state.x1;
  const Vector& v = state.x2;
  const Vector g = obj.gradient(x);
  PhaseState d;
  d.x1 = v;

  switch (method.family) {
    case Family::HeavyBall:
      d.x2 = -g;
      break;
    case Family::HBF:
      d.x2 = -method.lambda * v - g;
      break;
    case Family::PnI: {
      const double a = method.alpha;
      const double b = method.beta;
      d.x2 = -b * obj.hessian_vec(x, v) - a * (v + b * g);
      break;
    }
    case Family::Proposed: {
      const double a = method.alpha;
      const double b = method.beta;
      d.x2 = -b * obj.hessian_vec(x, v) - 2.0 * a * v - (1.0 + a * b) * g;
      break;
    }
    case Family::NagSc: {
      const double rmu = std::sqrt(method.mu);
      const double rs = std::sqrt(method.s);
      d.x2 = -rs * obj.hessian_vec(x, v) - 2.0 * rmu * v - (1.0 + std::sqrt(method.mu * method.s)) * g;
      break;
    }
    case Family::TripleMomentum: {
      const double rmu = std::sqrt(method.mu);
      const double rs = std::sqrt(method.s);
      const double c = 1.0 + std::sqrt(method.mu * method.s);
      d.x2 = -2.0 * rmu * v - (method.gamma * c * rs) * obj.hessian_vec(x, v) - c * g;
      break;
    }
    case Family::GdFlow: break;
  }
  return d;
}

Vector control_pni(const Objective& obj, const PhaseState& state, double alpha, double beta) {
  require_second_order(obj, state);
  // Storage decays at rate alpha1 = 2 alpha; the correction gain is alpha1 / 2.
  const double alpha1 = 2.0 * alpha;
  const Vector& x = state.x1;
  const Vector& v = state.x2;
  return -beta * obj.hessian_vec(x, v) - (alpha1 / 2.0) * (v + beta * obj.gradient(x));
}

Vector control_transversal(const Objective& obj, const PhaseState& state, double alpha) {
  require_second_order(obj, state);
  return -alpha * state.x2 - obj.gradient(state.x1);
}

Vector manifold_residual(const Objective& obj, const PhaseState& state, double beta) {
  require_second_order(obj, state);
  return state.x2 + beta * obj.gradient(state.x1);
}

double storage(const Objective& obj, const PhaseState& state, double beta) {
  return 0.5 * manifold_residual(obj, state, beta).squaredNorm();
}

double lyapunov_basic(const Objective& obj, const PhaseState& state, double fstar) {
  const double kinetic = state.second_order() ? 0.5 * state.x2.squaredNorm() : 0.0;
  return obj.value(state.x1) - fstar + kinetic;
}

double lyapunov_exp(const Objective& obj, const PhaseState& state, const Vector& xstar,
                    double fstar, double alpha) {
  if (xstar.size() != obj.dim()) throw InputError("minimizer has wrong dimension");
  const Vector v = state.second_order() ? state.x2 : Vector::Zero(obj.dim());
  const Vector mixed = v + alpha * (state.x1 - xstar);
  return obj.value(state.x1) - fstar + 0.5 * v.squaredNorm() + 0.5 * mixed.squaredNorm();
}

ParamSelection select_params(double mu, double s, std::optional<double> L) {
  if (!(mu > 0.0)) throw InputError("mu must be positive");
  if (!(s > 0.0)) throw InputError("s must be positive");
  ParamSelection out{std::sqrt(mu), std::sqrt(s), std::nullopt};
  if (L && s > 1.0 / *L) {
    std::ostringstream os;
    os << "step s=" << s << " exceeds 1/L=" << 1.0 / *L;
    out.warning = os.str();
  }
  return out;
}

}  // namespace manifold_descent
