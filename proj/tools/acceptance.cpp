#include "acceptance.hpp"

#include <manifold_descent/bench.hpp>
#include <manifold_descent/diagnostics.hpp>
#include <manifold_descent/dynamics.hpp>
#include <manifold_descent/integrate.hpp>
#include <manifold_descent/io.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace manifold_descent::cli {

namespace {

Objective diag14() {
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 4.0;
  return Objective::spd_quadratic(A);
}

PhaseState state1(double x, double v) {
  PhaseState s;
  s.x1 = Vector::Constant(1, x);
  s.x2 = Vector::Constant(1, v);
  return s;
}

IntegratorConfig rk4(double h, double t_max) {
  IntegratorConfig c;
  c.scheme = Scheme::Rk4;
  c.h = h;
  c.t_max = t_max;
  return c;
}

// Largest sup-norm deviation of the trajectory from the exact linear flow.
double oracle_error(const Trajectory& traj, const Objective& obj, const PhaseState& x0) {
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const PhaseState exact = closed_form_quadratic(traj.method, obj, x0, traj.times[k]);
    double e = (traj.states[k].x1 - exact.x1).lpNorm<Eigen::Infinity>();
    if (exact.second_order()) e = std::max(e, (traj.states[k].x2 - exact.x2).lpNorm<Eigen::Infinity>());
    worst = std::max(worst, e);
  }
  return worst;
}

CriterionResult guarded(int id, std::string name, const std::function<void(CriterionResult&)>& body) {
  CriterionResult r{id, std::move(name), false, ""};
  try {
    body(r);
  } catch (const std::exception& ex) {
    r.passed = false;
    r.detail = std::string("exception: ") + ex.what();
  }
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

CriterionResult criterion_oracle_equivalence() {
  return guarded(1, "oracle equivalence on quadratics", [](CriterionResult& r) {
    struct Case {
      Objective obj;
      PhaseState x0;
      double s;
    };
    PhaseState x0_2d;
    x0_2d.x1 = Vector(2);
    x0_2d.x1 << 1.0, -0.5;
    x0_2d.x2 = Vector(2);
    x0_2d.x2 << 0.3, 0.0;
    const std::vector<Case> cases = {{Objective::unit_quadratic(1), state1(1.0, 0.0), 0.81},
                                     {diag14(), x0_2d, 0.25}};

    double worst = 0.0;
    std::string worst_label;
    for (const Case& c : cases) {
      const std::vector<MethodSpec> methods = {
          MethodSpec::gd_flow(),         MethodSpec::heavy_ball(),
          MethodSpec::hbf(2.0),          MethodSpec::pni(1.0, 0.9),
          MethodSpec::proposed(1.0, 0.9), MethodSpec::nag_sc(1.0, c.s),
          MethodSpec::triple_momentum(1.0, c.s, 1.0)};
      for (const MethodSpec& m : methods) {
        const Trajectory traj = simulate(m, c.obj, c.x0, rk4(1e-3, 10.0));
        const double e = oracle_error(traj, c.obj, c.x0);
        if (e > worst || worst_label.empty()) {
          worst = std::max(worst, e);
          worst_label = m.display_label() + " dim=" + std::to_string(c.obj.dim());
        }
      }
    }

    // Characteristic roots of x'' + 2.9 x' + 1.9 x = 0 by the quadratic formula,
    // against the eigenvalues of the assembled system matrix.
    const double b = 0.9 + 2.0 * 1.0;
    const double c = 1.0 + 1.0 * 0.9;
    const double disc = std::sqrt(b * b - 4.0 * c);
    const double r_fast = (-b - disc) / 2.0;
    const double r_slow = (-b + disc) / 2.0;
    Eigen::EigenSolver<Matrix> es(system_matrix(MethodSpec::proposed(1.0, 0.9), Objective::unit_quadratic(1)));
    std::vector<double> ev = {es.eigenvalues()[0].real(), es.eigenvalues()[1].real()};
    std::sort(ev.begin(), ev.end());
    const double root_err = std::max({std::abs(r_fast + 1.9), std::abs(r_slow + 1.0),
                                      std::abs(ev[0] + 1.9), std::abs(ev[1] + 1.0),
                                      std::abs(es.eigenvalues()[0].imag()),
                                      std::abs(es.eigenvalues()[1].imag())});

    r.passed = worst <= 1e-6 && root_err <= 1e-12;
    r.detail = "max |rk4 - expm| = " + fmt(worst) + " (" + worst_label + ", tol 1e-6); roots {" +
               fmt(r_slow) + ", " + fmt(r_fast) + "} err " + fmt(root_err);
  });
}

CriterionResult criterion_storage_decay() {
  return guarded(2, "storage decays as S(0)exp(-2 alpha t) under pni", [](CriterionResult& r) {
    const Objective obj = Objective::unit_quadratic(1);
    const Trajectory traj = simulate(MethodSpec::pni(1.0, 0.9), obj, state1(1.0, 0.0), rk4(1e-3, 10.0));
    const double dev = check_storage_decay(traj, 1.0);
    r.passed = dev < 1e-5;
    r.detail = "max relative deviation = " + fmt(dev) + " (tol 1e-5)";
  });
}

CriterionResult criterion_manifold_invariance() {
  return guarded(3, "on-manifold starts stay on the manifold under pni", [](CriterionResult& r) {
    const double beta = 0.9;
    const Objective unit = Objective::unit_quadratic(1);
    const Objective d = diag14();
    PhaseState s2d;
    s2d.x1 = Vector(2);
    s2d.x1 << 1.0, -0.5;
    s2d.x2 = -beta * d.gradient(s2d.x1);

    const Trajectory t1 = simulate(MethodSpec::pni(1.0, beta), unit, state1(1.0, -beta), rk4(1e-3, 10.0));
    const Trajectory t2 = simulate(MethodSpec::pni(1.0, beta), d, s2d, rk4(1e-3, 10.0));
    const InvarianceCheck c1 = check_manifold_invariance(t1, 1e-6);
    const InvarianceCheck c2 = check_manifold_invariance(t2, 1e-6);
    r.passed = c1.passed && c2.passed;
    r.detail = "max |psi| = " + fmt(c1.max_psi) + " (dim 1), " + fmt(c2.max_psi) +
               " (dim 2), tol 1e-6";
  });
}

CriterionResult criterion_lyapunov() {
  return guarded(4, "Lyapunov certificates are nonincreasing", [](CriterionResult& r) {
    struct Case {
      Objective obj;
      PhaseState x0;
      double mu;
      double s;
    };
    PhaseState x0_2d;
    x0_2d.x1 = Vector(2);
    x0_2d.x1 << 1.0, -0.5;
    x0_2d.x2 = Vector::Zero(2);
    const std::vector<Case> cases = {{Objective::unit_quadratic(1), state1(1.0, 0.0), 1.0, 0.81},
                                     {diag14(), x0_2d, 1.0, 0.25}};
    bool ok = true;
    std::ostringstream detail;
    for (const Case& c : cases) {
      // u2-only system: x'' + alpha x' + grad f = 0, i.e. HBF with lambda = alpha.
      const double alpha = 1.0;
      const Trajectory basic = simulate(MethodSpec::hbf(alpha), c.obj, c.x0, rk4(1e-3, 10.0));
      const LyapunovCheck lb = check_lyapunov(basic, LyapunovKind::Basic);

      const ParamSelection p = select_params(c.mu, c.s, c.obj.convexity_params().L);
      const Trajectory prop = simulate(MethodSpec::proposed(p.alpha, p.beta), c.obj, c.x0, rk4(1e-3, 10.0));
      const LyapunovCheck le = check_lyapunov(prop, LyapunovKind::Exp);
      ok = ok && lb.monotone && le.monotone;
      detail << "dim " << c.obj.dim() << ": V_basic uptick " << fmt(lb.worst_uptick)
             << ", V_exp uptick " << fmt(le.worst_uptick) << "; ";
    }
    r.passed = ok;
    r.detail = detail.str() + "tol 1e-9/step";
  });
}

CriterionResult criterion_nag_sc_identity() {
  return guarded(5, "nag_sc equals proposed; hb equals curvature-free proposed", [](CriterionResult& r) {
    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const MethodSpec nag = MethodSpec::nag_sc(1.0, 0.81);
    const MethodSpec prop = MethodSpec::proposed(1.0, 0.9);
    const double rmu = std::sqrt(nag.mu);
    const double gain = 1.0 + std::sqrt(nag.mu * nag.s);

    std::size_t mismatches = 0;
    std::size_t hb_mismatches = 0;
    for (const Objective& obj : {Objective::unit_quadratic(1), diag14()}) {
      const Objective flat = obj.without_curvature();
      for (int i = 0; i < 100; ++i) {
        PhaseState s;
        s.x1 = Vector(obj.dim());
        s.x2 = Vector(obj.dim());
        for (Eigen::Index j = 0; j < obj.dim(); ++j) {
          s.x1[j] = u(rng);
          s.x2[j] = u(rng);
        }
        const PhaseState a = rhs(nag, obj, s);
        const PhaseState b = rhs(prop, obj, s);
        if (a.x1 != b.x1 || a.x2 != b.x2) ++mismatches;

        // x'' + 2 sqrt(mu) x' + (1 + sqrt(mu s)) grad f = 0, written out directly.
        const Vector hb = -2.0 * rmu * s.x2 - gain * obj.gradient(s.x1);
        const PhaseState c = rhs(prop, flat, s);
        if (c.x1 != s.x2 || c.x2 != hb) ++hb_mismatches;
      }
    }
    r.passed = mismatches == 0 && hb_mismatches == 0;
    r.detail = std::to_string(mismatches) + "/200 nag_sc mismatches, " +
               std::to_string(hb_mismatches) + "/200 hb mismatches (exact comparison)";
  });
}

CriterionResult criterion_sweep_trends(unsigned threads) {
  return guarded(6, "settling time falls with beta; larger alpha does not add undershoot",
                 [threads](CriterionResult& r) {
    const Objective obj = Objective::unit_quadratic(1);
    SweepSpec spec;
    spec.alphas = {1.0, 10.0};
    spec.betas = {0.3, 0.6, 0.9};
    spec.methods = {MethodSpec::pni(1.0, 1.0), MethodSpec::proposed(1.0, 1.0)};
    spec.integrator = rk4(1e-3, 40.0);
    spec.x0 = state1(1.0, 0.0);
    BenchOptions opts;
    opts.report.settle_eps = 1e-4;
    opts.threads = threads;
    const std::vector<RunRecord> grid = sweep(spec, obj, opts);

    bool ok = grid.size() == 12;
    std::ostringstream detail;
    // Row-major: alpha, beta, method.
    for (std::size_t ia = 0; ia < 2; ++ia) {
      for (std::size_t im = 0; im < 2; ++im) {
        detail << to_string(spec.methods[im].family) << " alpha=" << spec.alphas[ia] << ": ";
        for (std::size_t ib = 0; ib < 3; ++ib) {
          const double t = grid[(ia * 3 + ib) * 2 + im].settling_time;
          detail << fmt(t) << (ib < 2 ? " > " : "; ");
          if (ib > 0) {
            const double prev = grid[(ia * 3 + ib - 1) * 2 + im].settling_time;
            ok = ok && std::isfinite(t) && t < prev;
          }
        }
      }
    }

    double worst_gap = -1.0;
    for (const MethodSpec& tmpl : spec.methods) {
      for (double beta : spec.betas) {
        const Trajectory lo = simulate(at_grid_point(tmpl, 1.0, beta), obj, spec.x0, spec.integrator);
        const Trajectory hi = simulate(at_grid_point(tmpl, 10.0, beta), obj, spec.x0, spec.integrator);
        const double gap = max_undershoot(hi) - max_undershoot(lo);
        worst_gap = std::max(worst_gap, gap);
        ok = ok && max_undershoot(hi) <= max_undershoot(lo);
      }
    }
    r.passed = ok;
    r.detail = detail.str() + "max undershoot(alpha=10) - undershoot(alpha=1) = " + fmt(worst_gap);
  });
}

CriterionResult criterion_decay_rate() {
  return guarded(7, "fitted decay rate of proposed is 2", [](CriterionResult& r) {
    const Objective obj = Objective::unit_quadratic(1);
    const Trajectory traj =
        simulate(MethodSpec::proposed(1.0, 0.9), obj, state1(1.0, 0.0), rk4(1e-3, 10.0));
    const DecayFit fit = fit_decay_rate(traj, std::pair{2.0, 8.0});
    const double rel = std::abs(fit.rate - 2.0) / 2.0;
    r.passed = rel <= 0.05;
    r.detail = "rate = " + fmt(fit.rate) + " over [" + fmt(fit.t_lo) + ", " + fmt(fit.t_hi) +
               "], relative error " + fmt(rel) + " (tol 5%)";
  });
}

CriterionResult criterion_persistence(unsigned threads) {
  return guarded(8, "perturbed proposed ends no farther from x* than pni", [threads](CriterionResult& r) {
    const Objective obj = Objective::unit_quadratic(1);
    const std::vector<MethodSpec> methods = {MethodSpec::pni(1.0, 0.9), MethodSpec::proposed(1.0, 0.9)};
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 0; s < 20; ++s) seeds.push_back(s);
    const IntegratorConfig cfg = rk4(1e-3, 10.0);
    const PhaseState x0 = state1(1.0, 0.0);
    BenchOptions opts;
    opts.threads = threads;
    const auto rows = persistence_experiment({1e-3}, seeds, methods, obj, x0, cfg, {}, opts);
    const auto clean = compare(methods, obj, x0, cfg, opts);

    const PersistenceRow* pni0 = nullptr;
    const PersistenceRow* prop0 = nullptr;
    const PersistenceRow* pni1 = nullptr;
    const PersistenceRow* prop1 = nullptr;
    for (const auto& row : rows) {
      const bool pni = row.family == Family::PnI;
      if (row.delta == 0.0) (pni ? pni0 : prop0) = &row;
      if (row.delta == 1e-3) (pni ? pni1 : prop1) = &row;
    }
    if (!pni0 || !prop0 || !pni1 || !prop1) throw std::runtime_error("missing persistence rows");

    // compare() sorts by label; look the records up by family.
    auto clean_error = [&](Family f) {
      for (const auto& rec : clean) {
        if (rec.family == f) return std::pair{rec.terminal_gap, rec.terminal_error};
      }
      throw std::runtime_error("missing compare record");
    };
    const auto [pni_gap, pni_err] = clean_error(Family::PnI);
    const auto [prop_gap, prop_err] = clean_error(Family::Proposed);
    const bool control_ok = pni0->median_error == pni_err && prop0->median_error == prop_err &&
                            pni0->median_gap == pni_gap && prop0->median_gap == prop_gap;
    const bool ordering_ok = prop1->n_seeds == 20 && pni1->n_seeds == 20 &&
                             prop1->median_error <= pni1->median_error;
    r.passed = control_ok && ordering_ok;
    r.detail = "median |x1(10)|: proposed " + fmt(prop1->median_error) + " <= pni " +
               fmt(pni1->median_error) + " over 20 seeds; control rows " +
               (control_ok ? "match" : "DIFFER from") + " unperturbed runs";
  });
}

CriterionResult criterion_integrator_order() {
  return guarded(9, "empirical order: euler 1, rk4 4", [](CriterionResult& r) {
    const Objective obj = Objective::unit_quadratic(1);
    const MethodSpec m = MethodSpec::proposed(1.0, 0.9);
    const PhaseState x0 = state1(1.0, 0.0);
    auto orders = [&](Scheme scheme, std::vector<double> hs) {
      std::vector<double> errs;
      for (double h : hs) {
        IntegratorConfig c;
        c.scheme = scheme;
        c.h = h;
        c.t_max = 5.0;
        errs.push_back(oracle_error(simulate(m, obj, x0, c), obj, x0));
      }
      std::vector<double> out;
      for (std::size_t i = 1; i < errs.size(); ++i) out.push_back(std::log2(errs[i - 1] / errs[i]));
      return out;
    };
    const auto euler = orders(Scheme::Euler, {0.01, 0.005, 0.0025});
    const auto rk = orders(Scheme::Rk4, {0.1, 0.05, 0.025});
    bool ok = true;
    std::ostringstream detail;
    detail << "euler orders";
    for (double p : euler) {
      ok = ok && std::abs(p - 1.0) <= 0.3;
      detail << ' ' << fmt(p);
    }
    detail << "; rk4 orders";
    for (double p : rk) {
      ok = ok && std::abs(p - 4.0) <= 0.3;
      detail << ' ' << fmt(p);
    }
    r.passed = ok;
    r.detail = detail.str() + " (tol +-0.3)";
  });
}

CriterionResult criterion_determinism(unsigned threads) {
  return guarded(10, "repeated sweeps give byte-identical CSV", [threads](CriterionResult& r) {
    const Objective obj = Objective::unit_quadratic(1);
    SweepSpec spec;
    spec.alphas = {1.0, 10.0};
    spec.betas = {0.6, 0.9};
    spec.methods = {MethodSpec::pni(1.0, 1.0), MethodSpec::proposed(1.0, 1.0)};
    spec.seeds = {1, 2, 3};
    spec.perturbation = PerturbationSpec{1e-3, PerturbDistribution::Gaussian, 0, PerturbTarget::Both};
    spec.integrator = rk4(1e-2, 10.0);
    spec.x0 = state1(1.0, 0.0);

    auto csv = [&](unsigned t) {
      BenchOptions opts;
      opts.threads = t;
      std::ostringstream os;
      write_records_csv(os, sweep(spec, obj, opts));
      return os.str();
    };
    const std::string a = csv(threads);
    const std::string b = csv(threads);
    const std::string c = csv(1);
    r.passed = a == b && a == c;
    r.detail = std::to_string(a.size()) + " bytes; repeat " + (a == b ? "identical" : "DIFFERS") +
               ", single-thread " + (a == c ? "identical" : "DIFFERS");
  });
}

std::vector<CriterionResult> run_acceptance(unsigned threads) {
  return {criterion_oracle_equivalence(), criterion_storage_decay(),
          criterion_manifold_invariance(), criterion_lyapunov(),
          criterion_nag_sc_identity(),     criterion_sweep_trends(threads),
          criterion_decay_rate(),          criterion_persistence(threads),
          criterion_integrator_order(),    criterion_determinism(threads)};
}

}  // namespace manifold_descent::cli
