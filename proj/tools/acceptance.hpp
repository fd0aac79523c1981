#pragma once

#include <string>
#include <vector>

namespace manifold_descent::cli {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// The ten end-to-end checks on the built-in quadratics, each at its pinned
/// tolerance. `threads` is forwarded to the bench runner (0 = auto).
std::vector<CriterionResult> run_acceptance(unsigned threads = 0);

CriterionResult criterion_oracle_equivalence();
CriterionResult criterion_storage_decay();
CriterionResult criterion_manifold_invariance();
CriterionResult criterion_lyapunov();
CriterionResult criterion_nag_sc_identity();
CriterionResult criterion_sweep_trends(unsigned threads = 0);
CriterionResult criterion_decay_rate();
CriterionResult criterion_persistence(unsigned threads = 0);
CriterionResult criterion_integrator_order();
CriterionResult criterion_determinism(unsigned threads = 0);

}  // namespace manifold_descent::cli
