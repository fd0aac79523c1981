#pragma once

#include "manifold_descent/bench.hpp"
#include "manifold_descent/diagnostics.hpp"
#include "manifold_descent/integrate.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace manifold_descent {

/// %.17g, with "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v);

/// Header `t,x1_0..x1_{n-1},x2_0..x2_{n-1},f,grad_norm,psi_norm,S,V_basic,V_exp`
/// then one row per recorded sample. GdFlow trajectories have no x2 columns.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Diagnostics report as a JSON object; non-finite numbers become null.
std::string report_to_json(const DiagnosticsReport& report, int indent = 2);

/// Header `label,family,alpha,beta,mu,s,lambda,gamma,delta,seed,settling_time,
/// fitted_rate,terminal_gap,verdicts,wall_ms`.
void write_records_csv(std::ostream& os, const std::vector<RunRecord>& records);
std::string records_to_json(const std::vector<RunRecord>& records, int indent = 2);

/// Header `delta,label,family,n_seeds,median_error,max_error,median_gap,diverged`.
void write_persistence_csv(std::ostream& os, const std::vector<PersistenceRow>& rows);
std::string persistence_to_json(const std::vector<PersistenceRow>& rows, int indent = 2);

}  // namespace manifold_descent
