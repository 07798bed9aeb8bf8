#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "scmocc/scattering.hpp"

namespace scmocc {

struct BenchProblem {
  CollisionGeometry geom{0.5, 1.0, 1.0};
  std::size_t initial_channel = 0;
  TrajectoryKind trajectory = TrajectoryKind::StraightLine;
  AveragingScheme scheme = AveragingScheme::arithmetic();
};

struct BenchConfig {
  std::string label;
  PropagatorConfig config;
};

struct BenchCase {
  BenchProblem problem;
  std::vector<BenchConfig> configs;
  /// Crank-Nicolson reference step. The reported reference is the Richardson
  /// extrapolation (4 P(dt) - P(2 dt)) / 3, which cancels the leading dt^2
  /// error of the symmetric midpoint scheme.
  double reference_dt = 1e-4;
  std::size_t repetitions = 3;
  double error_bound = 0.02;
  double error_floor = 1e-4;  // denominators below this use the floor

  /// Throws ConfigError when repetitions < 3 or the reference step exceeds any
  /// fixed candidate step. The extrapolated reference is fourth order, so at
  /// equal steps it is still far more accurate than every second-order
  /// candidate.
  void validate() const;
};

struct BenchRow {
  std::string label;
  PropagatorConfig config;
  bool ok = false;
  std::string error;  // abort message when !ok
  double median_seconds = 0.0;
  double spread_seconds = 0.0;  // max - min over the timed repetitions
  double max_relative_error = 0.0;
  std::size_t steps = 0;
  double max_norm_error = 0.0;
  std::vector<double> final_probs;
  bool within_bound = false;
};

struct BenchReport {
  std::vector<double> reference_probs;
  double reference_seconds = 0.0;
  std::vector<BenchRow> rows;
};

/// The propagator study configurations: fixed steps of 0.001 (CN, Chebyshev,
/// RK4) and 0.2 (Diagonalization), the same with preconditioning at
/// 0.05 / 0.1 / 0.2, and the adaptive variants at local error bound 1e-4.
std::vector<BenchConfig> standard_configs();

/// standard_configs() with every adaptive tolerance divided by 100 and fixed
/// steps shrunk so the leading error term drops by 100 (dt / 10 for the
/// second-order methods, dt / sqrt(10) for RK4).
std::vector<BenchConfig> tightened(const std::vector<BenchConfig>& configs);

/// Standard configurations on the problem above; run it on
/// build_analytic(SyntheticSpec{}).
BenchCase standard_case();

/// max_f |P_f - R_f| / max(R_f, floor).
double max_relative_error(const std::vector<double>& p, const std::vector<double>& reference,
                          double floor);

using BenchProgress = std::function<void(const BenchRow&)>;

/// Runs the reference once and each configuration once untimed plus
/// `repetitions` timed runs, sequentially. Runs shorter than 20 ms are
/// repeated inside each timed repetition and averaged. A configuration that
/// throws is reported as a failed row.
BenchReport run_bench(const DiabaticModel& model, const BenchCase& bench,
                      const BenchProgress& progress = {});

/// "<cpu model>; <threads> hw threads; <compiler>".
std::string machine_info();

}  // namespace scmocc
