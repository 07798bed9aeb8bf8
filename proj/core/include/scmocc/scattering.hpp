#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scmocc/potential.hpp"
#include "scmocc/propagators.hpp"
#include "scmocc/trajectory.hpp"

namespace scmocc {

struct CollisionOptions {
  TrajectoryKind trajectory = TrajectoryKind::StraightLine;
  AveragingScheme scheme = AveragingScheme::arithmetic();  // curvilinear only
  PropagatorConfig propagator;
  std::optional<double> r_start;  // default: start_radius(model)

  // Final probabilities count as stable when every |dP_f/dt| over the trailing
  // `stability_window` fraction of the history stays below the threshold.
  // Otherwise the end time is pushed out by `extension_factor`, at most
  // `max_extensions` times.
  double stability_threshold = 1e-10;
  double stability_window = 0.1;
  double extension_factor = 1.5;
  int max_extensions = 4;

  std::size_t max_history = 5000;
};

struct CollisionResult {
  CollisionGeometry geom;
  std::size_t initial_channel = 0;
  std::vector<double> final_probs;
  std::vector<double> history_t;
  std::vector<std::vector<double>> history_p;
  PropagatorConfig propagator;
  TrajectoryKind trajectory = TrajectoryKind::StraightLine;
  AveragingScheme scheme;
  double turning_point = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  bool stable = false;
  int extensions = 0;
  PropagationStats stats;

  double total_probability() const;
};

/// Trajectory for a collision. Curvilinear paths are referenced to the
/// initial channel's asymptote.
TrajectoryPath build_path(const DiabaticModel& model, const CollisionGeometry& geom,
                          std::size_t initial_channel, const CollisionOptions& options);

/// R(t) on the path; past max_time R continues linearly with the final
/// radial speed.
double path_radius(const TrajectoryPath& path, double t);

/// V(R(t)) with every diagonal shifted by -E_initial, R from path_radius.
HamiltonianFn collision_hamiltonian(const DiabaticModel& model, const TrajectoryPath& path,
                                    std::size_t initial_channel);

/// a(-t_start) = e_initial propagated to +t_start and beyond until stable.
/// Throws ConfigError for an invalid channel or geometry.
CollisionResult run_collision(const DiabaticModel& model, const CollisionGeometry& geom,
                              std::size_t initial_channel, const CollisionOptions& options);

// ---------------------------------------------------------------------------
// Impact-parameter scans

struct ScanOptions {
  CollisionOptions collision;
  double db = 0.1;                 // base grid spacing, bohr
  double b_zero = 1e-6;            // b used for the b = 0 row
  double refine_threshold = 0.05;  // bisect where max_f |P_f(b_k+1) - P_f(b_k)| exceeds this
  double inelastic_epsilon = 1e-4;
  std::size_t consecutive = 2;
  double b_cap = 50.0;
  std::size_t jobs = 0;  // 0: hardware concurrency
};

struct OpacityRow {
  double b = 0.0;
  std::vector<double> probs;
  bool stable = true;
};

struct OpacityTable {
  double v0 = 0.0;
  std::size_t initial_channel = 0;
  std::vector<OpacityRow> rows;  // strictly increasing b
  double b_max = 0.0;
  bool truncated = false;  // b_cap reached before the inelastic sum died out

  std::size_t channels() const { return rows.empty() ? 0 : rows.front().probs.size(); }
};

OpacityTable impact_scan(const DiabaticModel& model, double v0, double mu,
                         std::size_t initial_channel, const ScanOptions& options);

/// Runs `count` independent tasks on up to `jobs` threads. The first exception
/// thrown by a task is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task);

// ---------------------------------------------------------------------------
// Cross sections

/// 2 pi Int_0^b_max f(b) b db over the sample points. Maximal runs of equal
/// spacing use composite Simpson (3/8 rule for an odd interval count, the
/// trapezoid for a single interval); runs are joined additively.
double integrate_opacity(const std::vector<double>& b, const std::vector<double>& p);

/// sigma_if in bohr^2 for every final channel f of the table.
std::vector<double> cross_section(const OpacityTable& table);

struct CrossSectionRow {
  double v0 = 0.0;
  double kinetic_energy = 0.0;  // hartree, mu v0^2 / 2
  std::vector<double> sigma;    // bohr^2 per final channel
  // Ehrenfest total energy per final channel, hartree; empty optional when the
  // row falls below the relabeling threshold for that transition.
  std::vector<std::optional<double>> relabeled_energy;
};

struct CrossSectionTable {
  std::size_t initial_channel = 0;
  std::vector<double> asymptotes;
  std::vector<CrossSectionRow> rows;  // increasing v0
  bool relabeled = false;
};

/// E = K + dE/2 + dE^2 / (16 K). Throws PhysicsError for K <= 0.
double ehrenfest_energy(double kinetic, double delta_e);

/// Inverse of ehrenfest_energy on the branch K >= |dE|/4:
/// K = ((sqrt(E) + sqrt(E - dE)) / 2)^2. Throws PhysicsError when E < max(dE, 0).
double symmetric_kinetic_energy(double total, double delta_e);

/// Fills relabeled_energy with dE = E_f - E_i per transition. Rows with
/// K < |dE|/4 have no relabeled value for that transition; elastic entries
/// keep K.
CrossSectionTable ehrenfest_relabel(CrossSectionTable table);

// ---------------------------------------------------------------------------
// Detailed balance

struct DetailedBalanceRow {
  std::size_t i = 0, f = 0;
  double total_energy = 0.0;  // above channel i, hartree
  double delta_e = 0.0;       // E_f - E_i
  // Unrelabeled: forward at K = E, reverse at K = E - dE (same total energy).
  double raw_forward = 0.0, raw_reverse = 0.0;
  // Both directions at the symmetric kinetic energy K-bar of E.
  double relabeled_forward = 0.0, relabeled_reverse = 0.0;

  double raw_asymmetry() const;
  double relabeled_asymmetry() const;
};

struct ChannelPair {
  std::size_t i = 0, f = 0;
};

/// Forward i -> f and reverse f -> i collisions at each total energy (measured
/// from the asymptote of channel i) at impact parameter b.
std::vector<DetailedBalanceRow> detailed_balance_report(const DiabaticModel& model,
                                                        const std::vector<double>& energies,
                                                        const std::vector<ChannelPair>& pairs,
                                                        double mu, double b,
                                                        const CollisionOptions& options);

}  // namespace scmocc
