#include "scmocc/scattering.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "scmocc/diagnostics.hpp"

namespace scmocc {
namespace {

void check_channel(const DiabaticModel& model, std::size_t channel) {
  if (channel >= model.n()) {
    throw ConfigError("initial channel " + std::to_string(channel + 1) + " outside 1.." +
                      std::to_string(model.n()));
  }
}

// Largest |dP_f/dt| between consecutive history samples with t >= t_from.
double trailing_rate(const std::vector<double>& t, const std::vector<std::vector<double>>& p,
                     double t_from) {
  double rate = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (t[k - 1] < t_from) continue;
    const double dt = t[k] - t[k - 1];
    if (!(dt > 0.0)) continue;
    for (std::size_t f = 0; f < p[k].size(); ++f)
      rate = std::max(rate, std::abs(p[k][f] - p[k - 1][f]) / dt);
  }
  return rate;
}

void cap_history(std::vector<double>& t, std::vector<std::vector<double>>& p, std::size_t limit) {
  if (limit < 2 || t.size() <= limit) return;
  const std::size_t m = t.size();
  std::vector<double> t2;
  std::vector<std::vector<double>> p2;
  t2.reserve(limit);
  p2.reserve(limit);
  for (std::size_t k = 0; k < limit; ++k) {
    const std::size_t src = (k * (m - 1)) / (limit - 1);
    t2.push_back(t[src]);
    p2.push_back(std::move(p[src]));
  }
  t = std::move(t2);
  p = std::move(p2);
}

double inelastic_sum(const std::vector<double>& p, std::size_t initial) {
  double s = 0.0;
  for (std::size_t f = 0; f < p.size(); ++f)
    if (f != initial) s += p[f];
  return s;
}

}  // namespace

double CollisionResult::total_probability() const {
  double s = 0.0;
  for (double p : final_probs) s += p;
  return s;
}

TrajectoryPath build_path(const DiabaticModel& model, const CollisionGeometry& geom,
                          std::size_t initial_channel, const CollisionOptions& options) {
  check_channel(model, initial_channel);
  geom.validate();
  const double r_start = options.r_start.value_or(start_radius(model));
  if (options.trajectory == TrajectoryKind::StraightLine) return TrajectoryPath::straight(geom, r_start);
  RadialIntegrationOptions radial;
  radial.energy_reference = model.asymptotes()[initial_channel];
  radial.r_start = r_start;
  return integrate_radial(model, options.scheme, geom, radial);
}

double path_radius(const TrajectoryPath& path, double t) {
  const double s = std::abs(t);
  if (s <= path.max_time()) return path.at(t).r;
  const RadialState edge = path.at(path.max_time());
  return edge.r + edge.dr_dt * (s - path.max_time());
}

HamiltonianFn collision_hamiltonian(const DiabaticModel& model, const TrajectoryPath& path,
                                    std::size_t initial_channel) {
  check_channel(model, initial_channel);
  const double reference = model.asymptotes()[initial_channel];
  return [&model, &path, reference](double t, RealMatrix& out) {
    model.potential_matrix(path_radius(path, t), out);
    if (reference != 0.0) out.diagonal().array() -= reference;
  };
}

CollisionResult run_collision(const DiabaticModel& model, const CollisionGeometry& geom,
                              std::size_t initial_channel, const CollisionOptions& options) {
  const TrajectoryPath path = build_path(model, geom, initial_channel, options);
  const HamiltonianFn v = collision_hamiltonian(model, path, initial_channel);

  CollisionResult result;
  result.geom = geom;
  result.initial_channel = initial_channel;
  result.propagator = options.propagator;
  result.trajectory = options.trajectory;
  result.scheme = options.scheme;
  result.turning_point = path.turning_point();
  result.t_begin = -path.start_time();

  PropagationOptions popts;
  popts.record_history = true;
  popts.max_history = options.max_history;

  AmplitudeState state;
  state.t = result.t_begin;
  state.a = ComplexVector::Zero(static_cast<Eigen::Index>(model.n()));
  state.a[static_cast<Eigen::Index>(initial_channel)] = 1.0;

  double t_end = path.start_time();
  for (int round = 0;; ++round) {
    PropagationResult seg = propagate(v, state, t_end, options.propagator, popts);
    const std::size_t skip = result.history_t.empty() ? 0 : 1;  // shared junction sample
    result.history_t.insert(result.history_t.end(), seg.history_t.begin() + static_cast<long>(skip),
                            seg.history_t.end());
    result.history_p.insert(result.history_p.end(), seg.history_p.begin() + static_cast<long>(skip),
                            seg.history_p.end());
    result.stats.steps += seg.stats.steps;
    result.stats.rejected += seg.stats.rejected;
    result.stats.hamiltonian_evaluations += seg.stats.hamiltonian_evaluations;
    result.stats.preconditioner_refreshes += seg.stats.preconditioner_refreshes;
    result.stats.max_norm_error = std::max(result.stats.max_norm_error, seg.stats.max_norm_error);
    state = seg.state;

    const double window_start = t_end - options.stability_window * (t_end - result.t_begin);
    const double rate = trailing_rate(result.history_t, result.history_p, window_start);
    result.stable = rate < options.stability_threshold;
    if (result.stable || round >= options.max_extensions) break;
    ++result.extensions;
    t_end *= options.extension_factor;
  }

  result.t_end = t_end;
  result.final_probs = state.probabilities();
  cap_history(result.history_t, result.history_p, options.max_history);
  return result;
}

// ---------------------------------------------------------------------------

void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& task) {
  if (count == 0) return;
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, count);
  if (jobs == 1) {
    for (std::size_t k = 0; k < count; ++k) task(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= count) return;
      try {
        task(k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

OpacityTable impact_scan(const DiabaticModel& model, double v0, double mu,
                         std::size_t initial_channel, const ScanOptions& options) {
  check_channel(model, initial_channel);
  if (!(v0 > 0.0)) throw ConfigError("scan speed v0 must be positive");
  if (!(options.db > 0.0)) throw ConfigError("scan.db must be positive");
  if (!(options.b_cap > options.db)) throw ConfigError("scan.b_cap must exceed scan.db");

  const CollisionOptions& copts = options.collision;

  auto run_at = [&](double b) {
    CollisionGeometry g{v0, b == 0.0 ? options.b_zero : b, mu};
    const CollisionResult r = run_collision(model, g, initial_channel, copts);
    return OpacityRow{b, r.final_probs, r.stable};
  };

  OpacityTable table;
  table.v0 = v0;
  table.initial_channel = initial_channel;

  const std::size_t jobs = options.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                             : options.jobs;
  const std::size_t batch = std::max<std::size_t>(2 * jobs, 8);
  const auto last_index = static_cast<std::size_t>(std::floor(options.b_cap / options.db + 1e-9));

  std::vector<OpacityRow> base;
  std::size_t quiet = 0;
  std::optional<std::size_t> stop;
  while (!stop && base.size() <= last_index) {
    const std::size_t first = base.size();
    const std::size_t count = std::min(batch, last_index + 1 - first);
    std::vector<OpacityRow> rows(count);
    parallel_for(count, jobs, [&](std::size_t k) {
      rows[k] = run_at(options.db * static_cast<double>(first + k));
    });
    for (auto& row : rows) {
      base.push_back(std::move(row));
      const std::size_t idx = base.size() - 1;
      quiet = inelastic_sum(base.back().probs, initial_channel) < options.inelastic_epsilon ? quiet + 1 : 0;
      // At least three rows so the quadrature has something to work with.
      if (quiet >= options.consecutive && idx >= 2) {
        stop = idx;
        break;
      }
    }
  }
  if (stop) {
    base.resize(*stop + 1);
  } else {
    table.truncated = true;
    std::ostringstream os;
    os << "inelastic probability still above " << options.inelastic_epsilon << " at b_cap = "
       << options.b_cap << " bohr (v0 = " << v0 << "); opacity truncated";
    warn(os.str());
  }
  table.b_max = base.back().b;

  std::vector<double> midpoints;
  for (std::size_t k = 0; k + 1 < base.size(); ++k) {
    double jump = 0.0;
    for (std::size_t f = 0; f < base[k].probs.size(); ++f)
      jump = std::max(jump, std::abs(base[k + 1].probs[f] - base[k].probs[f]));
    if (jump > options.refine_threshold) midpoints.push_back(0.5 * (base[k].b + base[k + 1].b));
  }
  std::vector<OpacityRow> refined(midpoints.size());
  parallel_for(midpoints.size(), jobs, [&](std::size_t k) { refined[k] = run_at(midpoints[k]); });

  table.rows = std::move(base);
  table.rows.insert(table.rows.end(), std::make_move_iterator(refined.begin()),
                    std::make_move_iterator(refined.end()));
  std::sort(table.rows.begin(), table.rows.end(),
            [](const OpacityRow& a, const OpacityRow& b) { return a.b < b.b; });
  return table;
}

// ---------------------------------------------------------------------------

double ehrenfest_energy(double kinetic, double delta_e) {
  if (!(kinetic > 0.0)) throw PhysicsError("Ehrenfest relabeling needs a positive kinetic energy");
  // This grouping is exact at the threshold K = dE/4, where the ratio is 1/4.
  return (kinetic + delta_e * (delta_e / (16.0 * kinetic))) + 0.5 * delta_e;
}

double symmetric_kinetic_energy(double total, double delta_e) {
  if (!(total > 0.0) || total < delta_e) {
    std::ostringstream os;
    os << "total energy " << total << " below the threshold of a transition with dE = " << delta_e;
    throw PhysicsError(os.str());
  }
  const double s = 0.5 * (std::sqrt(total) + std::sqrt(total - delta_e));
  return s * s;
}

CrossSectionTable ehrenfest_relabel(CrossSectionTable table) {
  const std::size_t i = table.initial_channel;
  if (i >= table.asymptotes.size()) throw ConfigError("cross-section table lacks channel asymptotes");
  for (auto& row : table.rows) {
    const std::size_t n = row.sigma.size();
    row.relabeled_energy.assign(n, std::nullopt);
    for (std::size_t f = 0; f < n; ++f) {
      const double de = table.asymptotes[f] - table.asymptotes[i];
      if (de == 0.0) {
        row.relabeled_energy[f] = row.kinetic_energy;
      } else if (row.kinetic_energy >= 0.25 * std::abs(de)) {
        row.relabeled_energy[f] = ehrenfest_energy(row.kinetic_energy, de);
      }
    }
  }
  table.relabeled = true;
  return table;
}

// ---------------------------------------------------------------------------

double DetailedBalanceRow::raw_asymmetry() const { return std::abs(raw_forward - raw_reverse); }
double DetailedBalanceRow::relabeled_asymmetry() const {
  return std::abs(relabeled_forward - relabeled_reverse);
}

std::vector<DetailedBalanceRow> detailed_balance_report(const DiabaticModel& model,
                                                        const std::vector<double>& energies,
                                                        const std::vector<ChannelPair>& pairs,
                                                        double mu, double b,
                                                        const CollisionOptions& options) {
  auto probability = [&](std::size_t from, std::size_t to, double kinetic) {
    const CollisionGeometry g{std::sqrt(2.0 * kinetic / mu), b, mu};
    return run_collision(model, g, from, options).final_probs[to];
  };
  std::vector<DetailedBalanceRow> rows;
  for (const ChannelPair& pair : pairs) {
    check_channel(model, pair.i);
    check_channel(model, pair.f);
    const double de = model.asymptotes()[pair.f] - model.asymptotes()[pair.i];
    for (double e : energies) {
      DetailedBalanceRow row;
      row.i = pair.i;
      row.f = pair.f;
      row.total_energy = e;
      row.delta_e = de;
      if (!(e > std::max(de, 0.0))) {
        std::ostringstream os;
        os << "energy " << e << " is closed for the transition " << pair.i + 1 << " -> " << pair.f + 1;
        throw ConfigError(os.str());
      }
      row.raw_forward = probability(pair.i, pair.f, e);
      row.raw_reverse = probability(pair.f, pair.i, e - de);
      const double kbar = symmetric_kinetic_energy(e, de);
      row.relabeled_forward = probability(pair.i, pair.f, kbar);
      row.relabeled_reverse = probability(pair.f, pair.i, kbar);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace scmocc
