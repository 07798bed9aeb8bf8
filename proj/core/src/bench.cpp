#include "scmocc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "scmocc/diagnostics.hpp"

namespace scmocc {
namespace {

constexpr double kMinTimedSeconds = 0.02;

PropagatorConfig fixed(Method m, double dt, bool pre) {
  PropagatorConfig c;
  c.method = m;
  c.dt = dt;
  c.precondition = pre;
  return c;
}

PropagatorConfig adaptive(Method m, double tol, BoundsEstimate bounds) {
  PropagatorConfig c;
  c.method = m;
  c.adaptive = true;
  c.dt = 0.1;
  c.local_error_bound = tol;
  c.precondition = true;
  c.bounds = bounds;
  return c;
}

struct Timed {
  PropagationResult result;
  double seconds = 0.0;
};

Timed timed_run(const HamiltonianFn& v, const AmplitudeState& start, double t_end,
                const PropagatorConfig& config) {
  PropagationOptions opts;
  opts.record_history = false;
  const auto t0 = std::chrono::steady_clock::now();
  Timed out{propagate(v, start, t_end, config, opts), 0.0};
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace

void BenchCase::validate() const {
  if (repetitions < 3) throw ConfigError("bench needs at least 3 timed repetitions");
  if (!(reference_dt > 0.0)) throw ConfigError("bench reference step must be positive");
  for (const auto& c : configs) {
    c.config.validate();
    if (!c.config.is_adaptive() && reference_dt > c.config.dt * (1.0 + 1e-12)) {
      throw ConfigError("bench reference step " + std::to_string(reference_dt) +
                        " exceeds the step of '" + c.label + "'");
    }
  }
}

std::vector<BenchConfig> standard_configs() {
  return {
      {"cn", fixed(Method::CrankNicolson, 0.001, false)},
      {"chebyshev", fixed(Method::Chebyshev, 0.001, false)},
      {"rk4", fixed(Method::RK4, 0.001, false)},
      {"diag", fixed(Method::Diagonalization, 0.2, false)},
      {"cn+pre", fixed(Method::CrankNicolson, 0.05, true)},
      {"rk4+pre", fixed(Method::RK4, 0.1, true)},
      {"diag+pre", fixed(Method::Diagonalization, 0.2, true)},
      {"rkf45+pre+exact", adaptive(Method::FehlbergRK, 1e-4, BoundsEstimate::Exact)},
      {"diag-adaptive+pre+exact", adaptive(Method::Diagonalization, 1e-4, BoundsEstimate::Exact)},
      {"rkf45+pre+gershgorin", adaptive(Method::FehlbergRK, 1e-4, BoundsEstimate::Gershgorin)},
  };
}

std::vector<BenchConfig> tightened(const std::vector<BenchConfig>& configs) {
  std::vector<BenchConfig> out = configs;
  for (auto& c : out) {
    if (c.config.is_adaptive()) {
      c.config.local_error_bound /= 100.0;
    } else if (c.config.method == Method::RK4) {
      c.config.dt /= std::sqrt(10.0);
    } else {
      c.config.dt /= 10.0;
    }
    c.label += "/tight";
  }
  return out;
}

BenchCase standard_case() {
  BenchCase c;
  c.configs = standard_configs();
  return c;
}

double max_relative_error(const std::vector<double>& p, const std::vector<double>& reference,
                          double floor) {
  if (p.size() != reference.size()) throw ConfigError("probability vectors differ in length");
  double worst = 0.0;
  for (std::size_t f = 0; f < p.size(); ++f)
    worst = std::max(worst, std::abs(p[f] - reference[f]) / std::max(reference[f], floor));
  return worst;
}

BenchReport run_bench(const DiabaticModel& model, const BenchCase& bench,
                      const BenchProgress& progress) {
  bench.validate();
  const BenchProblem& pb = bench.problem;
  CollisionOptions copts;
  copts.trajectory = pb.trajectory;
  copts.scheme = pb.scheme;
  const TrajectoryPath path = build_path(model, pb.geom, pb.initial_channel, copts);
  const HamiltonianFn v = collision_hamiltonian(model, path, pb.initial_channel);

  AmplitudeState start;
  start.t = -path.start_time();
  start.a = ComplexVector::Zero(static_cast<Eigen::Index>(model.n()));
  start.a[static_cast<Eigen::Index>(pb.initial_channel)] = 1.0;
  const double t_end = path.start_time();

  BenchReport report;
  {
    PropagatorConfig ref = fixed(Method::CrankNicolson, bench.reference_dt, false);
    const Timed fine = timed_run(v, start, t_end, ref);
    ref.dt *= 2.0;
    const Timed coarse = timed_run(v, start, t_end, ref);
    const auto pf = fine.result.state.probabilities();
    const auto pc = coarse.result.state.probabilities();
    report.reference_probs.resize(pf.size());
    for (std::size_t f = 0; f < pf.size(); ++f)
      report.reference_probs[f] = (4.0 * pf[f] - pc[f]) / 3.0;
    report.reference_seconds = fine.seconds + coarse.seconds;
  }

  for (const auto& candidate : bench.configs) {
    BenchRow row;
    row.label = candidate.label;
    row.config = candidate.config;
    try {
      Timed warm = timed_run(v, start, t_end, candidate.config);
      const auto inner = static_cast<std::size_t>(
          std::clamp(std::ceil(kMinTimedSeconds / std::max(warm.seconds, 1e-9)), 1.0, 10000.0));
      std::vector<double> times;
      for (std::size_t r = 0; r < bench.repetitions; ++r) {
        double total = 0.0;
        for (std::size_t q = 0; q < inner; ++q)
          total += timed_run(v, start, t_end, candidate.config).seconds;
        times.push_back(total / static_cast<double>(inner));
      }
      std::sort(times.begin(), times.end());
      const std::size_t m = times.size();
      row.median_seconds = m % 2 ? times[m / 2] : 0.5 * (times[m / 2 - 1] + times[m / 2]);
      row.spread_seconds = times.back() - times.front();
      row.final_probs = warm.result.state.probabilities();
      row.steps = warm.result.stats.steps;
      row.max_norm_error = warm.result.stats.max_norm_error;
      row.max_relative_error =
          max_relative_error(row.final_probs, report.reference_probs, bench.error_floor);
      row.within_bound = row.max_relative_error <= bench.error_bound;
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    if (progress) progress(row);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string machine_info() {
  std::string cpu = "unknown cpu";
  std::ifstream in("/proc/cpuinfo");
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) cpu = line.substr(colon + 2);
      break;
    }
  }
  std::ostringstream os;
  os << cpu << "; " << std::thread::hardware_concurrency() << " hw threads; ";
#if defined(__clang__)
  os << "clang " << __clang_major__ << '.' << __clang_minor__;
#elif defined(__GNUC__)
  os << "gcc " << __GNUC__ << '.' << __GNUC_MINOR__;
#else
  os << "unknown compiler";
#endif
  return os.str();
}

}  // namespace scmocc
