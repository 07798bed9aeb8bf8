#include <algorithm>
#include <cmath>

#include "scmocc/diagnostics.hpp"
#include "scmocc/propagators.hpp"

namespace scmocc {
namespace {

// Tracks the constant spectral shift of the preconditioned Hamiltonian and
// refreshes it when the bounds drift too far from those it was computed from.
class ShiftTracker {
 public:
  ShiftTracker(bool enabled, BoundsEstimate estimate, double drift)
      : enabled_(enabled), estimate_(estimate), drift_(drift) {}

  bool enabled() const { return enabled_; }
  double shift() const { return shift_; }
  std::size_t refreshes() const { return refreshes_; }

  void observe(const RealMatrix& unshifted) {
    if (!enabled_) return;
    const SpectralBounds b = estimate_ == BoundsEstimate::Exact ? exact_bounds(unshifted)
                                                                : gershgorin_bounds(unshifted);
    if (initialised_) {
      const double width = std::max(reference_.e_max - reference_.e_min,
                                    1e-12 * std::max(1.0, std::abs(reference_.center())));
      if (std::abs(b.e_min - reference_.e_min) <= drift_ * width &&
          std::abs(b.e_max - reference_.e_max) <= drift_ * width)
        return;
    }
    reference_ = b;
    shift_ = b.center();
    initialised_ = true;
    ++refreshes_;
  }

 private:
  bool enabled_;
  BoundsEstimate estimate_;
  double drift_;
  bool initialised_ = false;
  SpectralBounds reference_;
  double shift_ = 0.0;
  std::size_t refreshes_ = 0;
};

// Keeps at most ~2*limit samples by thinning every other sample and doubling
// the stride whenever the buffer fills up; downsampled to `limit` at the end.
class HistoryRecorder {
 public:
  HistoryRecorder(bool enabled, std::size_t limit) : enabled_(enabled), limit_(std::max<std::size_t>(limit, 2)) {}

  void offer(std::size_t step_index, double t, const ComplexVector& a) {
    if (!enabled_ || step_index % stride_ != 0) return;
    push(t, a);
    if (t_.size() > 2 * limit_) {
      std::size_t w = 0;
      for (std::size_t r = 0; r < t_.size(); r += 2, ++w) {
        if (w == r) continue;  // self move-assignment would empty the row
        t_[w] = t_[r];
        p_[w] = std::move(p_[r]);
      }
      t_.resize(w);
      p_.resize(w);
      stride_ *= 2;
    }
  }

  void finish(double t, const ComplexVector& a, std::vector<double>& t_out,
              std::vector<std::vector<double>>& p_out) {
    if (!enabled_) return;
    if (t_.empty() || t_.back() != t) push(t, a);
    if (t_.size() > limit_) {
      const std::size_t m = t_.size();
      for (std::size_t k = 0; k < limit_; ++k) {
        const std::size_t src = (k * (m - 1)) / (limit_ - 1);
        t_out.push_back(t_[src]);
        p_out.push_back(p_[src]);
      }
    } else {
      t_out = std::move(t_);
      p_out = std::move(p_);
    }
  }

 private:
  void push(double t, const ComplexVector& a) {
    std::vector<double> p(static_cast<std::size_t>(a.size()));
    for (Eigen::Index i = 0; i < a.size(); ++i) p[static_cast<std::size_t>(i)] = std::norm(a[i]);
    t_.push_back(t);
    p_.push_back(std::move(p));
  }

  bool enabled_;
  std::size_t limit_;
  std::size_t stride_ = 1;
  std::vector<double> t_;
  std::vector<std::vector<double>> p_;
};

}  // namespace

PropagationResult propagate(const HamiltonianFn& v, const AmplitudeState& start, double t_end,
                            const PropagatorConfig& config, const PropagationOptions& options) {
  config.validate();
  if (!(t_end > start.t)) throw ConfigError("propagation end time must follow the start time");

  PropagationResult result;
  PropagationStats& stats = result.stats;
  ShiftTracker tracker(config.precondition, config.bounds, options.refresh_drift);
  HistoryRecorder history(options.record_history, options.max_history);

  HamiltonianFn counted = [&](double t, RealMatrix& out) {
    v(t, out);
    ++stats.hamiltonian_evaluations;
  };
  HamiltonianFn shifted = [&](double t, RealMatrix& out) {
    counted(t, out);
    if (tracker.shift() != 0.0) out.diagonal().array() -= tracker.shift();
  };

  ComplexVector a = start.a;
  const double norm0 = a.norm();
  double t = start.t;
  double phase = 0.0;
  RealMatrix m;
  std::size_t index = 0;
  history.offer(index, t, a);

  auto after_step = [&](double dt_taken) {
    phase += tracker.shift() * dt_taken;
    ++stats.steps;
    ++index;
    stats.max_norm_error = std::max(stats.max_norm_error, std::abs(a.norm() - norm0));
    history.offer(index, t, a);
  };

  const double span = t_end - start.t;
  if (!config.is_adaptive()) {
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / config.dt - 1e-9)));
    const double h = span / static_cast<double>(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      const double t0 = start.t + static_cast<double>(k) * h;
      switch (config.method) {
        case Method::CrankNicolson:
        case Method::Chebyshev:
        case Method::Diagonalization: {
          counted(t0 + 0.5 * h, m);
          tracker.observe(m);
          if (tracker.shift() != 0.0) m.diagonal().array() -= tracker.shift();
          if (config.method == Method::CrankNicolson) {
            a = step_crank_nicolson(m, a, h);
          } else if (config.method == Method::Diagonalization) {
            a = step_diagonalization(m, a, h);
          } else {
            const SpectralBounds b =
                config.bounds == BoundsEstimate::Exact ? exact_bounds(m) : gershgorin_bounds(m);
            a = step_chebyshev(m, a, h, b);
          }
          break;
        }
        case Method::RK4:
          if (tracker.enabled()) {
            counted(t0, m);
            tracker.observe(m);
          }
          a = step_rk4(shifted, a, t0, h);
          break;
        case Method::FehlbergRK:
          break;  // adaptive, handled below
      }
      t = (k + 1 == steps) ? t_end : start.t + static_cast<double>(k + 1) * h;
      after_step(h);
    }
  } else {
    double dt = config.dt;
    const double eps = 1e-13 * std::max(1.0, std::max(std::abs(t_end), std::abs(start.t)));
    while (t_end - t > eps) {
      const double remaining = t_end - t;
      const bool last = dt >= remaining;
      const double trial = last ? remaining : dt;
      if (tracker.enabled()) {
        counted(t, m);
        tracker.observe(m);
      }
      AdaptiveStep s = config.method == Method::FehlbergRK
                           ? step_rkf45(shifted, a, t, trial, config.local_error_bound, config.dt_min)
                           : step_diagonalization_adaptive(shifted, a, t, trial,
                                                           config.local_error_bound, config.dt_min);
      a = std::move(s.a);
      stats.rejected += s.rejected;
      t = (last && s.dt_used == trial) ? t_end : t + s.dt_used;
      // A step shortened only to land on t_end says nothing about the next size.
      dt = (last && s.dt_used == trial) ? dt : s.dt_next;
      after_step(s.dt_used);
    }
    t = t_end;
  }

  stats.preconditioner_refreshes = tracker.refreshes();
  result.state = AmplitudeState{t, a};
  result.phase_shift = phase;
  history.finish(t, a, result.history_t, result.history_p);
  return result;
}

}  // namespace scmocc
