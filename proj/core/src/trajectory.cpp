#include "scmocc/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "scmocc/diagnostics.hpp"

namespace scmocc {
namespace {

constexpr std::array<double, 5> kGaussNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights = {0.2369268850561891, 0.4786286704993665,
                                                 0.5688888888888889, 0.4786286704993665,
                                                 0.2369268850561891};

std::string num(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace

void CollisionGeometry::validate() const {
  if (!(v0 > 0.0)) throw ConfigError("collision speed v0 must be positive");
  if (!(b >= 0.0)) throw ConfigError("impact parameter b must be non-negative");
  if (!(mu > 0.0)) throw ConfigError("reduced mass must be positive");
}

RadialState straight_line(const CollisionGeometry& geom, double t) {
  const double r = std::sqrt(geom.b * geom.b + geom.v0 * geom.v0 * t * t);
  const double v = r > 0.0 ? geom.v0 * geom.v0 * t / r : 0.0;
  return {r, v};
}

double start_radius(const DiabaticModel& model, double min_radius, double tolerance) {
  const auto& grid = model.grid();
  if (grid.back() <= min_radius) return min_radius;
  // Walk inwards from the grid edge while every element stays asymptotic.
  std::size_t first_ok = grid.size();
  for (std::size_t k = grid.size(); k-- > 0;) {
    if (grid[k] < min_radius) break;
    const RealMatrix v = model.node_matrix(k);
    bool ok = true;
    for (std::size_t i = 0; i < model.n() && ok; ++i)
      for (std::size_t j = 0; j < model.n() && ok; ++j) {
        const double target = (i == j) ? model.asymptotes()[i] : 0.0;
        ok = std::abs(v(i, j) - target) < tolerance;
      }
    if (!ok) break;
    first_ok = k;
  }
  if (first_ok == grid.size()) return model.r_max();
  return std::max(min_radius, grid[first_ok]);
}

double radicand(const DiabaticModel& model, const AveragingScheme& scheme,
                const CollisionGeometry& geom, double r, double energy_reference) {
  const double vbar = averaged_potential(model, r, scheme, energy_reference);
  return 1.0 - (geom.b * geom.b) / (r * r) - vbar / geom.energy();
}

double find_turning_point(const DiabaticModel& model, const AveragingScheme& scheme,
                          const CollisionGeometry& geom, double r_start,
                          const TurningPointOptions& options) {
  geom.validate();
  auto f = [&](double r) { return radicand(model, scheme, geom, r, options.energy_reference); };
  if (!(f(r_start) > 0.0)) {
    throw PhysicsError("entrance channel classically forbidden at R_start = " + num(r_start));
  }
  const double floor = model.r_min();
  double hi = r_start;
  while (hi > floor) {
    const double lo = std::max(floor, hi - options.scan_step);
    if (f(lo) <= 0.0) {
      // f(lo) <= 0 < f(hi): bisect.
      double a = lo, c = hi;
      for (int it = 0; it < 200 && (c - a) > options.tolerance; ++it) {
        const double mid = 0.5 * (a + c);
        if (mid <= a || mid >= c) break;
        if (f(mid) > 0.0) c = mid; else a = mid;
      }
      return c;
    }
    hi = lo;
  }
  warn("no turning point above grid start for v0 = " + num(geom.v0) + ", b = " + num(geom.b) +
       "; reflecting at R_min = " + num(floor));
  return floor;
}

TrajectoryPath TrajectoryPath::straight(const CollisionGeometry& geom, double r_start) {
  geom.validate();
  if (!(r_start > geom.b)) throw ConfigError("start radius must exceed the impact parameter");
  TrajectoryPath p;
  p.kind_ = TrajectoryKind::StraightLine;
  p.geom_ = geom;
  p.turning_point_ = geom.b;
  p.r_start_ = r_start;
  p.start_time_ = std::sqrt(r_start * r_start - geom.b * geom.b) / geom.v0;
  p.max_time_ = std::numeric_limits<double>::infinity();
  return p;
}

RadialState TrajectoryPath::at(double t) const {
  if (kind_ == TrajectoryKind::StraightLine) return straight_line(geom_, t);
  const double s = std::abs(t);
  if (s > max_time_ * (1.0 + 1e-12)) {
    throw PhysicsError("time " + num(t) + " beyond integrated trajectory (|t| <= " + num(max_time_) + ")");
  }
  auto it = std::upper_bound(half_t_.begin(), half_t_.end(), s);
  std::size_t k = it == half_t_.begin() ? 0 : static_cast<std::size_t>(it - half_t_.begin()) - 1;
  k = std::min(k, half_t_.size() - 2);
  const double h = half_t_[k + 1] - half_t_[k];
  const double tau = (s - half_t_[k]) / h;
  const double tau2 = tau * tau, tau3 = tau2 * tau;
  const double h00 = 2 * tau3 - 3 * tau2 + 1, h10 = tau3 - 2 * tau2 + tau;
  const double h01 = -2 * tau3 + 3 * tau2, h11 = tau3 - tau2;
  const double r = h00 * half_r_[k] + h10 * h * slope_r_[k] + h01 * half_r_[k + 1] +
                   h11 * h * slope_r_[k + 1];
  const double v = h00 * half_v_[k] + h10 * h * half_a_[k] + h01 * half_v_[k + 1] +
                   h11 * h * half_a_[k + 1];
  return {r, t < 0.0 ? -v : v};
}

TrajectoryPath integrate_radial(const DiabaticModel& model, const AveragingScheme& scheme,
                                const CollisionGeometry& geom,
                                const RadialIntegrationOptions& options) {
  geom.validate();
  const double r_start = options.r_start.value_or(start_radius(model));
  TurningPointOptions tp;
  tp.energy_reference = options.energy_reference;
  const double rc = find_turning_point(model, scheme, geom, r_start, tp);
  const double r_end = options.extent_factor * r_start;
  if (!(r_end >= r_start)) throw ConfigError("trajectory extent factor must be >= 1");

  const double energy = geom.energy();
  const double ref = options.energy_reference;
  auto f = [&](double r) { return radicand(model, scheme, geom, r, ref); };
  auto fprime = [&](double r) {
    const double h = 1e-5 * std::max(1.0, r);
    const double lo = std::max(r - h, 1e-12);
    const double dv = (averaged_potential(model, r + h, scheme, ref) -
                       averaged_potential(model, lo, scheme, ref)) / (r + h - lo);
    return 2.0 * geom.b * geom.b / (r * r * r) - dv / energy;
  };

  const double f_at_rc = f(rc);
  const bool reflecting = f_at_rc > 1e-12;  // no root: bounce off R_min with finite speed
  const double slope_at_rc = std::max(fprime(rc), 0.0);

  // dt/du = 2u / (v0 sqrt(f(R_c + u^2))), finite at u = 0.
  auto dt_du = [&](double u) {
    const double r = rc + u * u;
    // Drop the bisection residual so R_c is an exact root; otherwise the
    // 1/sqrt(f) singularity turns a 1e-13 residual into a 1e-8 time offset.
    double fr = reflecting ? f(r) : f(r) - f_at_rc;
    if (!reflecting && fr <= 0.0) fr = slope_at_rc * u * u;
    if (fr <= 0.0) {
      throw PhysicsError("radial velocity vanishes at R = " + num(r) +
                         " beyond the turning point " + num(rc));
    }
    return 2.0 * u / (geom.v0 * std::sqrt(fr));
  };

  const std::size_t panels = std::max<std::size_t>(options.panels, 16);
  const double u_max = std::sqrt(r_end - rc);
  const double du = u_max / static_cast<double>(panels);

  TrajectoryPath p;
  p.kind_ = TrajectoryKind::Curvilinear;
  p.geom_ = geom;
  p.scheme_ = scheme;
  p.turning_point_ = rc;
  p.r_start_ = r_start;
  p.half_t_.reserve(panels + 1);
  double t = 0.0;
  for (std::size_t k = 0; k <= panels; ++k) {
    const double u = du * static_cast<double>(k);
    if (k > 0) {
      const double mid = u - 0.5 * du;
      double sum = 0.0;
      for (std::size_t q = 0; q < kGaussNodes.size(); ++q)
        sum += kGaussWeights[q] * dt_du(mid + 0.5 * du * kGaussNodes[q]);
      t += 0.5 * du * sum;
    }
    const double r = (k == panels) ? r_end : rc + u * u;
    const double fr = (k == 0 && !reflecting) ? 0.0 : std::max(f(r), 0.0);
    p.half_t_.push_back(t);
    p.half_r_.push_back(r);
    p.half_v_.push_back(geom.v0 * std::sqrt(fr));
    p.half_a_.push_back(0.5 * geom.v0 * geom.v0 * fprime(r));
  }

  // Fritsch-Carlson limiting keeps the Hermite interpolant of R(t) monotone.
  p.slope_r_ = p.half_v_;
  for (std::size_t k = 0; k + 1 < p.half_t_.size(); ++k) {
    const double delta = (p.half_r_[k + 1] - p.half_r_[k]) / (p.half_t_[k + 1] - p.half_t_[k]);
    if (delta <= 0.0) continue;
    const double alpha = p.slope_r_[k] / delta, beta = p.slope_r_[k + 1] / delta;
    const double norm = alpha * alpha + beta * beta;
    if (norm > 9.0) {
      const double tau = 3.0 / std::sqrt(norm);
      p.slope_r_[k] = tau * alpha * delta;
      p.slope_r_[k + 1] = tau * beta * delta;
    }
  }

  p.max_time_ = p.half_t_.back();
  // Time at r_start by bisection on the monotone interpolant.
  {
    double lo = 0.0, hi = p.max_time_;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (p.at(mid).r < r_start) lo = mid; else hi = mid;
    }
    p.start_time_ = 0.5 * (lo + hi);
  }

  const std::size_t m = p.half_t_.size();
  p.times_.reserve(2 * m - 1);
  for (std::size_t k = m; k-- > 1;) {
    p.times_.push_back(-p.half_t_[k]);
    p.radii_.push_back(p.half_r_[k]);
    p.speeds_.push_back(-p.half_v_[k]);
  }
  for (std::size_t k = 0; k < m; ++k) {
    p.times_.push_back(p.half_t_[k]);
    p.radii_.push_back(p.half_r_[k]);
    p.speeds_.push_back(p.half_v_[k]);
  }
  return p;
}

}  // namespace scmocc
