#pragma once

#include <optional>
#include <vector>

#include "scmocc/potential.hpp"

namespace scmocc {

/// Asymptotic relative speed v0 (a.u.), impact parameter b (bohr) and reduced
/// mass mu (electron masses). The collision energy is E = mu v0^2 / 2.
struct CollisionGeometry {
  double v0 = 1.0;
  double b = 0.0;
  double mu = 1.0;

  double energy() const { return 0.5 * mu * v0 * v0; }
  /// Throws ConfigError unless v0 > 0, b >= 0, mu > 0.
  void validate() const;
};

enum class TrajectoryKind { StraightLine, Curvilinear };

struct RadialState {
  double r = 0.0;
  double dr_dt = 0.0;
};

/// R(t) = sqrt(b^2 + v0^2 t^2), dR/dt = v0^2 t / R.
RadialState straight_line(const CollisionGeometry& geom, double t);

/// Smallest grid radius >= min_radius beyond which every V_ij stays within
/// `tolerance` of its asymptote. Falls back to R_max, past which the model is
/// asymptotic by construction.
double start_radius(const DiabaticModel& model, double min_radius = 30.0, double tolerance = 1e-8);

/// 1 - b^2/R^2 - V-bar(R)/E, the squared radial speed in units of v0^2.
double radicand(const DiabaticModel& model, const AveragingScheme& scheme,
                const CollisionGeometry& geom, double r, double energy_reference);

struct TurningPointOptions {
  double energy_reference = 0.0;  // subtracted from every V_ii before averaging
  double scan_step = 0.01;        // bohr, downward bracketing step
  double tolerance = 1e-12;       // bohr, bisection width
};

/// Largest root R_c < r_start of the radicand. Throws PhysicsError when the
/// radicand is not positive at r_start. When no sign change exists down to the
/// grid start, warns and returns R_min.
double find_turning_point(const DiabaticModel& model, const AveragingScheme& scheme,
                          const CollisionGeometry& geom, double r_start,
                          const TurningPointOptions& options = {});

struct RadialIntegrationOptions {
  double energy_reference = 0.0;
  std::optional<double> r_start;  // default: start_radius(model)
  double extent_factor = 2.0;     // path is integrated out to extent_factor * r_start
  std::size_t panels = 4000;      // quadrature panels in u = sqrt(R - R_c)
};

/// Internuclear path for one (v0, b). Time is zero at closest approach and the
/// incoming half mirrors the outgoing one, so R(-t) = R(t), dR/dt(-t) = -dR/dt(t).
class TrajectoryPath {
 public:
  static TrajectoryPath straight(const CollisionGeometry& geom, double r_start);

  TrajectoryKind kind() const { return kind_; }
  const CollisionGeometry& geometry() const { return geom_; }
  const std::optional<AveragingScheme>& scheme() const { return scheme_; }
  /// b for straight lines, R_c for curvilinear paths.
  double turning_point() const { return turning_point_; }
  double r_start() const { return r_start_; }
  /// Positive time at which R = r_start on the outgoing half.
  double start_time() const { return start_time_; }
  /// Largest |t| the path can be evaluated at.
  double max_time() const { return max_time_; }

  RadialState at(double t) const;

  /// Stored samples (curvilinear only; empty for straight lines), increasing t.
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& speeds() const { return speeds_; }

 private:
  friend TrajectoryPath integrate_radial(const DiabaticModel&, const AveragingScheme&,
                                         const CollisionGeometry&,
                                         const RadialIntegrationOptions&);
  TrajectoryPath() = default;

  TrajectoryKind kind_ = TrajectoryKind::StraightLine;
  CollisionGeometry geom_;
  std::optional<AveragingScheme> scheme_;
  double turning_point_ = 0.0;
  double r_start_ = 0.0;
  double start_time_ = 0.0;
  double max_time_ = 0.0;

  // Outgoing half (t >= 0) with R, dR/dt and d2R/dt2 at each node.
  std::vector<double> half_t_, half_r_, half_v_, half_a_;
  // Fritsch-Carlson limited slopes for R(t).
  std::vector<double> slope_r_;
  std::vector<double> times_, radii_, speeds_;
};

/// Curvilinear path from dR/dt = +-v0 sqrt(1 - b^2/R^2 - V-bar(R)/E). The
/// outgoing half is integrated from R_c with R = R_c + u^2, which removes the
/// inverse-square-root singularity of dt/dR at the turning point.
TrajectoryPath integrate_radial(const DiabaticModel& model, const AveragingScheme& scheme,
                                const CollisionGeometry& geom,
                                const RadialIntegrationOptions& options = {});

}  // namespace scmocc
