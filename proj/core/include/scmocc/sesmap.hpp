#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "scmocc/scattering.hpp"

namespace scmocc {

/// Emulated single-excitation-subspace processor: one qubit per channel with
/// all-to-all tunable couplings of magnitude at most g_max.
struct DeviceSpec {
  double g_max_mhz = 50.0;
  double t_meas_ns = 100.0;
  std::optional<std::size_t> n_qubits;  // must match the channel count when set

  void validate(std::size_t channels) const;
};

struct LambdaPolicy {
  double lambda_min = 1e-6;
  std::size_t smoothing_window = 0;  // centred moving average over 2w+1 samples, 0 = off
};

/// Rescaling record on a uniform physical-time grid that contains t = 0.
///
/// Between samples lambda is linear in t, so the device time
/// tau(t) = Int_0^t lambda dt' is piecewise quadratic and equals the
/// trapezoid sums at the nodes. The device Hamiltonian uses the same
/// interpolated lambda, which makes the change of variables exact.
class SesMapping {
 public:
  const std::vector<double>& t() const { return t_; }
  const std::vector<double>& c() const { return c_; }            // hartree
  const std::vector<double>& lambda() const { return lambda_; }  // dimensionless
  const std::vector<double>& t_qc_ns() const { return tau_ns_; }
  /// Upper triangle (row-major) of the device Hamiltonian at each sample, MHz.
  const std::vector<std::vector<double>>& device_elements() const { return device_; }
  double g_max_mhz() const { return g_max_; }

  double lambda_at(double t) const;
  double c_at(double t) const;
  /// Device time in ns at physical time t (a.u.). Throws ConfigError outside
  /// the sampled range.
  double simulated_time(double t) const;
  /// Inverse of simulated_time.
  double physical_time(double tau_ns) const;

  double t_begin() const { return t_.front(); }
  double t_end() const { return t_.back(); }

 private:
  friend class SesMappingBuilder;
  std::size_t segment(double t) const;

  std::vector<double> t_, c_, lambda_, tau_ns_;
  std::vector<std::vector<double>> device_;
  double g_max_ = 0.0;
};

struct RescaledHamiltonian {
  /// 2 pi 1e-3 * H(tau) in rad/ns: i da/dtau = device(tau) a with tau in ns.
  HamiltonianFn device;
  SesMapping mapping;
};

/// c(t) = tr h / n, lambda(t) = max(lambda_min, max_ij |h - c I|_ij / g_max)
/// with h in MHz, H = (h - c I) / lambda. The grid has `samples_per_half`
/// intervals on each side of t = 0 and must reach both ends. Throws ConfigError
/// for a non-symmetric h.
RescaledHamiltonian rescale_hamiltonian(HamiltonianFn h, double t_begin, double t_end,
                                        const DeviceSpec& device, const LambdaPolicy& policy = {},
                                        std::size_t samples_per_half = 2000);

struct SesOptions {
  DeviceSpec device;
  LambdaPolicy lambda;
  CollisionOptions collision;          // physical-frame run
  PropagatorConfig device_propagator;  // steps in ns
  std::size_t samples_per_half = 2000;
};

struct SesChannelRow {
  std::size_t f = 0;
  double classical = 0.0;
  double ses = 0.0;
  double relative_error = 0.0;  // |ses - classical| / classical
};

struct SesResult {
  CollisionResult classical;
  CollisionResult device;  // history in device time (ns)
  SesMapping mapping;
  double t_qc_ns = 0.0;
  double t_qu_ns = 0.0;  // t_qc + t_meas
  std::vector<SesChannelRow> rows;
};

/// Runs the collision in the physical frame, then again in device time over
/// the same physical interval, and compares final probabilities.
SesResult run_ses(const DiabaticModel& model, const CollisionGeometry& geom,
                  std::size_t initial_channel, const SesOptions& options);

}  // namespace scmocc
