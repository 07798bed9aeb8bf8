#include "scmocc/sesmap.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "scmocc/diagnostics.hpp"
#include "scmocc/units.hpp"

namespace scmocc {

void DeviceSpec::validate(std::size_t channels) const {
  if (!(g_max_mhz > 0.0)) throw ConfigError("device.g_max_mhz must be positive");
  if (!(t_meas_ns > 0.0)) throw ConfigError("device.t_meas_ns must be positive");
  if (n_qubits && *n_qubits != channels) {
    throw ConfigError("device has " + std::to_string(*n_qubits) + " qubits but the model has " +
                      std::to_string(channels) + " channels");
  }
}

std::size_t SesMapping::segment(double t) const {
  const double span = t_.back() - t_.front();
  if (t < t_.front() - 1e-12 * span || t > t_.back() + 1e-12 * span) {
    std::ostringstream os;
    os << "time " << t << " outside the mapped range [" << t_.front() << ", " << t_.back() << "]";
    throw ConfigError(os.str());
  }
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t k = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
  return std::min(k, t_.size() - 2);
}

double SesMapping::lambda_at(double t) const {
  const std::size_t k = segment(t);
  const double s = (t - t_[k]) / (t_[k + 1] - t_[k]);
  return lambda_[k] + s * (lambda_[k + 1] - lambda_[k]);
}

double SesMapping::c_at(double t) const {
  const std::size_t k = segment(t);
  const double s = (t - t_[k]) / (t_[k + 1] - t_[k]);
  return c_[k] + s * (c_[k + 1] - c_[k]);
}

double SesMapping::simulated_time(double t) const {
  const std::size_t k = segment(t);
  const double h = t_[k + 1] - t_[k];
  const double s = t - t_[k];
  const double slope = (lambda_[k + 1] - lambda_[k]) / h;
  return tau_ns_[k] + units::kAuTimeNs * (lambda_[k] * s + 0.5 * slope * s * s);
}

double SesMapping::physical_time(double tau_ns) const {
  const double span = tau_ns_.back() - tau_ns_.front();
  if (tau_ns < tau_ns_.front() - 1e-12 * span || tau_ns > tau_ns_.back() + 1e-12 * span) {
    std::ostringstream os;
    os << "device time " << tau_ns << " ns outside the mapped range";
    throw ConfigError(os.str());
  }
  auto it = std::upper_bound(tau_ns_.begin(), tau_ns_.end(), tau_ns);
  std::size_t k = it == tau_ns_.begin() ? 0 : static_cast<std::size_t>(it - tau_ns_.begin()) - 1;
  k = std::min(k, t_.size() - 2);
  const double h = t_[k + 1] - t_[k];
  const double d = std::max(0.0, (tau_ns - tau_ns_[k]) / units::kAuTimeNs);
  // lambda_k s + a s^2 = d, solved in the cancellation-free form.
  const double a = 0.5 * (lambda_[k + 1] - lambda_[k]) / h;
  const double disc = std::max(0.0, lambda_[k] * lambda_[k] + 4.0 * a * d);
  const double s = 2.0 * d / (lambda_[k] + std::sqrt(disc));
  return t_[k] + std::min(s, h);
}

class SesMappingBuilder {
 public:
  static std::shared_ptr<SesMapping> build(const HamiltonianFn& h, double t_begin, double t_end,
                                           const DeviceSpec& device, const LambdaPolicy& policy,
                                           std::size_t samples_per_half) {
    if (!(t_begin < 0.0 && t_end > 0.0))
      throw ConfigError("SES mapping range must contain t = 0 in its interior");
    if (samples_per_half < 2) throw ConfigError("SES mapping needs at least 2 samples per half");
    if (!(policy.lambda_min > 0.0)) throw ConfigError("device.lambda_min must be positive");

    auto m = std::make_shared<SesMapping>();
    m->g_max_ = device.g_max_mhz;
    const double reach = std::max(-t_begin, t_end);
    const double dt = reach / static_cast<double>(samples_per_half);
    const auto below = static_cast<long>(std::ceil(-t_begin / dt - 1e-9));
    const auto above = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    for (long k = -below; k <= above; ++k) m->t_.push_back(static_cast<double>(k) * dt);
    m->t_.front() = t_begin;
    m->t_.back() = t_end;

    const std::size_t count = m->t_.size();
    m->c_.resize(count);
    m->lambda_.resize(count);
    RealMatrix v;
    std::size_t n = 0;
    for (std::size_t k = 0; k < count; ++k) {
      h(m->t_[k], v);
      n = static_cast<std::size_t>(v.rows());
      if (v.rows() != v.cols() || !v.isApprox(v.transpose(), 1e-12))
        throw ConfigError("Hamiltonian handed to the SES mapping is not symmetric");
      const double c = v.trace() / static_cast<double>(n);
      const double spread = (v - c * RealMatrix::Identity(v.rows(), v.cols())).cwiseAbs().maxCoeff();
      m->c_[k] = c;
      m->lambda_[k] = std::max(policy.lambda_min, spread * units::kHartreeMhz / device.g_max_mhz);
    }
    if (policy.smoothing_window > 0) smooth(m->lambda_, policy.smoothing_window, policy.lambda_min);

    const auto zero = static_cast<std::size_t>(below);
    m->tau_ns_.assign(count, 0.0);
    for (std::size_t k = zero + 1; k < count; ++k)
      m->tau_ns_[k] = m->tau_ns_[k - 1] + 0.5 * (m->lambda_[k - 1] + m->lambda_[k]) *
                                            (m->t_[k] - m->t_[k - 1]) * units::kAuTimeNs;
    for (std::size_t k = zero; k-- > 0;)
      m->tau_ns_[k] = m->tau_ns_[k + 1] - 0.5 * (m->lambda_[k] + m->lambda_[k + 1]) *
                                            (m->t_[k + 1] - m->t_[k]) * units::kAuTimeNs;

    m->device_.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      h(m->t_[k], v);
      auto& row = m->device_[k];
      row.reserve(n * (n + 1) / 2);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
          const double e = v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                           (i == j ? m->c_[k] : 0.0);
          row.push_back(e * units::kHartreeMhz / m->lambda_[k]);
        }
    }
    return m;
  }

 private:
  static void smooth(std::vector<double>& x, std::size_t w, double floor) {
    std::vector<double> y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      const std::size_t lo = k >= w ? k - w : 0;
      const std::size_t hi = std::min(x.size() - 1, k + w);
      double s = 0.0;
      for (std::size_t q = lo; q <= hi; ++q) s += x[q];
      // Never below the raw value, which would push |H_ij| past g_max.
      y[k] = std::max({floor, x[k], s / static_cast<double>(hi - lo + 1)});
    }
    x = std::move(y);
  }
};

RescaledHamiltonian rescale_hamiltonian(HamiltonianFn h, double t_begin, double t_end,
                                        const DeviceSpec& device, const LambdaPolicy& policy,
                                        std::size_t samples_per_half) {
  auto mapping = SesMappingBuilder::build(h, t_begin, t_end, device, policy, samples_per_half);
  RescaledHamiltonian out;
  out.mapping = *mapping;
  out.device = [h = std::move(h), mapping](double tau, RealMatrix& v) {
    const double t = mapping->physical_time(tau);
    h(t, v);
    v.diagonal().array() -= mapping->c_at(t);
    v *= units::kHartreeMhz * units::kRadPerMhzNs / mapping->lambda_at(t);
  };
  return out;
}

SesResult run_ses(const DiabaticModel& model, const CollisionGeometry& geom,
                  std::size_t initial_channel, const SesOptions& options) {
  options.device.validate(model.n());
  SesResult out;
  out.classical = run_collision(model, geom, initial_channel, options.collision);

  const TrajectoryPath path = build_path(model, geom, initial_channel, options.collision);
  const HamiltonianFn h = collision_hamiltonian(model, path, initial_channel);
  RescaledHamiltonian rescaled = rescale_hamiltonian(h, out.classical.t_begin, out.classical.t_end,
                                                     options.device, options.lambda,
                                                     options.samples_per_half);
  out.mapping = rescaled.mapping;
  const double tau0 = out.mapping.simulated_time(out.classical.t_begin);
  const double tau1 = out.mapping.simulated_time(out.classical.t_end);

  AmplitudeState start;
  start.t = tau0;
  start.a = ComplexVector::Zero(static_cast<Eigen::Index>(model.n()));
  start.a[static_cast<Eigen::Index>(initial_channel)] = 1.0;
  PropagationOptions popts;
  popts.max_history = options.collision.max_history;
  PropagationResult dev = propagate(rescaled.device, start, tau1, options.device_propagator, popts);

  CollisionResult& d = out.device;
  d.geom = geom;
  d.initial_channel = initial_channel;
  d.final_probs = dev.state.probabilities();
  d.history_t = std::move(dev.history_t);
  d.history_p = std::move(dev.history_p);
  d.propagator = options.device_propagator;
  d.trajectory = options.collision.trajectory;
  d.scheme = options.collision.scheme;
  d.turning_point = out.classical.turning_point;
  d.t_begin = tau0;
  d.t_end = tau1;
  d.stable = true;
  d.stats = dev.stats;

  out.t_qc_ns = tau1 - tau0;
  out.t_qu_ns = out.t_qc_ns + options.device.t_meas_ns;
  for (std::size_t f = 0; f < model.n(); ++f) {
    SesChannelRow row;
    row.f = f;
    row.classical = out.classical.final_probs[f];
    row.ses = d.final_probs[f];
    row.relative_error = row.classical > 0.0 ? std::abs(row.ses - row.classical) / row.classical
                                             : std::abs(row.ses - row.classical);
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace scmocc
