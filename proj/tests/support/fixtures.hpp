#pragma once

#include <mutex>
#include <string>
#include <vector>

#include "scmocc/diagnostics.hpp"
#include "scmocc/potential.hpp"

namespace fixture {

/// Collects warnings for the lifetime of the object instead of printing them.
class WarningCapture {
 public:
  WarningCapture() {
    previous_ = scmocc::set_warning_handler([this](const std::string& m) {
      std::lock_guard<std::mutex> lock(mutex_);
      messages_.push_back(m);
    });
  }
  ~WarningCapture() { scmocc::set_warning_handler(previous_); }
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  std::vector<std::string> messages() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return messages_;
  }
  bool contains(const std::string& needle) const {
    for (const auto& m : messages())
      if (m.find(needle) != std::string::npos) return true;
    return false;
  }

 private:
  scmocc::WarningHandler previous_;
  mutable std::mutex mutex_;
  std::vector<std::string> messages_;
};

/// V = [[0, c(R)], [c(R), 0]] with c = amplitude exp(-decay R). The matrix
/// commutes with itself at all times, so P_2 = sin^2(Int c dt) exactly.
inline scmocc::ExponentialCouplingSpec rabi_spec(double amplitude, double decay) {
  scmocc::ExponentialCouplingSpec s;
  s.asymptotes = {0.0, 0.0};
  s.amplitude = scmocc::RealMatrix::Zero(2, 2);
  s.amplitude(0, 1) = amplitude;
  s.decay = scmocc::RealMatrix::Ones(2, 2);
  s.decay(0, 1) = decay;
  return s;
}

/// Two channels, exothermic 1 -> 2 by 0.05 hartree, repulsive walls.
inline scmocc::ExponentialCouplingSpec two_state_spec() {
  scmocc::ExponentialCouplingSpec s;
  s.asymptotes = {0.0, -0.05};
  s.amplitude = scmocc::RealMatrix(2, 2);
  s.amplitude << 1.0, 0.08, 0.08, 1.5;
  s.decay = scmocc::RealMatrix(2, 2);
  s.decay << 1.0, 0.8, 0.8, 1.1;
  return s;
}

}  // namespace fixture
