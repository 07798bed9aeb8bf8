#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace scmocc {

// Malformed input, invalid parameters, unreadable files. The CLI maps this to
// exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failures of the numerics on otherwise valid input: forbidden entrance
// channel, step-size underflow, diverging series. The CLI maps this to exit
// code 1.
class PhysicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using WarningHandler = std::function<void(const std::string&)>;

/// Emits a warning through the installed handler (stderr by default).
/// Thread-safe.
void warn(const std::string& message);

/// Replaces the warning handler and returns the previous one. Passing an empty
/// function restores the stderr default.
WarningHandler set_warning_handler(WarningHandler handler);

}  // namespace scmocc
