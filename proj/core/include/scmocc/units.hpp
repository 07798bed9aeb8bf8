#pragma once

// Atomic units throughout the numeric core (hbar = m_e = e = a0 = 1).
namespace scmocc::units {

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double kHartreeEv = 27.211386245988;
inline constexpr double kHartreeMhz = 6.579683920502e9;  // E_h / h in MHz
inline constexpr double kAuTimeNs = 2.4188843265857e-8;  // hbar / E_h in ns
inline constexpr double kAmuInElectronMasses = 1822.888486209;
inline constexpr double kBohrCm = 0.529177210903e-8;

// Phase accumulated per (MHz * ns) of device energy-time: 2*pi*1e-3 rad.
inline constexpr double kRadPerMhzNs = 2.0 * kPi * 1e-3;

constexpr double hartree_to_ev(double e) { return e * kHartreeEv; }
constexpr double ev_to_hartree(double e) { return e / kHartreeEv; }

}  // namespace scmocc::units
