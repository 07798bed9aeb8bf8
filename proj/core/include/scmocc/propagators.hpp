#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "scmocc/linalg.hpp"

namespace scmocc {

/// Channel amplitudes a(t) of i da/dt = V(t) a.
struct AmplitudeState {
  double t = 0.0;
  ComplexVector a;

  /// |a_i|^2 per channel.
  std::vector<double> probabilities() const;
};

enum class Method { CrankNicolson, Chebyshev, RK4, FehlbergRK, Diagonalization };
enum class BoundsEstimate { Exact, Gershgorin };

std::string to_string(Method m);
std::string to_string(BoundsEstimate b);
/// Accepts the to_string spellings plus short aliases (cn, cheb, rk4, rkf45, diag).
Method parse_method(const std::string& name);

struct PropagatorConfig {
  Method method = Method::FehlbergRK;
  double dt = 0.1;                  // fixed step, or the first trial step when adaptive
  double local_error_bound = 1e-4;  // FehlbergRK and adaptive Diagonalization
  bool adaptive = false;            // Diagonalization only: step doubling control
  bool precondition = false;
  BoundsEstimate bounds = BoundsEstimate::Gershgorin;
  double dt_min = 1e-8;

  bool is_adaptive() const {
    return method == Method::FehlbergRK || (method == Method::Diagonalization && adaptive);
  }
  /// Throws ConfigError when the step or tolerance needed by the method is not positive.
  void validate() const;
  /// e.g. "rkf45 precond(gershgorin) tol=1e-04".
  std::string describe() const;
};

struct SpectralBounds {
  double e_min = 0.0;
  double e_max = 0.0;
  double center() const { return 0.5 * (e_max + e_min); }
  double half_width() const { return 0.5 * (e_max - e_min); }
};

/// Writes V(t) into `out`.
using HamiltonianFn = std::function<void(double t, RealMatrix& out)>;

/// -i V a.
ComplexVector rhs(const RealMatrix& v, const ComplexVector& a);

/// Gershgorin enclosure: [min_i (V_ii - R_i), max_i (V_ii + R_i)] with R_i the
/// off-diagonal absolute row sum.
SpectralBounds gershgorin_bounds(const RealMatrix& v);

/// Extreme eigenvalues from a symmetric eigensolver.
SpectralBounds exact_bounds(const RealMatrix& v);

struct Preconditioned {
  RealMatrix shifted;  // V - shift * I
  double shift = 0.0;  // discarded global phase per unit time is exp(-i shift dt)
};

/// Centres the spectrum: H_I = V - I (e_max + e_min) / 2.
Preconditioned precondition(const RealMatrix& v, const SpectralBounds& bounds);

/// Cayley step (I + i V dt/2)^-1 (I - i V dt/2) a with V at the step midpoint.
ComplexVector step_crank_nicolson(const RealMatrix& v_mid, const ComplexVector& a, double dt);

/// exp(-i V dt) a by the Bessel-Chebyshev series. `bounds` must enclose the
/// spectrum of V. Throws PhysicsError when the series fails to conserve the
/// norm, which signals violated bounds.
ComplexVector step_chebyshev(const RealMatrix& v, const ComplexVector& a, double dt,
                             const SpectralBounds& bounds);

/// Number of Chebyshev terms used for a spectral half-width times dt of `x`.
std::size_t chebyshev_term_cap(double x);

/// Classical fourth-order Runge-Kutta step.
ComplexVector step_rk4(const HamiltonianFn& v, const ComplexVector& a, double t, double dt);

struct AdaptiveStep {
  ComplexVector a;
  double dt_used = 0.0;
  double dt_next = 0.0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

/// One accepted Fehlberg 4(5) step. The step is accepted when the embedded
/// error estimate is <= tol * max(1, |a|); the next step is
/// 0.9 dt (tol/err)^(1/5) clamped to [dt/4, 4 dt]. Throws PhysicsError if
/// the step falls below dt_min.
AdaptiveStep step_rkf45(const HamiltonianFn& v, const ComplexVector& a, double t,
                        double dt_suggest, double tol, double dt_min = 1e-8);

/// U exp(-i D dt) U^T a from the eigendecomposition V_mid = U D U^T.
ComplexVector step_diagonalization(const RealMatrix& v_mid, const ComplexVector& a, double dt);

/// Step doubling around step_diagonalization: a full step is compared with
/// two half steps (each at its own midpoint) and dt is halved until they agree
/// within tol * max(1, |a|). The two-half-step result is returned.
AdaptiveStep step_diagonalization_adaptive(const HamiltonianFn& v, const ComplexVector& a,
                                           double t, double dt_suggest, double tol,
                                           double dt_min = 1e-8);

// ---------------------------------------------------------------------------
// Driver

struct PropagationStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t hamiltonian_evaluations = 0;
  std::size_t preconditioner_refreshes = 0;
  double max_norm_error = 0.0;  // max over accepted steps of | |a| - |a_0| |
};

struct PropagationOptions {
  bool record_history = true;
  std::size_t max_history = 5000;
  /// Preconditioner refresh threshold: relative drift of either spectral bound
  /// with respect to the bounds' width at the last refresh.
  double refresh_drift = 0.1;
};

struct PropagationResult {
  AmplitudeState state;
  /// Integral of the preconditioner shift over time. Multiplying the amplitudes
  /// by exp(-i phase_shift) restores the unshifted global phase.
  double phase_shift = 0.0;
  std::vector<double> history_t;
  std::vector<std::vector<double>> history_p;  // |a_i|^2 at history_t
  PropagationStats stats;
};

/// Advances `start` to t_end (> start.t) under i da/dt = V(t) a.
PropagationResult propagate(const HamiltonianFn& v, const AmplitudeState& start, double t_end,
                            const PropagatorConfig& config, const PropagationOptions& options = {});

}  // namespace scmocc
