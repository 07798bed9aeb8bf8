#pragma once

// Test-only reference computations. Nothing here calls into the library's
// numerics, so agreement with the library is a real cross-check.

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using RMat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;

/// Gauss-Legendre nodes and weights on [-1, 1], from Newton iteration on P_n.
void gauss_legendre_rule(int n, std::vector<double>& x, std::vector<double>& w);

/// Composite Gauss-Legendre (order `order`) over `panels` equal panels.
double integrate(const std::function<double(double)>& f, double a, double b, int panels = 200,
                 int order = 10);

/// Largest x in [lo, hi] where f changes sign, by a uniform downward scan of
/// `steps` cells and bisection to machine precision.
double scan_root(const std::function<double(double)>& f, double lo, double hi, int steps);

/// exp(-i V t) a by the scaling-and-squaring Pade exponential.
CVec expm_apply(const RMat& v, const CVec& a, double t);

/// Two-level closed form exp(-i H t) for H = [[a, c], [c, d]] via the Pauli
/// decomposition.
Eigen::Matrix2cd two_level_propagator(double a, double c, double d, double t);

/// Fourth-order Magnus propagation with two Gauss points per step and a
/// Pade exponential.
CVec magnus4(const std::function<RMat(double)>& v, CVec a, double t0, double t1, int steps);

/// exp(-2 pi V12^2 / (v |dF|)).
double landau_zener(double coupling, double speed, double slope_difference);

/// Random symmetric matrix with entries uniform in [-scale, scale].
RMat random_symmetric(std::mt19937_64& rng, int n, double scale = 1.0);
CVec random_state(std::mt19937_64& rng, int n);

/// Spearman rank correlation (no tie handling).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace oracle
