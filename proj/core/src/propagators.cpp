#include "scmocc/propagators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "scmocc/diagnostics.hpp"

namespace scmocc {

std::vector<double> AmplitudeState::probabilities() const {
  std::vector<double> p(static_cast<std::size_t>(a.size()));
  for (Eigen::Index i = 0; i < a.size(); ++i) p[static_cast<std::size_t>(i)] = std::norm(a[i]);
  return p;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::CrankNicolson: return "crank-nicolson";
    case Method::Chebyshev: return "chebyshev";
    case Method::RK4: return "rk4";
    case Method::FehlbergRK: return "rkf45";
    case Method::Diagonalization: return "diagonalization";
  }
  return "unknown";
}

std::string to_string(BoundsEstimate b) {
  return b == BoundsEstimate::Exact ? "exact" : "gershgorin";
}

Method parse_method(const std::string& name) {
  if (name == "crank-nicolson" || name == "cn") return Method::CrankNicolson;
  if (name == "chebyshev" || name == "cheb") return Method::Chebyshev;
  if (name == "rk4") return Method::RK4;
  if (name == "rkf45" || name == "fehlberg") return Method::FehlbergRK;
  if (name == "diagonalization" || name == "diag") return Method::Diagonalization;
  throw ConfigError("unknown propagator method '" + name + "'");
}

void PropagatorConfig::validate() const {
  if (is_adaptive()) {
    if (!(local_error_bound > 0.0)) throw ConfigError("adaptive propagator needs local_error_bound > 0");
    if (!(dt > 0.0)) throw ConfigError("adaptive propagator needs an initial step dt > 0");
  } else if (!(dt > 0.0)) {
    throw ConfigError("fixed-step propagator needs dt > 0");
  }
  if (!(dt_min > 0.0)) throw ConfigError("dt_min must be positive");
}

std::string PropagatorConfig::describe() const {
  std::ostringstream os;
  os << to_string(method);
  if (precondition) os << " precond(" << to_string(bounds) << ")";
  char buf[64];
  if (is_adaptive()) {
    std::snprintf(buf, sizeof buf, " tol=%.0e", local_error_bound);
  } else {
    std::snprintf(buf, sizeof buf, " dt=%g", dt);
  }
  os << buf;
  return os.str();
}

ComplexVector rhs(const RealMatrix& v, const ComplexVector& a) {
  if (v.rows() != a.size() || v.cols() != a.size())
    throw ConfigError("rhs: matrix is " + std::to_string(v.rows()) + "x" + std::to_string(v.cols()) +
                      " but amplitude vector has " + std::to_string(a.size()) + " entries");
  const RealVector re = v * a.real();
  const RealVector im = v * a.imag();
  ComplexVector out(a.size());
  out.real() = im;
  out.imag() = -re;
  return out;
}

SpectralBounds gershgorin_bounds(const RealMatrix& v) {
  SpectralBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    double radius = 0.0;
    for (Eigen::Index j = 0; j < v.cols(); ++j)
      if (j != i) radius += std::abs(v(i, j));
    b.e_min = std::min(b.e_min, v(i, i) - radius);
    b.e_max = std::max(b.e_max, v(i, i) + radius);
  }
  return b;
}

SpectralBounds exact_bounds(const RealMatrix& v) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(v, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw PhysicsError("eigensolver failed");
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

Preconditioned precondition(const RealMatrix& v, const SpectralBounds& bounds) {
  Preconditioned p{v, bounds.center()};
  p.shifted.diagonal().array() -= p.shift;
  return p;
}

ComplexVector step_crank_nicolson(const RealMatrix& v_mid, const ComplexVector& a, double dt) {
  const Eigen::Index n = a.size();
  const Complex half_i_dt(0.0, 0.5 * dt);
  ComplexMatrix lhs = ComplexMatrix::Identity(n, n) + half_i_dt * v_mid.cast<Complex>();
  const ComplexVector right = a - half_i_dt * (v_mid.cast<Complex>() * a);
  Eigen::PartialPivLU<ComplexMatrix> lu(lhs);
  return lu.solve(right);
}

std::size_t chebyshev_term_cap(double x) {
  return static_cast<std::size_t>(std::ceil(1.1 * std::abs(x))) + 20;
}

ComplexVector step_chebyshev(const RealMatrix& v, const ComplexVector& a, double dt,
                             const SpectralBounds& bounds) {
  const double center = bounds.center();
  const Complex global_phase = std::exp(Complex(0.0, -center * dt));
  double half_width = bounds.half_width();
  if (half_width <= 0.0) {
    RealMatrix rest = v;
    rest.diagonal().array() -= center;
    if (rest.cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, std::abs(center)))
      throw PhysicsError("chebyshev: degenerate spectral bounds do not enclose the spectrum");
    return global_phase * a;
  }
  half_width *= 1.0 + 1e-12;
  RealMatrix scaled = v;
  scaled.diagonal().array() -= center;
  scaled /= half_width;

  const double x = half_width * dt;
  const std::size_t cap = chebyshev_term_cap(x);
  ComplexVector prev = a;
  ComplexVector curr = scaled.cast<Complex>() * a;
  ComplexVector sum = std::cyl_bessel_j(0.0, x) * prev;
  Complex minus_i_power(0.0, -1.0);
  for (std::size_t k = 1; k <= cap; ++k) {
    const double jk = std::cyl_bessel_j(static_cast<double>(k), x);
    sum += (2.0 * jk) * minus_i_power * curr;
    if (static_cast<double>(k) > x && std::abs(jk) < 1e-15) break;
    ComplexVector next = 2.0 * (scaled.cast<Complex>() * curr) - prev;
    prev = std::move(curr);
    curr = std::move(next);
    minus_i_power *= Complex(0.0, -1.0);
  }
  ComplexVector out = global_phase * sum;
  const double n0 = a.norm();
  if (std::abs(out.norm() - n0) > 1e-8 * std::max(1.0, n0)) {
    throw PhysicsError("chebyshev: series lost unitarity; spectral bounds do not enclose V");
  }
  return out;
}

ComplexVector step_rk4(const HamiltonianFn& v, const ComplexVector& a, double t, double dt) {
  RealMatrix m;
  v(t, m);
  const ComplexVector k1 = rhs(m, a);
  v(t + 0.5 * dt, m);
  const ComplexVector k2 = rhs(m, a + 0.5 * dt * k1);
  const ComplexVector k3 = rhs(m, a + 0.5 * dt * k2);
  v(t + dt, m);
  const ComplexVector k4 = rhs(m, a + dt * k3);
  return a + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

AdaptiveStep step_rkf45(const HamiltonianFn& v, const ComplexVector& a, double t,
                        double dt_suggest, double tol, double dt_min) {
  // Fehlberg 4(5) tableau; the fifth-order solution is propagated.
  static constexpr double c2 = 1.0 / 4, c3 = 3.0 / 8, c4 = 12.0 / 13, c5 = 1.0, c6 = 1.0 / 2;
  static constexpr double a21 = 1.0 / 4;
  static constexpr double a31 = 3.0 / 32, a32 = 9.0 / 32;
  static constexpr double a41 = 1932.0 / 2197, a42 = -7200.0 / 2197, a43 = 7296.0 / 2197;
  static constexpr double a51 = 439.0 / 216, a52 = -8.0, a53 = 3680.0 / 513, a54 = -845.0 / 4104;
  static constexpr double a61 = -8.0 / 27, a62 = 2.0, a63 = -3544.0 / 2565, a64 = 1859.0 / 4104,
                          a65 = -11.0 / 40;
  static constexpr double b1 = 16.0 / 135, b3 = 6656.0 / 12825, b4 = 28561.0 / 56430,
                          b5 = -9.0 / 50, b6 = 2.0 / 55;
  static constexpr double e1 = 1.0 / 360, e3 = -128.0 / 4275, e4 = -2197.0 / 75240,
                          e5 = 1.0 / 50, e6 = 2.0 / 55;

  AdaptiveStep out;
  RealMatrix m;
  v(t, m);
  ++out.evaluations;
  const ComplexVector k1 = rhs(m, a);
  const double scale = std::max(1.0, a.norm());
  double dt = dt_suggest;
  for (;;) {
    if (dt < dt_min) {
      throw PhysicsError("rkf45: step size underflow (dt = " + std::to_string(dt) + " at t = " +
                         std::to_string(t) + ")");
    }
    v(t + c2 * dt, m);
    const ComplexVector k2 = rhs(m, a + dt * (a21 * k1));
    v(t + c3 * dt, m);
    const ComplexVector k3 = rhs(m, a + dt * (a31 * k1 + a32 * k2));
    v(t + c4 * dt, m);
    const ComplexVector k4 = rhs(m, a + dt * (a41 * k1 + a42 * k2 + a43 * k3));
    v(t + c5 * dt, m);
    const ComplexVector k5 = rhs(m, a + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    v(t + c6 * dt, m);
    const ComplexVector k6 = rhs(m, a + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    out.evaluations += 5;

    const double err = (dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6)).norm();
    const double limit = tol * scale;
    const double factor = err > 0.0 ? 0.9 * std::pow(limit / err, 0.2) : 4.0;
    if (err <= limit) {
      out.a = a + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      out.dt_used = dt;
      out.dt_next = dt * std::clamp(factor, 0.25, 4.0);
      return out;
    }
    ++out.rejected;
    dt *= std::clamp(factor, 0.25, 1.0);
  }
}

ComplexVector step_diagonalization(const RealMatrix& v_mid, const ComplexVector& a, double dt) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(v_mid);
  if (es.info() != Eigen::Success) throw PhysicsError("eigensolver failed");
  const RealMatrix& u = es.eigenvectors();
  ComplexVector c = u.transpose().cast<Complex>() * a;
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= std::exp(Complex(0.0, -es.eigenvalues()[i] * dt));
  return u.cast<Complex>() * c;
}

AdaptiveStep step_diagonalization_adaptive(const HamiltonianFn& v, const ComplexVector& a,
                                           double t, double dt_suggest, double tol,
                                           double dt_min) {
  AdaptiveStep out;
  RealMatrix m;
  const double scale = std::max(1.0, a.norm());
  double dt = dt_suggest;
  for (;;) {
    if (dt < dt_min) {
      throw PhysicsError("diagonalization: step size underflow (dt = " + std::to_string(dt) +
                         " at t = " + std::to_string(t) + ")");
    }
    v(t + 0.5 * dt, m);
    const ComplexVector full = step_diagonalization(m, a, dt);
    v(t + 0.25 * dt, m);
    ComplexVector half = step_diagonalization(m, a, 0.5 * dt);
    v(t + 0.75 * dt, m);
    half = step_diagonalization(m, half, 0.5 * dt);
    out.evaluations += 3;
    const double err = (full - half).norm();
    if (err <= tol * scale) {
      out.a = std::move(half);
      out.dt_used = dt;
      const double factor = err > 0.0 ? 0.9 * std::pow(tol * scale / err, 1.0 / 3.0) : 4.0;
      out.dt_next = dt * std::clamp(factor, 0.25, 4.0);
      return out;
    }
    ++out.rejected;
    dt *= 0.5;
  }
}

}  // namespace scmocc
