#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

void gauss_legendre_rule(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

double integrate(const std::function<double(double)>& f, double a, double b, int panels, int order) {
  std::vector<double> x, w;
  gauss_legendre_rule(order, x, w);
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t q = 0; q < x.size(); ++q) sum += w[q] * f(mid + 0.5 * h * x[q]);
  }
  return 0.5 * h * sum;
}

double scan_root(const std::function<double(double)>& f, double lo, double hi, int steps) {
  const double h = (hi - lo) / steps;
  double upper = hi, f_upper = f(hi);
  for (int k = 1; k <= steps; ++k) {
    const double x = hi - k * h;
    const double fx = f(x);
    if ((fx <= 0.0) != (f_upper <= 0.0)) {
      double a = x, b = upper;
      for (int it = 0; it < 200 && b - a > 0.0; ++it) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        if ((f(m) <= 0.0) == (fx <= 0.0)) a = m; else b = m;
      }
      return 0.5 * (a + b);
    }
    upper = x;
    f_upper = fx;
  }
  throw std::runtime_error("scan_root: no sign change");
}

CVec expm_apply(const RMat& v, const CVec& a, double t) {
  const Eigen::MatrixXcd m = (Complex(0.0, -t) * v.cast<Complex>()).exp();
  return m * a;
}

Eigen::Matrix2cd two_level_propagator(double a, double c, double d, double t) {
  const double mean = 0.5 * (a + d), delta = 0.5 * (a - d);
  const double omega = std::hypot(delta, c);
  const Complex phase = std::exp(Complex(0.0, -mean * t));
  Eigen::Matrix2cd u;
  const double cs = std::cos(omega * t);
  const double sn = omega > 0.0 ? std::sin(omega * t) / omega : t;
  // exp(-i (delta sz + c sx) t) = cos(w t) I - i sin(w t)/w (delta sz + c sx)
  u(0, 0) = Complex(cs, -sn * delta);
  u(1, 1) = Complex(cs, sn * delta);
  u(0, 1) = u(1, 0) = Complex(0.0, -sn * c);
  return phase * u;
}

CVec magnus4(const std::function<RMat(double)>& v, CVec a, double t0, double t1, int steps) {
  const double h = (t1 - t0) / steps;
  const double g = std::sqrt(3.0) / 6.0;
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + k * h;
    const RMat v1 = v(t + (0.5 - g) * h), v2 = v(t + (0.5 + g) * h);
    const Eigen::MatrixXcd omega =
        Complex(0.0, -0.5 * h) * (v1 + v2).cast<Complex>() +
        Complex(std::sqrt(3.0) / 12.0 * h * h, 0.0) * (v2 * v1 - v1 * v2).cast<Complex>() *
            Complex(-1.0, 0.0);
    a = omega.exp() * a;
  }
  return a;
}

double landau_zener(double coupling, double speed, double slope_difference) {
  return std::exp(-2.0 * std::acos(-1.0) * coupling * coupling / (speed * std::abs(slope_difference)));
}

RMat random_symmetric(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  RMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m(i, j) = m(j, i) = u(rng);
  return m;
}

CVec random_state(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CVec a(n);
  for (int i = 0; i < n; ++i) a[i] = Complex(g(rng), g(rng));
  return a / a.norm();
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t k = 0; k < idx.size(); ++k) r[idx[k]] = static_cast<double>(k);
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double d2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) d2 += (rx[k] - ry[k]) * (rx[k] - ry[k]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

}  // namespace oracle
