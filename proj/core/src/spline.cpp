#include "scmocc/spline.hpp"

#include <algorithm>
#include <cassert>

#include "scmocc/diagnostics.hpp"

namespace scmocc {

MultiSpline::MultiSpline(std::vector<double> grid, std::vector<double> values,
                         std::size_t components)
    : grid_(std::move(grid)), values_(std::move(values)), components_(components) {
  const std::size_t n = grid_.size();
  if (n < 4) throw ConfigError("spline needs at least 4 grid points");
  if (components_ == 0 || values_.size() != n * components_)
    throw ConfigError("spline value table does not match grid size");
  for (std::size_t k = 1; k < n; ++k) {
    if (!(grid_[k] > grid_[k - 1])) throw ConfigError("grid not strictly increasing");
  }

  // Tridiagonal system for the second derivatives, natural end conditions.
  // The matrix depends only on the grid, so it is factored once and the
  // right-hand sides for all components are swept together.
  second_.assign(n * components_, 0.0);
  std::vector<double> diag(n, 0.0), upper(n, 0.0);
  std::vector<double> rhs(n * components_, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double hl = grid_[k] - grid_[k - 1];
    const double hr = grid_[k + 1] - grid_[k];
    diag[k] = (hl + hr) / 3.0;
    upper[k] = hr / 6.0;
    for (std::size_t c = 0; c < components_; ++c) {
      rhs[k * components_ + c] =
          (node_value(k + 1, c) - node_value(k, c)) / hr -
          (node_value(k, c) - node_value(k - 1, c)) / hl;
    }
  }
  // Forward elimination on rows 1..n-2 (rows 0 and n-1 are m = 0).
  for (std::size_t k = 2; k + 1 < n; ++k) {
    const double lower = (grid_[k] - grid_[k - 1]) / 6.0;
    const double w = lower / diag[k - 1];
    diag[k] -= w * upper[k - 1];
    for (std::size_t c = 0; c < components_; ++c)
      rhs[k * components_ + c] -= w * rhs[(k - 1) * components_ + c];
  }
  for (std::size_t k = n - 2; k >= 1; --k) {
    for (std::size_t c = 0; c < components_; ++c) {
      double v = rhs[k * components_ + c];
      if (k + 2 < n) v -= upper[k] * second_[(k + 1) * components_ + c];
      second_[k * components_ + c] = v / diag[k];
    }
  }
}

std::size_t MultiSpline::locate(double x) const {
  assert(x >= grid_.front() && x <= grid_.back());
  auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  std::size_t k = (it == grid_.begin()) ? 0 : static_cast<std::size_t>(it - grid_.begin()) - 1;
  return std::min(k, grid_.size() - 2);
}

void MultiSpline::evaluate(double x, std::span<double> out) const {
  const std::size_t k = locate(x);
  const double h = grid_[k + 1] - grid_[k];
  const double a = (grid_[k + 1] - x) / h;
  const double b = (x - grid_[k]) / h;
  const double ca = (a * a * a - a) * h * h / 6.0;
  const double cb = (b * b * b - b) * h * h / 6.0;
  const double* y0 = &values_[k * components_];
  const double* y1 = y0 + components_;
  const double* m0 = &second_[k * components_];
  const double* m1 = m0 + components_;
  for (std::size_t c = 0; c < components_; ++c)
    out[c] = a * y0[c] + b * y1[c] + ca * m0[c] + cb * m1[c];
}

void MultiSpline::derivative(double x, std::span<double> out) const {
  const std::size_t k = locate(x);
  const double h = grid_[k + 1] - grid_[k];
  const double a = (grid_[k + 1] - x) / h;
  const double b = (x - grid_[k]) / h;
  const double da = -(3.0 * a * a - 1.0) * h / 6.0;
  const double db = (3.0 * b * b - 1.0) * h / 6.0;
  const double* y0 = &values_[k * components_];
  const double* y1 = y0 + components_;
  const double* m0 = &second_[k * components_];
  const double* m1 = m0 + components_;
  for (std::size_t c = 0; c < components_; ++c)
    out[c] = (y1[c] - y0[c]) / h + da * m0[c] + db * m1[c];
}

}  // namespace scmocc
