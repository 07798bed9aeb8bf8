#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace scmocc {

/// Natural cubic splines for several functions sampled on one shared,
/// strictly increasing grid. Evaluation locates the interval once and then
/// fills every component, which is what a potential-matrix lookup needs.
class MultiSpline {
 public:
  MultiSpline() = default;

  /// `values` is node-major: values[node * components + c]. Requires at least
  /// four nodes and a strictly increasing grid.
  MultiSpline(std::vector<double> grid, std::vector<double> values,
              std::size_t components);

  std::size_t components() const { return components_; }
  std::size_t size() const { return grid_.size(); }
  const std::vector<double>& grid() const { return grid_; }
  double front() const { return grid_.front(); }
  double back() const { return grid_.back(); }

  /// Stored sample of component `c` at node `k`.
  double node_value(std::size_t k, std::size_t c) const {
    return values_[k * components_ + c];
  }

  /// Interpolated values at x, which must lie in [front(), back()].
  void evaluate(double x, std::span<double> out) const;

  /// Interpolated first derivatives at x.
  void derivative(double x, std::span<double> out) const;

 private:
  std::size_t locate(double x) const;

  std::vector<double> grid_;
  std::vector<double> values_;
  std::vector<double> second_;  // d2y/dx2 at nodes, same layout as values_
  std::size_t components_ = 0;
};

}  // namespace scmocc
