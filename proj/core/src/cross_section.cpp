#include <cmath>

#include "scmocc/diagnostics.hpp"
#include "scmocc/scattering.hpp"
#include "scmocc/units.hpp"

namespace scmocc {
namespace {

// Int of g over x[lo..hi], all spacings equal to h.
double uniform_run(const std::vector<double>& g, std::size_t lo, std::size_t hi, double h) {
  const std::size_t intervals = hi - lo;
  if (intervals == 1) return 0.5 * h * (g[lo] + g[hi]);
  double sum = 0.0;
  std::size_t end = hi;
  if (intervals % 2 == 1) {
    // Simpson 3/8 over the last three intervals.
    end = hi - 3;
    sum += 3.0 * h / 8.0 * (g[end] + 3.0 * g[end + 1] + 3.0 * g[end + 2] + g[hi]);
  }
  for (std::size_t k = lo; k + 2 <= end; k += 2)
    sum += h / 3.0 * (g[k] + 4.0 * g[k + 1] + g[k + 2]);
  return sum;
}

}  // namespace

double integrate_opacity(const std::vector<double>& b, const std::vector<double>& p) {
  if (b.size() != p.size()) throw ConfigError("opacity abscissae and values differ in length");
  if (b.size() < 2) return 0.0;
  std::vector<double> g(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (k > 0 && !(b[k] > b[k - 1])) throw ConfigError("opacity impact parameters not strictly increasing");
    g[k] = p[k] * b[k];
  }
  double total = 0.0;
  std::size_t lo = 0;
  while (lo + 1 < b.size()) {
    const double h = b[lo + 1] - b[lo];
    const double tol = 1e-9 * std::max(1.0, std::abs(b[lo + 1]));
    std::size_t hi = lo + 1;
    while (hi + 1 < b.size() && std::abs((b[hi + 1] - b[hi]) - h) <= tol) ++hi;
    total += uniform_run(g, lo, hi, (b[hi] - b[lo]) / static_cast<double>(hi - lo));
    lo = hi;
  }
  return 2.0 * units::kPi * total;
}

std::vector<double> cross_section(const OpacityTable& table) {
  if (table.rows.size() < 3) throw ConfigError("cross section needs at least 3 opacity rows");
  const std::size_t n = table.channels();
  std::vector<double> b;
  b.reserve(table.rows.size());
  for (const auto& row : table.rows) b.push_back(row.b);
  std::vector<double> sigma(n);
  std::vector<double> p(table.rows.size());
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t k = 0; k < table.rows.size(); ++k) p[k] = table.rows[k].probs[f];
    sigma[f] = integrate_opacity(b, p);
  }
  return sigma;
}

}  // namespace scmocc
