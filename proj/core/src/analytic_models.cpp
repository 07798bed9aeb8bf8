#include <cmath>
#include <random>

#include "scmocc/diagnostics.hpp"
#include "scmocc/potential.hpp"

namespace scmocc {
namespace {

// 1 - smoothstep of order 7 (C3 at both ends): 1 at s <= 0, 0 at s >= 1.
double taper(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double s4 = s * s * s * s;
  return 1.0 - s4 * (35.0 - 84.0 * s + 70.0 * s * s - 20.0 * s * s * s);
}

void validate(const LandauZenerSpec& lz) {
  if (!(lz.plateau_half_width >= 0.0) || !(lz.taper_length > 0.0))
    throw ConfigError("Landau-Zener plateau must be >= 0 and taper length > 0");
}

void validate(const ExponentialCouplingSpec& ex) {
  const auto n = static_cast<Eigen::Index>(ex.asymptotes.size());
  if (n < 1) throw ConfigError("exponential-coupling model needs n >= 1");
  if (ex.amplitude.rows() != n || ex.amplitude.cols() != n || ex.decay.rows() != n ||
      ex.decay.cols() != n)
    throw ConfigError("exponential-coupling amplitude/decay must be n x n");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      if (!(ex.decay(i, j) > 0.0))
        throw ConfigError("exponential-coupling decay constants must be positive");
}

RealMatrix exponential_matrix(const ExponentialCouplingSpec& ex, double r) {
  const auto n = static_cast<Eigen::Index>(ex.asymptotes.size());
  RealMatrix v(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i, i) = ex.asymptotes[i] + ex.amplitude(i, i) * std::exp(-ex.decay(i, i) * r);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      v(i, j) = ex.amplitude(i, j) * std::exp(-ex.decay(i, j) * r);
      v(j, i) = v(i, j);
    }
  }
  return v;
}

RealMatrix landau_zener_matrix(const LandauZenerSpec& lz, double r) {
  RealMatrix v(2, 2);
  const double x = r - lz.crossing;
  v(0, 0) = lz.slope1 * x;
  v(1, 1) = lz.slope2 * x;
  const double s = (std::abs(x) - lz.plateau_half_width) / lz.taper_length;
  v(0, 1) = v(1, 0) = lz.coupling * taper(s);
  return v;
}

}  // namespace

ExponentialCouplingSpec synthetic_parameters(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("synthetic model needs n >= 1");
  // mt19937_64 output is fully specified by the standard; the distribution
  // adaptors are not, so uniforms are formed by hand for portable models.
  std::mt19937_64 engine(seed);
  auto uniform = [&engine](double lo, double hi) {
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  };

  ExponentialCouplingSpec ex;
  const auto m = static_cast<Eigen::Index>(n);
  ex.asymptotes.assign(n, 0.0);
  ex.amplitude = RealMatrix::Zero(m, m);
  ex.decay = RealMatrix::Ones(m, m);
  ex.amplitude(0, 0) = 1.0;
  ex.decay(0, 0) = 1.0;
  for (Eigen::Index i = 1; i < m; ++i) {
    ex.asymptotes[i] = uniform(-0.32, 0.08);
    ex.amplitude(i, i) = uniform(0.5, 3.0);
    ex.decay(i, i) = uniform(0.8, 1.4);
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double sign = uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0;
      ex.amplitude(i, j) = sign * uniform(0.03, 0.12);
      ex.decay(i, j) = uniform(0.6, 1.0);
    }
  }
  return ex;
}

ExponentialCouplingSpec na_he_analog() {
  ExponentialCouplingSpec ex;
  ex.asymptotes = {0.0, 0.0772, 0.0772};
  ex.amplitude = RealMatrix(3, 3);
  ex.decay = RealMatrix(3, 3);
  // clang-format off
  ex.amplitude << 12.0, 0.60, 0.45,
                   0.0, 16.0, 0.35,
                   0.0,  0.0,  9.0;
  ex.decay     <<  1.3, 0.95, 0.90,
                   0.0,  1.2, 1.00,
                   0.0,  0.0,  1.4;
  // clang-format on
  return ex;
}

RealMatrix analytic_matrix(const AnalyticSpec& spec, double r) {
  return std::visit(
      [r](const auto& s) -> RealMatrix {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LandauZenerSpec>) {
          validate(s);
          return landau_zener_matrix(s, r);
        } else if constexpr (std::is_same_v<T, ExponentialCouplingSpec>) {
          validate(s);
          return exponential_matrix(s, r);
        } else {
          return exponential_matrix(synthetic_parameters(s.n, s.seed), r);
        }
      },
      spec);
}

DiabaticModel build_analytic(const AnalyticSpec& spec, const GridSpec& grid) {
  if (!(grid.r_min > 0.0) || !(grid.r_max > grid.r_min) || !(grid.step > 0.0))
    throw ConfigError("analytic grid needs 0 < r_min < r_max and step > 0");

  // Resolve the synthetic parameters once instead of per grid point.
  AnalyticSpec resolved = spec;
  std::vector<std::string> labels;
  if (const auto* syn = std::get_if<SyntheticSpec>(&spec)) {
    resolved = synthetic_parameters(syn->n, syn->seed);
  }
  std::visit([](const auto& s) {
    using T = std::decay_t<decltype(s)>;
    if constexpr (!std::is_same_v<T, SyntheticSpec>) validate(s);
  }, resolved);

  const auto count = static_cast<std::size_t>(std::floor((grid.r_max - grid.r_min) / grid.step + 1e-9)) + 1;
  std::vector<double> rs(count);
  for (std::size_t k = 0; k < count; ++k) rs[k] = grid.r_min + static_cast<double>(k) * grid.step;
  if (rs.back() < grid.r_max - 1e-12) rs.push_back(grid.r_max);

  std::vector<double> values;
  RealMatrix v;
  for (double r : rs) {
    v = analytic_matrix(resolved, r);
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      for (Eigen::Index j = i; j < v.cols(); ++j) values.push_back(v(i, j));
  }
  std::vector<double> asymptotes(static_cast<std::size_t>(v.rows()));
  for (Eigen::Index i = 0; i < v.rows(); ++i) asymptotes[i] = v(i, i);
  if (const auto* ex = std::get_if<ExponentialCouplingSpec>(&resolved)) asymptotes = ex->asymptotes;
  return DiabaticModel(std::move(labels), std::move(asymptotes), std::move(rs), std::move(values));
}

}  // namespace scmocc
