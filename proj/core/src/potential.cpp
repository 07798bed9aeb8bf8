#include "scmocc/potential.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "scmocc/diagnostics.hpp"

namespace scmocc {
namespace {

std::size_t triangle_size(std::size_t n) { return n * (n + 1) / 2; }

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

DiabaticModel::DiabaticModel(std::vector<std::string> labels,
                             std::vector<double> asymptotes,
                             std::vector<double> grid,
                             std::vector<double> upper_values,
                             double asymptote_tolerance)
    : labels_(std::move(labels)),
      asymptotes_(std::move(asymptotes)),
      warned_below_grid_(std::make_shared<std::atomic<bool>>(false)) {
  const std::size_t n = asymptotes_.size();
  if (n < 1) throw ConfigError("model needs at least one channel");
  if (labels_.empty()) {
    for (std::size_t i = 0; i < n; ++i) labels_.push_back(std::to_string(i + 1));
  }
  if (labels_.size() != n) throw ConfigError("label count does not match channel count");
  spline_ = MultiSpline(std::move(grid), std::move(upper_values), triangle_size(n));

  const double deviation = asymptote_deviation();
  if (deviation > 10.0 * asymptote_tolerance) {
    throw ConfigError("asymptote mismatch " + format_double(deviation) +
                      " hartree at R_max exceeds hard limit " +
                      format_double(10.0 * asymptote_tolerance));
  }
  if (deviation > asymptote_tolerance) {
    warn("potential does not reach its asymptotes at R_max (deviation " +
         format_double(deviation) + " hartree)");
  }
}

void DiabaticModel::potential_matrix(double r, RealMatrix& out) const {
  if (!(r > 0.0)) throw PhysicsError("potential requested at non-positive R = " + format_double(r));
  const std::size_t n = this->n();
  out.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (r > r_max()) {
    out.setZero();
    for (std::size_t i = 0; i < n; ++i) out(i, i) = asymptotes_[i];
    return;
  }
  if (r < r_min()) {
    if (!warned_below_grid_->exchange(true)) {
      warn("R = " + format_double(r) + " below grid start " + format_double(r_min()) +
           "; clamping to first grid point");
    }
    r = r_min();
  }
  const std::size_t m = triangle_size(n);
  std::array<double, 64> small{};
  std::vector<double> large;
  std::span<double> buf;
  if (m <= small.size()) {
    buf = std::span<double>(small.data(), m);
  } else {
    large.resize(m);
    buf = large;
  }
  spline_.evaluate(r, buf);
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j, ++c) {
      out(i, j) = buf[c];
      out(j, i) = buf[c];
    }
  }
}

RealMatrix DiabaticModel::potential_matrix(double r) const {
  RealMatrix out;
  potential_matrix(r, out);
  return out;
}

RealMatrix DiabaticModel::node_matrix(std::size_t k) const {
  const std::size_t n = this->n();
  RealMatrix out(n, n);
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j, ++c) {
      out(i, j) = spline_.node_value(k, c);
      out(j, i) = out(i, j);
    }
  }
  return out;
}

double DiabaticModel::asymptote_deviation() const {
  const RealMatrix last = node_matrix(spline_.size() - 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < n(); ++i) {
    for (std::size_t j = 0; j < n(); ++j) {
      const double target = (i == j) ? asymptotes_[i] : 0.0;
      worst = std::max(worst, std::abs(last(i, j) - target));
    }
  }
  return worst;
}

std::string AveragingScheme::name() const {
  switch (kind) {
    case Kind::Arithmetic:
      return "arithmetic";
    case Kind::Geometric:
      return "geometric";
    case Kind::Channel:
      return "channel" + std::to_string(channel + 1);
  }
  return "unknown";
}

double average_diagonal(const RealMatrix& v, const AveragingScheme& scheme,
                        double energy_reference, double r_for_messages) {
  const auto n = static_cast<std::size_t>(v.rows());
  switch (scheme.kind) {
    case AveragingScheme::Kind::Arithmetic: {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += v(i, i) - energy_reference;
      return sum / static_cast<double>(n);
    }
    case AveragingScheme::Kind::Geometric: {
      bool any_positive = false, any_negative = false;
      std::string positive, negative;
      double log_sum = 0.0;
      bool has_zero = false;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = v(i, i) - energy_reference;
        if (d > 0.0) {
          any_positive = true;
          positive += " " + std::to_string(i + 1);
        } else if (d < 0.0) {
          any_negative = true;
          negative += " " + std::to_string(i + 1);
        } else {
          has_zero = true;
        }
        if (d != 0.0) log_sum += std::log(std::abs(d));
      }
      if (any_positive && any_negative) {
        throw PhysicsError("geometric average undefined at R = " + format_double(r_for_messages) +
                           ": diagonal channels" + positive + " positive, channels" + negative +
                           " negative");
      }
      if (has_zero) return 0.0;
      const double magnitude = std::exp(log_sum / static_cast<double>(n));
      return any_negative ? -magnitude : magnitude;
    }
    case AveragingScheme::Kind::Channel:
      if (scheme.channel >= n)
        throw ConfigError("averaging channel " + std::to_string(scheme.channel + 1) +
                          " outside 1.." + std::to_string(n));
      return v(scheme.channel, scheme.channel) - energy_reference;
  }
  return 0.0;
}

double averaged_potential(const DiabaticModel& model, double r,
                          const AveragingScheme& scheme, double energy_reference) {
  RealMatrix v;
  model.potential_matrix(r, v);
  return average_diagonal(v, scheme, energy_reference, r);
}

// ---------------------------------------------------------------------------
// Table format

DiabaticModel parse_model(const std::string& text, const std::string& source_name) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::size_t n = 0;
  std::vector<double> asymptotes;
  std::vector<std::string> labels;
  std::vector<double> grid;
  std::vector<double> values;
  enum class Stage { Count, Asymptotes, Body } stage = Stage::Count;

  auto fail = [&](const std::string& what) -> ConfigError {
    return ConfigError(source_name + ":" + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string head;
    if (!(ls >> head)) continue;

    if (stage == Stage::Count) {
      long long count = 0;
      if (head != "n" || !(ls >> count) || count < 1) throw fail("malformed header, expected 'n <count>'");
      std::string extra;
      if (ls >> extra) throw fail("malformed header, trailing text after channel count");
      n = static_cast<std::size_t>(count);
      stage = Stage::Asymptotes;
      continue;
    }
    if (stage == Stage::Asymptotes) {
      if (head != "asymptotes") throw fail("malformed header, expected 'asymptotes <E_1> ... <E_n>'");
      double e;
      while (ls >> e) asymptotes.push_back(e);
      if (!ls.eof() || asymptotes.size() != n)
        throw fail("malformed header, expected " + std::to_string(n) + " asymptotic energies");
      stage = Stage::Body;
      continue;
    }
    if (head == "labels") {
      if (!grid.empty() || !labels.empty()) throw fail("labels line must precede the data rows");
      std::string l;
      while (ls >> l) labels.push_back(l);
      if (labels.size() != n) throw fail("expected " + std::to_string(n) + " labels");
      continue;
    }

    std::vector<double> row;
    {
      std::istringstream rs(raw);
      std::string tok;
      while (rs >> tok) {
        try {
          std::size_t used = 0;
          row.push_back(std::stod(tok, &used));
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw fail("non-numeric value '" + tok + "'");
        }
      }
    }
    if (row.size() != triangle_size(n) + 1)
      throw fail("row has " + std::to_string(row.size()) + " values, expected " +
                 std::to_string(triangle_size(n) + 1));
    if (!grid.empty() && !(row[0] > grid.back())) throw fail("grid not strictly increasing");
    grid.push_back(row[0]);
    values.insert(values.end(), row.begin() + 1, row.end());
  }
  if (stage != Stage::Body) throw ConfigError(source_name + ": malformed header, file ends early");
  if (grid.size() < 4)
    throw ConfigError(source_name + ": need at least 4 grid rows, found " + std::to_string(grid.size()));
  return DiabaticModel(std::move(labels), std::move(asymptotes), std::move(grid), std::move(values));
}

DiabaticModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open potential file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path.string());
}

std::string format_model(const DiabaticModel& model) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "n " << model.n() << '\n';
  os << "asymptotes";
  for (double e : model.asymptotes()) os << ' ' << e;
  os << "\nlabels";
  for (const auto& l : model.labels()) os << ' ' << l;
  os << '\n';
  const auto& grid = model.grid();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const RealMatrix v = model.node_matrix(k);
    os << grid[k];
    for (std::size_t i = 0; i < model.n(); ++i)
      for (std::size_t j = i; j < model.n(); ++j) os << ' ' << v(i, j);
    os << '\n';
  }
  return os.str();
}

void save_model(const DiabaticModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write potential file " + path.string());
  out << format_model(model);
}

}  // namespace scmocc
