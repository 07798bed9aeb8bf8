#include "scmocc_cli/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "scmocc/diagnostics.hpp"
#include "scmocc/units.hpp"

namespace scmocc::cli {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

double to_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    throw ConfigError("'" + key + "': expected a number, got '" + raw + "'");
  return x;
}

// Keys that only choose where files go; they do not enter the config hash.
bool hash_excluded(const std::string& key) { return key == "output.dir"; }

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text, const std::string& source) {
  ConfigFile cfg;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key.find('.') == std::string::npos)
      throw ConfigError(where + ": key '" + key + "' must have the form section.name");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    if (!cfg.values_.emplace(key, value).second)
      throw ConfigError(where + ": duplicate key '" + key + "'");
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str(), path.string());
}

bool ConfigFile::has(const std::string& key) const { return values_.count(key) > 0; }

void ConfigFile::set(const std::string& key, const std::string& value) { values_[key] = value; }

std::optional<std::string> ConfigFile::text(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  used_.insert(key);
  return it->second;
}

std::string ConfigFile::text(const std::string& key, const std::string& fallback) const {
  return text(key).value_or(fallback);
}

std::optional<double> ConfigFile::number(const std::string& key) const {
  auto s = text(key);
  if (!s) return std::nullopt;
  return to_number(key, *s);
}

double ConfigFile::number(const std::string& key, double fallback) const {
  return number(key).value_or(fallback);
}

std::int64_t ConfigFile::integer(const std::string& key, std::int64_t fallback) const {
  auto s = text(key);
  if (!s) return fallback;
  std::int64_t x = 0;
  const auto res = std::from_chars(s->data(), s->data() + s->size(), x);
  if (res.ec != std::errc() || res.ptr != s->data() + s->size())
    throw ConfigError("'" + key + "': expected an integer, got '" + *s + "'");
  return x;
}

bool ConfigFile::flag(const std::string& key, bool fallback) const {
  auto s = text(key);
  if (!s) return fallback;
  const std::string v = lower(*s);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError("'" + key + "': expected true or false, got '" + *s + "'");
}

std::vector<double> ConfigFile::numbers(const std::string& key) const {
  auto s = text(key);
  std::vector<double> out;
  if (!s) return out;
  std::string item;
  std::istringstream in(*s);
  while (in >> item) {
    std::istringstream parts(item);
    std::string piece;
    while (std::getline(parts, piece, ','))
      if (!trim(piece).empty()) out.push_back(to_number(key, piece));
  }
  return out;
}

void ConfigFile::reject_unused() const {
  std::string unknown;
  for (const auto& [key, value] : values_)
    if (!used_.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
  if (!unknown.empty()) throw ConfigError(source_ + ": unknown key(s): " + unknown);
}

std::string ConfigFile::canonical() const {
  std::string out;
  for (const auto& [key, value] : values_)
    if (!hash_excluded(key)) out += key + " = " + value + "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int k = 15; k >= 0; --k, value >>= 4) s[static_cast<std::size_t>(k)] = digits[value & 0xf];
  return s;
}

namespace {

std::size_t channel_index(const ConfigFile& f, const std::string& key, std::int64_t fallback) {
  const std::int64_t c = f.integer(key, fallback);
  if (c < 1) throw ConfigError("'" + key + "' counts channels from 1");
  return static_cast<std::size_t>(c - 1);
}

TrajectoryKind parse_trajectory(const std::string& s) {
  const std::string v = lower(s);
  if (v == "straight" || v == "straight_line") return TrajectoryKind::StraightLine;
  if (v == "curvilinear") return TrajectoryKind::Curvilinear;
  throw ConfigError("trajectory.kind must be straight or curvilinear, got '" + s + "'");
}

AveragingScheme parse_scheme(const std::string& s) {
  const std::string v = lower(s);
  if (v == "arithmetic") return AveragingScheme::arithmetic();
  if (v == "geometric") return AveragingScheme::geometric();
  if (v.rfind("channel", 0) == 0) {
    std::string digits = v.substr(7);
    if (!digits.empty() && (digits[0] == ':' || digits[0] == '-')) digits.erase(0, 1);
    int c = 0;
    const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), c);
    if (res.ec == std::errc() && res.ptr == digits.data() + digits.size() && c >= 1)
      return AveragingScheme::single(static_cast<std::size_t>(c - 1));
  }
  throw ConfigError("trajectory.averaging must be arithmetic, geometric or channel<i>, got '" + s + "'");
}

BoundsEstimate parse_bounds(const std::string& s) {
  const std::string v = lower(s);
  if (v == "gershgorin") return BoundsEstimate::Gershgorin;
  if (v == "exact") return BoundsEstimate::Exact;
  throw ConfigError("bounds must be gershgorin or exact, got '" + s + "'");
}

PropagatorConfig read_propagator(const ConfigFile& f, const std::string& prefix,
                                 PropagatorConfig c) {
  if (auto m = f.text(prefix + "method")) {
    try {
      c.method = parse_method(*m);
    } catch (const std::exception& e) {
      throw ConfigError(prefix + "method: " + e.what());
    }
  }
  c.dt = f.number(prefix + "dt", c.dt);
  c.local_error_bound = f.number(prefix + "tolerance", c.local_error_bound);
  c.adaptive = f.flag(prefix + "adaptive", c.adaptive);
  c.precondition = f.flag(prefix + "precondition", c.precondition);
  if (auto b = f.text(prefix + "bounds")) c.bounds = parse_bounds(*b);
  c.dt_min = f.number(prefix + "dt_min", c.dt_min);
  c.validate();
  return c;
}

RealMatrix upper_triangle(const std::string& key, const std::vector<double>& values,
                          std::size_t n) {
  if (values.size() != n * (n + 1) / 2) {
    throw ConfigError("'" + key + "' needs n(n+1)/2 = " + std::to_string(n * (n + 1) / 2) +
                      " values, got " + std::to_string(values.size()));
  }
  RealMatrix m = RealMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      m(ii, jj) = m(jj, ii) = values[k++];
    }
  return m;
}

AnalyticSpec read_analytic(const ConfigFile& f, const std::string& model, std::uint64_t seed) {
  const std::string kind = lower(model);
  if (kind == "synthetic") {
    const std::int64_t n = f.integer("potential.n", 5);
    if (n < 1) throw ConfigError("potential.n must be at least 1");
    return SyntheticSpec{static_cast<std::size_t>(n), seed};
  }
  if (kind == "landau_zener") {
    LandauZenerSpec lz;
    lz.slope1 = f.number("potential.slope1", lz.slope1);
    lz.slope2 = f.number("potential.slope2", lz.slope2);
    lz.coupling = f.number("potential.coupling", lz.coupling);
    lz.crossing = f.number("potential.crossing", lz.crossing);
    lz.plateau_half_width = f.number("potential.plateau_half_width", lz.plateau_half_width);
    lz.taper_length = f.number("potential.taper_length", lz.taper_length);
    return lz;
  }
  if (kind == "na_he") return na_he_analog();
  if (kind == "exponential") {
    ExponentialCouplingSpec e;
    e.asymptotes = f.numbers("potential.asymptotes");
    if (e.asymptotes.empty()) throw ConfigError("potential.asymptotes is required for the exponential model");
    const std::size_t n = e.asymptotes.size();
    e.amplitude = upper_triangle("potential.amplitude", f.numbers("potential.amplitude"), n);
    e.decay = upper_triangle("potential.decay", f.numbers("potential.decay"), n);
    return e;
  }
  throw ConfigError("potential.model must be synthetic, landau_zener, exponential or na_he, got '" +
                    model + "'");
}

}  // namespace

std::string RunConfig::potential_description() const {
  if (const auto* p = std::get_if<std::filesystem::path>(&potential)) return "file " + p->string();
  const auto& spec = std::get<AnalyticSpec>(potential);
  if (const auto* s = std::get_if<SyntheticSpec>(&spec))
    return "synthetic n=" + std::to_string(s->n) + " seed=" + std::to_string(s->seed);
  if (std::holds_alternative<LandauZenerSpec>(spec)) return "landau_zener";
  return "exponential n=" + std::to_string(std::get<ExponentialCouplingSpec>(spec).asymptotes.size());
}

RunConfig resolve(const ConfigFile& f) {
  RunConfig c;
  c.hash = hex64(fnv1a64(f.canonical()));
  const std::int64_t seed = f.integer("run.seed", 7);
  if (seed < 0) throw ConfigError("run.seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);

  const auto file = f.text("potential.file");
  const auto model = f.text("potential.model");
  if (file && model) throw ConfigError("set exactly one of potential.file and potential.model");
  if (!file && !model) throw ConfigError("one of potential.file or potential.model is required");
  if (file) {
    std::filesystem::path p = *file;
    if (p.is_relative() && !f.source().empty() && f.source().front() != '<')
      p = std::filesystem::path(f.source()).parent_path() / p;
    c.potential = p;
  } else {
    c.potential = read_analytic(f, *model, c.seed);
    c.grid.r_min = f.number("grid.r_min", c.grid.r_min);
    c.grid.r_max = f.number("grid.r_max", c.grid.r_max);
    c.grid.step = f.number("grid.step", c.grid.step);
  }

  c.v0 = f.numbers("collision.v0");
  if (c.v0.empty()) c.v0 = {0.5};
  for (double v : c.v0)
    if (!(v > 0.0)) throw ConfigError("collision.v0 entries must be positive");
  c.b = f.number("collision.b", c.b);
  if (!(c.b >= 0.0)) throw ConfigError("collision.b must be non-negative");
  const auto mu = f.number("collision.mu");
  const auto mu_amu = f.number("collision.mu_amu");
  if (mu && mu_amu) throw ConfigError("set at most one of collision.mu and collision.mu_amu");
  if (mu) c.mu = *mu;
  if (mu_amu) c.mu = *mu_amu * units::kAmuInElectronMasses;
  if (!(c.mu > 0.0)) throw ConfigError("reduced mass must be positive");
  c.initial_channel = channel_index(f, "collision.initial_channel", 1);

  CollisionOptions& co = c.collision;
  co.r_start = f.number("collision.r_start");
  if (auto k = f.text("trajectory.kind")) co.trajectory = parse_trajectory(*k);
  if (auto s = f.text("trajectory.averaging")) co.scheme = parse_scheme(*s);
  co.propagator = read_propagator(f, "propagator.", co.propagator);
  co.stability_threshold = f.number("stability.threshold", co.stability_threshold);
  co.stability_window = f.number("stability.window", co.stability_window);
  co.max_extensions = static_cast<int>(f.integer("stability.extensions", co.max_extensions));
  if (!(co.stability_window > 0.0 && co.stability_window <= 1.0))
    throw ConfigError("stability.window must lie in (0, 1]");
  if (co.max_extensions < 0) throw ConfigError("stability.extensions must be non-negative");

  ScanOptions& so = c.scan;
  so.db = f.number("scan.db", so.db);
  so.b_zero = f.number("scan.b_zero", so.b_zero);
  so.refine_threshold = f.number("scan.refine_threshold", so.refine_threshold);
  so.inelastic_epsilon = f.number("scan.epsilon", so.inelastic_epsilon);
  so.consecutive = static_cast<std::size_t>(std::max<std::int64_t>(1, f.integer("scan.consecutive", 2)));
  so.b_cap = f.number("scan.b_cap", so.b_cap);
  if (!(so.db > 0.0)) throw ConfigError("scan.db must be positive");
  if (!(so.b_zero > 0.0)) throw ConfigError("scan.b_zero must be positive");
  if (!(so.b_cap > so.db)) throw ConfigError("scan.b_cap must exceed scan.db");

  c.ehrenfest = f.flag("ehrenfest.enabled", false);

  c.device.g_max_mhz = f.number("device.g_max_mhz", c.device.g_max_mhz);
  c.device.t_meas_ns = f.number("device.t_meas_ns", c.device.t_meas_ns);
  if (f.has("device.n_qubits")) {
    const std::int64_t q = f.integer("device.n_qubits", 0);
    if (q < 1) throw ConfigError("device.n_qubits must be positive");
    c.device.n_qubits = static_cast<std::size_t>(q);
  }
  c.lambda.lambda_min = f.number("device.lambda_min", c.lambda.lambda_min);
  c.lambda.smoothing_window =
      static_cast<std::size_t>(std::max<std::int64_t>(0, f.integer("device.smoothing_window", 0)));
  c.ses_samples_per_half = static_cast<std::size_t>(
      std::max<std::int64_t>(2, f.integer("device.samples_per_half", 2000)));
  PropagatorConfig dev;
  dev.dt = 1e-3;
  dev.local_error_bound = 1e-8;
  c.device_propagator = read_propagator(f, "device.", dev);

  c.bench_repetitions = static_cast<std::size_t>(f.integer("bench.repetitions", 3));
  c.bench_reference_dt = f.number("bench.reference_dt", c.bench_reference_dt);

  c.output_dir = f.text("output.dir", "out");
  f.reject_unused();
  return c;
}

DiabaticModel load_potential(const RunConfig& config) {
  DiabaticModel model = [&] {
    if (const auto* p = std::get_if<std::filesystem::path>(&config.potential)) return load_model(*p);
    return build_analytic(std::get<AnalyticSpec>(config.potential), config.grid);
  }();
  if (config.initial_channel >= model.n()) {
    throw ConfigError("collision.initial_channel " + std::to_string(config.initial_channel + 1) +
                      " exceeds the " + std::to_string(model.n()) + " channels of the potential");
  }
  const AveragingScheme& s = config.collision.scheme;
  if (s.kind == AveragingScheme::Kind::Channel && s.channel >= model.n())
    throw ConfigError("trajectory.averaging channel " + std::to_string(s.channel + 1) +
                      " exceeds the channel count " + std::to_string(model.n()));
  if (config.device.n_qubits && *config.device.n_qubits != model.n())
    throw ConfigError("device.n_qubits must equal the channel count " + std::to_string(model.n()));
  return model;
}

}  // namespace scmocc::cli
