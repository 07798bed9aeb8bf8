#include "scmocc_cli/commands.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "scmocc/csv.hpp"
#include "scmocc/diagnostics.hpp"
#include "scmocc/units.hpp"

namespace scmocc::cli {
namespace {

std::string num(double x) { return csv_number(x); }

CsvTable table_for(const RunConfig& c, const std::string& what) {
  CsvTable t;
  t.header.push_back("scmocc " + what);
  t.header.push_back("config_hash: " + c.hash);
  t.header.push_back("potential: " + c.potential_description());
  return t;
}

std::vector<std::string> prob_columns(const std::string& prefix, std::size_t n) {
  std::vector<std::string> cols;
  for (std::size_t f = 0; f < n; ++f) cols.push_back(prefix + std::to_string(f + 1));
  return cols;
}

std::string suffix(std::size_t k) { return "_" + std::to_string(k + 1) + ".csv"; }

void append(std::vector<std::string>& row, const std::vector<double>& values) {
  for (double v : values) row.push_back(num(v));
}

std::string trajectory_name(const CollisionOptions& c) {
  return c.trajectory == TrajectoryKind::StraightLine ? "straight"
                                                      : "curvilinear(" + c.scheme.name() + ")";
}

void write(const std::filesystem::path& path, const CsvTable& t, std::ostream& log) {
  write_csv(path, t);
  log << "wrote " << path.string() << '\n';
}

void dump_trajectory(const RunConfig& c, const DiabaticModel& model, const CollisionGeometry& g,
                     std::size_t k, std::ostream& log) {
  const TrajectoryPath path = build_path(model, g, c.initial_channel, c.collision);
  CsvTable t = table_for(c, "trajectory");
  t.header.push_back("v0: " + num(g.v0) + ", b: " + num(g.b) + ", mu: " + num(g.mu));
  t.header.push_back("turning_point: " + num(path.turning_point()));
  t.columns = {"t", "R", "dRdt"};
  if (path.kind() == TrajectoryKind::Curvilinear) {
    for (std::size_t q = 0; q < path.times().size(); ++q)
      t.add_row({num(path.times()[q]), num(path.radii()[q]), num(path.speeds()[q])});
  } else {
    const std::size_t samples = 2000;
    const double ts = path.start_time();
    for (std::size_t q = 0; q <= samples; ++q) {
      const double tt = -ts + 2.0 * ts * static_cast<double>(q) / static_cast<double>(samples);
      const RadialState s = path.at(tt);
      t.add_row({num(tt), num(s.r), num(s.dr_dt)});
    }
  }
  write(c.output_dir / ("trajectory" + suffix(k)), t, log);
}

void write_history(const RunConfig& c, const DiabaticModel& model, const CollisionResult& r,
                   const std::string& stem, std::size_t k, std::ostream& log) {
  const TrajectoryPath path = build_path(model, r.geom, c.initial_channel, c.collision);
  CsvTable t = table_for(c, "run");
  t.header.push_back("v0: " + num(r.geom.v0) + ", b: " + num(r.geom.b) + ", mu: " + num(r.geom.mu) +
                     ", initial_channel: " + std::to_string(r.initial_channel + 1));
  t.header.push_back("trajectory: " + trajectory_name(c.collision) +
                     ", propagator: " + r.propagator.describe());
  t.header.push_back(std::string("stable: ") + (r.stable ? "true" : "false") +
                     ", extensions: " + std::to_string(r.extensions));
  t.columns = {"t", "R"};
  for (auto& col : prob_columns("P_", model.n())) t.columns.push_back(col);
  t.columns.push_back("P_total");
  for (std::size_t q = 0; q < r.history_t.size(); ++q) {
    std::vector<std::string> row{num(r.history_t[q]), num(path_radius(path, r.history_t[q]))};
    double total = 0.0;
    for (double p : r.history_p[q]) total += p;
    append(row, r.history_p[q]);
    row.push_back(num(total));
    t.add_row(std::move(row));
  }
  write(c.output_dir / (stem + suffix(k)), t, log);
}

CollisionGeometry geometry(const RunConfig& c, double v0) { return {v0, c.b, c.mu}; }

ScanOptions scan_options(const RunConfig& c, const CommandOptions& o) {
  ScanOptions s = c.scan;
  s.collision = c.collision;
  s.jobs = o.jobs;
  return s;
}

void write_opacity(const RunConfig& c, const OpacityTable& table, std::size_t k, std::ostream& log) {
  CsvTable t = table_for(c, "scan");
  t.header.push_back("v0: " + num(table.v0) + ", mu: " + num(c.mu) +
                     ", initial_channel: " + std::to_string(table.initial_channel + 1));
  t.header.push_back("b_max: " + num(table.b_max) +
                     std::string(", truncated: ") + (table.truncated ? "true" : "false"));
  t.header.push_back("trajectory: " + trajectory_name(c.collision) +
                     ", propagator: " + c.collision.propagator.describe());
  t.header.push_back("b = 0 row computed at b = " + num(c.scan.b_zero));
  t.columns = {"b"};
  for (auto& col : prob_columns("P_", table.channels())) t.columns.push_back(col);
  t.columns.push_back("stable");
  for (const auto& row : table.rows) {
    std::vector<std::string> cells{num(row.b)};
    append(cells, row.probs);
    cells.push_back(row.stable ? "1" : "0");
    t.add_row(std::move(cells));
  }
  write(c.output_dir / ("opacity" + suffix(k)), t, log);
}

}  // namespace

RunConfig prepare(const CommandOptions& options) {
  ConfigFile file = ConfigFile::load(options.config);
  if (options.seed) file.set("run.seed", std::to_string(*options.seed));
  if (options.ehrenfest) file.set("ehrenfest.enabled", "true");
  if (options.out) file.set("output.dir", options.out->string());
  return resolve(file);
}

void cmd_run(const RunConfig& c, const CommandOptions& o, std::ostream& log) {
  const DiabaticModel model = load_potential(c);
  CsvTable summary = table_for(c, "run summary");
  summary.header.push_back("trajectory: " + trajectory_name(c.collision) +
                           ", propagator: " + c.collision.propagator.describe());
  summary.columns = {"v0", "b", "K_eV", "stable", "extensions", "steps"};
  for (auto& col : prob_columns("P_", model.n())) summary.columns.push_back(col);

  std::vector<CollisionResult> results(c.v0.size());
  parallel_for(c.v0.size(), o.jobs, [&](std::size_t k) {
    results[k] = run_collision(model, geometry(c, c.v0[k]), c.initial_channel, c.collision);
  });
  for (std::size_t k = 0; k < results.size(); ++k) {
    const CollisionResult& r = results[k];
    write_history(c, model, r, "history", k, log);
    if (o.dump_trajectory) dump_trajectory(c, model, r.geom, k, log);
    std::vector<std::string> row{num(r.geom.v0), num(r.geom.b),
                                 num(units::hartree_to_ev(r.geom.energy())),
                                 r.stable ? "1" : "0", std::to_string(r.extensions),
                                 std::to_string(r.stats.steps)};
    append(row, r.final_probs);
    summary.add_row(std::move(row));
    if (!r.stable) warn("probabilities not stable for v0 = " + num(r.geom.v0));
  }
  write(c.output_dir / "run_summary.csv", summary, log);
}

void cmd_scan(const RunConfig& c, const CommandOptions& o, std::ostream& log) {
  const DiabaticModel model = load_potential(c);
  const ScanOptions so = scan_options(c, o);
  for (std::size_t k = 0; k < c.v0.size(); ++k) {
    const OpacityTable table = impact_scan(model, c.v0[k], c.mu, c.initial_channel, so);
    write_opacity(c, table, k, log);
    if (o.dump_trajectory) dump_trajectory(c, model, geometry(c, c.v0[k]), k, log);
  }
}

void cmd_xsec(const RunConfig& c, const CommandOptions& o, std::ostream& log) {
  const DiabaticModel model = load_potential(c);
  const ScanOptions so = scan_options(c, o);
  CrossSectionTable xs;
  xs.initial_channel = c.initial_channel;
  xs.asymptotes = model.asymptotes();
  for (std::size_t k = 0; k < c.v0.size(); ++k) {
    const OpacityTable table = impact_scan(model, c.v0[k], c.mu, c.initial_channel, so);
    write_opacity(c, table, k, log);
    CrossSectionRow row;
    row.v0 = c.v0[k];
    row.kinetic_energy = 0.5 * c.mu * c.v0[k] * c.v0[k];
    row.sigma = cross_section(table);
    xs.rows.push_back(std::move(row));
  }
  if (c.ehrenfest) xs = ehrenfest_relabel(std::move(xs));

  const std::size_t n = model.n();
  CsvTable t = table_for(c, "xsec");
  t.header.push_back("initial_channel: " + std::to_string(c.initial_channel + 1) + ", mu: " + num(c.mu));
  t.header.push_back("sigma in bohr^2 (1 bohr^2 = " + num(units::kBohrCm * units::kBohrCm) + " cm^2)");
  if (c.ehrenfest)
    t.header.push_back("E_f: Ehrenfest total energy per transition in eV; empty below K = |dE|/4");
  t.columns = {"v0", "K_eV"};
  for (auto& col : prob_columns("sigma_", n)) t.columns.push_back(col);
  if (c.ehrenfest)
    for (auto& col : prob_columns("E_", n)) t.columns.push_back(col + "_eV");
  for (const auto& row : xs.rows) {
    std::vector<std::string> cells{num(row.v0), num(units::hartree_to_ev(row.kinetic_energy))};
    append(cells, row.sigma);
    if (c.ehrenfest)
      for (const auto& e : row.relabeled_energy)
        cells.push_back(e ? num(units::hartree_to_ev(*e)) : "");
    t.add_row(std::move(cells));
  }
  write(c.output_dir / "cross_sections.csv", t, log);
}

void cmd_ses(const RunConfig& c, const CommandOptions&, std::ostream& log) {
  const DiabaticModel model = load_potential(c);
  SesOptions so;
  so.device = c.device;
  so.lambda = c.lambda;
  so.collision = c.collision;
  so.device_propagator = c.device_propagator;
  so.samples_per_half = c.ses_samples_per_half;
  const std::size_t n = model.n();

  for (std::size_t k = 0; k < c.v0.size(); ++k) {
    const SesResult r = run_ses(model, geometry(c, c.v0[k]), c.initial_channel, so);
    const SesMapping& m = r.mapping;
    const std::string device_line = "g_max_mhz: " + num(c.device.g_max_mhz) +
                                    ", t_meas_ns: " + num(c.device.t_meas_ns) +
                                    ", lambda_min: " + num(c.lambda.lambda_min);

    CsvTable lam = table_for(c, "ses mapping");
    lam.header.push_back(device_line);
    lam.columns = {"t", "c", "lambda", "t_qc_ns"};
    for (std::size_t q = 0; q < m.t().size(); ++q)
      lam.add_row({num(m.t()[q]), num(m.c()[q]), num(m.lambda()[q]), num(m.t_qc_ns()[q])});
    write(c.output_dir / ("ses_mapping" + suffix(k)), lam, log);

    CsvTable ham = table_for(c, "ses device hamiltonian");
    ham.header.push_back(device_line);
    ham.header.push_back("H_ij in MHz, upper triangle");
    ham.columns = {"t_qc_ns"};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        ham.columns.push_back("H_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
    for (std::size_t q = 0; q < m.t().size(); ++q) {
      std::vector<std::string> row{num(m.t_qc_ns()[q])};
      append(row, m.device_elements()[q]);
      ham.add_row(std::move(row));
    }
    write(c.output_dir / ("ses_hamiltonian" + suffix(k)), ham, log);

    CsvTable dev = table_for(c, "ses device probabilities");
    dev.header.push_back(device_line + ", device propagator: " + c.device_propagator.describe());
    dev.columns = {"t_qc_ns"};
    for (auto& col : prob_columns("P_", n)) dev.columns.push_back(col);
    for (std::size_t q = 0; q < r.device.history_t.size(); ++q) {
      std::vector<std::string> row{num(r.device.history_t[q])};
      append(row, r.device.history_p[q]);
      dev.add_row(std::move(row));
    }
    write(c.output_dir / ("ses_probabilities" + suffix(k)), dev, log);
    write_history(c, model, r.classical, "classical_history", k, log);

    CsvTable cmp = table_for(c, "ses comparison");
    cmp.header.push_back(device_line);
    cmp.header.push_back("v0: " + num(c.v0[k]) + ", b: " + num(c.b) +
                         ", initial_channel: " + std::to_string(c.initial_channel + 1));
    cmp.header.push_back("t_qc_ns: " + num(r.t_qc_ns) + ", t_qu_ns: " + num(r.t_qu_ns));
    cmp.columns = {"i", "f", "P_classical", "P_ses", "relative_error_percent"};
    for (const auto& row : r.rows)
      cmp.add_row({std::to_string(c.initial_channel + 1), std::to_string(row.f + 1),
                   num(row.classical), num(row.ses), num(100.0 * row.relative_error)});
    write(c.output_dir / ("ses_comparison" + suffix(k)), cmp, log);
    log << "t_qc = " << r.t_qc_ns << " ns, t_qu = " << r.t_qu_ns << " ns\n";
  }
}

void cmd_bench(const RunConfig& c, const CommandOptions&, std::ostream& log) {
  // Timing rows run one after another on the calling thread; --jobs is ignored.
  const DiabaticModel model = load_potential(c);
  BenchCase bc = standard_case();
  bc.problem.geom = geometry(c, c.v0.front());
  bc.problem.initial_channel = c.initial_channel;
  bc.problem.trajectory = c.collision.trajectory;
  bc.problem.scheme = c.collision.scheme;
  bc.repetitions = c.bench_repetitions;
  bc.reference_dt = c.bench_reference_dt;

  const BenchReport report = run_bench(model, bc, [&](const BenchRow& row) {
    log << row.label << ": " << (row.ok ? num(row.median_seconds) + " s" : "failed: " + row.error)
        << '\n';
  });

  CsvTable t = table_for(c, "bench");
  t.header.push_back("machine: " + machine_info());
  t.header.push_back("v0: " + num(bc.problem.geom.v0) + ", b: " + num(bc.problem.geom.b) +
                     ", trajectory: " + trajectory_name(c.collision));
  std::string ref = "reference: crank-nicolson dt=" + num(bc.reference_dt) +
                    " Richardson-extrapolated, P =";
  for (double p : report.reference_probs) ref += " " + num(p);
  t.header.push_back(ref);
  t.header.push_back("relative error denominator floor: " + num(bc.error_floor) +
                     "; wall times are medians of " + std::to_string(bc.repetitions) + " runs");
  t.columns = {"label", "method", "precondition", "bounds", "step_policy", "median_s", "spread_s",
               "max_relative_error", "steps", "within_2_percent", "status"};
  for (const auto& row : report.rows) {
    const PropagatorConfig& p = row.config;
    const std::string policy = p.is_adaptive() ? "tol=" + num(p.local_error_bound) : "dt=" + num(p.dt);
    t.add_row({row.label, to_string(p.method), p.precondition ? "yes" : "no", to_string(p.bounds),
               policy, row.ok ? num(row.median_seconds) : "", row.ok ? num(row.spread_seconds) : "",
               row.ok ? num(row.max_relative_error) : "", row.ok ? std::to_string(row.steps) : "",
               row.ok && row.within_bound ? "yes" : "no", row.ok ? "ok" : "failed: " + row.error});
  }
  write(c.output_dir / "bench.csv", t, log);
}

int dispatch(const std::string& command, const CommandOptions& options, std::ostream& log,
             std::ostream& err) {
  try {
    const RunConfig config = prepare(options);
    if (command == "run") cmd_run(config, options, log);
    else if (command == "scan") cmd_scan(config, options, log);
    else if (command == "xsec") cmd_xsec(config, options, log);
    else if (command == "ses") cmd_ses(config, options, log);
    else if (command == "bench") cmd_bench(config, options, log);
    else throw ConfigError("unknown command '" + command + "'");
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PhysicsError& e) {
    err << "error: " << e.what() << '\n';
    return kExitPhysics;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitPhysics;
  }
}

}  // namespace scmocc::cli
