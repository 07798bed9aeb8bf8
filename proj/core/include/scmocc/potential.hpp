#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "scmocc/linalg.hpp"
#include "scmocc/spline.hpp"

namespace scmocc {

/// Default tolerance for |V_ii(R_max) - E_i| and |V_ij(R_max)|, hartree.
inline constexpr double kAsymptoteTolerance = 1e-6;

/// n-channel diabatic potential matrix V(R) with asymptotic channel energies.
///
/// Samples are stored as the upper triangle (row-major, V_11 V_12 ... V_nn) per
/// grid point and interpolated by one natural cubic spline per element. Beyond
/// the grid the matrix is held at its asymptotic form diag(E_1..E_n); below the
/// grid it is clamped to the first node. Immutable after construction and safe
/// to share between threads.
class DiabaticModel {
 public:
  /// Throws ConfigError on inconsistent sizes, a non-increasing grid, fewer
  /// than 4 grid points, or an asymptote mismatch above 10 * tolerance (a
  /// mismatch above tolerance alone is a warning).
  DiabaticModel(std::vector<std::string> labels, std::vector<double> asymptotes,
                std::vector<double> grid, std::vector<double> upper_values,
                double asymptote_tolerance = kAsymptoteTolerance);

  std::size_t n() const { return asymptotes_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& asymptotes() const { return asymptotes_; }
  const std::vector<double>& grid() const { return spline_.grid(); }
  double r_min() const { return spline_.front(); }
  double r_max() const { return spline_.back(); }

  /// Full symmetric matrix at R (bohr). Throws PhysicsError for R <= 0.
  RealMatrix potential_matrix(double r) const;
  void potential_matrix(double r, RealMatrix& out) const;

  /// Stored (not interpolated) matrix at grid node k.
  RealMatrix node_matrix(std::size_t k) const;

  /// Largest |V(R_max) - diag(E)| element over the matrix.
  double asymptote_deviation() const;

 private:
  std::vector<std::string> labels_;
  std::vector<double> asymptotes_;
  MultiSpline spline_;
  std::shared_ptr<std::atomic<bool>> warned_below_grid_;
};

/// Scalar effective potential driving a common classical trajectory.
struct AveragingScheme {
  enum class Kind { Arithmetic, Geometric, Channel };
  Kind kind = Kind::Arithmetic;
  std::size_t channel = 0;  // zero-based, Channel only

  static AveragingScheme arithmetic() { return {Kind::Arithmetic, 0}; }
  static AveragingScheme geometric() { return {Kind::Geometric, 0}; }
  static AveragingScheme single(std::size_t channel) { return {Kind::Channel, channel}; }

  std::string name() const;
  friend bool operator==(const AveragingScheme&, const AveragingScheme&) = default;
};

/// V-bar(R): average of the diagonal after subtracting `energy_reference` from
/// every V_ii. Geometric requires all shifted diagonals to share a sign (zero
/// is compatible with either) and throws PhysicsError otherwise.
double averaged_potential(const DiabaticModel& model, double r,
                          const AveragingScheme& scheme,
                          double energy_reference = 0.0);

/// Same as above on an already evaluated matrix.
double average_diagonal(const RealMatrix& v, const AveragingScheme& scheme,
                        double energy_reference, double r_for_messages);

/// Reads the line-oriented potential table format:
///   n <count>
///   asymptotes <E_1> ... <E_n>
///   labels <l_1> ... <l_n>          (optional)
///   <R> <V_11> <V_12> ... <V_nn>    (upper triangle, one line per R)
/// '#' starts a comment. Throws ConfigError on malformed input.
DiabaticModel load_model(const std::filesystem::path& path);
DiabaticModel parse_model(const std::string& text, const std::string& source_name = "<string>");

/// Writes `model` in the table format with round-trip precision.
void save_model(const DiabaticModel& model, const std::filesystem::path& path);
std::string format_model(const DiabaticModel& model);

// ---------------------------------------------------------------------------
// Analytic test systems

/// Two linear diabats F_k (R - R_x) crossing at R_x with coupling V_12 held
/// constant on |R - R_x| <= plateau_half_width. Outside the plateau the
/// coupling is switched off by a C3 smoothstep over taper_length, so the
/// channels are uncoupled both near the origin and near the grid edge.
struct LandauZenerSpec {
  double slope1 = 0.25;
  double slope2 = -0.25;
  double coupling = 0.1;
  double crossing = 12.0;
  double plateau_half_width = 4.0;
  double taper_length = 3.0;
};

/// V_ii = E_i + A_ii exp(-alpha_ii R), V_ij = A_ij exp(-alpha_ij R). Only the
/// upper triangles of `amplitude` and `decay` are read.
struct ExponentialCouplingSpec {
  std::vector<double> asymptotes;
  RealMatrix amplitude;
  RealMatrix decay;
};

/// Deterministic random exponential-coupling system, see synthetic_parameters.
struct SyntheticSpec {
  std::size_t n = 5;
  std::uint64_t seed = 7;
};

using AnalyticSpec = std::variant<LandauZenerSpec, ExponentialCouplingSpec, SyntheticSpec>;

struct GridSpec {
  double r_min = 0.5;
  double r_max = 40.0;
  double step = 0.01;
};

/// Closed-form matrix of an analytic system at R (no interpolation, no
/// asymptotic hold).
RealMatrix analytic_matrix(const AnalyticSpec& spec, double r);

/// Samples an analytic system on `grid`. Asymptotes are the closed-form
/// diagonal at the last grid point.
DiabaticModel build_analytic(const AnalyticSpec& spec, const GridSpec& grid = {});

/// Parameters behind SyntheticSpec{n, seed}: channel 1 is the entrance channel
/// at zero energy; the others lie within [-0.32, 0.08] hartree with repulsive
/// exponential walls and couplings of 0.03 to 0.12 hartree magnitude.
ExponentialCouplingSpec synthetic_parameters(std::size_t n, std::uint64_t seed);

/// Three-channel excitation system with a 0.0772 hartree (2.1 eV) gap and
/// steep repulsive walls, standing in for an alkali + rare-gas pair.
ExponentialCouplingSpec na_he_analog();

}  // namespace scmocc
