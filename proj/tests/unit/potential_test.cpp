#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "scmocc/diagnostics.hpp"
#include "scmocc/potential.hpp"
#include "scmocc/spline.hpp"

using namespace scmocc;

namespace {

std::string zero_two_channel_table() {
  std::ostringstream s;
  s << "# two channels, no coupling\n"
    << "n 2\n"
    << "asymptotes 0 0.1\n"
    << "labels g e\n";
  for (int k = 0; k < 10; ++k) s << 1.0 + k << " 0 0 0.1\n";
  return s.str();
}

}  // namespace

TEST(MultiSpline, ReproducesLinearDataExactly) {
  std::vector<double> grid, values;
  for (int k = 0; k < 8; ++k) {
    grid.push_back(0.5 * k * k + k);
    values.push_back(3.0 * grid.back() - 1.0);
    values.push_back(-2.0 * grid.back());
  }
  MultiSpline s(grid, values, 2);
  double out[2], d[2];
  for (double x = grid.front(); x <= grid.back(); x += 0.37) {
    s.evaluate(x, out);
    s.derivative(x, d);
    EXPECT_NEAR(out[0], 3.0 * x - 1.0, 1e-12);
    EXPECT_NEAR(out[1], -2.0 * x, 1e-12);
    EXPECT_NEAR(d[0], 3.0, 1e-12);
  }
}

TEST(MultiSpline, RejectsShortOrUnsortedGrids) {
  EXPECT_THROW(MultiSpline({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}, 1), ConfigError);
  EXPECT_THROW(MultiSpline({0.0, 2.0, 1.0, 3.0}, {0, 0, 0, 0}, 1), ConfigError);
}

TEST(LoadModel, ZeroCouplingTableHoldsAsymptotes) {
  const DiabaticModel m = parse_model(zero_two_channel_table());
  ASSERT_EQ(m.n(), 2u);
  EXPECT_EQ(m.labels()[1], "e");
  const RealMatrix v = m.potential_matrix(m.r_max());
  EXPECT_EQ(v(0, 0), 0.0);
  EXPECT_EQ(v(1, 1), 0.1);
  EXPECT_EQ(v(0, 1), 0.0);
}

TEST(LoadModel, RejectsDecreasingGrid) {
  const std::string text = "n 1\nasymptotes 0\n3.0 0\n2.0 0\n4.0 0\n5.0 0\n";
  try {
    parse_model(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("grid not strictly increasing"), std::string::npos);
  }
}

TEST(LoadModel, RejectsMalformedInput) {
  EXPECT_THROW(parse_model("asymptotes 0\n"), ConfigError);
  EXPECT_THROW(parse_model("n 2\nasymptotes 0\n"), ConfigError);
  EXPECT_THROW(parse_model("n 2\nasymptotes 0 0\n1 0 0\n"), ConfigError);
  EXPECT_THROW(parse_model("n 1\nasymptotes 0\n1 0\n2 x\n3 0\n4 0\n"), ConfigError);
  EXPECT_THROW(parse_model("n 1\nasymptotes 0\n1 0\n2 0\n3 0\n"), ConfigError);
  EXPECT_THROW(load_model("/nonexistent/potential.dat"), ConfigError);
}

TEST(LoadModel, AsymptoteMismatchWarnsThenRejects) {
  auto table = [](double tail) {
    std::ostringstream s;
    s << "n 1\nasymptotes 0\n";
    for (int k = 1; k <= 5; ++k) s << k << ' ' << (k == 5 ? tail : 0.0) << '\n';
    return s.str();
  };
  {
    fixture::WarningCapture warnings;
    EXPECT_NO_THROW(parse_model(table(5e-6)));
    EXPECT_FALSE(warnings.messages().empty());
  }
  EXPECT_THROW(parse_model(table(2e-5)), ConfigError);
}

TEST(LoadModel, SyntheticRoundTripThroughFile) {
  const DiabaticModel m = build_analytic(SyntheticSpec{5, 7});
  const auto path = std::filesystem::temp_directory_path() / "scmocc_roundtrip.dat";
  save_model(m, path);
  const DiabaticModel back = load_model(path);
  std::filesystem::remove(path);
  ASSERT_EQ(back.grid().size(), m.grid().size());
  for (std::size_t k = 0; k < m.grid().size(); ++k) {
    EXPECT_EQ(back.grid()[k], m.grid()[k]);
    EXPECT_LE((back.node_matrix(k) - m.node_matrix(k)).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_EQ(back.asymptotes(), m.asymptotes());
}

TEST(PotentialMatrix, NodesAreExactAndBeyondGridIsAsymptotic) {
  const DiabaticModel m = build_analytic(SyntheticSpec{5, 7});
  for (std::size_t k : {std::size_t{0}, std::size_t{17}, m.grid().size() - 1})
    EXPECT_EQ(m.potential_matrix(m.grid()[k]), m.node_matrix(k));
  const RealMatrix far = m.potential_matrix(2.0 * m.r_max());
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 5; ++j)
      EXPECT_EQ(far(i, j), i == j ? m.asymptotes()[i] : 0.0);
}

TEST(PotentialMatrix, BelowGridClampsWithOneWarning) {
  const DiabaticModel m = build_analytic(SyntheticSpec{3, 7});
  fixture::WarningCapture warnings;
  EXPECT_EQ(m.potential_matrix(0.1), m.node_matrix(0));
  EXPECT_EQ(m.potential_matrix(0.2), m.node_matrix(0));
  EXPECT_EQ(warnings.messages().size(), 1u);
  EXPECT_THROW(m.potential_matrix(0.0), PhysicsError);
  EXPECT_THROW(m.potential_matrix(-1.0), PhysicsError);
}

TEST(PotentialMatrix, LandauZenerMidpointsMatchClosedForm) {
  const LandauZenerSpec lz;
  const DiabaticModel m = build_analytic(lz);
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < m.grid().size(); k += 7) {
    const double r = 0.5 * (m.grid()[k] + m.grid()[k + 1]);
    const double x = r - lz.crossing;
    const RealMatrix v = m.potential_matrix(r);
    worst = std::max(worst, std::abs(v(0, 0) - lz.slope1 * x));
    worst = std::max(worst, std::abs(v(1, 1) - lz.slope2 * x));
    if (std::abs(x) < lz.plateau_half_width) worst = std::max(worst, std::abs(v(0, 1) - lz.coupling));
    if (std::abs(x) > lz.plateau_half_width + lz.taper_length) worst = std::max(worst, std::abs(v(0, 1)));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(PotentialMatrix, ExponentialCouplingMatchesClosedForm) {
  ExponentialCouplingSpec s;
  s.asymptotes = {0.0, 0.2};
  s.amplitude = RealMatrix(2, 2);
  s.amplitude << 1.0, 0.05, 0.05, 2.0;
  s.decay = RealMatrix(2, 2);
  s.decay << 1.2, 1.0, 1.0, 0.9;
  const DiabaticModel m = build_analytic(s);
  for (double r : {0.777, 1.234, 3.3333, 7.01, 15.5})
    EXPECT_NEAR(m.potential_matrix(r)(0, 1), 0.05 * std::exp(-r), 1e-8) << r;
}

TEST(PotentialMatrix, SymmetricAtRandomRadii) {
  const DiabaticModel m = build_analytic(SyntheticSpec{5, 7});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(m.r_min(), m.r_max());
  for (int k = 0; k < 200; ++k) {
    const RealMatrix v = m.potential_matrix(u(rng));
    EXPECT_EQ(v, v.transpose());
  }
}

TEST(BuildAnalytic, SyntheticIsDeterministic) {
  const DiabaticModel a = build_analytic(SyntheticSpec{5, 7});
  const DiabaticModel b = build_analytic(SyntheticSpec{5, 7});
  const DiabaticModel c = build_analytic(SyntheticSpec{5, 8});
  EXPECT_EQ(format_model(a), format_model(b));
  EXPECT_NE(format_model(a), format_model(c));
}

TEST(BuildAnalytic, RejectsInvalidSpecs) {
  EXPECT_THROW(build_analytic(SyntheticSpec{0, 7}), ConfigError);
  ExponentialCouplingSpec s = fixture::two_state_spec();
  s.decay(0, 1) = 0.0;
  EXPECT_THROW(build_analytic(s), ConfigError);
  EXPECT_THROW(build_analytic(SyntheticSpec{}, GridSpec{2.0, 1.0, 0.01}), ConfigError);
}

TEST(AveragedPotential, HandComputedCases) {
  RealMatrix v = RealMatrix::Zero(3, 3);
  v.diagonal() << -0.2, -0.2, -0.2;
  EXPECT_DOUBLE_EQ(average_diagonal(v, AveragingScheme::arithmetic(), 0.0, 1.0), -0.2);

  RealMatrix w = RealMatrix::Zero(2, 2);
  w.diagonal() << -0.1, -0.4;
  EXPECT_NEAR(average_diagonal(w, AveragingScheme::geometric(), 0.0, 1.0), -0.2, 1e-15);
  EXPECT_DOUBLE_EQ(average_diagonal(w, AveragingScheme::single(1), 0.0, 1.0), -0.4);

  w.diagonal() << -0.1, 0.4;
  EXPECT_THROW(average_diagonal(w, AveragingScheme::geometric(), 0.0, 1.0), PhysicsError);
  EXPECT_THROW(average_diagonal(w, AveragingScheme::single(2), 0.0, 1.0), ConfigError);
}

TEST(AveragedPotential, ArithmeticMinusChannelMatchesRecomputation) {
  const DiabaticModel m = build_analytic(SyntheticSpec{5, 7});
  for (double r : {1.3, 2.7, 4.1}) {
    const RealMatrix v = m.potential_matrix(r);
    double mean = 0.0;
    for (int i = 0; i < 5; ++i) mean += v(i, i);
    mean /= 5.0;
    const double diff = averaged_potential(m, r, AveragingScheme::arithmetic()) -
                        averaged_potential(m, r, AveragingScheme::single(0));
    EXPECT_NEAR(diff, mean - v(0, 0), 1e-14);
  }
}

TEST(AveragedPotential, ArithmeticIsBracketedByDiagonal) {
  const DiabaticModel m = build_analytic(SyntheticSpec{5, 7});
  for (double r = m.r_min(); r < m.r_max(); r += 0.173) {
    const RealMatrix v = m.potential_matrix(r);
    const double a = averaged_potential(m, r, AveragingScheme::arithmetic());
    EXPECT_GE(a, v.diagonal().minCoeff() - 1e-15);
    EXPECT_LE(a, v.diagonal().maxCoeff() + 1e-15);
  }
}

TEST(AveragedPotential, SchemesAgreeOnDegenerateDiagonal) {
  for (double d : {-0.3, 0.7}) {
    RealMatrix v = RealMatrix::Constant(4, 4, 0.01);
    v.diagonal().setConstant(d);
    const double a = average_diagonal(v, AveragingScheme::arithmetic(), 0.0, 1.0);
    EXPECT_NEAR(average_diagonal(v, AveragingScheme::geometric(), 0.0, 1.0), a, 1e-14);
    EXPECT_NEAR(average_diagonal(v, AveragingScheme::single(2), 0.0, 1.0), a, 1e-14);
  }
}
