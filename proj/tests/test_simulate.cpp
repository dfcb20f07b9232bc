#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cojump/error.hpp"
#include "cojump/simulate.hpp"

using namespace cojump;

namespace {

ObservationGrid equi(std::size_t n, double T = 1.0) {
  Rng rng(0, 0);
  return generate_grid(Equidistant{}, n, T, rng);
}

ObservationGrid poisson(std::size_t n, std::uint64_t s) {
  Rng rng = make_stream(s, StreamDomain::kAuxiliary, 0);
  return generate_grid(PoissonScheme{1.0}, n, 1.0, rng);
}

}  // namespace

TEST(Models, Validation) {
  UniModel m;
  m.sigma2 = -1.0;
  EXPECT_THROW(validate(m), ParameterError);
  m = {};
  m.x0 = 0.0;
  EXPECT_THROW(validate(m), ParameterError);
  m = {};
  m.jumps = {0.01, 1.0, 0.5, 0.2};
  EXPECT_THROW(validate(m), ParameterError);
  m.jumps = {0.01, -1.0, 0.05, 0.7};
  EXPECT_THROW(validate(m), ParameterError);
  BiModel b;
  b.rho = 1.5;
  EXPECT_THROW(validate(b), ParameterError);
}

TEST(SimulateUni, FlatPath) {
  UniModel m;
  m.sigma2 = 0.0;
  Rng rng(1, 0);
  const auto p = simulate_uni(m, equi(50), rng);
  for (double v : p.values) EXPECT_EQ(v, 1.0);
  EXPECT_TRUE(p.jumps.empty());
  EXPECT_EQ(classify(p), UniClass::kContinuous);
}

TEST(SimulateUni, PureJumpRatiosMatchLedger) {
  UniModel m;
  m.sigma2 = 0.0;
  m.jumps = {0.01, 30.0, 0.05, 0.7484};
  for (std::uint64_t r = 0; r < 20; ++r) {
    Rng rng = make_stream(2, StreamDomain::kSimulation, r);
    const auto grid = poisson(200, r);
    const auto p = simulate_uni(m, grid, rng);
    const auto t = grid.times();
    std::size_t e = 0;
    for (std::size_t i = 1; i < t.size(); ++i) {
      double prod = 1.0;
      while (e < p.jumps.size() && p.jumps[e].time <= t[i]) prod *= 1.0 + 0.01 * p.jumps[e++].size;
      EXPECT_NEAR(p.values[i] / p.values[i - 1], prod, 1e-12);
    }
    EXPECT_EQ(e, p.jumps.size());
    for (const auto& j : p.jumps) {
      EXPECT_GE(std::abs(j.size), 0.05);
      EXPECT_LE(std::abs(j.size), 0.7484);
      EXPECT_GT(j.time, 0.0);
      EXPECT_LE(j.time, grid.last_time());
    }
  }
}

TEST(SimulateUni, LedgerReproducesIncrements) {
  UniModel m;
  m.jumps = {0.01, 10.0, 0.05, 0.7484};
  Rng rng = make_stream(3, StreamDomain::kSimulation, 0);
  const auto grid = poisson(400, 3);
  const auto p = simulate_uni(m, grid, rng);
  const auto t = grid.times();
  double log_level = 0.0;
  std::size_t e = 0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    log_level += p.diffusion_log_increments[i];
    while (e < p.jumps.size() && p.jumps[e].time <= t[i]) log_level += std::log1p(0.01 * p.jumps[e++].size);
    EXPECT_NEAR(std::exp(log_level), p.values[i], 1e-12 * p.values[i]);
  }
}

TEST(SimulateUni, JumpDeltaIsLevelChange) {
  UniModel m;
  m.sigma2 = 0.0;
  m.jumps = {0.01, 5.0, 0.05, 0.7484};
  Rng rng = make_stream(4, StreamDomain::kSimulation, 0);
  const auto p = simulate_uni(m, equi(1000), rng);
  double level = 1.0;
  for (const auto& j : p.jumps) {
    EXPECT_NEAR(j.delta, level * 0.01 * j.size, 1e-15);
    level *= 1.0 + 0.01 * j.size;
  }
}

TEST(SimulateUni, ContLogIncrementMoments) {
  UniModel m;  // Cont: sigma2 = 8e-5, no jumps
  const double dt = 0.01;
  const auto grid = equi(100);
  const int paths = 1000;
  double s = 0.0, s2 = 0.0;
  std::size_t count = 0;
  for (int r = 0; r < paths; ++r) {
    Rng rng = make_stream(5, StreamDomain::kSimulation, r);
    const auto p = simulate_uni(m, grid, rng);
    for (std::size_t i = 1; i < p.values.size(); ++i) {
      const double lr = std::log(p.values[i] / p.values[i - 1]);
      s += lr;
      s2 += lr * lr;
      ++count;
    }
  }
  const double n = static_cast<double>(count);
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  const double sig2 = 8e-5 * dt;
  EXPECT_NEAR(mean, -0.5 * sig2, 3.0 * std::sqrt(sig2 / n));
  EXPECT_NEAR(var, sig2, 3.0 * sig2 * std::sqrt(2.0 / n));
}

TEST(SimulateUni, TerminalLogVariance) {
  UniModel m;
  m.sigma2 = 0.04;
  const auto grid = equi(4);
  const int paths = 100000;
  double s = 0.0, s2 = 0.0;
  for (int r = 0; r < paths; ++r) {
    Rng rng = make_stream(6, StreamDomain::kSimulation, r);
    const double lx = std::log(simulate_uni(m, grid, rng).values.back());
    s += lx;
    s2 += lx * lx;
  }
  const double mean = s / paths;
  const double var = s2 / paths - mean * mean;
  EXPECT_NEAR(var, 0.04, 3.0 * 0.04 * std::sqrt(2.0 / paths));
}

TEST(SimulateUni, IndependentStreams) {
  UniModel m;
  const auto grid = equi(10000);
  Rng a = make_stream(7, StreamDomain::kSimulation, 0);
  Rng b = make_stream(7, StreamDomain::kSimulation, 1);
  const auto pa = simulate_uni(m, grid, a);
  const auto pb = simulate_uni(m, grid, b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 1; i < pa.values.size(); ++i) {
    const double x = std::log(pa.values[i] / pa.values[i - 1]);
    const double y = std::log(pb.values[i] / pb.values[i - 1]);
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  EXPECT_LT(std::abs(sab / std::sqrt(saa * sbb)), 0.05);
}

TEST(SimulateBiv, PerfectCorrelationIdenticalLegs) {
  BiModel m;
  m.rho = 1.0;
  const auto g = equi(500);
  Rng rng(8, 0);
  const auto p = simulate_biv(m, GridPair(g, g), rng);
  for (std::size_t i = 0; i < p.values1.size(); ++i) EXPECT_EQ(p.values1[i], p.values2[i]);
}

TEST(SimulateBiv, DisjointCaseLedgers) {
  BiModel m;
  m.jump1 = {0.01, 1.0, 0.05, 0.7484};
  m.jump2 = {0.01, 1.0, 0.05, 0.7484};
  const int paths = 4000;
  double c1 = 0, c2 = 0;
  for (int r = 0; r < paths; ++r) {
    Rng rng = make_stream(9, StreamDomain::kSimulation, r);
    const auto g = equi(50);
    const auto p = simulate_biv(m, GridPair(g, g), rng);
    EXPECT_TRUE(p.jumps_common.empty());
    c1 += static_cast<double>(p.jumps1.size());
    c2 += static_cast<double>(p.jumps2.size());
  }
  EXPECT_NEAR(c1 / paths, 1.0, 4.0 / std::sqrt(paths));
  EXPECT_NEAR(c2 / paths, 1.0, 4.0 / std::sqrt(paths));
}

TEST(SimulateBiv, CommonCaseLedgers) {
  BiModel m;
  m.jump3 = {0.01, 1.0, 0.05, 0.7484};
  const int paths = 4000;
  int nonempty = 0;
  for (int r = 0; r < paths; ++r) {
    Rng rng = make_stream(10, StreamDomain::kSimulation, r);
    const auto g = equi(50);
    const auto p = simulate_biv(m, GridPair(g, g), rng);
    EXPECT_TRUE(p.jumps1.empty());
    EXPECT_TRUE(p.jumps2.empty());
    nonempty += !p.jumps_common.empty();
    EXPECT_EQ(classify(p) == BivClass::kHasCommonJump, !p.jumps_common.empty());
  }
  const double q = 1.0 - std::exp(-1.0);
  EXPECT_NEAR(static_cast<double>(nonempty) / paths, q, 4.0 * std::sqrt(q * (1 - q) / paths));
}

TEST(SimulateBiv, CommonJumpHitsBothLegs) {
  BiModel m;
  m.sigma2_1 = m.sigma2_2 = 0.0;
  m.jump3 = {0.01, 20.0, 0.05, 0.7484};
  Rng rng(11, 0);
  const auto g1 = poisson(300, 1);
  const auto g2 = poisson(300, 2);
  const auto p = simulate_biv(m, GridPair(g1, g2), rng);
  ASSERT_FALSE(p.jumps_common.empty());
  const double f = p.values1.back() / p.values1.front();
  double prod = 1.0;
  for (const auto& e : p.jumps_common)
    if (e.time <= g1.last_time()) prod *= e.factor;
  EXPECT_NEAR(f, prod, 1e-12);
}

TEST(SimulateBiv, BrownianCorrelation) {
  BiModel m;
  m.rho = 0.5;
  const auto g = equi(20000);
  Rng rng(12, 0);
  const auto p = simulate_biv(m, GridPair(g, g), rng);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 1; i < p.values1.size(); ++i) {
    const double x = std::log(p.values1[i] / p.values1[i - 1]);
    const double y = std::log(p.values2[i] / p.values2[i - 1]);
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  EXPECT_NEAR(sab / std::sqrt(saa * sbb), 0.5, 0.03);
}

TEST(Classify, Examples) {
  const auto g = equi(4);
  SampledPath p{g, {1, 1, 1, 1, 1}, {}, {}};
  EXPECT_EQ(classify(p), UniClass::kContinuous);
  SampledPathPair q{GridPair(g, g), {1, 1, 1, 1, 1}, {1, 1, 1, 1, 1}, {}, {}, {}};
  EXPECT_EQ(classify(q), BivClass::kNoJumps);
  q.jumps_common.push_back({0.5, 0.1, 1.001, 0.001, 0.001});
  EXPECT_EQ(classify(q), BivClass::kHasCommonJump);
  q.jumps_common.clear();
  q.jumps1.push_back({0.5, 0.1, 1.001, 0.001});
  EXPECT_EQ(classify(q), BivClass::kDisjointOnly);
}

TEST(Condition, Examples) {
  UniModel cont;
  Rng rng(13, 0);
  ConditioningStats st;
  condition_resample(cont, PoissonScheme{1.0}, 100, 1.0, Requirement::kNoJumps, rng,
                     kDefaultMaxTries, &st);
  EXPECT_EQ(st.tries, 1u);
  EXPECT_THROW(condition_resample(cont, PoissonScheme{1.0}, 100, 1.0, Requirement::kHasJump, rng),
               ConditioningError);

  UniModel heavy;
  heavy.jumps = {0.01, 25.0, 0.05, 0.1238};
  const auto p = condition_resample(heavy, PoissonScheme{1.0}, 100, 1.0, Requirement::kHasJump,
                                    rng, kDefaultMaxTries, &st);
  EXPECT_EQ(classify(p), UniClass::kHasJump);
  EXPECT_EQ(st.tries, 1u);

  BiModel idio;
  idio.jump1 = {0.01, 1.0, 0.05, 0.7484};
  EXPECT_THROW(condition_resample(idio, PoissonScheme{1.0}, PoissonScheme{1.0}, 100, 1.0,
                                  Requirement::kHasCommonJump, rng),
               ConditioningError);
}

TEST(Condition, BudgetExhaustion) {
  UniModel rare;
  rare.jumps = {0.01, 1e-9, 0.05, 0.7484};
  Rng rng(14, 0);
  EXPECT_THROW(condition_resample(rare, Equidistant{}, 10, 1.0, Requirement::kHasJump, rng, 5),
               ConditioningError);
}

TEST(Condition, EveryActiveMeasure) {
  BiModel m;
  m.jump1 = {0.01, 1.0, 0.05, 0.7484};
  m.jump2 = {0.01, 1.0, 0.05, 0.7484};
  for (std::uint64_t r = 0; r < 30; ++r) {
    Rng rng = make_stream(15, StreamDomain::kSimulation, r);
    const auto p = condition_resample(m, PoissonScheme{1.0}, PoissonScheme{1.0}, 100, 1.0,
                                      Requirement::kEveryActiveMeasure, rng);
    EXPECT_FALSE(p.jumps1.empty());
    EXPECT_FALSE(p.jumps2.empty());
    EXPECT_TRUE(p.jumps_common.empty());
  }
  UniModel cont;
  Rng rng(16, 0);
  ConditioningStats st;
  condition_resample(cont, PoissonScheme{1.0}, 100, 1.0, Requirement::kEveryActiveMeasure, rng,
                     kDefaultMaxTries, &st);
  EXPECT_EQ(st.tries, 1u);
}

TEST(Csv, PathAndLedger) {
  UniModel m;
  m.jumps = {0.01, 5.0, 0.05, 0.7484};
  Rng rng(17, 0);
  const auto p = simulate_uni(m, equi(10), rng);
  std::stringstream a, b;
  write_path_csv(a, p);
  write_ledger_csv(b, p);
  std::string line;
  std::getline(a, line);
  EXPECT_EQ(line, "t,x");
  std::size_t rows = 0;
  while (std::getline(a, line)) ++rows;
  EXPECT_EQ(rows, p.values.size());
  std::getline(b, line);
  EXPECT_EQ(line, "t,size,measure");

  const auto g1 = ObservationGrid({0.0, 0.5, 1.0}, 2, 1.0);
  const auto g2 = ObservationGrid({0.0, 0.25, 1.0}, 2, 1.0);
  SampledPathPair q{GridPair(g1, g2), {1, 2, 3}, {4, 5, 6}, {}, {}, {}};
  std::stringstream c;
  write_path_csv(c, q);
  EXPECT_EQ(c.str(), "t,x1,x2\n0,1,4\n0.25,,5\n0.5,2,\n1,3,6\n");
}
