#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cojump/error.hpp"
#include "cojump/sampling.hpp"
#include "oracles.hpp"

using namespace cojump;

namespace {

ObservationGrid grid_of(std::vector<double> t, std::size_t n = 1, double horizon = 0.0) {
  const double h = horizon > 0.0 ? horizon : t.back();
  return ObservationGrid(std::move(t), n, h);
}

double mean_g(const SchemeSpec& s, std::size_t n, std::size_t k, std::size_t grids) {
  double sum = 0.0;
  for (std::size_t r = 0; r < grids; ++r) {
    Rng rng = make_stream(11, StreamDomain::kAuxiliary, r);
    sum += g_functional(generate_grid(s, n, 1.0, rng), k, 1.0);
  }
  return sum / static_cast<double>(grids);
}

}  // namespace

TEST(Grid, RejectsInvalidTimes) {
  EXPECT_THROW(grid_of({0.1, 0.5}), ParameterError);
  EXPECT_THROW(grid_of({0.0, 0.5, 0.5}), ParameterError);
  EXPECT_THROW(ObservationGrid({0.0, 2.0}, 1, 1.0), ParameterError);
  EXPECT_THROW(ObservationGrid({0.0, 1.0}, 0, 1.0), ParameterError);
  EXPECT_THROW(GridPair(ObservationGrid({0.0, 1.0}, 1, 1.0), ObservationGrid({0.0, 1.0}, 1, 2.0)),
               ParameterError);
  EXPECT_THROW(GridPair(ObservationGrid({0.0, 1.0}, 1, 1.0), ObservationGrid({0.0, 1.0}, 2, 1.0)),
               ParameterError);
}

TEST(Generate, Equidistant) {
  Rng rng(0, 0);
  const auto g = generate_grid(Equidistant{}, 4, 1.0, rng);
  const std::vector<double> expect{0, .25, .5, .75, 1.0};
  ASSERT_EQ(g.size(), expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_DOUBLE_EQ(g.time(i), expect[i]);
}

TEST(Generate, AlternatingAlpha) {
  Rng rng(0, 0);
  const auto g = generate_grid(AlternatingAlpha{0.5}, 2, 2.0, rng);
  const std::vector<double> expect{0, 0.75, 1.0, 1.75, 2.0};
  ASSERT_EQ(g.size(), expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_DOUBLE_EQ(g.time(i), expect[i]);
}

TEST(Generate, PoissonCountConcentrates) {
  for (std::uint64_t r = 0; r < 20; ++r) {
    Rng rng = make_stream(1, StreamDomain::kAuxiliary, r);
    const auto g = generate_grid(PoissonScheme{1.0}, 25600, 1.0, rng);
    EXPECT_NEAR(static_cast<double>(g.intervals()), 25600.0, 3.0 * 160.0);
    EXPECT_LE(g.last_time(), 1.0);
  }
}

TEST(Generate, RejectsBadSchemes) {
  Rng rng(0, 0);
  EXPECT_THROW(generate_grid(PoissonScheme{0.0}, 10, 1.0, rng), ParameterError);
  EXPECT_THROW(generate_grid(PoissonScheme{-1.0}, 10, 1.0, rng), ParameterError);
  EXPECT_THROW(generate_grid(AlternatingAlpha{0.0}, 10, 1.0, rng), ParameterError);
  EXPECT_THROW(generate_grid(AlternatingAlpha{1.0}, 10, 1.0, rng), ParameterError);
  EXPECT_THROW(generate_grid(Equidistant{}, 0, 1.0, rng), ParameterError);
  EXPECT_THROW(generate_grid(Equidistant{}, 10, 0.0, rng), ParameterError);
}

TEST(Generate, DeterministicGivenStream) {
  Rng a = make_stream(5, StreamDomain::kSimulation, 3);
  Rng b = make_stream(5, StreamDomain::kSimulation, 3);
  const auto ga = generate_grid(PoissonScheme{2.0}, 500, 1.0, a);
  const auto gb = generate_grid(PoissonScheme{2.0}, 500, 1.0, b);
  ASSERT_EQ(ga.size(), gb.size());
  for (std::size_t i = 0; i < ga.size(); ++i) ASSERT_EQ(ga.time(i), gb.time(i));
}

TEST(Mesh, Examples) {
  Rng rng(0, 0);
  EXPECT_DOUBLE_EQ(mesh(generate_grid(Equidistant{}, 4, 1.0, rng)), 0.25);
  EXPECT_DOUBLE_EQ(mesh(generate_grid(AlternatingAlpha{0.5}, 2, 2.0, rng)), 0.75);
  EXPECT_DOUBLE_EQ(mesh(grid_of({0.0, 3.0})), 3.0);
}

TEST(Locate, Examples) {
  const auto g = grid_of({0.0, 1.0, 2.0});
  EXPECT_EQ(locate(g, 1.0), 1u);
  EXPECT_EQ(locate(g, 1.5), 2u);
  EXPECT_THROW(locate(g, 0.0), RangeError);
  EXPECT_THROW(locate(g, 2.5), RangeError);
}

TEST(Locate, InvertsTimes) {
  Rng rng = make_stream(2, StreamDomain::kAuxiliary, 0);
  const auto g = generate_grid(PoissonScheme{1.0}, 300, 1.0, rng);
  for (std::size_t i = 1; i < g.size(); ++i) ASSERT_EQ(locate(g, g.time(i)), i);
}

TEST(GFunctional, Examples) {
  Rng rng(0, 0);
  const auto g = generate_grid(Equidistant{}, 4, 1.0, rng);
  EXPECT_DOUBLE_EQ(g_functional(g, 1, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(g_functional(g, 2, 1.0), 0.75);
  EXPECT_THROW(g_functional(g, 0, 1.0), ParameterError);
}

TEST(GFunctional, MatchesNaiveSum) {
  for (std::uint64_t r = 0; r < 50; ++r) {
    Rng rng = make_stream(3, StreamDomain::kAuxiliary, r);
    const auto t = oracle::random_times(rng, 25, 1.0);
    const ObservationGrid g(t, 24, 1.0);
    for (std::size_t k = 1; k <= 4; ++k)
      for (double T : {0.3, 0.7, 1.0})
        EXPECT_NEAR(g_functional(g, k, T), oracle::g_functional(t, k, T, 24.0),
                    1e-12 * (1.0 + oracle::g_functional(t, k, T, 24.0)));
  }
}

TEST(GFunctional, DiscreteInequalityAndMonotonicity) {
  for (std::uint64_t r = 0; r < 40; ++r) {
    Rng rng = make_stream(4, StreamDomain::kAuxiliary, r);
    const auto g = generate_grid(PoissonScheme{1.0}, 200, 1.0, rng);
    const double nd = 200.0;
    const double m = mesh(g);
    const std::vector<double> ts{0.0, 0.1, 0.25, 0.5, 0.8, 1.0};
    for (std::size_t k : {2u, 3u, 5u}) {
      const double kd = static_cast<double>(k);
      const double slack = kd * kd * m * m * nd;
      for (std::size_t a = 0; a < ts.size(); ++a) {
        for (std::size_t b = a; b < ts.size(); ++b) {
          const double lhs = g_functional(g, 1, ts[b]) - g_functional(g, 1, ts[a]);
          const double rhs = kd * (g_functional(g, k, ts[b]) - g_functional(g, k, ts[a]));
          EXPECT_LE(lhs, rhs + slack);
          EXPECT_LE(g_functional(g, k, ts[a]), g_functional(g, k, ts[b]));
        }
      }
    }
  }
}

TEST(GFunctional, PoissonLimits) {
  EXPECT_NEAR(mean_g(PoissonScheme{1.0}, 4000, 1, 100), 2.0, 0.05 * 2.0);
  for (std::size_t k : {2u, 3u, 5u}) {
    const double target = (static_cast<double>(k) + 1.0) / static_cast<double>(k);
    EXPECT_NEAR(mean_g(PoissonScheme{1.0}, 4000, k, 100), target, 0.05 * target) << "k=" << k;
  }
  EXPECT_NEAR(mean_g(PoissonScheme{2.0}, 4000, 1, 100), 1.0, 0.05);
}

TEST(GFunctional, AlternatingLimits) {
  Rng rng(0, 0);
  const auto g = generate_grid(AlternatingAlpha{0.5}, 10000, 1.0, rng);
  EXPECT_NEAR(g_functional(g, 1, 1.0), 1.25, 0.02 * 1.25);
  EXPECT_NEAR(g_functional(g, 2, 1.0), 1.0, 0.02);
}

TEST(CrossFunctionals, Examples) {
  Rng rng(0, 0);
  const auto g = generate_grid(Equidistant{}, 2, 1.0, rng);
  const GridPair p(g, g);
  const auto c = gtilde_h_functionals(p, 1, 1.0);
  EXPECT_DOUBLE_EQ(c.gtilde, 1.0);
  EXPECT_DOUBLE_EQ(c.h, 1.0);
  const GridPair q(ObservationGrid({0.0, 0.3, 0.9}, 2, 1.0), ObservationGrid({0.0, 0.4, 1.0}, 2, 1.0));
  const auto z = gtilde_h_functionals(q, 1, 0.2);
  EXPECT_EQ(z.gtilde, 0.0);
  EXPECT_EQ(z.h, 0.0);
}

TEST(CrossFunctionals, MatchNaiveAndMonotone) {
  for (std::uint64_t r = 0; r < 30; ++r) {
    Rng rng = make_stream(6, StreamDomain::kAuxiliary, r);
    const auto t1 = oracle::random_times(rng, 20, 1.0);
    const auto t2 = oracle::random_times(rng, 27, 1.0);
    const GridPair p(ObservationGrid(t1, 20, 1.0), ObservationGrid(t2, 20, 1.0));
    for (std::size_t k = 1; k <= 3; ++k) {
      double prev_g = 0.0, prev_h = 0.0;
      for (double T : {0.1, 0.4, 0.6, 1.0}) {
        double g = 0.0, h = 0.0;
        for (std::size_t i = k; i < t1.size(); ++i)
          for (std::size_t j = k; j < t2.size(); ++j) {
            if (std::min(t1[i], t2[j]) > T) continue;
            const double ov = std::max(0.0, std::min(t1[i], t2[j]) - std::max(t1[i - k], t2[j - k]));
            if (!(ov > 0.0)) continue;
            g += ov * ov;
            h += (t1[i] - t1[i - k]) * (t2[j] - t2[j - k]);
          }
        const double s = 20.0 / static_cast<double>(k * k * k);
        const auto c = gtilde_h_functionals(p, k, T);
        EXPECT_NEAR(c.gtilde, s * g, 1e-12);
        EXPECT_NEAR(c.h, s * h, 1e-12);
        EXPECT_GE(c.gtilde, prev_g);
        EXPECT_GE(c.h, prev_h);
        prev_g = c.gtilde;
        prev_h = c.h;
      }
    }
  }
}

TEST(CrossFunctionals, PoissonPairPositiveAndLinear) {
  Rng rng = make_stream(8, StreamDomain::kAuxiliary, 0);
  const GridPair p(generate_grid(PoissonScheme{1.0}, 20000, 1.0, rng),
                   generate_grid(PoissonScheme{1.0}, 20000, 1.0, rng));
  const auto half = gtilde_h_functionals(p, 2, 0.5);
  const auto full = gtilde_h_functionals(p, 2, 1.0);
  EXPECT_GT(half.gtilde, 0.0);
  EXPECT_GT(half.h, 0.0);
  EXPECT_NEAR(full.gtilde / half.gtilde, 2.0, 0.1);
  EXPECT_NEAR(full.h / half.h, 2.0, 0.1);
}

TEST(Overlap, Examples) {
  EXPECT_DOUBLE_EQ(overlap_length({0, 2}, {1, 3}), 1.0);
  EXPECT_DOUBLE_EQ(overlap_length({0, 1}, {1, 2}), 0.0);
  EXPECT_DOUBLE_EQ(overlap_length({0, 3}, {1, 2}), 1.0);
  EXPECT_FALSE(overlaps({0, 1}, {1, 2}));
  EXPECT_TRUE(overlaps({0, 1.5}, {1, 2}));
}

TEST(GridCsv, RoundTrip) {
  Rng rng = make_stream(9, StreamDomain::kAuxiliary, 0);
  const auto g = generate_grid(PoissonScheme{1.0}, 100, 1.0, rng);
  std::stringstream ss;
  write_grid_csv(ss, g);
  const auto back = read_grid_csv(ss, 100, 1.0);
  ASSERT_EQ(back.size(), g.size());
  for (std::size_t i = 0; i < g.size(); ++i) ASSERT_EQ(back.time(i), g.time(i));
  std::stringstream bad("x\n0\n");
  EXPECT_THROW(read_grid_csv(bad, 1, 1.0), ParameterError);
}
