#include <gtest/gtest.h>

#include <cmath>

#include "cojump/error.hpp"
#include "cojump/spotvol.hpp"
#include "oracles.hpp"

using namespace cojump;

namespace {

SampledPath path_of(std::vector<double> t, std::vector<double> x, double horizon) {
  return SampledPath{ObservationGrid(std::move(t), 1, horizon), std::move(x), {}, {}};
}

SampledPathPair simulate_pair(double rho, std::size_t n, std::uint64_t r, bool async = true) {
  BiModel m;
  m.rho = rho;
  Rng rng = make_stream(41, StreamDomain::kSimulation, r);
  const auto g1 = generate_grid(PoissonScheme{1.0}, n, 1.0, rng);
  const auto g2 = async ? generate_grid(PoissonScheme{1.0}, n, 1.0, rng) : g1;
  return simulate_biv(m, GridPair(g1, g2), rng);
}

}  // namespace

TEST(Bandwidth, DefaultsAndValidation) {
  EXPECT_DOUBLE_EQ(BandwidthSpec::defaults_for(1600).b_n, 0.025);
  EXPECT_NO_THROW(validate(BandwidthSpec{0.5}, 1.0));
  EXPECT_THROW(validate(BandwidthSpec{0.0}, 1.0), ParameterError);
  EXPECT_THROW(validate(BandwidthSpec{2.0}, 1.0), ParameterError);
}

TEST(SigmaHat, Examples) {
  // Plus window at s = 0.2 with b = 0.5 holds (0.2, 0.4] and (0.4, 0.7].
  const auto p = path_of({0.0, 0.2, 0.4, 0.7, 1.0}, {1.0, 1.0, 1.1, 0.9, 5.0}, 1.0);
  EXPECT_NEAR(sigma_hat(p, 0.2, Side::kPlus, {0.5}), std::sqrt(0.1), 1e-15);
  const auto flat = path_of({0.0, 0.2, 0.4, 0.7, 1.0}, {2, 2, 2, 2, 2}, 1.0);
  EXPECT_EQ(sigma_hat(flat, 0.5, Side::kMinus, {0.5}), 0.0);
  EXPECT_EQ(sigma_hat(flat, 0.5, Side::kPlus, {0.5}), 0.0);
}

TEST(SigmaHat, ErrorsAndClipping) {
  const auto p = path_of({0.0, 0.2, 0.4, 0.7, 1.0}, {1.0, 1.2, 1.1, 0.9, 1.0}, 1.0);
  EXPECT_THROW(sigma_hat(p, 1.5, Side::kPlus, {0.1}), RangeError);
  EXPECT_THROW(sigma_hat(p, -0.1, Side::kMinus, {0.1}), RangeError);
  // Only (0.2, 0.4] would fit a window of 0.1 around 0.3: none is inside.
  EXPECT_THROW(sigma_hat(p, 0.3, Side::kMinus, {0.1}), EmptyWindowError);
  EXPECT_THROW(sigma_hat(p, 0.0, Side::kMinus, {0.5}), EmptyWindowError);
  // Clipped at 0: the minus window at 0.2 of length 0.5 keeps (0, 0.2] and divides by 0.5.
  EXPECT_NEAR(sigma_hat(p, 0.2 + 1e-12, Side::kMinus, {0.5}), std::sqrt(0.04 / 0.5), 1e-15);
  // Clipped at the horizon.
  EXPECT_NEAR(sigma_hat(p, 0.7, Side::kPlus, {0.5}), std::sqrt(0.01 / 0.5), 1e-15);
}

TEST(SigmaHat, ContainmentMatchesBruteForce) {
  for (std::uint64_t r = 0; r < 60; ++r) {
    Rng rng = make_stream(42, StreamDomain::kAuxiliary, r);
    const auto t = oracle::random_times(rng, 40, 1.0);
    const auto x = oracle::random_walk(rng, 40, 0.1);
    const auto p = path_of(t, x, 1.0);
    const SpotVolIndex idx(p.grid, p.values);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int q = 0; q < 20; ++q) {
      const double s = q < 4 ? t[1 + static_cast<std::size_t>(q) * 7] : u(rng);
      const BandwidthSpec bw{0.05 + 0.3 * u(rng)};
      for (bool plus : {false, true}) {
        const Side side = plus ? Side::kPlus : Side::kMinus;
        const auto [sum, count] = oracle::window_sum(t, x, s, plus, bw.b_n, 1.0);
        EXPECT_EQ(window_intervals(p.grid, s, side, bw).size(), count);
        if (count == 0) {
          EXPECT_THROW(idx.variance(s, side, bw), EmptyWindowError);
        } else {
          EXPECT_NEAR(idx.variance(s, side, bw), sum / bw.b_n, 1e-12 * (1.0 + sum / bw.b_n));
        }
      }
    }
  }
}

TEST(SigmaHat, TimeReversalSwapsSides) {
  // Dyadic times keep the reflected grid exact.
  Rng rng = make_stream(43, StreamDomain::kAuxiliary, 0);
  std::vector<double> t{0.0};
  std::uniform_int_distribution<int> gap(1, 3);
  while (t.back() + 3.0 / 256.0 <= 1.0) t.push_back(t.back() + gap(rng) / 256.0);
  t.push_back(1.0);
  const auto x = oracle::random_walk(rng, t.size(), 0.1);
  std::vector<double> tr(t.size()), xr(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    tr[i] = 1.0 - t[t.size() - 1 - i];
    xr[i] = x[t.size() - 1 - i];
  }
  const auto p = path_of(t, x, 1.0);
  const auto q = path_of(tr, xr, 1.0);
  for (int m = 1; m < 256; m += 5) {
    const double s = (m + 0.5) / 256.0;  // never an observation time
    for (double b : {0.0625, 0.25}) {
      bool empty = false;
      double a = 0.0;
      try {
        a = sigma_hat(p, s, Side::kMinus, {b});
      } catch (const EmptyWindowError&) {
        empty = true;
      }
      if (empty) {
        EXPECT_THROW(sigma_hat(q, 1.0 - s, Side::kPlus, {b}), EmptyWindowError);
      } else {
        EXPECT_NEAR(a, sigma_hat(q, 1.0 - s, Side::kPlus, {b}), 1e-10);  // prefix sums cancel
      }
    }
  }
}

TEST(SigmaHat, ConsistentForGbm) {
  UniModel m;
  const std::size_t n = 25600;
  const BandwidthSpec bw = BandwidthSpec::defaults_for(n);
  double sum = 0.0;
  const int paths = 100;
  for (int r = 0; r < paths; ++r) {
    Rng rng = make_stream(44, StreamDomain::kSimulation, r);
    const auto p = simulate_uni(m, generate_grid(PoissonScheme{1.0}, n, 1.0, rng), rng);
    const double s = sigma_hat(p, 0.5, r % 2 ? Side::kPlus : Side::kMinus, bw);
    sum += s * s;
  }
  EXPECT_NEAR(sum / paths, 8e-5, 0.1 * 8e-5);
}

TEST(KappaHat, MatchesBruteForce) {
  for (std::uint64_t r = 0; r < 40; ++r) {
    Rng rng = make_stream(45, StreamDomain::kAuxiliary, r);
    const auto t1 = oracle::random_times(rng, 30, 1.0);
    const auto t2 = oracle::random_times(rng, 23, 1.0);
    const auto x1 = oracle::random_walk(rng, 30, 0.1);
    const auto x2 = oracle::random_walk(rng, 23, 0.1);
    const SampledPathPair pair{GridPair(ObservationGrid(t1, 1, 1.0), ObservationGrid(t2, 1, 1.0)),
                               x1, x2, {}, {}, {}};
    const SpotCovIndex idx(pair);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int q = 0; q < 20; ++q) {
      const double s = u(rng);
      const BandwidthSpec bw{0.05 + 0.4 * u(rng)};
      for (bool plus : {false, true}) {
        const Side side = plus ? Side::kPlus : Side::kMinus;
        const auto [sum, count] = oracle::kappa_sum(t1, x1, t2, x2, s, plus, bw.b_n, 1.0);
        if (count == 0) {
          EXPECT_THROW(idx.kappa(s, side, bw), EmptyWindowError);
        } else {
          EXPECT_NEAR(idx.kappa(s, side, bw), sum / bw.b_n, 1e-12 * (1.0 + std::abs(sum) / bw.b_n));
        }
      }
    }
  }
}

TEST(KappaHat, IdenticalAndFlatLegs) {
  Rng rng = make_stream(46, StreamDomain::kAuxiliary, 0);
  const auto t = oracle::random_times(rng, 50, 1.0);
  const auto x = oracle::random_walk(rng, 50, 0.1);
  const std::vector<double> flat(50, 3.0);
  const SampledPathPair same{GridPair(ObservationGrid(t, 1, 1.0), ObservationGrid(t, 1, 1.0)),
                             x, x, {}, {}, {}};
  const SampledPathPair one_flat{GridPair(ObservationGrid(t, 1, 1.0), ObservationGrid(t, 1, 1.0)),
                                 x, flat, {}, {}, {}};
  const SampledPath leg{ObservationGrid(t, 1, 1.0), x, {}, {}};
  for (double s : {0.2, 0.5, 0.8}) {
    for (Side side : {Side::kMinus, Side::kPlus}) {
      const double sig = sigma_hat(leg, s, side, {0.2});
      EXPECT_NEAR(kappa_hat(same, s, side, {0.2}), sig * sig, 1e-12);
      EXPECT_EQ(kappa_hat(one_flat, s, side, {0.2}), 0.0);
      bool clamped = false;
      EXPECT_NEAR(rho_hat(same, s, side, {0.2}, &clamped), 1.0, 1e-12);
      EXPECT_LE(rho_hat(same, s, side, {0.2}), 1.0);
      EXPECT_THROW(rho_hat(one_flat, s, side, {0.2}), DegeneratePathError);
    }
  }
}

TEST(KappaHat, ConsistentUnderPerfectCorrelation) {
  const std::size_t n = 25600;
  const BandwidthSpec bw = BandwidthSpec::defaults_for(n);
  double kap = 0.0, prod = 0.0;
  for (int r = 0; r < 100; ++r) {
    const auto pair = simulate_pair(1.0, n, r);
    const SpotCovIndex idx(pair);
    kap += idx.kappa(0.5, Side::kPlus, bw);
    prod += idx.leg(0).sigma(0.5, Side::kPlus, bw) * idx.leg(1).sigma(0.5, Side::kPlus, bw);
  }
  EXPECT_NEAR(kap / prod, 1.0, 0.15);
}

TEST(RhoHat, CenteredWithoutCorrelationAndBounded) {
  const std::size_t n = 25600;
  const BandwidthSpec bw = BandwidthSpec::defaults_for(n);
  double sum = 0.0;
  for (int r = 0; r < 100; ++r) {
    const auto pair = simulate_pair(0.0, n, 1000 + r);
    const SpotCovIndex idx(pair);
    for (Side side : {Side::kMinus, Side::kPlus}) {
      const RhoEstimate e = rho_hat(idx, 0.5, side, bw);
      EXPECT_GE(e.value, -1.0);
      EXPECT_LE(e.value, 1.0);
      sum += e.value;
    }
  }
  EXPECT_NEAR(sum / 200.0, 0.0, 0.1);
}

TEST(RhoHat, ClampFlagged) {
  // Increments chosen so that the Hayashi-Yoshida sum exceeds the product of
  // the spot volatilities: leg 2 sees both leg-1 moves through one long interval.
  const std::vector<double> t1{0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<double> x1{0.0, 1.0, 2.0, 2.0, 2.0};
  const std::vector<double> t2{0.0, 0.5, 1.0};
  const std::vector<double> x2{0.0, 2.0, 2.0};
  const SampledPathPair pair{GridPair(ObservationGrid(t1, 1, 1.0), ObservationGrid(t2, 1, 1.0)),
                             x1, x2, {}, {}, {}};
  bool clamped = false;
  const double r = rho_hat(pair, 0.0, Side::kPlus, {1.0}, &clamped);
  EXPECT_TRUE(clamped);
  EXPECT_EQ(r, 1.0);
}
