#pragma once

#include <cstddef>
#include <vector>

#include "cojump/simulate.hpp"

namespace cojump {

struct BandwidthSpec {
  double b_n = 0.0;

  // b_n = 1/sqrt(n).
  static BandwidthSpec defaults_for(std::size_t n);
};

void validate(const BandwidthSpec& bw, double horizon);

// kMinus: window [s - b_n, s); kPlus: window [s, s + b_n]. Both are clipped to
// [0, horizon] and keep the normalization 1/b_n. An interval (t_{i-1}, t_i]
// contributes only when it lies entirely inside the window.
enum class Side { kMinus, kPlus };

// Inclusive range [first, last] of interval indices inside a window; empty
// when first > last.
struct IndexRange {
  std::size_t first = 1;
  std::size_t last = 0;

  bool empty() const noexcept { return first > last; }
  std::size_t size() const noexcept { return empty() ? 0 : last - first + 1; }
};

IndexRange window_intervals(const ObservationGrid& grid, double s, Side side,
                            const BandwidthSpec& bw);

// Prefix sums of squared increments of one leg; answers window queries in
// O(log N).
class SpotVolIndex {
 public:
  SpotVolIndex(const ObservationGrid& grid, const std::vector<double>& values);

  // sigma_hat^2; throws EmptyWindowError when no interval lies in the window.
  double variance(double s, Side side, const BandwidthSpec& bw) const;
  double sigma(double s, Side side, const BandwidthSpec& bw) const;

  const ObservationGrid& grid() const noexcept { return *grid_; }

 private:
  const ObservationGrid* grid_;
  std::vector<double> prefix_;  // prefix_[i] = sum_{m<=i} Δ_m^2
};

// Cross-product index of a pair: for every interval i of leg 1 the range of
// overlapping intervals of leg 2, plus prefix sums of leg-2 increments.
class SpotCovIndex {
 public:
  explicit SpotCovIndex(const SampledPathPair& pair);

  // kappa_hat; throws EmptyWindowError when no overlapping pair lies in the window.
  double kappa(double s, Side side, const BandwidthSpec& bw) const;

  const SpotVolIndex& leg(int l) const noexcept { return l == 0 ? vol1_ : vol2_; }

 private:
  const SampledPathPair* pair_;
  SpotVolIndex vol1_;
  SpotVolIndex vol2_;
  std::vector<double> inc1_;
  std::vector<double> prefix2_;  // prefix2_[j] = sum_{m<=j} Δ2_m
  std::vector<std::size_t> jlo_;
  std::vector<std::size_t> jhi_;
};

struct RhoEstimate {
  double value = 0.0;
  bool clamped = false;
};

// rho_hat = kappa_hat / (sigma1_hat sigma2_hat), clamped to [-1, 1]. Throws
// DegeneratePathError when either sigma_hat vanishes.
RhoEstimate rho_hat(const SpotCovIndex& index, double s, Side side, const BandwidthSpec& bw);

double sigma_hat(const SampledPath& path, double s, Side side, const BandwidthSpec& bw);
double kappa_hat(const SampledPathPair& pair, double s, Side side, const BandwidthSpec& bw);
double rho_hat(const SampledPathPair& pair, double s, Side side, const BandwidthSpec& bw,
               bool* clamped = nullptr);

}  // namespace cojump
