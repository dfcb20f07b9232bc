#include "cojump/spotvol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cojump/error.hpp"

namespace cojump {
namespace {

std::size_t first_at_or_after(std::span<const double> t, double x) {
  return static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), x) - t.begin());
}

std::size_t first_after(std::span<const double> t, double x) {
  return static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), x) - t.begin());
}

void check_time(const ObservationGrid& grid, double s) {
  if (!(s >= 0.0 && s <= grid.horizon())) {
    std::ostringstream msg;
    msg << "spot estimator: time " << s << " outside [0, " << grid.horizon() << "]";
    throw RangeError(msg.str());
  }
}

[[noreturn]] void throw_empty(double s, Side side) {
  std::ostringstream msg;
  msg << "spot estimator: no interval inside the " << (side == Side::kMinus ? "minus" : "plus")
      << " window at s = " << s;
  throw EmptyWindowError(msg.str());
}

}  // namespace

BandwidthSpec BandwidthSpec::defaults_for(std::size_t n) {
  return {1.0 / std::sqrt(static_cast<double>(n))};
}

void validate(const BandwidthSpec& bw, double horizon) {
  if (!(bw.b_n > 0.0) || !(bw.b_n <= horizon))
    throw ParameterError("bandwidth: b_n must lie in (0, horizon]");
}

IndexRange window_intervals(const ObservationGrid& grid, double s, Side side,
                            const BandwidthSpec& bw) {
  check_time(grid, s);
  const auto t = grid.times();
  IndexRange r;
  if (side == Side::kMinus) {
    const double lo = std::max(s - bw.b_n, 0.0);
    r.first = first_at_or_after(t, lo) + 1;
    const std::size_t m = first_at_or_after(t, s);
    if (m == 0) return {1, 0};
    r.last = m - 1;
  } else {
    const double hi = std::min(s + bw.b_n, grid.horizon());
    r.first = first_at_or_after(t, s) + 1;
    r.last = first_after(t, hi) - 1;
  }
  return r;
}

SpotVolIndex::SpotVolIndex(const ObservationGrid& grid, const std::vector<double>& values)
    : grid_(&grid), prefix_(values.size(), 0.0) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double d = values[i] - values[i - 1];
    prefix_[i] = prefix_[i - 1] + d * d;
  }
}

double SpotVolIndex::variance(double s, Side side, const BandwidthSpec& bw) const {
  const IndexRange r = window_intervals(*grid_, s, side, bw);
  if (r.empty()) throw_empty(s, side);
  return (prefix_[r.last] - prefix_[r.first - 1]) / bw.b_n;
}

double SpotVolIndex::sigma(double s, Side side, const BandwidthSpec& bw) const {
  return std::sqrt(std::max(variance(s, side, bw), 0.0));
}

SpotCovIndex::SpotCovIndex(const SampledPathPair& pair)
    : pair_(&pair),
      vol1_(pair.grids.grid1(), pair.values1),
      vol2_(pair.grids.grid2(), pair.values2) {
  const auto t1 = pair.grids.grid1().times();
  const auto t2 = pair.grids.grid2().times();
  inc1_.assign(t1.size(), 0.0);
  jlo_.assign(t1.size(), 1);
  jhi_.assign(t1.size(), 0);
  for (std::size_t i = 1; i < t1.size(); ++i) {
    inc1_[i] = pair.values1[i] - pair.values1[i - 1];
    jlo_[i] = first_after(t2, t1[i - 1]);
    jhi_[i] = std::min(first_at_or_after(t2, t1[i]), t2.size() - 1);
  }
  prefix2_.assign(t2.size(), 0.0);
  for (std::size_t j = 1; j < t2.size(); ++j) {
    prefix2_[j] = prefix2_[j - 1] + (pair.values2[j] - pair.values2[j - 1]);
  }
}

double SpotCovIndex::kappa(double s, Side side, const BandwidthSpec& bw) const {
  const IndexRange r1 = window_intervals(pair_->grids.grid1(), s, side, bw);
  const IndexRange r2 = window_intervals(pair_->grids.grid2(), s, side, bw);
  double sum = 0.0;
  bool any = false;
  for (std::size_t i = r1.first; i <= r1.last && !r2.empty(); ++i) {
    const std::size_t a = std::max(jlo_[i], r2.first);
    const std::size_t b = std::min(jhi_[i], r2.last);
    if (a > b) continue;
    any = true;
    sum += inc1_[i] * (prefix2_[b] - prefix2_[a - 1]);
  }
  if (!any) throw_empty(s, side);
  return sum / bw.b_n;
}

RhoEstimate rho_hat(const SpotCovIndex& index, double s, Side side, const BandwidthSpec& bw) {
  const double s1 = index.leg(0).sigma(s, side, bw);
  const double s2 = index.leg(1).sigma(s, side, bw);
  if (!(s1 > 0.0) || !(s2 > 0.0))
    throw DegeneratePathError("rho_hat: vanishing spot volatility");
  const double raw = index.kappa(s, side, bw) / (s1 * s2);
  RhoEstimate out;
  out.value = std::clamp(raw, -1.0, 1.0);
  out.clamped = out.value != raw;
  return out;
}

double sigma_hat(const SampledPath& path, double s, Side side, const BandwidthSpec& bw) {
  return SpotVolIndex(path.grid, path.values).sigma(s, side, bw);
}

double kappa_hat(const SampledPathPair& pair, double s, Side side, const BandwidthSpec& bw) {
  return SpotCovIndex(pair).kappa(s, side, bw);
}

double rho_hat(const SampledPathPair& pair, double s, Side side, const BandwidthSpec& bw,
               bool* clamped) {
  const RhoEstimate r = rho_hat(SpotCovIndex(pair), s, side, bw);
  if (clamped) *clamped = r.clamped;
  return r.value;
}

}  // namespace cojump
