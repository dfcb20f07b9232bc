#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "cojump/rng.hpp"

namespace cojump {

// Half-open interval (lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
};

// Length of (a.lo, a.hi] ∩ (b.lo, b.hi]; adjacent intervals are disjoint.
double overlap_length(const Interval& a, const Interval& b) noexcept;
inline bool overlaps(const Interval& a, const Interval& b) noexcept {
  return (a.lo > b.lo ? a.lo : b.lo) < (a.hi < b.hi ? a.hi : b.hi);
}

// Sorted observation times 0 = t_0 < t_1 < ... <= horizon, together with the
// nominal sampling frequency n the asymptotics are indexed by.
class ObservationGrid {
 public:
  ObservationGrid(std::vector<double> times, std::size_t nominal_n, double horizon);

  std::span<const double> times() const noexcept { return times_; }
  double time(std::size_t i) const { return times_.at(i); }
  std::size_t size() const noexcept { return times_.size(); }
  // Number of observation intervals, i.e. size() - 1.
  std::size_t intervals() const noexcept { return times_.size() - 1; }
  std::size_t nominal_n() const noexcept { return nominal_n_; }
  double horizon() const noexcept { return horizon_; }
  double last_time() const noexcept { return times_.back(); }

  // |I_{i,k}| = t_i - t_{i-k}; zero for i < k.
  double window_length(std::size_t i, std::size_t k = 1) const noexcept {
    return i < k ? 0.0 : times_[i] - times_[i - k];
  }
  Interval window(std::size_t i, std::size_t k = 1) const noexcept {
    return {times_[i - k], times_[i]};
  }

 private:
  std::vector<double> times_;
  std::size_t nominal_n_;
  double horizon_;
};

struct Equidistant {};
struct PoissonScheme {
  double lambda = 1.0;
};
struct AlternatingAlpha {
  double alpha = 0.5;
};

using SchemeSpec = std::variant<Equidistant, PoissonScheme, AlternatingAlpha>;

void validate(const SchemeSpec& spec);
bool is_random(const SchemeSpec& spec) noexcept;
const char* scheme_name(const SchemeSpec& spec) noexcept;

class GridPair {
 public:
  GridPair(ObservationGrid grid1, ObservationGrid grid2);

  const ObservationGrid& grid1() const noexcept { return grid1_; }
  const ObservationGrid& grid2() const noexcept { return grid2_; }
  const ObservationGrid& operator[](int leg) const noexcept {
    return leg == 0 ? grid1_ : grid2_;
  }
  std::size_t nominal_n() const noexcept { return grid1_.nominal_n(); }
  double horizon() const noexcept { return grid1_.horizon(); }

 private:
  ObservationGrid grid1_;
  ObservationGrid grid2_;
};

ObservationGrid generate_grid(const SchemeSpec& spec, std::size_t n, double horizon,
                              Rng& rng);

// Largest consecutive gap, clipped at the horizon.
double mesh(const ObservationGrid& grid) noexcept;

// The unique i >= 1 with s in (t_{i-1}, t_i]. Throws RangeError otherwise.
std::size_t locate(const ObservationGrid& grid, double s);

// G_{k,n}(t) = n/k^2 * sum_{i>=k, t_i<=t} |I_{i,k}|^2.
double g_functional(const ObservationGrid& grid, std::size_t k, double t);

struct CrossFunctionals {
  double gtilde = 0.0;
  double h = 0.0;
};

// (G~_{k,n}(t), H_{k,n}(t)) for the pair of k-window families.
CrossFunctionals gtilde_h_functionals(const GridPair& pair, std::size_t k, double t);

// Calls fn(i, j) for every pair of k-windows (t1_{i-k}, t1_i] and
// (t2_{j-k}, t2_j] with nonempty intersection, i, j >= k. Pairs are visited
// in increasing i, then increasing j. Runs in O(N1 + N2 + #pairs).
template <class Fn>
void for_each_overlapping_window(std::span<const double> t1, std::span<const double> t2,
                                 std::size_t k, Fn&& fn) {
  const std::size_t n1 = t1.size();
  const std::size_t n2 = t2.size();
  if (n1 <= k || n2 <= k) return;
  std::size_t first = k;  // first j whose right end exceeds the left end of i
  for (std::size_t i = k; i < n1; ++i) {
    const double lo1 = t1[i - k];
    const double hi1 = t1[i];
    while (first < n2 && t2[first] <= lo1) ++first;
    for (std::size_t j = first; j < n2 && t2[j - k] < hi1; ++j) {
      fn(i, j);
    }
  }
}

// CSV with header `t`, 17 significant digits.
void write_grid_csv(std::ostream& os, const ObservationGrid& grid);
ObservationGrid read_grid_csv(std::istream& is, std::size_t nominal_n, double horizon);

}  // namespace cojump
