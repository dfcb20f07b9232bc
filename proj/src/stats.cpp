#include "cojump/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <vector>

#include "cojump/error.hpp"

namespace cojump {
namespace {

double resolve_horizon(const ObservationGrid& grid, std::optional<double> T) {
  return T ? *T : grid.horizon();
}

inline double pow4(double x) noexcept {
  const double x2 = x * x;
  return x2 * x2;
}

void require_k(std::size_t k, const char* who) {
  if (k == 0) throw ParameterError(std::string(who) + ": k must be >= 1");
}

// Index one past the last observation with t_i <= T.
std::size_t end_index(std::span<const double> t, double T) {
  return static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), T) - t.begin());
}

struct UniSums {
  double v1 = 0.0;
  double vk = 0.0;
  double v1_small = 0.0;
  double vk_small = 0.0;
};

UniSums uni_sums(const SampledPath& path, std::size_t k, const ThresholdSpec* thr,
                 double T) {
  const auto t = path.grid.times();
  const auto& x = path.values;
  const std::size_t end = end_index(t, T);
  UniSums s;
  for (std::size_t i = 1; i < end; ++i) {
    const double d1 = x[i] - x[i - 1];
    const double p1 = pow4(d1);
    s.v1 += p1;
    if (thr && !thr->is_large(d1, t[i] - t[i - 1])) s.v1_small += p1;
    if (i >= k) {
      const double dk = x[i] - x[i - k];
      const double pk = pow4(dk);
      s.vk += pk;
      if (thr && !thr->is_large(dk, t[i] - t[i - k])) s.vk_small += pk;
    }
  }
  return s;
}

struct BivSums {
  double v = 0.0;
  double v_small = 0.0;
};

// Sum of (Δ1 Δ2)^2 over overlapping k-window pairs with t1_i ∧ t2_j <= T;
// v_small keeps pairs where at least one leg lies below its threshold.
BivSums biv_sums(const SampledPathPair& pair, std::size_t k, const ThresholdSpec* thr,
                 double T) {
  const auto t1 = pair.grids.grid1().times();
  const auto t2 = pair.grids.grid2().times();
  const auto& x1 = pair.values1;
  const auto& x2 = pair.values2;

  const auto prepare = [&](std::span<const double> t, const std::vector<double>& x,
                           std::vector<double>& sq, std::vector<char>& small) {
    sq.assign(t.size(), 0.0);
    small.assign(t.size(), 0);
    for (std::size_t i = k; i < t.size(); ++i) {
      const double d = x[i] - x[i - k];
      sq[i] = d * d;
      if (thr) small[i] = !thr->is_large(d, t[i] - t[i - k]);
    }
  };
  std::vector<double> sq1, sq2;
  std::vector<char> small1, small2;
  prepare(t1, x1, sq1, small1);
  prepare(t2, x2, sq2, small2);

  BivSums s;
  for_each_overlapping_window(t1, t2, k, [&](std::size_t i, std::size_t j) {
    if (std::min(t1[i], t2[j]) > T) return;
    const double f = sq1[i] * sq2[j];
    s.v += f;
    if (thr && (small1[i] || small2[j])) s.v_small += f;
  });
  return s;
}

void require_positive(double v1, const char* who) {
  if (!(v1 > 0.0)) throw DegeneratePathError(std::string(who) + ": V(1) vanishes");
}

}  // namespace

double ThresholdSpec::threshold(double length) const {
  return beta * std::pow(length, varpi);
}

void validate(const ThresholdSpec& thr) {
  if (!(thr.beta > 0.0)) throw ParameterError("threshold: beta must be > 0");
  if (!(thr.varpi > 0.0 && thr.varpi < 0.5))
    throw ParameterError("threshold: varpi must lie in (0, 1/2)");
}

double UniStatistics::corrected(double rho) const {
  const double kd = static_cast<double>(k);
  return phi - rho * a_over_n / (kd * v1);
}

double BivStatistics::corrected(double rho) const {
  return phi - rho * a_over_n / (4.0 * v1);
}

double increment(const SampledPath& path, std::size_t i, std::size_t k) {
  if (i >= path.values.size()) {
    std::ostringstream msg;
    msg << "increment: index " << i << " beyond grid of size " << path.values.size();
    throw RangeError(msg.str());
  }
  if (i < k) return 0.0;
  return path.values[i] - path.values[i - k];
}

double v_uni(const SampledPath& path, std::size_t k, std::optional<double> T) {
  require_k(k, "v_uni");
  return uni_sums(path, k, nullptr, resolve_horizon(path.grid, T)).vk;
}

double phi_j(const SampledPath& path, std::size_t k, std::optional<double> T) {
  require_k(k, "phi_j");
  const UniSums s = uni_sums(path, k, nullptr, resolve_horizon(path.grid, T));
  require_positive(s.v1, "phi_j");
  return s.vk / (static_cast<double>(k) * s.v1);
}

double a_j(const SampledPath& path, std::size_t k, const ThresholdSpec& thr,
           std::optional<double> T) {
  require_k(k, "a_j");
  validate(thr);
  const UniSums s = uni_sums(path, k, &thr, resolve_horizon(path.grid, T));
  const double n = static_cast<double>(path.grid.nominal_n());
  return n * s.vk_small - static_cast<double>(k) * n * s.v1_small;
}

double phi_j_corrected(const SampledPath& path, std::size_t k, const ThresholdSpec& thr,
                       double rho_corr, std::optional<double> T) {
  return compute_uni_statistics(path, k, thr, rho_corr, T).phi_corrected;
}

double v_biv(const SampledPathPair& pair, std::size_t k, std::optional<double> T) {
  require_k(k, "v_biv");
  return biv_sums(pair, k, nullptr, T ? *T : pair.grids.horizon()).v;
}

double phi_coj(const SampledPathPair& pair, std::size_t k, std::optional<double> T) {
  require_k(k, "phi_coj");
  const double horizon = T ? *T : pair.grids.horizon();
  const double v1 = biv_sums(pair, 1, nullptr, horizon).v;
  require_positive(v1, "phi_coj");
  const double vk = biv_sums(pair, k, nullptr, horizon).v;
  const double kd = static_cast<double>(k);
  return vk / (kd * kd * v1);
}

double a_coj(const SampledPathPair& pair, const ThresholdSpec& thr,
             std::optional<double> T) {
  validate(thr);
  const double horizon = T ? *T : pair.grids.horizon();
  const double n = static_cast<double>(pair.grids.nominal_n());
  const BivSums s1 = biv_sums(pair, 1, &thr, horizon);
  const BivSums s2 = biv_sums(pair, 2, &thr, horizon);
  return n * s2.v_small - 4.0 * n * s1.v_small;
}

double phi_coj_corrected(const SampledPathPair& pair, const ThresholdSpec& thr,
                         double rho_corr, std::optional<double> T) {
  return compute_biv_statistics(pair, thr, rho_corr, T).phi_corrected;
}

double b_oracle(const SampledPath& path, std::optional<double> T) {
  const double horizon = resolve_horizon(path.grid, T);
  double b = 0.0;
  for (const auto& e : path.jumps) {
    if (e.time <= horizon) b += pow4(e.delta);
  }
  return b;
}

double b_oracle(const SampledPathPair& pair, std::optional<double> T) {
  const double horizon = T ? *T : pair.grids.horizon();
  double b = 0.0;
  for (const auto& e : pair.jumps_common) {
    if (e.time <= horizon) b += e.delta1 * e.delta1 * e.delta2 * e.delta2;
  }
  return b;
}

UniStatistics compute_uni_statistics(const SampledPath& path, std::size_t k,
                                     const ThresholdSpec& thr, double rho_corr,
                                     std::optional<double> T) {
  require_k(k, "compute_uni_statistics");
  validate(thr);
  const UniSums s = uni_sums(path, k, &thr, resolve_horizon(path.grid, T));
  require_positive(s.v1, "phi_j");
  const double n = static_cast<double>(path.grid.nominal_n());
  const double kd = static_cast<double>(k);

  UniStatistics out;
  out.v1 = s.v1;
  out.vk = s.vk;
  out.k = k;
  out.rho_corr = rho_corr;
  out.phi = s.vk / (kd * s.v1);
  out.a_corr = n * s.vk_small - kd * n * s.v1_small;
  out.a_over_n = s.vk_small - kd * s.v1_small;
  out.phi_corrected = out.corrected(rho_corr);
  return out;
}

BivStatistics compute_biv_statistics(const SampledPathPair& pair, const ThresholdSpec& thr,
                                     double rho_corr, std::optional<double> T) {
  validate(thr);
  const double horizon = T ? *T : pair.grids.horizon();
  const BivSums s1 = biv_sums(pair, 1, &thr, horizon);
  require_positive(s1.v, "phi_coj");
  const BivSums s2 = biv_sums(pair, 2, &thr, horizon);
  const double n = static_cast<double>(pair.grids.nominal_n());

  BivStatistics out;
  out.v1 = s1.v;
  out.vk = s2.v;
  out.k = 2;
  out.rho_corr = rho_corr;
  out.phi = s2.v / (4.0 * s1.v);
  out.a_corr = n * s2.v_small - 4.0 * n * s1.v_small;
  out.a_over_n = s2.v_small - 4.0 * s1.v_small;
  out.phi_corrected = out.corrected(rho_corr);
  return out;
}

void write_stats_header(std::ostream& os) {
  os << "case,n,path_id,k,phi,phi_corrected,v1,vk,a_corr\n";
}

namespace {
template <class S>
void write_row(std::ostream& os, const std::string& case_name, std::size_t n,
               std::size_t path_id, const S& s) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17) << case_name << ',' << n << ',' << path_id << ',' << s.k
     << ',' << s.phi << ',' << s.phi_corrected << ',' << s.v1 << ',' << s.vk << ','
     << s.a_corr << '\n';
  os.flags(flags);
  os.precision(prec);
}
}  // namespace

void write_stats_row(std::ostream& os, const std::string& case_name, std::size_t n,
                     std::size_t path_id, const UniStatistics& s) {
  write_row(os, case_name, n, path_id, s);
}

void write_stats_row(std::ostream& os, const std::string& case_name, std::size_t n,
                     std::size_t path_id, const BivStatistics& s) {
  write_row(os, case_name, n, path_id, s);
}

}  // namespace cojump
