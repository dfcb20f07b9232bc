#include "cojump/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>

#include "cojump/error.hpp"

namespace cojump {
namespace {

std::vector<double> to_cdf(const std::vector<double>& weights) {
  std::vector<double> cdf(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    total += weights[i];
    cdf[i] = total;
  }
  for (double& c : cdf) c /= total;
  return cdf;
}

std::size_t sample_cdf(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const auto idx = static_cast<std::size_t>(it - cdf.begin());
  return std::min(idx, cdf.size() - 1);
}

double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double nonneg_sqrt(double x) { return x > 0.0 ? std::sqrt(x) : 0.0; }

double resolve(std::optional<double> T, double horizon) { return T ? *T : horizon; }

}  // namespace

BootstrapConfig BootstrapConfig::defaults_for(std::size_t n) {
  if (n < 3) throw ParameterError("bootstrap defaults: n must be >= 3");
  const double nd = static_cast<double>(n);
  BootstrapConfig cfg;
  cfg.L_n = static_cast<std::size_t>(std::floor(std::log(nd)));
  cfg.M_n = static_cast<std::size_t>(std::floor(10.0 * std::sqrt(nd)));
  cfg.bw = BandwidthSpec::defaults_for(n);
  return cfg;
}

void validate(const BootstrapConfig& cfg) {
  if (cfg.L_n < 1) throw ParameterError("bootstrap: L_n must be >= 1");
  if (cfg.M_n < 1) throw ParameterError("bootstrap: M_n must be >= 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw ParameterError("bootstrap: alpha must lie in (0, 1)");
  if (cfg.k < 1) throw ParameterError("bootstrap: k must be >= 1");
  if (!(cfg.rho_corr >= 0.0 && cfg.rho_corr < 1.0))
    throw ParameterError("bootstrap: rho_corr must lie in [0, 1)");
  if (!(cfg.bw.b_n > 0.0)) throw ParameterError("bootstrap: b_n must be > 0");
  validate(cfg.thr);
}

OffsetWeights offset_weights(const ObservationGrid& grid, std::size_t anchor, std::size_t L_n,
                             std::size_t reach) {
  const auto N = static_cast<long long>(grid.intervals());
  const auto i = static_cast<long long>(anchor);
  const auto L = static_cast<long long>(L_n);
  const auto r = static_cast<long long>(reach);
  OffsetWeights w;
  double total = 0.0;
  for (long long l = -L; l <= L; ++l) {
    const long long c = i + l;
    if (c - r < 1 || c + r > N) continue;
    const double len = grid.window_length(static_cast<std::size_t>(c));
    w.offsets.push_back(static_cast<int>(l));
    w.probs.push_back(len);
    total += len;
  }
  if (total > 0.0) {
    for (double& p : w.probs) p /= total;
  } else {
    w.offsets.clear();
    w.probs.clear();
  }
  return w;
}

int draw_index_offset(const ObservationGrid& grid, double s, std::size_t L_n, Rng& rng,
                      std::size_t reach) {
  const OffsetWeights w = offset_weights(grid, locate(grid, s), L_n, reach);
  if (w.offsets.empty()) throw BoundaryError("draw_index_offset: no admissible offset");
  return w.offsets[sample_cdf(to_cdf(w.probs), uniform01(rng))];
}

XiDraw xi_at(const ObservationGrid& grid, std::size_t c, std::size_t k) {
  const double n = static_cast<double>(grid.nominal_n());
  XiDraw x;
  for (std::size_t j = 1; j < k; ++j) {
    const double w = static_cast<double>((k - j) * (k - j));
    x.xi_minus += w * grid.window_length(c - j);
    x.xi_plus += w * grid.window_length(c + j);
  }
  x.xi_minus *= n;
  x.xi_plus *= n;
  return x;
}

XiDraw xi_hat_draw(const ObservationGrid& grid, double s, std::size_t k, std::size_t L_n,
                   Rng& rng) {
  if (k < 1) throw ParameterError("xi_hat_draw: k must be >= 1");
  const std::size_t i = locate(grid, s);
  const OffsetWeights w = offset_weights(grid, i, L_n, k - 1);
  if (w.offsets.empty()) throw BoundaryError("xi_hat_draw: no offset with full neighborhood");
  const int l = w.offsets[sample_cdf(to_cdf(w.probs), uniform01(rng))];
  return xi_at(grid, static_cast<std::size_t>(static_cast<long long>(i) + l), k);
}

ZDraw z_at(const GridPair& pair, std::size_t c1, std::size_t c2) {
  const auto& g1 = pair.grid1();
  const auto& g2 = pair.grid2();
  const double n = static_cast<double>(pair.nominal_n());
  ZDraw z;
  z.L1 = n * g1.window_length(c1 - 1);
  z.R1 = n * g1.window_length(c1 + 1);
  z.L2 = n * g2.window_length(c2 - 1);
  z.R2 = n * g2.window_length(c2 + 1);
  z.L = n * overlap_length(g1.window(c1 - 1), g2.window(c2 - 1));
  z.R = n * overlap_length(g1.window(c1 + 1), g2.window(c2 + 1));
  return z;
}

JointOffsetWeights joint_offset_weights(const GridPair& pair, std::size_t i1, std::size_t i2,
                                        std::size_t L_n) {
  const auto& g1 = pair.grid1();
  const auto& g2 = pair.grid2();
  const auto N1 = static_cast<long long>(g1.intervals());
  const auto N2 = static_cast<long long>(g2.intervals());
  const auto L = static_cast<long long>(L_n);
  JointOffsetWeights w;
  double total = 0.0;
  for (long long l1 = -L; l1 <= L; ++l1) {
    const long long c1 = static_cast<long long>(i1) + l1;
    if (c1 < 2 || c1 + 1 > N1) continue;
    const Interval a = g1.window(static_cast<std::size_t>(c1));
    for (long long l2 = -L; l2 <= L; ++l2) {
      const long long c2 = static_cast<long long>(i2) + l2;
      if (c2 < 2 || c2 + 1 > N2) continue;
      const double ov = overlap_length(a, g2.window(static_cast<std::size_t>(c2)));
      if (!(ov > 0.0)) continue;
      w.offsets.emplace_back(static_cast<int>(l1), static_cast<int>(l2));
      w.probs.push_back(ov);
      total += ov;
    }
  }
  for (double& p : w.probs) p /= total;
  return w;
}

ZDraw z_hat_draw(const GridPair& pair, double s, std::size_t L_n, Rng& rng) {
  const std::size_t i1 = locate(pair.grid1(), s);
  const std::size_t i2 = locate(pair.grid2(), s);
  const JointOffsetWeights w = joint_offset_weights(pair, i1, i2, L_n);
  if (w.offsets.empty()) throw BoundaryError("z_hat_draw: no admissible joint offset");
  const auto [l1, l2] = w.offsets[sample_cdf(to_cdf(w.probs), uniform01(rng))];
  return z_at(pair, static_cast<std::size_t>(static_cast<long long>(i1) + l1),
              static_cast<std::size_t>(static_cast<long long>(i2) + l2));
}

UniBootstrap::UniBootstrap(const SampledPath& path, const BootstrapConfig& cfg,
                           std::optional<double> T) {
  validate(cfg);
  const auto& grid = path.grid;
  const auto t = grid.times();
  const double horizon = resolve(T, grid.horizon());
  const SpotVolIndex vol(grid, path.values);

  for (std::size_t i = 1; i < t.size() && t[i] <= horizon; ++i) {
    const double d = path.values[i] - path.values[i - 1];
    if (!cfg.thr.is_large(d, t[i] - t[i - 1])) continue;
    double var_m = 0.0;
    double var_p = 0.0;
    try {
      var_m = vol.variance(t[i], Side::kMinus, cfg.bw);
      var_p = vol.variance(t[i], Side::kPlus, cfg.bw);
    } catch (const EmptyWindowError&) {
      ++diag_.empty_windows;
      continue;
    }
    const OffsetWeights w = offset_weights(grid, i, cfg.L_n, cfg.k - 1);
    if (w.offsets.empty()) {
      ++diag_.boundary;
      continue;
    }
    Term term;
    term.coef = 4.0 * d * d * d;
    term.cdf = to_cdf(w.probs);
    term.scale.reserve(w.offsets.size());
    for (int l : w.offsets) {
      const XiDraw xi = xi_at(grid, static_cast<std::size_t>(static_cast<long long>(i) + l),
                              cfg.k);
      term.scale.push_back(nonneg_sqrt(var_m * xi.xi_minus + var_p * xi.xi_plus));
    }
    terms_.push_back(std::move(term));
    ++diag_.thresholded;
  }
}

double UniBootstrap::draw(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double f = 0.0;
  for (const Term& term : terms_) {
    const std::size_t c = sample_cdf(term.cdf, unif(rng));
    f += term.coef * term.scale[c] * gauss(rng);
  }
  return f;
}

BivBootstrap::BivBootstrap(const SampledPathPair& pair, const BootstrapConfig& cfg,
                           std::optional<double> T) {
  validate(cfg);
  const auto& g1 = pair.grids.grid1();
  const auto& g2 = pair.grids.grid2();
  const auto t1 = g1.times();
  const auto t2 = g2.times();
  const double horizon = resolve(T, pair.grids.horizon());
  const SpotCovIndex cov(pair);

  std::vector<char> large1(t1.size(), 0);
  std::vector<char> large2(t2.size(), 0);
  for (std::size_t i = 1; i < t1.size(); ++i)
    large1[i] = cfg.thr.is_large(pair.values1[i] - pair.values1[i - 1], t1[i] - t1[i - 1]);
  for (std::size_t j = 1; j < t2.size(); ++j)
    large2[j] = cfg.thr.is_large(pair.values2[j] - pair.values2[j - 1], t2[j] - t2[j - 1]);

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> slot1(t1.size(), kNone);
  std::vector<std::size_t> slot2(t2.size(), kNone);

  for_each_overlapping_window(t1, t2, 1, [&](std::size_t i, std::size_t j) {
    if (!large1[i] || !large2[j]) return;
    const double tau = std::min(t1[i], t2[j]);
    if (tau > horizon) return;
    Term term;
    term.d1 = pair.values1[i] - pair.values1[i - 1];
    term.d2 = pair.values2[j] - pair.values2[j - 1];
    try {
      term.s1m = cov.leg(0).sigma(t1[i], Side::kMinus, cfg.bw);
      term.s1p = cov.leg(0).sigma(t1[i], Side::kPlus, cfg.bw);
      term.s2m = cov.leg(1).sigma(t2[j], Side::kMinus, cfg.bw);
      term.s2p = cov.leg(1).sigma(t2[j], Side::kPlus, cfg.bw);
      const RhoEstimate rm = rho_hat(cov, tau, Side::kMinus, cfg.bw);
      const RhoEstimate rp = rho_hat(cov, tau, Side::kPlus, cfg.bw);
      term.rm = rm.value;
      term.rp = rp.value;
      diag_.clamped_rho += static_cast<std::size_t>(rm.clamped) + rp.clamped;
    } catch (const EmptyWindowError&) {
      ++diag_.empty_windows;
      return;
    } catch (const DegeneratePathError&) {
      ++diag_.empty_windows;
      return;
    }
    const JointOffsetWeights w = joint_offset_weights(pair.grids, i, j, cfg.L_n);
    if (w.offsets.empty()) {
      ++diag_.boundary;
      return;
    }
    term.cdf = to_cdf(w.probs);
    term.z.reserve(w.offsets.size());
    for (const auto& [l1, l2] : w.offsets) {
      term.z.push_back(z_at(pair.grids, static_cast<std::size_t>(static_cast<long long>(i) + l1),
                            static_cast<std::size_t>(static_cast<long long>(j) + l2)));
    }
    if (slot1[i] == kNone) slot1[i] = slots1_++;
    if (slot2[j] == kNone) slot2[j] = slots2_++;
    term.u1 = slot1[i];
    term.u2 = slot2[j];
    terms_.push_back(std::move(term));
    ++diag_.thresholded;
  });
}

double BivBootstrap::draw(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> u1(slots1_);
  std::vector<double> u2(slots2_);
  std::vector<double> u3(slots2_);
  for (double& u : u1) u = gauss(rng);
  for (double& u : u2) u = gauss(rng);
  for (double& u : u3) u = gauss(rng);

  double f = 0.0;
  for (const Term& tm : terms_) {
    const ZDraw& z = tm.z[sample_cdf(tm.cdf, unif(rng))];
    const double um = gauss(rng);
    const double up = gauss(rng);
    const double sl = std::sqrt(z.L);
    const double sr = std::sqrt(z.R);

    const double leg1 = tm.s1m * sl * um + tm.s1p * sr * up +
                        nonneg_sqrt(tm.s1m * tm.s1m * (z.L1 - z.L) +
                                    tm.s1p * tm.s1p * (z.R1 - z.R)) *
                            u1[tm.u1];
    const double leg2 =
        tm.s2m * tm.rm * sl * um + tm.s2p * tm.rp * sr * up +
        nonneg_sqrt(tm.s2m * tm.s2m * (1.0 - tm.rm * tm.rm) * z.L +
                    tm.s2p * tm.s2p * (1.0 - tm.rp * tm.rp) * z.R) *
            u2[tm.u2] +
        nonneg_sqrt(tm.s2m * tm.s2m * (z.L2 - z.L) + tm.s2p * tm.s2p * (z.R2 - z.R)) *
            u3[tm.u2];
    f += tm.d1 * tm.d2 * (tm.d2 * leg1 + tm.d1 * leg2);
  }
  return 4.0 * f;
}

double f_hat_j_draw(const SampledPath& path, const BootstrapConfig& cfg, Rng& rng) {
  return UniBootstrap(path, cfg).draw(rng);
}

double f_hat_coj_draw(const SampledPathPair& pair, const BootstrapConfig& cfg, Rng& rng) {
  return BivBootstrap(pair, cfg).draw(rng);
}

std::size_t quantile_rank(std::size_t m, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ParameterError("quantile: alpha must lie in (0, 1]");
  // Guard against products like 0.05 * 20 landing just below an integer.
  const double r = std::floor(alpha * static_cast<double>(m) + 1e-9);
  return std::min(static_cast<std::size_t>(r), m);
}

double quantile_hat(std::vector<double> values, double alpha) {
  if (values.empty()) throw ParameterError("quantile: empty set");
  const std::size_t r = quantile_rank(values.size(), alpha);
  if (r == 0) throw LevelTooSmallError("quantile: floor(alpha M) = 0");
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(r - 1);
  std::nth_element(values.begin(), nth, values.end(), std::greater<>());
  return *nth;
}

double TestReport::statistic_at(double rho) const {
  const double denom = kind == TestKind::kJump ? static_cast<double>(k) : 4.0;
  return statistic - rho * a_over_n / (denom * v1);
}

double TestReport::critical_at(double level) const {
  const std::size_t r = quantile_rank(draws.size(), level);
  if (r == 0) throw LevelTooSmallError("critical value: floor(alpha M) = 0");
  const double denom = kind == TestKind::kJump ? static_cast<double>(k) : 4.0;
  return draws[r - 1] / (std::sqrt(static_cast<double>(n)) * denom * v1);
}

bool TestReport::rejects(double level, double rho) const {
  const double stat = statistic_at(rho);
  const double c = critical_at(level);
  return kind == TestKind::kJump ? stat > 1.0 + c : std::abs(stat - 1.0) > c;
}

namespace {

DrawSummary summarize(const std::vector<double>& draws) {
  DrawSummary s;
  if (draws.empty()) return s;
  double sum = 0.0;
  double sum2 = 0.0;
  for (double d : draws) {
    const double a = std::abs(d);
    sum += a;
    sum2 += a * a;
  }
  const double m = static_cast<double>(draws.size());
  s.mean_abs = sum / m;
  s.sd_abs = draws.size() > 1
                 ? std::sqrt(std::max(0.0, (sum2 - m * s.mean_abs * s.mean_abs) / (m - 1.0)))
                 : 0.0;
  return s;
}

template <class Boot>
void finish_report(TestReport& r, const Boot& boot, const BootstrapConfig& cfg,
                   const StreamSeed& seeds, bool absolute) {
  r.draws.resize(cfg.M_n);
  for (std::size_t m = 0; m < cfg.M_n; ++m) {
    Rng rng = seeds.draw_stream(m);
    const double f = boot.draw(rng);
    r.draws[m] = absolute ? std::abs(f) : f;
  }
  r.draws_summary = summarize(r.draws);
  std::sort(r.draws.begin(), r.draws.end(), std::greater<>());
  r.diagnostics = boot.diagnostics();
  const std::size_t rank = quantile_rank(r.draws.size(), r.alpha);
  if (rank == 0) throw LevelTooSmallError("test: floor(alpha M_n) = 0");
  r.quantile_hat = r.draws[rank - 1];
  r.critical_value = r.critical_at(r.alpha);
  r.decision = r.rejects(r.alpha, r.use_corrected ? r.rho_corr : 0.0) ? Decision::kRejectNull
                                                                      : Decision::kAccept;
}

StreamSeed seeds_from(Rng& rng) {
  const std::uint64_t hi = rng();
  const std::uint64_t lo = rng();
  return {(hi << 32) | lo, 0};
}

}  // namespace

TestReport test_j(const SampledPath& path, const BootstrapConfig& cfg, const StreamSeed& seeds,
                  bool use_corrected, std::optional<double> T) {
  validate(cfg);
  const UniStatistics st = compute_uni_statistics(path, cfg.k, cfg.thr, cfg.rho_corr, T);
  TestReport r;
  r.kind = TestKind::kJump;
  r.n = path.grid.nominal_n();
  r.k = cfg.k;
  r.alpha = cfg.alpha;
  r.rho_corr = cfg.rho_corr;
  r.use_corrected = use_corrected;
  r.statistic = st.phi;
  r.corrected_statistic = st.phi_corrected;
  r.v1 = st.v1;
  r.vk = st.vk;
  r.a_corr = st.a_corr;
  r.a_over_n = st.a_over_n;
  finish_report(r, UniBootstrap(path, cfg, T), cfg, seeds, false);
  return r;
}

TestReport test_coj(const SampledPathPair& pair, const BootstrapConfig& cfg,
                    const StreamSeed& seeds, bool use_corrected, std::optional<double> T) {
  validate(cfg);
  const BivStatistics st = compute_biv_statistics(pair, cfg.thr, cfg.rho_corr, T);
  TestReport r;
  r.kind = TestKind::kCoJump;
  r.n = pair.grids.nominal_n();
  r.k = 2;
  r.alpha = cfg.alpha;
  r.rho_corr = cfg.rho_corr;
  r.use_corrected = use_corrected;
  r.statistic = st.phi;
  r.corrected_statistic = st.phi_corrected;
  r.v1 = st.v1;
  r.vk = st.vk;
  r.a_corr = st.a_corr;
  r.a_over_n = st.a_over_n;
  finish_report(r, BivBootstrap(pair, cfg, T), cfg, seeds, true);
  return r;
}

TestReport test_j(const SampledPath& path, const BootstrapConfig& cfg, Rng& rng,
                  bool use_corrected) {
  return test_j(path, cfg, seeds_from(rng), use_corrected);
}

TestReport test_coj(const SampledPathPair& pair, const BootstrapConfig& cfg, Rng& rng,
                    bool use_corrected) {
  return test_coj(pair, cfg, seeds_from(rng), use_corrected);
}

const char* decision_name(Decision d) noexcept {
  return d == Decision::kRejectNull ? "reject" : "accept";
}

void write_report_header(std::ostream& os) {
  os << "case,n,path_id,stat,corrected,q_hat,crit,decision,alpha,k,rho_corr\n";
}

void write_report_row(std::ostream& os, const std::string& case_name, std::size_t path_id,
                      const TestReport& r) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17) << case_name << ',' << r.n << ',' << path_id << ','
     << r.statistic << ',' << r.corrected_statistic << ',' << r.quantile_hat << ','
     << r.critical_value << ',' << decision_name(r.decision) << ',' << r.alpha << ',' << r.k
     << ',' << r.rho_corr << '\n';
  os.flags(flags);
  os.precision(prec);
}

}  // namespace cojump
