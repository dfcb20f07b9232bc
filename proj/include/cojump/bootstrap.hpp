#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cojump/rng.hpp"
#include "cojump/sampling.hpp"
#include "cojump/simulate.hpp"
#include "cojump/spotvol.hpp"
#include "cojump/stats.hpp"

namespace cojump {

struct BootstrapConfig {
  std::size_t L_n = 7;
  std::size_t M_n = 400;
  double alpha = 0.05;
  ThresholdSpec thr{};
  BandwidthSpec bw{0.025};
  std::size_t k = 2;
  double rho_corr = 0.9;

  // L_n = floor(ln n), M_n = floor(10 sqrt n), b_n = 1/sqrt(n).
  static BootstrapConfig defaults_for(std::size_t n);
};

void validate(const BootstrapConfig& cfg);

// Candidate offsets l around an anchor interval together with their selection
// probabilities. Offsets whose interval, or whose `reach` neighbors on either
// side, fall outside the grid are dropped and the rest renormalized.
struct OffsetWeights {
  std::vector<int> offsets;
  std::vector<double> probs;
};

OffsetWeights offset_weights(const ObservationGrid& grid, std::size_t anchor, std::size_t L_n,
                             std::size_t reach = 0);

// Offset V with P(V = l) proportional to |I_{i_n(s)+l}|.
int draw_index_offset(const ObservationGrid& grid, double s, std::size_t L_n, Rng& rng,
                      std::size_t reach = 0);

struct XiDraw {
  double xi_minus = 0.0;
  double xi_plus = 0.0;
};

// xi at interval c: n sum_{j=1}^{k-1} (k-j)^2 |I_{c-j}| and the mirror on the right.
XiDraw xi_at(const ObservationGrid& grid, std::size_t c, std::size_t k);

// Throws BoundaryError when no offset has k-1 neighbors on both sides.
XiDraw xi_hat_draw(const ObservationGrid& grid, double s, std::size_t k, std::size_t L_n,
                   Rng& rng);

struct ZDraw {
  double L1 = 0.0;
  double R1 = 0.0;
  double L2 = 0.0;
  double R2 = 0.0;
  double L = 0.0;
  double R = 0.0;
};

// Z at the interval pair (c1, c2): n-scaled lengths of the neighbor intervals
// and of the overlaps of the left resp. right neighbors.
ZDraw z_at(const GridPair& pair, std::size_t c1, std::size_t c2);

struct JointOffsetWeights {
  std::vector<std::pair<int, int>> offsets;
  std::vector<double> probs;
};

// Joint offsets (l1, l2) with probability proportional to the overlap
// |I1_{i1+l1} ∩ I2_{i2+l2}|; zero overlaps never enter.
JointOffsetWeights joint_offset_weights(const GridPair& pair, std::size_t i1, std::size_t i2,
                                        std::size_t L_n);

ZDraw z_hat_draw(const GridPair& pair, double s, std::size_t L_n, Rng& rng);

struct BootstrapDiagnostics {
  std::size_t thresholded = 0;    // terms entering the draws
  std::size_t empty_windows = 0;  // terms skipped for lack of spot data
  std::size_t boundary = 0;       // terms skipped for lack of offset candidates
  std::size_t clamped_rho = 0;    // rho_hat evaluations that hit +-1
};

// Per-path inputs of the bootstrap draws: thresholded increments, spot
// volatilities and the offset samplers, computed once and reused by every draw.
class UniBootstrap {
 public:
  UniBootstrap(const SampledPath& path, const BootstrapConfig& cfg,
               std::optional<double> T = {});

  double draw(Rng& rng) const;
  const BootstrapDiagnostics& diagnostics() const noexcept { return diag_; }
  std::size_t terms() const noexcept { return terms_.size(); }

 private:
  struct Term {
    double coef = 0.0;                 // 4 Δ^3
    std::vector<double> cdf;           // over candidate anchors
    std::vector<double> scale;         // sqrt(σ-² ξ- + σ+² ξ+) per candidate
  };
  std::vector<Term> terms_;
  BootstrapDiagnostics diag_;
};

class BivBootstrap {
 public:
  BivBootstrap(const SampledPathPair& pair, const BootstrapConfig& cfg,
               std::optional<double> T = {});

  double draw(Rng& rng) const;
  const BootstrapDiagnostics& diagnostics() const noexcept { return diag_; }
  std::size_t terms() const noexcept { return terms_.size(); }

 private:
  struct Term {
    double d1 = 0.0;
    double d2 = 0.0;
    double s1m = 0.0, s1p = 0.0, s2m = 0.0, s2p = 0.0;
    double rm = 0.0, rp = 0.0;
    std::size_t u1 = 0;  // slot of U^(1) (per leg-1 interval)
    std::size_t u2 = 0;  // slot of U^(2), U^(3) (per leg-2 interval)
    std::vector<double> cdf;
    std::vector<ZDraw> z;
  };
  std::vector<Term> terms_;
  std::size_t slots1_ = 0;
  std::size_t slots2_ = 0;
  BootstrapDiagnostics diag_;
};

double f_hat_j_draw(const SampledPath& path, const BootstrapConfig& cfg, Rng& rng);
double f_hat_coj_draw(const SampledPathPair& pair, const BootstrapConfig& cfg, Rng& rng);

// The floor(alpha M)-th largest value. Throws LevelTooSmallError when the rank is 0.
double quantile_hat(std::vector<double> values, double alpha);
std::size_t quantile_rank(std::size_t m, double alpha);

enum class Decision { kAccept, kRejectNull };
enum class TestKind { kJump, kCoJump };

struct DrawSummary {
  double mean_abs = 0.0;
  double sd_abs = 0.0;
};

struct TestReport {
  TestKind kind = TestKind::kJump;
  std::size_t n = 0;
  std::size_t k = 2;
  double alpha = 0.05;
  double rho_corr = 0.0;
  bool use_corrected = false;

  double statistic = 0.0;
  double corrected_statistic = 0.0;
  double v1 = 0.0;
  double vk = 0.0;
  double a_corr = 0.0;
  double a_over_n = 0.0;
  double quantile_hat = 0.0;
  double critical_value = 0.0;
  Decision decision = Decision::kAccept;

  DrawSummary draws_summary{};
  BootstrapDiagnostics diagnostics{};
  // Draws sorted in decreasing order: signed F for the jump test, |F| for the
  // co-jump test. Kept so decisions at other levels need no new draws.
  std::vector<double> draws;

  // Statistic with correction weight rho (rho = 0 gives the raw statistic).
  double statistic_at(double rho) const;
  double critical_at(double alpha) const;
  bool rejects(double alpha, double rho) const;
};

// M_n draws on per-draw streams of `seeds`, critical value and decision.
TestReport test_j(const SampledPath& path, const BootstrapConfig& cfg, const StreamSeed& seeds,
                  bool use_corrected, std::optional<double> T = {});
TestReport test_coj(const SampledPathPair& pair, const BootstrapConfig& cfg,
                    const StreamSeed& seeds, bool use_corrected, std::optional<double> T = {});

// Convenience forms that derive the per-draw streams from `rng`.
TestReport test_j(const SampledPath& path, const BootstrapConfig& cfg, Rng& rng,
                  bool use_corrected);
TestReport test_coj(const SampledPathPair& pair, const BootstrapConfig& cfg, Rng& rng,
                    bool use_corrected);

// `case,n,path_id,stat,corrected,q_hat,crit,decision,alpha,k,rho_corr`
void write_report_header(std::ostream& os);
void write_report_row(std::ostream& os, const std::string& case_name, std::size_t path_id,
                      const TestReport& r);

const char* decision_name(Decision d) noexcept;

}  // namespace cojump
