#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "cojump/rng.hpp"
#include "cojump/sampling.hpp"

namespace cojump {

// Compound Poisson jump component with sizes uniform on [-h,-l] ∪ [l,h],
// intensity kappa per unit time, and multiplicative scale alpha.
struct JumpSpec {
  double alpha = 0.0;
  double kappa = 0.0;
  double l = 0.0;
  double h = 0.0;

  // A measure is active when it produces nonzero level changes.
  bool active() const noexcept { return alpha != 0.0 && kappa > 0.0; }
};

void validate(const JumpSpec& spec);

// dX = X sigma dW + alpha ∫ X_- x mu(dt,dx).
struct UniModel {
  double sigma2 = 8e-5;
  JumpSpec jumps{};
  double x0 = 1.0;
};

struct BiModel {
  double sigma2_1 = 8e-5;
  double sigma2_2 = 8e-5;
  double rho = 0.0;
  JumpSpec jump1{};  // idiosyncratic, leg 1
  JumpSpec jump2{};  // idiosyncratic, leg 2
  JumpSpec jump3{};  // common to both legs
  double x0_1 = 1.0;
  double x0_2 = 1.0;
};

void validate(const UniModel& model);
void validate(const BiModel& model);

struct JumpEvent {
  double time = 0.0;
  double size = 0.0;    // x drawn from the jump measure
  double factor = 1.0;  // 1 + alpha x
  double delta = 0.0;   // X_t - X_{t-}
};

struct CommonJumpEvent {
  double time = 0.0;
  double size = 0.0;
  double factor = 1.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
};

struct SampledPath {
  ObservationGrid grid;
  std::vector<double> values;
  std::vector<JumpEvent> jumps;
  // Sum of Gaussian log-increments sigma dW - sigma^2 dt / 2 over each
  // observation interval (entry 0 unused). Together with the ledger this
  // reproduces every observed increment.
  std::vector<double> diffusion_log_increments;
};

struct SampledPathPair {
  GridPair grids;
  std::vector<double> values1;
  std::vector<double> values2;
  std::vector<JumpEvent> jumps1;
  std::vector<JumpEvent> jumps2;
  std::vector<CommonJumpEvent> jumps_common;
};

SampledPath simulate_uni(const UniModel& model, const ObservationGrid& grid, Rng& rng);
SampledPathPair simulate_biv(const BiModel& model, const GridPair& pair, Rng& rng);

enum class UniClass { kHasJump, kContinuous };
enum class BivClass { kHasCommonJump, kDisjointOnly, kNoJumps };

UniClass classify(const SampledPath& path) noexcept;
BivClass classify(const SampledPathPair& pair) noexcept;

enum class Requirement {
  kAny,
  kHasJump,
  kContinuous,
  kHasCommonJump,
  kDisjointOnly,
  kNoJumps,
  // Every measure with alpha != 0 fired at least once on the observed range.
  kEveryActiveMeasure,
};

const char* requirement_name(Requirement r) noexcept;

inline constexpr std::size_t kDefaultMaxTries = 1'000'000;

struct ConditioningStats {
  std::size_t tries = 0;
};

// Rejection sampling: redraws the grid (for random schemes) and the path until
// `requirement` holds. Throws ConditioningError when the event is impossible
// for the model or `max_tries` is exhausted.
SampledPath condition_resample(const UniModel& model, const SchemeSpec& scheme,
                               std::size_t n, double horizon, Requirement requirement,
                               Rng& rng, std::size_t max_tries = kDefaultMaxTries,
                               ConditioningStats* stats = nullptr);

SampledPathPair condition_resample(const BiModel& model, const SchemeSpec& scheme1,
                                   const SchemeSpec& scheme2, std::size_t n,
                                   double horizon, Requirement requirement, Rng& rng,
                                   std::size_t max_tries = kDefaultMaxTries,
                                   ConditioningStats* stats = nullptr);

// CSV: `t,x` / `t,x1,x2` (pair legs written on the union of times, empty cell
// where a leg has no observation); ledgers as `t,size,measure`.
void write_path_csv(std::ostream& os, const SampledPath& path);
void write_path_csv(std::ostream& os, const SampledPathPair& pair);
void write_ledger_csv(std::ostream& os, const SampledPath& path);
void write_ledger_csv(std::ostream& os, const SampledPathPair& pair);

}  // namespace cojump
