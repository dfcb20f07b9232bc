#include "cojump/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>

#include "cojump/error.hpp"

namespace cojump {
namespace {

// Poisson event times on (0, end] with sizes uniform on [-h,-l] ∪ [l,h].
template <class Event>
std::vector<Event> draw_jumps(const JumpSpec& spec, double end, Rng& rng) {
  std::vector<Event> events;
  if (!spec.active()) return events;
  std::exponential_distribution<double> gap(spec.kappa);
  std::uniform_real_distribution<double> magnitude(spec.l, spec.h);
  std::bernoulli_distribution negative(0.5);
  double t = 0.0;
  for (;;) {
    t += gap(rng);
    if (t > end) break;
    Event e{};
    e.time = t;
    const double x = magnitude(rng);
    e.size = negative(rng) ? -x : x;
    e.factor = 1.0 + spec.alpha * e.size;
    events.push_back(e);
  }
  return events;
}

}  // namespace

void validate(const JumpSpec& spec) {
  if (!(spec.kappa >= 0.0) || !std::isfinite(spec.kappa))
    throw ParameterError("jump spec: kappa must be >= 0");
  if (spec.kappa > 0.0 && !(spec.l > 0.0 && spec.l < spec.h))
    throw ParameterError("jump spec: need 0 < l < h when kappa > 0");
  if (!std::isfinite(spec.alpha)) throw ParameterError("jump spec: alpha must be finite");
}

void validate(const UniModel& model) {
  if (!(model.sigma2 >= 0.0) || !std::isfinite(model.sigma2))
    throw ParameterError("uni model: sigma2 must be >= 0");
  if (!(model.x0 > 0.0)) throw ParameterError("uni model: x0 must be > 0");
  validate(model.jumps);
}

void validate(const BiModel& model) {
  if (!(model.sigma2_1 >= 0.0) || !(model.sigma2_2 >= 0.0))
    throw ParameterError("biv model: variances must be >= 0");
  if (!(std::abs(model.rho) <= 1.0)) throw ParameterError("biv model: |rho| must be <= 1");
  if (!(model.x0_1 > 0.0) || !(model.x0_2 > 0.0))
    throw ParameterError("biv model: initial levels must be > 0");
  validate(model.jump1);
  validate(model.jump2);
  validate(model.jump3);
}

SampledPath simulate_uni(const UniModel& model, const ObservationGrid& grid, Rng& rng) {
  validate(model);
  const auto t = grid.times();
  const double sigma = std::sqrt(model.sigma2);
  std::normal_distribution<double> gauss;

  SampledPath path{grid, {}, draw_jumps<JumpEvent>(model.jumps, grid.last_time(), rng), {}};
  path.values.resize(t.size());
  path.diffusion_log_increments.assign(t.size(), 0.0);
  path.values[0] = model.x0;

  double log_level = 0.0;
  double now = 0.0;
  auto diffuse = [&](double until) {
    const double dt = until - now;
    now = until;
    if (dt <= 0.0 || sigma == 0.0) return 0.0;
    const double step = sigma * std::sqrt(dt) * gauss(rng) - 0.5 * model.sigma2 * dt;
    log_level += step;
    return step;
  };

  std::size_t next_jump = 0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    double gaussian_part = 0.0;
    // A jump exactly at t_i belongs to (t_{i-1}, t_i].
    while (next_jump < path.jumps.size() && path.jumps[next_jump].time <= t[i]) {
      JumpEvent& e = path.jumps[next_jump++];
      gaussian_part += diffuse(e.time);
      const double before = model.x0 * std::exp(log_level);
      log_level += std::log1p(model.jumps.alpha * e.size);
      e.delta = before * model.jumps.alpha * e.size;
    }
    gaussian_part += diffuse(t[i]);
    path.diffusion_log_increments[i] = gaussian_part;
    path.values[i] = model.x0 * std::exp(log_level);
  }
  return path;
}

SampledPathPair simulate_biv(const BiModel& model, const GridPair& pair, Rng& rng) {
  validate(model);
  const auto t1 = pair.grid1().times();
  const auto t2 = pair.grid2().times();
  const double end = std::max(t1.back(), t2.back());

  SampledPathPair out{pair, {}, {}, {}, {}, {}};
  out.jumps1 = draw_jumps<JumpEvent>(model.jump1, t1.back(), rng);
  out.jumps2 = draw_jumps<JumpEvent>(model.jump2, t2.back(), rng);
  out.jumps_common = draw_jumps<CommonJumpEvent>(model.jump3, end, rng);
  out.values1.resize(t1.size());
  out.values2.resize(t2.size());
  out.values1[0] = model.x0_1;
  out.values2[0] = model.x0_2;

  const double s1 = std::sqrt(model.sigma2_1);
  const double s2 = std::sqrt(model.sigma2_2);
  const double rho = model.rho;
  const double rho_c = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  std::normal_distribution<double> gauss;

  double log1 = 0.0;
  double log2 = 0.0;
  double now = 0.0;
  auto diffuse = [&](double until) {
    const double dt = until - now;
    now = until;
    if (dt <= 0.0) return;
    const double z1 = gauss(rng);
    const double z2 = gauss(rng);
    const double root = std::sqrt(dt);
    const double dw1 = root * z1;
    const double dw2 = root * (rho * z1 + rho_c * z2);
    log1 += s1 * dw1 - 0.5 * model.sigma2_1 * dt;
    log2 += s2 * dw2 - 0.5 * model.sigma2_2 * dt;
  };

  constexpr double kNever = std::numeric_limits<double>::infinity();
  std::size_t i1 = 1, i2 = 1, j1 = 0, j2 = 0, j3 = 0;
  for (;;) {
    const double o1 = i1 < t1.size() ? t1[i1] : kNever;
    const double o2 = i2 < t2.size() ? t2[i2] : kNever;
    const double e1 = j1 < out.jumps1.size() ? out.jumps1[j1].time : kNever;
    const double e2 = j2 < out.jumps2.size() ? out.jumps2[j2].time : kNever;
    const double e3 = j3 < out.jumps_common.size() ? out.jumps_common[j3].time : kNever;
    const double next_jump = std::min({e1, e2, e3});
    const double next_obs = std::min(o1, o2);
    if (next_jump == kNever && next_obs == kNever) break;

    // Jumps win ties with observations (left-limit convention).
    if (next_jump <= next_obs) {
      diffuse(next_jump);
      if (e3 == next_jump) {
        CommonJumpEvent& e = out.jumps_common[j3++];
        const double a = model.jump3.alpha * e.size;
        e.delta1 = model.x0_1 * std::exp(log1) * a;
        e.delta2 = model.x0_2 * std::exp(log2) * a;
        log1 += std::log1p(a);
        log2 += std::log1p(a);
      } else if (e1 == next_jump) {
        JumpEvent& e = out.jumps1[j1++];
        const double a = model.jump1.alpha * e.size;
        e.delta = model.x0_1 * std::exp(log1) * a;
        log1 += std::log1p(a);
      } else {
        JumpEvent& e = out.jumps2[j2++];
        const double a = model.jump2.alpha * e.size;
        e.delta = model.x0_2 * std::exp(log2) * a;
        log2 += std::log1p(a);
      }
      continue;
    }
    diffuse(next_obs);
    if (o1 == next_obs) out.values1[i1++] = model.x0_1 * std::exp(log1);
    if (o2 == next_obs) out.values2[i2++] = model.x0_2 * std::exp(log2);
  }
  return out;
}

UniClass classify(const SampledPath& path) noexcept {
  for (const auto& e : path.jumps)
    if (e.delta != 0.0) return UniClass::kHasJump;
  return UniClass::kContinuous;
}

BivClass classify(const SampledPathPair& pair) noexcept {
  const double common_end =
      std::min(pair.grids.grid1().last_time(), pair.grids.grid2().last_time());
  for (const auto& e : pair.jumps_common)
    if (e.time <= common_end && e.delta1 * e.delta2 != 0.0) return BivClass::kHasCommonJump;
  auto any = [](const std::vector<JumpEvent>& v) {
    return std::any_of(v.begin(), v.end(), [](const JumpEvent& e) { return e.delta != 0.0; });
  };
  if (any(pair.jumps1) || any(pair.jumps2)) return BivClass::kDisjointOnly;
  for (const auto& e : pair.jumps_common)
    if (e.delta1 != 0.0 || e.delta2 != 0.0) return BivClass::kDisjointOnly;
  return BivClass::kNoJumps;
}

const char* requirement_name(Requirement r) noexcept {
  switch (r) {
    case Requirement::kAny: return "any";
    case Requirement::kHasJump: return "has-jump";
    case Requirement::kContinuous: return "continuous";
    case Requirement::kHasCommonJump: return "has-common-jump";
    case Requirement::kDisjointOnly: return "disjoint-only";
    case Requirement::kNoJumps: return "no-jumps";
    case Requirement::kEveryActiveMeasure: return "every-active-measure";
  }
  return "?";
}

namespace {

bool satisfied(const SampledPath& path, const UniModel& model, Requirement r) {
  switch (r) {
    case Requirement::kAny: return true;
    case Requirement::kEveryActiveMeasure:
      return !model.jumps.active() || classify(path) == UniClass::kHasJump;
    case Requirement::kHasJump: return classify(path) == UniClass::kHasJump;
    case Requirement::kContinuous:
    case Requirement::kNoJumps: return classify(path) == UniClass::kContinuous;
    default: throw ParameterError("requirement not applicable to a univariate path");
  }
}

bool satisfied(const SampledPathPair& pair, const BiModel& model, Requirement r) {
  switch (r) {
    case Requirement::kAny: return true;
    case Requirement::kHasCommonJump: return classify(pair) == BivClass::kHasCommonJump;
    case Requirement::kDisjointOnly: return classify(pair) == BivClass::kDisjointOnly;
    case Requirement::kNoJumps: return classify(pair) == BivClass::kNoJumps;
    case Requirement::kEveryActiveMeasure: {
      const double common_end =
          std::min(pair.grids.grid1().last_time(), pair.grids.grid2().last_time());
      if (model.jump1.active() && pair.jumps1.empty()) return false;
      if (model.jump2.active() && pair.jumps2.empty()) return false;
      if (model.jump3.active() &&
          (pair.jumps_common.empty() || pair.jumps_common.front().time > common_end))
        return false;
      return true;
    }
    default: throw ParameterError("requirement not applicable to a path pair");
  }
}

}  // namespace

SampledPath condition_resample(const UniModel& model, const SchemeSpec& scheme,
                               std::size_t n, double horizon, Requirement requirement,
                               Rng& rng, std::size_t max_tries, ConditioningStats* stats) {
  validate(model);
  if (requirement == Requirement::kHasJump && !model.jumps.active())
    throw ConditioningError("conditioning: model cannot jump");
  std::optional<ObservationGrid> fixed;
  if (!is_random(scheme)) fixed = generate_grid(scheme, n, horizon, rng);
  for (std::size_t attempt = 1; attempt <= max_tries; ++attempt) {
    const ObservationGrid grid = fixed ? *fixed : generate_grid(scheme, n, horizon, rng);
    SampledPath path = simulate_uni(model, grid, rng);
    if (satisfied(path, model, requirement)) {
      if (stats) stats->tries = attempt;
      return path;
    }
  }
  throw ConditioningError(std::string("conditioning: budget exhausted for ") +
                          requirement_name(requirement));
}

SampledPathPair condition_resample(const BiModel& model, const SchemeSpec& scheme1,
                                   const SchemeSpec& scheme2, std::size_t n,
                                   double horizon, Requirement requirement, Rng& rng,
                                   std::size_t max_tries, ConditioningStats* stats) {
  validate(model);
  if (requirement == Requirement::kHasCommonJump && !model.jump3.active())
    throw ConditioningError("conditioning: model has no common jump measure");
  if (requirement == Requirement::kDisjointOnly && !model.jump1.active() &&
      !model.jump2.active())
    throw ConditioningError("conditioning: model has no idiosyncratic jump measure");
  if (requirement == Requirement::kHasJump || requirement == Requirement::kContinuous)
    throw ParameterError("conditioning: requirement not applicable to a path pair");

  std::optional<GridPair> fixed;
  if (!is_random(scheme1) && !is_random(scheme2)) {
    auto g1 = generate_grid(scheme1, n, horizon, rng);
    auto g2 = generate_grid(scheme2, n, horizon, rng);
    fixed.emplace(std::move(g1), std::move(g2));
  }
  for (std::size_t attempt = 1; attempt <= max_tries; ++attempt) {
    std::optional<GridPair> drawn;
    if (!fixed) {
      auto g1 = generate_grid(scheme1, n, horizon, rng);
      auto g2 = generate_grid(scheme2, n, horizon, rng);
      drawn.emplace(std::move(g1), std::move(g2));
    }
    SampledPathPair pair = simulate_biv(model, fixed ? *fixed : *drawn, rng);
    if (satisfied(pair, model, requirement)) {
      if (stats) stats->tries = attempt;
      return pair;
    }
  }
  throw ConditioningError(std::string("conditioning: budget exhausted for ") +
                          requirement_name(requirement));
}

void write_path_csv(std::ostream& os, const SampledPath& path) {
  os << "t,x\n" << std::setprecision(17);
  const auto t = path.grid.times();
  for (std::size_t i = 0; i < t.size(); ++i) os << t[i] << ',' << path.values[i] << '\n';
}

void write_path_csv(std::ostream& os, const SampledPathPair& pair) {
  os << "t,x1,x2\n" << std::setprecision(17);
  const auto t1 = pair.grids.grid1().times();
  const auto t2 = pair.grids.grid2().times();
  std::size_t i = 0, j = 0;
  while (i < t1.size() || j < t2.size()) {
    const double a = i < t1.size() ? t1[i] : std::numeric_limits<double>::infinity();
    const double b = j < t2.size() ? t2[j] : std::numeric_limits<double>::infinity();
    const double t = std::min(a, b);
    os << t << ',';
    if (a == t) os << pair.values1[i++];
    os << ',';
    if (b == t) os << pair.values2[j++];
    os << '\n';
  }
}

void write_ledger_csv(std::ostream& os, const SampledPath& path) {
  os << "t,size,measure\n" << std::setprecision(17);
  for (const auto& e : path.jumps) os << e.time << ',' << e.size << ",1\n";
}

void write_ledger_csv(std::ostream& os, const SampledPathPair& pair) {
  os << "t,size,measure\n" << std::setprecision(17);
  for (const auto& e : pair.jumps1) os << e.time << ',' << e.size << ",1\n";
  for (const auto& e : pair.jumps2) os << e.time << ',' << e.size << ",2\n";
  for (const auto& e : pair.jumps_common) os << e.time << ',' << e.size << ",3\n";
}

}  // namespace cojump
