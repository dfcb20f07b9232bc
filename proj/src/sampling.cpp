#include "cojump/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "cojump/error.hpp"

namespace cojump {

double overlap_length(const Interval& a, const Interval& b) noexcept {
  const double lo = std::max(a.lo, b.lo);
  const double hi = std::min(a.hi, b.hi);
  return hi > lo ? hi - lo : 0.0;
}

ObservationGrid::ObservationGrid(std::vector<double> times, std::size_t nominal_n,
                                 double horizon)
    : times_(std::move(times)), nominal_n_(nominal_n), horizon_(horizon) {
  if (nominal_n_ == 0) throw ParameterError("grid: nominal_n must be >= 1");
  if (!(horizon_ > 0.0)) throw ParameterError("grid: horizon must be > 0");
  if (times_.empty() || times_.front() != 0.0)
    throw ParameterError("grid: times must start at 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1]))
      throw ParameterError("grid: times must be strictly increasing");
  }
  if (times_.back() > horizon_) throw ParameterError("grid: last time exceeds horizon");
}

GridPair::GridPair(ObservationGrid grid1, ObservationGrid grid2)
    : grid1_(std::move(grid1)), grid2_(std::move(grid2)) {
  if (grid1_.horizon() != grid2_.horizon())
    throw ParameterError("grid pair: horizons differ");
  if (grid1_.nominal_n() != grid2_.nominal_n())
    throw ParameterError("grid pair: nominal frequencies differ");
}

void validate(const SchemeSpec& spec) {
  if (const auto* p = std::get_if<PoissonScheme>(&spec)) {
    if (!(p->lambda > 0.0) || !std::isfinite(p->lambda))
      throw ParameterError("poisson scheme: lambda must be > 0");
  } else if (const auto* a = std::get_if<AlternatingAlpha>(&spec)) {
    if (!(a->alpha > 0.0 && a->alpha < 1.0))
      throw ParameterError("alternating scheme: alpha must lie in (0,1)");
  }
}

bool is_random(const SchemeSpec& spec) noexcept {
  return std::holds_alternative<PoissonScheme>(spec);
}

const char* scheme_name(const SchemeSpec& spec) noexcept {
  switch (spec.index()) {
    case 0: return "equidistant";
    case 1: return "poisson";
    default: return "alternating";
  }
}

ObservationGrid generate_grid(const SchemeSpec& spec, std::size_t n, double horizon,
                              Rng& rng) {
  validate(spec);
  if (n == 0) throw ParameterError("generate_grid: n must be >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw ParameterError("generate_grid: horizon must be > 0");

  const double nd = static_cast<double>(n);
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(horizon * nd * 1.1) + 16);
  times.push_back(0.0);

  if (std::holds_alternative<Equidistant>(spec)) {
    for (std::size_t i = 1;; ++i) {
      const double t = static_cast<double>(i) / nd;
      if (t > horizon) break;
      times.push_back(t);
    }
  } else if (const auto* alt = std::get_if<AlternatingAlpha>(&spec)) {
    for (std::size_t i = 1;; ++i) {
      const double shift = (i % 2 == 1) ? alt->alpha : 0.0;
      const double t = (static_cast<double>(i) + shift) / nd;
      if (t > horizon) break;
      times.push_back(t);
    }
  } else {
    const auto& poisson = std::get<PoissonScheme>(spec);
    std::exponential_distribution<double> gap(nd * poisson.lambda);
    double t = 0.0;
    for (;;) {
      t += gap(rng);
      if (t > horizon) break;
      times.push_back(t);
    }
  }
  return ObservationGrid(std::move(times), n, horizon);
}

double mesh(const ObservationGrid& grid) noexcept {
  const auto t = grid.times();
  const double horizon = grid.horizon();
  double m = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    m = std::max(m, std::min(t[i], horizon) - std::min(t[i - 1], horizon));
  }
  return m;
}

std::size_t locate(const ObservationGrid& grid, double s) {
  const auto t = grid.times();
  if (!(s > 0.0) || s > t.back()) {
    std::ostringstream msg;
    msg << "locate: time " << s << " outside (0, " << t.back() << "]";
    throw RangeError(msg.str());
  }
  return static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), s) - t.begin());
}

double g_functional(const ObservationGrid& grid, std::size_t k, double t) {
  if (k == 0) throw ParameterError("g_functional: k must be >= 1");
  const auto times = grid.times();
  double sum = 0.0;
  for (std::size_t i = k; i < times.size() && times[i] <= t; ++i) {
    const double len = times[i] - times[i - k];
    sum += len * len;
  }
  const double kd = static_cast<double>(k);
  return static_cast<double>(grid.nominal_n()) / (kd * kd) * sum;
}

CrossFunctionals gtilde_h_functionals(const GridPair& pair, std::size_t k, double t) {
  if (k == 0) throw ParameterError("gtilde_h_functionals: k must be >= 1");
  const auto t1 = pair.grid1().times();
  const auto t2 = pair.grid2().times();
  double g = 0.0;
  double h = 0.0;
  for_each_overlapping_window(t1, t2, k, [&](std::size_t i, std::size_t j) {
    if (std::min(t1[i], t2[j]) > t) return;
    const Interval a{t1[i - k], t1[i]};
    const Interval b{t2[j - k], t2[j]};
    const double ov = overlap_length(a, b);
    g += ov * ov;
    h += a.length() * b.length();
  });
  const double kd = static_cast<double>(k);
  const double scale = static_cast<double>(pair.nominal_n()) / (kd * kd * kd);
  return {scale * g, scale * h};
}

void write_grid_csv(std::ostream& os, const ObservationGrid& grid) {
  os << "t\n" << std::setprecision(17);
  for (double t : grid.times()) os << t << '\n';
}

ObservationGrid read_grid_csv(std::istream& is, std::size_t nominal_n, double horizon) {
  std::string line;
  if (!std::getline(is, line) || line != "t") throw ParameterError("grid csv: missing header `t`");
  std::vector<double> times;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    try {
      times.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw ParameterError("grid csv: bad value `" + line + "`");
    }
  }
  return ObservationGrid(std::move(times), nominal_n, horizon);
}

}  // namespace cojump
