#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cojump/bootstrap.hpp"
#include "cojump/simulate.hpp"

namespace cojump {

enum class Dimension { kUni, kBiv };

const char* dimension_name(Dimension d) noexcept;

struct ExperimentCase {
  std::string name;
  Dimension dim = Dimension::kUni;
  UniModel uni{};
  BiModel biv{};
  SchemeSpec scheme1 = PoissonScheme{1.0};
  SchemeSpec scheme2 = PoissonScheme{1.0};
  Requirement requirement = Requirement::kAny;
};

// The 4 univariate and 12 bivariate simulation settings, Poisson(1) sampling.
const std::vector<ExperimentCase>& registry();
std::vector<ExperimentCase> registry(Dimension dim);
// Throws ParameterError for unknown names.
ExperimentCase find_case(const std::string& name, Dimension dim);
// Dimensions in which `name` is registered.
std::vector<Dimension> case_dimensions(const std::string& name);

inline constexpr std::size_t kDefaultPaths = 1000;

struct McRunSpec {
  ExperimentCase experiment;
  std::size_t n = 1600;
  std::size_t paths = kDefaultPaths;
  std::uint64_t seed = 42;
  BootstrapConfig cfg{};
  bool use_corrected = false;
  double horizon = 1.0;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::size_t max_tries = kDefaultMaxTries;
  // Paths whose statistic is undefined are excluded and counted; run_mc
  // throws DegeneratePathError once more than this many occur.
  std::optional<std::size_t> max_degenerate{};
};

void validate(const McRunSpec& spec);

struct PathOutcome {
  std::size_t path_id = 0;
  bool degenerate = false;
  std::size_t tries = 0;  // conditioning attempts
  TestReport report{};
};

struct McResult {
  std::vector<PathOutcome> paths;
  std::size_t degenerate = 0;
  std::size_t conditioning_tries = 0;
  double seconds = 0.0;

  std::size_t valid() const noexcept { return paths.size() - degenerate; }
  // Share of non-degenerate paths rejected at `alpha` with correction weight `rho`.
  double rejection_rate(double alpha, double rho) const;
  std::vector<double> statistics(double rho) const;
};

// Simulates, conditions, and tests every path. Path i uses simulation stream
// (seed, path i) and bootstrap streams (seed, path i, m), so the result does
// not depend on the number of worker threads.
McResult run_mc(const McRunSpec& spec);

struct RejectionCurve {
  std::vector<double> alphas;
  std::vector<double> rates;
};

// Levels with floor(alpha M) = 0 have no critical value and count as accept.
RejectionCurve rejection_curve(const McResult& result, const std::vector<double>& alpha_grid,
                               double rho);
std::vector<double> uniform_grid(double lo, double hi, std::size_t points);

struct DensityCurve {
  std::vector<double> x;
  std::vector<double> f;
  double bandwidth = 0.0;
  // All values equal: x holds the single atom and f its mass.
  bool point_mass = false;
};

inline constexpr std::size_t kDensityPoints = 512;

// Gaussian KDE on 512 points over [min - 3h, max + 3h]; Silverman bandwidth
// 0.9 min(sd, IQR/1.34) N^(-1/5) unless given.
DensityCurve density_estimate(const std::vector<double>& values,
                              std::optional<double> bandwidth = {});
double silverman_bandwidth(const std::vector<double>& values);

struct RhoSweepRow {
  double rho = 0.0;
  double type1 = 0.0;
  double type2 = 0.0;
  double total = 0.0;
};

// Type-I proxy: rejection under the null case; type-II proxy: one minus
// rejection under the alternative case. Both runs are simulated once.
std::vector<RhoSweepRow> rho_sweep(const McResult& null_run, const McResult& alt_run,
                                   double alpha, const std::vector<double>& rho_grid);
std::vector<RhoSweepRow> rho_sweep(const McRunSpec& null_spec, const McRunSpec& alt_spec,
                                   const std::vector<double>& rho_grid);

// Limit of phi_j on continuous paths with constant volatility.
// Throws ParameterError for k = 0.
double theoretical_limit(const SchemeSpec& scheme, std::size_t k);

void write_reports_csv(std::ostream& os, const std::string& case_name, const McResult& r);
void write_stats_csv(std::ostream& os, const std::string& case_name, const McResult& r);
void write_curve_csv(std::ostream& os, const RejectionCurve& c);
void write_density_csv(std::ostream& os, const DensityCurve& d);
void write_rho_sweep_csv(std::ostream& os, const std::vector<RhoSweepRow>& rows);

}  // namespace cojump
