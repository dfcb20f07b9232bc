#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "cojump/harness.hpp"

namespace cojump {

// Everything a CLI run needs. Optional fields fall back to the defaults for n
// (L_n, M_n, b_n) or to the registered case (scheme).
struct RunConfig {
  std::string case_name = "I-j";
  std::optional<Dimension> dim{};
  std::size_t n = 1600;
  std::size_t paths = kDefaultPaths;
  std::uint64_t seed = 42;
  std::size_t threads = 0;
  std::string out = "out";
  bool full = false;
  std::size_t max_tries = kDefaultMaxTries;

  double alpha = 0.05;
  std::size_t k = 2;
  bool corrected = false;
  std::optional<double> rho{};
  double beta = 0.03;
  double varpi = 0.49;
  std::optional<std::size_t> L_n{};
  std::optional<std::size_t> M_n{};
  std::optional<double> b_n{};

  std::optional<SchemeSpec> scheme{};
};

// Largest n accepted without `full`.
inline constexpr std::size_t kDeskMaxN = 1600;

// Overlays the keys present in a TOML document onto `base`. Sections:
// [run] case, dim, n, paths, seed, threads, out, full, max_tries;
// [test] alpha, k, corrected, rho, beta, varpi, L_n, M_n, b_n;
// [scheme] kind = "poisson" | "equidistant" | "alternating", lambda, alpha.
// Throws ParameterError on syntax errors, unknown keys, or wrong types.
RunConfig parse_config(std::string_view toml_text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

Dimension parse_dimension(std::string_view s);

// Dimension of the case: explicit choice, else univariate when the name is
// registered there, else bivariate.
Dimension resolve_dimension(const RunConfig& cfg);

// Default correction weight: 0.9 univariate (0.99 on equidistant grids),
// 0.75 bivariate.
double default_rho(Dimension dim, const SchemeSpec& scheme) noexcept;

// Resolves the case and the test tuning; throws ParameterError when n exceeds
// kDeskMaxN without `full`.
McRunSpec to_run_spec(const RunConfig& cfg);

// Pretty-printed JSON with the resolved spec, seed and versions.
std::string meta_json(const RunConfig& cfg, const McRunSpec& spec, const std::string& command);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cojump
