#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

#include "cojump/simulate.hpp"

namespace cojump {

// Increments with |Δ| > beta |I|^varpi are treated as jumps.
struct ThresholdSpec {
  double beta = 0.03;
  double varpi = 0.49;

  double threshold(double length) const;
  bool is_large(double delta, double length) const {
    return std::abs(delta) > threshold(length);
  }
};

void validate(const ThresholdSpec& thr);

struct UniStatistics {
  double v1 = 0.0;
  double vk = 0.0;
  double phi = 0.0;
  double a_corr = 0.0;
  double a_over_n = 0.0;  // A / n, computed without the factor n
  double phi_corrected = 0.0;
  std::size_t k = 2;
  double rho_corr = 0.0;

  // Recomputes phi_corrected for another correction weight.
  double corrected(double rho) const;
};

struct BivStatistics {
  double v1 = 0.0;
  double vk = 0.0;
  double phi = 0.0;
  double a_corr = 0.0;
  double a_over_n = 0.0;  // A / n, computed without the factor n
  double phi_corrected = 0.0;
  std::size_t k = 2;
  double rho_corr = 0.0;

  double corrected(double rho) const;
};

// X_{t_i} - X_{t_{i-k}}; zero for i < k. Throws RangeError for i past the grid.
double increment(const SampledPath& path, std::size_t i, std::size_t k);

// Sum of fourth powers of k-increments with t_i <= T. T defaults to the horizon.
double v_uni(const SampledPath& path, std::size_t k, std::optional<double> T = {});
double phi_j(const SampledPath& path, std::size_t k, std::optional<double> T = {});
double a_j(const SampledPath& path, std::size_t k, const ThresholdSpec& thr,
           std::optional<double> T = {});
double phi_j_corrected(const SampledPath& path, std::size_t k, const ThresholdSpec& thr,
                       double rho_corr, std::optional<double> T = {});

// Sum of (Δ1 Δ2)^2 over overlapping k-window pairs with t1_i ∧ t2_j <= T.
double v_biv(const SampledPathPair& pair, std::size_t k, std::optional<double> T = {});
double phi_coj(const SampledPathPair& pair, std::size_t k, std::optional<double> T = {});
// Correction term with k = 2 and OR-truncation (at least one leg small).
double a_coj(const SampledPathPair& pair, const ThresholdSpec& thr,
             std::optional<double> T = {});
double phi_coj_corrected(const SampledPathPair& pair, const ThresholdSpec& thr,
                         double rho_corr, std::optional<double> T = {});

// Exact jump functionals from the simulation ledger: sum of (ΔX)^4, or of
// (ΔX1 ΔX2)^2 over common jump times.
double b_oracle(const SampledPath& path, std::optional<double> T = {});
double b_oracle(const SampledPathPair& pair, std::optional<double> T = {});

// All quantities in one pass. Throws DegeneratePathError when v1 == 0.
UniStatistics compute_uni_statistics(const SampledPath& path, std::size_t k,
                                     const ThresholdSpec& thr, double rho_corr,
                                     std::optional<double> T = {});
BivStatistics compute_biv_statistics(const SampledPathPair& pair, const ThresholdSpec& thr,
                                     double rho_corr, std::optional<double> T = {});

// `case,n,path_id,k,phi,phi_corrected,v1,vk,a_corr`
void write_stats_header(std::ostream& os);
void write_stats_row(std::ostream& os, const std::string& case_name, std::size_t n,
                     std::size_t path_id, const UniStatistics& s);
void write_stats_row(std::ostream& os, const std::string& case_name, std::size_t n,
                     std::size_t path_id, const BivStatistics& s);

}  // namespace cojump
