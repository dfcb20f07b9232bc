#include "cojump/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "cojump/error.hpp"

namespace cojump {
namespace {

constexpr double kSigma2 = 8e-5;

struct Intensity {
  const char* roman;
  double kappa;
  double h;
};

constexpr Intensity kIntensities[] = {{"I", 1.0, 0.7484}, {"II", 5.0, 0.3187}, {"III", 25.0, 0.1238}};

JumpSpec jump_spec(const Intensity& in) { return {0.01, in.kappa, 0.05, in.h}; }

std::vector<ExperimentCase> build_registry() {
  std::vector<ExperimentCase> cases;
  for (const auto& in : kIntensities) {
    ExperimentCase c;
    c.name = std::string(in.roman) + "-j";
    c.dim = Dimension::kUni;
    c.uni.sigma2 = kSigma2;
    c.uni.jumps = jump_spec(in);
    c.requirement = Requirement::kHasJump;
    cases.push_back(c);
  }
  {
    ExperimentCase c;
    c.name = "Cont";
    c.dim = Dimension::kUni;
    c.uni.sigma2 = kSigma2;
    c.requirement = Requirement::kAny;
    cases.push_back(c);
  }

  struct Family {
    const char* suffix;
    double rho;
    bool idio;
    bool common;
  };
  constexpr Family kFamilies[] = {
      {"j", 0.0, false, true}, {"m", 0.5, true, true}, {"d0", 0.0, true, false},
      {"d1", 1.0, true, false}};
  for (const auto& fam : kFamilies) {
    for (const auto& in : kIntensities) {
      ExperimentCase c;
      c.name = std::string(in.roman) + "-" + fam.suffix;
      c.dim = Dimension::kBiv;
      c.biv.sigma2_1 = kSigma2;
      c.biv.sigma2_2 = kSigma2;
      c.biv.rho = fam.rho;
      if (fam.idio) {
        c.biv.jump1 = jump_spec(in);
        c.biv.jump2 = jump_spec(in);
      }
      if (fam.common) c.biv.jump3 = jump_spec(in);
      c.requirement = Requirement::kEveryActiveMeasure;
      cases.push_back(c);
    }
  }
  return cases;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Linear-interpolation quantile of sorted data.
double sorted_quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

}  // namespace

const char* dimension_name(Dimension d) noexcept {
  return d == Dimension::kUni ? "uni" : "biv";
}

const std::vector<ExperimentCase>& registry() {
  static const std::vector<ExperimentCase> cases = build_registry();
  return cases;
}

std::vector<ExperimentCase> registry(Dimension dim) {
  std::vector<ExperimentCase> out;
  for (const auto& c : registry())
    if (c.dim == dim) out.push_back(c);
  return out;
}

ExperimentCase find_case(const std::string& name, Dimension dim) {
  for (const auto& c : registry())
    if (c.name == name && c.dim == dim) return c;
  throw ParameterError("unknown " + std::string(dimension_name(dim)) + " case `" + name + "`");
}

std::vector<Dimension> case_dimensions(const std::string& name) {
  std::vector<Dimension> dims;
  for (const auto& c : registry())
    if (c.name == name) dims.push_back(c.dim);
  return dims;
}

void validate(const McRunSpec& spec) {
  if (spec.paths < 1) throw ParameterError("run: paths must be >= 1");
  if (spec.n < 3) throw ParameterError("run: n must be >= 3");
  if (!(spec.horizon > 0.0)) throw ParameterError("run: horizon must be > 0");
  validate(spec.cfg);
  validate(spec.experiment.scheme1);
  validate(spec.experiment.scheme2);
  if (spec.experiment.dim == Dimension::kUni)
    validate(spec.experiment.uni);
  else
    validate(spec.experiment.biv);
}

double McResult::rejection_rate(double alpha, double rho) const {
  std::size_t rejected = 0;
  for (const auto& p : paths) {
    if (p.degenerate) continue;
    if (quantile_rank(p.report.draws.size(), alpha) == 0) continue;
    rejected += p.report.rejects(alpha, rho);
  }
  const std::size_t n = valid();
  return n == 0 ? 0.0 : static_cast<double>(rejected) / static_cast<double>(n);
}

std::vector<double> McResult::statistics(double rho) const {
  std::vector<double> out;
  out.reserve(valid());
  for (const auto& p : paths)
    if (!p.degenerate) out.push_back(p.report.statistic_at(rho));
  return out;
}

McResult run_mc(const McRunSpec& spec) {
  validate(spec);
  const auto start = std::chrono::steady_clock::now();
  const ExperimentCase& ex = spec.experiment;

  McResult result;
  result.paths.resize(spec.paths);
  std::vector<std::exception_ptr> errors(spec.paths);

  const auto run_path = [&](std::size_t p) {
    PathOutcome& out = result.paths[p];
    out.path_id = p;
    try {
      Rng rng = make_stream(spec.seed, StreamDomain::kSimulation, p);
      ConditioningStats cs;
      const StreamSeed seeds{spec.seed, p};
      if (ex.dim == Dimension::kUni) {
        const SampledPath path = condition_resample(ex.uni, ex.scheme1, spec.n, spec.horizon,
                                                    ex.requirement, rng, spec.max_tries, &cs);
        out.tries = cs.tries;
        out.report = test_j(path, spec.cfg, seeds, spec.use_corrected);
      } else {
        const SampledPathPair pair =
            condition_resample(ex.biv, ex.scheme1, ex.scheme2, spec.n, spec.horizon,
                               ex.requirement, rng, spec.max_tries, &cs);
        out.tries = cs.tries;
        out.report = test_coj(pair, spec.cfg, seeds, spec.use_corrected);
      }
    } catch (const DegeneratePathError&) {
      out.degenerate = true;
    } catch (...) {
      errors[p] = std::current_exception();
    }
  };

  std::size_t workers = spec.threads;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, spec.paths);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t p = next.fetch_add(1); p < spec.paths; p = next.fetch_add(1)) run_path(p);
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (const auto& p : result.paths) {
    result.degenerate += p.degenerate;
    result.conditioning_tries += p.tries;
  }
  if (spec.max_degenerate && result.degenerate > *spec.max_degenerate) {
    throw DegeneratePathError("run: " + std::to_string(result.degenerate) +
                              " degenerate paths exceed the budget of " +
                              std::to_string(*spec.max_degenerate));
  }
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

RejectionCurve rejection_curve(const McResult& result, const std::vector<double>& alpha_grid,
                               double rho) {
  RejectionCurve c;
  c.alphas = alpha_grid;
  c.rates.reserve(alpha_grid.size());
  for (double a : alpha_grid) {
    if (!(a >= 0.0 && a <= 1.0)) throw ParameterError("curve: levels must lie in [0, 1]");
    c.rates.push_back(a == 0.0 ? 0.0 : result.rejection_rate(a, rho));
  }
  return c;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t points) {
  if (points < 2) return {lo};
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  g.back() = hi;
  return g;
}

double silverman_bandwidth(const std::vector<double>& values) {
  if (values.size() < 2) throw ParameterError("density: need at least two values");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double m = mean_of(sorted);
  double ss = 0.0;
  for (double v : sorted) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / static_cast<double>(sorted.size() - 1));
  const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  return 0.9 * spread * std::pow(static_cast<double>(sorted.size()), -0.2);
}

DensityCurve density_estimate(const std::vector<double>& values,
                              std::optional<double> bandwidth) {
  if (values.size() < 2) throw ParameterError("density: need at least two values");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  DensityCurve d;
  if (lo == hi) {
    d.point_mass = true;
    d.x = {lo};
    d.f = {1.0};
    return d;
  }
  const double h = bandwidth ? *bandwidth : silverman_bandwidth(values);
  if (!(h > 0.0)) throw ParameterError("density: bandwidth must be > 0");
  d.bandwidth = h;
  d.x = uniform_grid(lo - 3.0 * h, hi + 3.0 * h, kDensityPoints);
  d.f.assign(d.x.size(), 0.0);
  const double norm = 1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * M_PI));
  for (std::size_t g = 0; g < d.x.size(); ++g) {
    double s = 0.0;
    for (double v : values) {
      const double u = (d.x[g] - v) / h;
      s += std::exp(-0.5 * u * u);
    }
    d.f[g] = s * norm;
  }
  return d;
}

std::vector<RhoSweepRow> rho_sweep(const McResult& null_run, const McResult& alt_run,
                                   double alpha, const std::vector<double>& rho_grid) {
  std::vector<RhoSweepRow> rows;
  rows.reserve(rho_grid.size());
  for (double rho : rho_grid) {
    RhoSweepRow r;
    r.rho = rho;
    r.type1 = null_run.rejection_rate(alpha, rho);
    r.type2 = 1.0 - alt_run.rejection_rate(alpha, rho);
    r.total = r.type1 + r.type2;
    rows.push_back(r);
  }
  return rows;
}

std::vector<RhoSweepRow> rho_sweep(const McRunSpec& null_spec, const McRunSpec& alt_spec,
                                   const std::vector<double>& rho_grid) {
  const McResult null_run = run_mc(null_spec);
  const McResult alt_run = run_mc(alt_spec);
  return rho_sweep(null_run, alt_run, null_spec.cfg.alpha, rho_grid);
}

double theoretical_limit(const SchemeSpec& scheme, std::size_t k) {
  if (k == 0) throw ParameterError("theoretical_limit: k must be >= 1");
  validate(scheme);
  const double kd = static_cast<double>(k);
  if (std::holds_alternative<Equidistant>(scheme)) return kd;
  if (std::holds_alternative<PoissonScheme>(scheme)) return (kd + 1.0) / 2.0;
  const double a = std::get<AlternatingAlpha>(scheme).alpha;
  // k G_k / G with G = 1 + a^2; k-windows have constant length for even k and
  // alternate between (k + a)/n and (k - a)/n for odd k.
  if (k % 2 == 0) return kd / (1.0 + a * a);
  return (kd * kd + a * a) / (kd * (1.0 + a * a));
}

void write_reports_csv(std::ostream& os, const std::string& case_name, const McResult& r) {
  write_report_header(os);
  for (const auto& p : r.paths)
    if (!p.degenerate) write_report_row(os, case_name, p.path_id, p.report);
}

void write_stats_csv(std::ostream& os, const std::string& case_name, const McResult& r) {
  write_stats_header(os);
  for (const auto& p : r.paths) {
    if (p.degenerate) continue;
    UniStatistics s;
    s.k = p.report.k;
    s.phi = p.report.statistic;
    s.phi_corrected = p.report.corrected_statistic;
    s.v1 = p.report.v1;
    s.vk = p.report.vk;
    s.a_corr = p.report.a_corr;
    write_stats_row(os, case_name, p.report.n, p.path_id, s);
  }
}

void write_curve_csv(std::ostream& os, const RejectionCurve& c) {
  os << "alpha,rate\n" << std::setprecision(17);
  for (std::size_t i = 0; i < c.alphas.size(); ++i) os << c.alphas[i] << ',' << c.rates[i] << '\n';
}

void write_density_csv(std::ostream& os, const DensityCurve& d) {
  os << "x,f\n" << std::setprecision(17);
  for (std::size_t i = 0; i < d.x.size(); ++i) os << d.x[i] << ',' << d.f[i] << '\n';
}

void write_rho_sweep_csv(std::ostream& os, const std::vector<RhoSweepRow>& rows) {
  os << "rho,type1,type2,total\n" << std::setprecision(17);
  for (const auto& r : rows) os << r.rho << ',' << r.type1 << ',' << r.type2 << ',' << r.total << '\n';
}

}  // namespace cojump
