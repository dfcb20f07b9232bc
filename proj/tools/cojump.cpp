#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "cojump/config.hpp"
#include "cojump/error.hpp"
#include "cojump/harness.hpp"
#include "cojump/sampling.hpp"

namespace fs = std::filesystem;
using namespace cojump;

namespace {

// Flags shared by the run-like subcommands. Unset flags keep the config file
// value, which in turn keeps the built-in default.
struct RunFlags {
  std::string config;
  std::optional<std::string> case_name;
  std::optional<std::string> dim;
  std::optional<std::size_t> n, paths, threads, max_tries, k, L_n, M_n;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> alpha, rho, beta, varpi, b_n;
  bool corrected = false;
  bool full = false;

  void attach(CLI::App* app, bool with_case = true) {
    app->add_option("--config", config, "TOML config file")->check(CLI::ExistingFile);
    if (with_case) app->add_option("--case", case_name, "experiment case, e.g. I-j, Cont, II-d1");
    app->add_option("--dim", dim, "uni or biv (default: uni when the case exists there)");
    app->add_option("--n", n, "nominal sampling frequency");
    app->add_option("--paths", paths, "Monte Carlo paths");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--threads", threads, "worker threads (0: all cores)");
    app->add_option("--max-tries", max_tries, "conditioning retry budget per path");
    app->add_option("--out", out, "output directory");
    app->add_option("--alpha", alpha, "test level");
    app->add_option("--k", k, "coarse step of the univariate statistic");
    app->add_option("--rho", rho, "correction weight");
    app->add_option("--beta", beta, "truncation scale");
    app->add_option("--varpi", varpi, "truncation exponent");
    app->add_option("--L", L_n, "offset window L_n");
    app->add_option("--M", M_n, "bootstrap draws M_n");
    app->add_option("--bn", b_n, "spot volatility bandwidth b_n");
    app->add_flag("--corrected", corrected, "decide with the corrected statistic");
    app->add_flag("--full", full, "allow n above the desk-scale limit");
  }

  RunConfig resolve() const {
    RunConfig cfg = config.empty() ? RunConfig{} : load_config(config);
    if (case_name) cfg.case_name = *case_name;
    if (dim) cfg.dim = parse_dimension(*dim);
    if (n) cfg.n = *n;
    if (paths) cfg.paths = *paths;
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (max_tries) cfg.max_tries = *max_tries;
    if (out) cfg.out = *out;
    if (alpha) cfg.alpha = *alpha;
    if (k) cfg.k = *k;
    if (rho) cfg.rho = *rho;
    if (beta) cfg.beta = *beta;
    if (varpi) cfg.varpi = *varpi;
    if (L_n) cfg.L_n = *L_n;
    if (M_n) cfg.M_n = *M_n;
    if (b_n) cfg.b_n = *b_n;
    if (corrected) cfg.corrected = true;
    if (full) cfg.full = true;
    return cfg;
  }
};

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(dir / name);
  if (!os) throw ParameterError("cannot write " + (dir / name).string());
  return os;
}

double decision_rho(const McRunSpec& spec) { return spec.use_corrected ? spec.cfg.rho_corr : 0.0; }

void print_summary(const McRunSpec& spec, const McResult& r) {
  std::cout << spec.experiment.name << " (" << dimension_name(spec.experiment.dim)
            << ") n=" << spec.n << " paths=" << r.valid() << " degenerate=" << r.degenerate
            << " alpha=" << spec.cfg.alpha << "\n"
            << "  rejection raw=" << r.rejection_rate(spec.cfg.alpha, 0.0)
            << " corrected(rho=" << spec.cfg.rho_corr
            << ")=" << r.rejection_rate(spec.cfg.alpha, spec.cfg.rho_corr) << "\n"
            << "  conditioning tries=" << r.conditioning_tries << " seconds=" << std::fixed
            << std::setprecision(2) << r.seconds << std::defaultfloat << std::setprecision(6)
            << "\n";
}

McResult run_and_persist(const RunConfig& cfg, const McRunSpec& spec, const std::string& cmd) {
  const fs::path dir = cfg.out;
  open_out(dir, "meta.json") << meta_json(cfg, spec, cmd);
  const McResult r = run_mc(spec);
  {
    auto os = open_out(dir, "reports.csv");
    write_reports_csv(os, spec.experiment.name, r);
  }
  {
    auto os = open_out(dir, "stats.csv");
    write_stats_csv(os, spec.experiment.name, r);
  }
  print_summary(spec, r);
  return r;
}

void write_plot(const fs::path& dir, const std::string& csv, const std::string& xlabel,
                const std::string& ylabel, const std::string& extra) {
  auto os = open_out(dir, "plot.gp");
  os << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set xlabel '" << xlabel << "'\n"
     << "set ylabel '" << ylabel << "'\n"
     << "set terminal pngcairo size 800,600\n"
     << "set output '" << fs::path(csv).replace_extension(".png").string() << "'\n"
     << extra;
}

int cmd_run(const RunFlags& f) {
  const RunConfig cfg = f.resolve();
  const McRunSpec spec = to_run_spec(cfg);
  run_and_persist(cfg, spec, "run");
  return 0;
}

int cmd_curve(const RunFlags& f, std::size_t points) {
  const RunConfig cfg = f.resolve();
  const McRunSpec spec = to_run_spec(cfg);
  const McResult r = run_and_persist(cfg, spec, "curve");
  const RejectionCurve c = rejection_curve(r, uniform_grid(0.0, 1.0, points), decision_rho(spec));
  auto os = open_out(cfg.out, "curve.csv");
  write_curve_csv(os, c);
  write_plot(cfg.out, "curve.csv", "alpha", "rejection rate",
             "plot 'curve.csv' using 1:2 with lines, x with lines dt 2 title 'alpha'\n");
  return 0;
}

int cmd_density(const RunFlags& f, std::optional<double> bandwidth) {
  const RunConfig cfg = f.resolve();
  const McRunSpec spec = to_run_spec(cfg);
  const McResult r = run_and_persist(cfg, spec, "density");
  const DensityCurve d = density_estimate(r.statistics(decision_rho(spec)), bandwidth);
  auto os = open_out(cfg.out, "density.csv");
  write_density_csv(os, d);
  if (d.point_mass)
    std::cout << "  all statistics equal " << d.x.front() << "; density.csv holds the atom\n";
  else
    std::cout << "  bandwidth=" << d.bandwidth << "\n";
  write_plot(cfg.out, "density.csv", "statistic", "density",
             "plot 'density.csv' using 1:2 with lines\n");
  return 0;
}

int cmd_rho_sweep(const RunFlags& f, const std::string& null_case, const std::string& alt_case,
                  std::size_t points) {
  RunConfig cfg = f.resolve();
  cfg.case_name = null_case;
  const McRunSpec null_spec = to_run_spec(cfg);
  RunConfig alt_cfg = cfg;
  alt_cfg.case_name = alt_case;
  McRunSpec alt_spec = to_run_spec(alt_cfg);
  open_out(cfg.out, "meta.json") << meta_json(cfg, null_spec, "rho-sweep null=" + null_case +
                                                                   " alt=" + alt_case);
  const McResult rn = run_mc(null_spec);
  const McResult ra = run_mc(alt_spec);
  print_summary(null_spec, rn);
  print_summary(alt_spec, ra);
  const auto rows = rho_sweep(rn, ra, null_spec.cfg.alpha, uniform_grid(0.0, 1.0, points));
  auto os = open_out(cfg.out, "rho_sweep.csv");
  write_rho_sweep_csv(os, rows);
  write_plot(cfg.out, "rho_sweep.csv", "rho", "error",
             "plot 'rho_sweep.csv' using 1:2 with lines, '' using 1:3 with lines, "
             "'' using 1:4 with lines\n");
  return 0;
}

int cmd_limits(std::size_t kmax, double alt_alpha) {
  if (kmax < 1) throw ParameterError("limits: k must be >= 1");
  const SchemeSpec schemes[] = {Equidistant{}, PoissonScheme{1.0}, AlternatingAlpha{alt_alpha}};
  std::cout << "k,equidistant,poisson,alternating\n";
  for (std::size_t k = 1; k <= kmax; ++k) {
    std::cout << k;
    for (const auto& s : schemes) std::cout << ',' << theoretical_limit(s, k);
    std::cout << '\n';
  }
  return 0;
}

SchemeSpec parse_scheme(const std::string& kind, double lambda, double alt_alpha) {
  if (kind == "poisson") return PoissonScheme{lambda};
  if (kind == "equidistant") return Equidistant{};
  if (kind == "alternating") return AlternatingAlpha{alt_alpha};
  throw ParameterError("unknown scheme `" + kind + "`");
}

int cmd_schemes(const SchemeSpec& scheme, std::size_t n, std::size_t grids, std::size_t kmax,
                std::uint64_t seed) {
  validate(scheme);
  if (grids < 1 || kmax < 1 || n < 1) throw ParameterError("schemes: n, grids, k must be >= 1");
  std::vector<double> g(kmax + 1, 0.0);
  double mesh_sum = 0.0;
  for (std::size_t r = 0; r < grids; ++r) {
    Rng rng = make_stream(seed, StreamDomain::kAuxiliary, r);
    const ObservationGrid grid = generate_grid(scheme, n, 1.0, rng);
    for (std::size_t k = 1; k <= kmax; ++k) g[k] += g_functional(grid, k, 1.0);
    mesh_sum += mesh(grid) * static_cast<double>(n);
  }
  const double m = static_cast<double>(grids);
  std::cout << "scheme=" << scheme_name(scheme) << " n=" << n << " grids=" << grids
            << " mean n*mesh=" << mesh_sum / m << "\n";
  std::cout << "k,G_k(1),k*G_k/G_1,limit\n";
  for (std::size_t k = 1; k <= kmax; ++k) {
    std::cout << k << ',' << g[k] / m << ',' << static_cast<double>(k) * g[k] / g[1] << ','
              << theoretical_limit(scheme, k) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jump and co-jump tests on irregular, asynchronous observations"};
  app.require_subcommand(1);

  RunFlags run_flags, curve_flags, density_flags, sweep_flags;
  auto* run = app.add_subcommand("run", "simulate a case and test every path");
  run_flags.attach(run);

  auto* curve = app.add_subcommand("curve", "rejection rate against the level");
  curve_flags.attach(curve);
  std::size_t curve_points = 101;
  curve->add_option("--points", curve_points, "levels on [0, 1]")->check(CLI::Range(2, 100000));

  auto* density = app.add_subcommand("density", "kernel density of the statistic");
  density_flags.attach(density);
  std::optional<double> bandwidth;
  density->add_option("--bandwidth", bandwidth, "kernel bandwidth (default: Silverman)");

  auto* sweep = app.add_subcommand("rho-sweep", "type-I and type-II proxies against rho");
  sweep_flags.attach(sweep, false);
  std::string null_case = "III-j", alt_case = "Cont";
  std::size_t sweep_points = 21;
  sweep->add_option("--null", null_case, "case with jumps");
  sweep->add_option("--alt", alt_case, "case without jumps");
  sweep->add_option("--points", sweep_points, "rho values on [0, 1]")->check(CLI::Range(2, 100000));

  auto* limits = app.add_subcommand("limits", "limit of the statistic on continuous paths");
  std::size_t limits_k = 5;
  double limits_alpha = 0.5;
  limits->add_option("--k", limits_k, "largest k");
  limits->add_option("--alt-alpha", limits_alpha, "alternating scheme parameter");

  auto* schemes = app.add_subcommand("schemes", "sampling functional diagnostics");
  std::string scheme_kind = "poisson";
  double scheme_lambda = 1.0, scheme_alpha = 0.5;
  std::size_t scheme_n = 1600, scheme_grids = 200, scheme_k = 3;
  std::uint64_t scheme_seed = 42;
  schemes->add_option("--scheme", scheme_kind, "poisson, equidistant or alternating");
  schemes->add_option("--lambda", scheme_lambda, "Poisson rate");
  schemes->add_option("--alt-alpha", scheme_alpha, "alternating scheme parameter");
  schemes->add_option("--n", scheme_n, "nominal frequency");
  schemes->add_option("--grids", scheme_grids, "grids to average");
  schemes->add_option("--k", scheme_k, "largest k");
  schemes->add_option("--seed", scheme_seed, "master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*curve) return cmd_curve(curve_flags, curve_points);
    if (*density) return cmd_density(density_flags, bandwidth);
    if (*sweep) return cmd_rho_sweep(sweep_flags, null_case, alt_case, sweep_points);
    if (*limits) return cmd_limits(limits_k, limits_alpha);
    if (*schemes)
      return cmd_schemes(parse_scheme(scheme_kind, scheme_lambda, scheme_alpha), scheme_n,
                         scheme_grids, scheme_k, scheme_seed);
  } catch (const ConditioningError& e) {
    std::cerr << "conditioning failed: " << e.what() << "\n";
    return 3;
  } catch (const DegeneratePathError& e) {
    std::cerr << "degenerate paths: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
