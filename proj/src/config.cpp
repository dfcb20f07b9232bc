#include "cojump/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>
#include <toml.hpp>

#include "cojump/error.hpp"

namespace cojump {
namespace {

using Keys = std::set<std::string, std::less<>>;

const toml::table* section(const toml::table& root, std::string_view name, const Keys& allowed) {
  const toml::node* node = root.get(name);
  if (!node) return nullptr;
  const toml::table* t = node->as_table();
  if (!t) throw ParameterError("config: [" + std::string(name) + "] must be a table");
  for (const auto& [key, value] : *t) {
    if (!allowed.count(key.str()))
      throw ParameterError("config: unknown key `" + std::string(key.str()) + "` in [" +
                           std::string(name) + "]");
  }
  return t;
}

std::string where(std::string_view sec, std::string_view key) {
  return std::string(sec) + "." + std::string(key);
}

template <class T>
std::optional<T> get(const toml::table& t, std::string_view sec, std::string_view key) {
  const toml::node* node = t.get(key);
  if (!node) return std::nullopt;
  if constexpr (std::is_same_v<T, double>) {
    if (auto v = node->value<double>()) return *v;
    throw ParameterError("config: " + where(sec, key) + " must be a number");
  } else if constexpr (std::is_same_v<T, bool>) {
    if (auto v = node->as_boolean()) return v->get();
    throw ParameterError("config: " + where(sec, key) + " must be a boolean");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (auto v = node->as_string()) return v->get();
    throw ParameterError("config: " + where(sec, key) + " must be a string");
  } else {
    const auto* v = node->as_integer();
    if (!v || v->get() < 0)
      throw ParameterError("config: " + where(sec, key) + " must be a non-negative integer");
    return static_cast<T>(v->get());
  }
}

template <class T>
void set(T& target, const toml::table& t, std::string_view sec, std::string_view key) {
  if (auto v = get<T>(t, sec, key)) target = *v;
}

template <class T>
void set(std::optional<T>& target, const toml::table& t, std::string_view sec,
         std::string_view key) {
  if (auto v = get<T>(t, sec, key)) target = *v;
}

nlohmann::json scheme_json(const SchemeSpec& s) {
  nlohmann::json j;
  j["kind"] = scheme_name(s);
  if (const auto* p = std::get_if<PoissonScheme>(&s)) j["lambda"] = p->lambda;
  if (const auto* a = std::get_if<AlternatingAlpha>(&s)) j["alpha"] = a->alpha;
  return j;
}

nlohmann::json jumps_json(const JumpSpec& m) {
  return {{"alpha", m.alpha}, {"kappa", m.kappa}, {"l", m.l}, {"h", m.h}};
}

}  // namespace

RunConfig parse_config(std::string_view toml_text, RunConfig base) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "config: " << e.description() << " at line " << e.source().begin.line;
    throw ParameterError(os.str());
  }
  for (const auto& [key, value] : root) {
    const std::string_view k = key.str();
    if (k != "run" && k != "test" && k != "scheme")
      throw ParameterError("config: unknown section `" + std::string(k) + "`");
  }

  RunConfig cfg = std::move(base);
  if (const auto* run = section(root, "run",
                                {"case", "dim", "n", "paths", "seed", "threads", "out", "full",
                                 "max_tries"})) {
    set(cfg.case_name, *run, "run", "case");
    if (auto d = get<std::string>(*run, "run", "dim")) cfg.dim = parse_dimension(*d);
    set(cfg.n, *run, "run", "n");
    set(cfg.paths, *run, "run", "paths");
    set(cfg.seed, *run, "run", "seed");
    set(cfg.threads, *run, "run", "threads");
    set(cfg.out, *run, "run", "out");
    set(cfg.full, *run, "run", "full");
    set(cfg.max_tries, *run, "run", "max_tries");
  }
  if (const auto* test = section(root, "test",
                                 {"alpha", "k", "corrected", "rho", "beta", "varpi", "L_n",
                                  "M_n", "b_n"})) {
    set(cfg.alpha, *test, "test", "alpha");
    set(cfg.k, *test, "test", "k");
    set(cfg.corrected, *test, "test", "corrected");
    set(cfg.rho, *test, "test", "rho");
    set(cfg.beta, *test, "test", "beta");
    set(cfg.varpi, *test, "test", "varpi");
    set(cfg.L_n, *test, "test", "L_n");
    set(cfg.M_n, *test, "test", "M_n");
    set(cfg.b_n, *test, "test", "b_n");
  }
  if (const auto* sch = section(root, "scheme", {"kind", "lambda", "alpha"})) {
    const auto kind = get<std::string>(*sch, "scheme", "kind");
    if (!kind) throw ParameterError("config: [scheme] needs `kind`");
    if (*kind == "poisson") {
      PoissonScheme p;
      set(p.lambda, *sch, "scheme", "lambda");
      cfg.scheme = p;
    } else if (*kind == "equidistant") {
      cfg.scheme = Equidistant{};
    } else if (*kind == "alternating") {
      AlternatingAlpha a;
      set(a.alpha, *sch, "scheme", "alpha");
      cfg.scheme = a;
    } else {
      throw ParameterError("config: unknown scheme kind `" + *kind + "`");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ParameterError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

Dimension parse_dimension(std::string_view s) {
  if (s == "uni") return Dimension::kUni;
  if (s == "biv") return Dimension::kBiv;
  throw ParameterError("dimension must be `uni` or `biv`, got `" + std::string(s) + "`");
}

Dimension resolve_dimension(const RunConfig& cfg) {
  if (cfg.dim) return *cfg.dim;
  const auto dims = case_dimensions(cfg.case_name);
  if (dims.empty()) throw ParameterError("unknown case `" + cfg.case_name + "`");
  for (auto d : dims)
    if (d == Dimension::kUni) return d;
  return dims.front();
}

double default_rho(Dimension dim, const SchemeSpec& scheme) noexcept {
  if (dim == Dimension::kBiv) return 0.75;
  return std::holds_alternative<Equidistant>(scheme) ? 0.99 : 0.9;
}

McRunSpec to_run_spec(const RunConfig& cfg) {
  if (cfg.n > kDeskMaxN && !cfg.full)
    throw ParameterError("n = " + std::to_string(cfg.n) + " exceeds " +
                         std::to_string(kDeskMaxN) + "; pass --full to allow it");
  if (cfg.n < 3) throw ParameterError("n must be >= 3");
  const Dimension dim = resolve_dimension(cfg);

  McRunSpec spec;
  spec.experiment = find_case(cfg.case_name, dim);
  if (cfg.scheme) {
    spec.experiment.scheme1 = *cfg.scheme;
    spec.experiment.scheme2 = *cfg.scheme;
  }
  spec.n = cfg.n;
  spec.paths = cfg.paths;
  spec.seed = cfg.seed;
  spec.threads = cfg.threads;
  spec.max_tries = cfg.max_tries;
  spec.use_corrected = cfg.corrected;
  spec.max_degenerate = cfg.paths / 10;

  BootstrapConfig b = BootstrapConfig::defaults_for(cfg.n);
  b.alpha = cfg.alpha;
  b.k = dim == Dimension::kUni ? cfg.k : 2;
  b.rho_corr = cfg.rho.value_or(default_rho(dim, spec.experiment.scheme1));
  b.thr.beta = cfg.beta;
  b.thr.varpi = cfg.varpi;
  if (cfg.L_n) b.L_n = *cfg.L_n;
  if (cfg.M_n) b.M_n = *cfg.M_n;
  if (cfg.b_n) b.bw.b_n = *cfg.b_n;
  spec.cfg = b;
  validate(spec);
  return spec;
}

std::string meta_json(const RunConfig& cfg, const McRunSpec& spec, const std::string& command) {
  const ExperimentCase& ex = spec.experiment;
  nlohmann::json model;
  if (ex.dim == Dimension::kUni) {
    model = {{"sigma2", ex.uni.sigma2}, {"jumps", jumps_json(ex.uni.jumps)}, {"x0", ex.uni.x0}};
  } else {
    model = {{"sigma2_1", ex.biv.sigma2_1}, {"sigma2_2", ex.biv.sigma2_2},
             {"rho", ex.biv.rho},           {"jump1", jumps_json(ex.biv.jump1)},
             {"jump2", jumps_json(ex.biv.jump2)}, {"jump3", jumps_json(ex.biv.jump3)},
             {"x0_1", ex.biv.x0_1},         {"x0_2", ex.biv.x0_2}};
  }
  nlohmann::json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["rng"] = "philox4x32-10";
  j["compiler"] = __VERSION__;
  j["seed"] = spec.seed;
  j["case"] = {{"name", ex.name},
               {"dim", dimension_name(ex.dim)},
               {"requirement", requirement_name(ex.requirement)},
               {"model", model},
               {"scheme1", scheme_json(ex.scheme1)},
               {"scheme2", scheme_json(ex.scheme2)}};
  j["run"] = {{"n", spec.n},
              {"paths", spec.paths},
              {"threads", spec.threads},
              {"horizon", spec.horizon},
              {"max_tries", spec.max_tries},
              {"max_degenerate", spec.max_degenerate.value_or(spec.paths)},
              {"full", cfg.full},
              {"out", cfg.out}};
  j["test"] = {{"alpha", spec.cfg.alpha},
               {"k", spec.cfg.k},
               {"corrected", spec.use_corrected},
               {"rho", spec.cfg.rho_corr},
               {"beta", spec.cfg.thr.beta},
               {"varpi", spec.cfg.thr.varpi},
               {"L_n", spec.cfg.L_n},
               {"M_n", spec.cfg.M_n},
               {"b_n", spec.cfg.bw.b_n}};
  return j.dump(2) + "\n";
}

}  // namespace cojump
