#include "mobo/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mobo::harness {

using nlohmann::json;

namespace {

std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

class Reader {
 public:
  Reader(const json& doc, ExperimentConfig& config) : doc_(doc), config_(config) {}

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = doc_.find(key);
    if (it == doc_.end()) {
      config_.defaults_applied.push_back(key);
      return nullptr;
    }
    return &*it;
  }

  template <class T>
  void number(const std::string& key, T& out) {
    const json* v = get(key);
    if (!v) return;
    out = as_number<T>(*v, "/" + key);
  }

  void check_unknown() const {
    for (auto it = doc_.begin(); it != doc_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("/" + it.key(), "unknown field");
    }
  }

  template <class T>
  static T as_number(const json& v, const std::string& where) {
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(where, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) return v.get<T>();
        if (v.get<std::int64_t>() < 0) throw ConfigError(where, "expected a non-negative integer");
      }
      return v.get<T>();
    } else {
      if (!v.is_number()) throw ConfigError(where, "expected a number");
      return v.get<T>();
    }
  }

  static std::vector<double> as_vector(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(as_number<double>(v[i], where + "/" + std::to_string(i)));
    }
    return out;
  }

  static std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) throw ConfigError(where, "expected a string");
    return v.get<std::string>();
  }

 private:
  const json& doc_;
  ExperimentConfig& config_;
  std::set<std::string> seen_;
};

ExternalProblem parse_external(const json& v) {
  if (!v.is_object()) throw ConfigError("/evaluator", "expected an object");
  ExternalProblem p;
  std::set<std::string> known{"command", "timeout", "lower", "upper", "objectives"};
  for (auto it = v.begin(); it != v.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError("/evaluator/" + it.key(), "unknown field");
  }
  if (!v.contains("command")) throw ConfigError("/evaluator/command", "missing");
  p.command = Reader::as_string(v["command"], "/evaluator/command");
  if (p.command.empty()) throw ConfigError("/evaluator/command", "must not be empty");
  if (v.contains("timeout")) {
    p.timeout_seconds = Reader::as_number<double>(v["timeout"], "/evaluator/timeout");
    if (!(p.timeout_seconds > 0.0)) throw ConfigError("/evaluator/timeout", "must be positive");
  }
  if (!v.contains("lower") || !v.contains("upper")) {
    throw ConfigError("/evaluator", "lower and upper bounds are required");
  }
  p.lower = Reader::as_vector(v["lower"], "/evaluator/lower");
  p.upper = Reader::as_vector(v["upper"], "/evaluator/upper");
  if (p.lower.empty() || p.lower.size() != p.upper.size()) {
    throw ConfigError("/evaluator/upper", "lower and upper must be non-empty and of equal length");
  }
  for (std::size_t i = 0; i < p.lower.size(); ++i) {
    if (!(p.lower[i] < p.upper[i])) {
      throw ConfigError("/evaluator/upper/" + std::to_string(i), "upper bound must exceed lower bound");
    }
  }
  if (v.contains("objectives")) {
    p.objectives = Reader::as_number<int>(v["objectives"], "/evaluator/objectives");
    if (p.objectives < 1) throw ConfigError("/evaluator/objectives", "must be at least 1");
  }
  return p;
}

LinearConstraint parse_constraint(const json& v, const std::string& where, Eigen::Index d) {
  if (!v.is_object()) throw ConfigError(where, "expected an object");
  LinearConstraint c;
  if (v.contains("coefficients")) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (it.key() != "coefficients" && it.key() != "bound") {
        throw ConfigError(where + "/" + it.key(), "unknown field");
      }
    }
    c.coefficients = Reader::as_vector(v["coefficients"], where + "/coefficients");
    if (!v.contains("bound")) throw ConfigError(where + "/bound", "missing");
    c.bound = Reader::as_number<double>(v["bound"], where + "/bound");
    if (static_cast<Eigen::Index>(c.coefficients.size()) != d) {
      throw ConfigError(where + "/coefficients", "expected " + std::to_string(d) + " coefficients");
    }
    return c;
  }
  if (!v.contains("variable")) throw ConfigError(where, "expected coefficients/bound or variable/lower|upper");
  const int i = Reader::as_number<int>(v["variable"], where + "/variable");
  if (i < 0 || i >= d) throw ConfigError(where + "/variable", "index out of range");
  const bool has_upper = v.contains("upper");
  const bool has_lower = v.contains("lower");
  if (has_upper == has_lower) throw ConfigError(where, "give exactly one of lower or upper");
  for (auto it = v.begin(); it != v.end(); ++it) {
    if (it.key() != "variable" && it.key() != "upper" && it.key() != "lower") {
      throw ConfigError(where + "/" + it.key(), "unknown field");
    }
  }
  c.coefficients.assign(static_cast<std::size_t>(d), 0.0);
  if (has_upper) {
    c.coefficients[static_cast<std::size_t>(i)] = 1.0;
    c.bound = Reader::as_number<double>(v["upper"], where + "/upper");
  } else {
    c.coefficients[static_cast<std::size_t>(i)] = -1.0;
    c.bound = -Reader::as_number<double>(v["lower"], where + "/lower");
  }
  return c;
}

}  // namespace

std::vector<std::uint64_t> ExperimentConfig::run_seeds() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out;
  for (int r = 0; r < repeats; ++r) out.push_back(seed + static_cast<std::uint64_t>(r));
  return out;
}

std::string ExperimentConfig::problem_name() const {
  return benchmark ? std::string(to_string(*benchmark)) : std::string("external");
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ConfigError(location(text, e.byte == 0 ? 0 : e.byte - 1), msg);
  }
  if (!doc.is_object()) throw ConfigError("/", "the configuration must be a JSON object");

  ExperimentConfig c;
  Reader r(doc, c);
  r.get("manifest");  // written by the harness, informational only
  c.defaults_applied.clear();

  if (const json* v = r.get("name")) c.name = Reader::as_string(*v, "/name");
  const json* bench = r.get("benchmark");
  const json* ext = r.get("evaluator");
  if (bench && ext) throw ConfigError("/evaluator", "give either benchmark or evaluator, not both");
  if (!bench && !ext) throw ConfigError("/benchmark", "missing (or give an evaluator)");
  if (bench) {
    const std::string name = Reader::as_string(*bench, "/benchmark");
    c.benchmark = parse_benchmark_name(name);
    if (!c.benchmark) {
      throw ConfigError("/benchmark", "unknown benchmark '" + name + "'; valid names: " + join(benchmark_names()));
    }
  } else {
    c.external = parse_external(*ext);
  }

  r.number("dimension", c.dimension);
  r.number("objectives", c.objectives);
  if (const json* v = r.get("form")) {
    const std::string f = Reader::as_string(*v, "/form");
    if (f == "scaled") {
      c.form = BenchmarkForm::Scaled;
    } else if (f == "canonical") {
      c.form = BenchmarkForm::Canonical;
    } else {
      throw ConfigError("/form", "expected 'scaled' or 'canonical'");
    }
  }
  r.number("n_init", c.n_init);
  r.number("budget", c.budget);
  r.number("seed", c.seed);
  r.number("repeats", c.repeats);
  if (const json* v = r.get("seeds")) {
    if (!v->is_array() || v->empty()) throw ConfigError("/seeds", "expected a non-empty array of integers");
    for (std::size_t i = 0; i < v->size(); ++i) {
      c.seeds.push_back(Reader::as_number<std::uint64_t>((*v)[i], "/seeds/" + std::to_string(i)));
    }
  }
  r.number("rho", c.rho);
  r.number("lambda", c.lambda);
  r.number("kappa", c.kappa);
  if (const json* v = r.get("kernel")) {
    const std::string k = Reader::as_string(*v, "/kernel");
    auto kind = parse_kernel_kind(k);
    if (!kind) throw ConfigError("/kernel", "unknown kernel '" + k + "'; valid: Matern12, Matern32, Matern52, SqExp");
    c.kernel = *kind;
  }
  if (const json* v = r.get("variants")) {
    if (v->is_string() && v->get<std::string>() == "all") {
      c.variants = AcquisitionSpec::all_variants(c.kappa);
    } else if (v->is_array() && !v->empty()) {
      for (std::size_t i = 0; i < v->size(); ++i) {
        const std::string where = "/variants/" + std::to_string(i);
        const std::string name = Reader::as_string((*v)[i], where);
        auto spec = AcquisitionSpec::parse(name, c.kappa);
        if (!spec) throw ConfigError(where, "unknown variant '" + name + "'; expected Reg|NoReg-{PI,EI,UCB}-{PI,EI,UCB}");
        c.variants.push_back(*spec);
      }
    } else {
      throw ConfigError("/variants", "expected \"all\" or a non-empty array of variant names");
    }
  } else {
    c.variants.push_back(*AcquisitionSpec::parse("Reg-UCB-EI", c.kappa));
  }
  r.number("checkpoint_every", c.checkpoint_every);
  if (const json* v = r.get("reference")) c.reference = Reader::as_vector(*v, "/reference");
  r.number("front_resolution", c.front_resolution);
  if (const json* v = r.get("output")) c.output = Reader::as_string(*v, "/output");
  r.number("workers", c.workers);
  const json* constraints = r.get("known_constraints");
  r.check_unknown();
  std::erase_if(c.defaults_applied,
                [](const std::string& k) { return k == "benchmark" || k == "evaluator" || k == "manifest"; });

  if (c.n_init < 1) throw ConfigError("/n_init", "must be at least 1");
  if (c.budget < 1) throw ConfigError("/budget", "must be at least 1");
  if (c.repeats < 1) throw ConfigError("/repeats", "must be at least 1");
  if (c.checkpoint_every < 1) throw ConfigError("/checkpoint_every", "must be at least 1");
  if (c.front_resolution < 2) throw ConfigError("/front_resolution", "must be at least 2");
  if (c.workers < 0) throw ConfigError("/workers", "must be non-negative");
  if (!(c.kappa > 0.0)) throw ConfigError("/kappa", "must be positive");
  try {
    ScalarizationSpec{ScalarizationMethod::RegularizedAugmentedTchebycheff, c.rho, c.lambda, {}}.validate(2);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/rho", e.what());
  }

  if (c.benchmark) {
    try {
      const BenchmarkSpec spec = BenchmarkSpec::make(*c.benchmark, c.dimension, c.objectives, c.form);
      c.dimension = spec.dimension;
      c.objectives = spec.objectives;
    } catch (const std::invalid_argument& e) {
      throw ConfigError("/dimension", e.what());
    }
  } else {
    const auto d = static_cast<Eigen::Index>(c.external->lower.size());
    if (c.dimension != 0 && c.dimension != d) throw ConfigError("/dimension", "disagrees with the evaluator bounds");
    if (c.objectives != 0 && c.objectives != c.external->objectives) {
      throw ConfigError("/objectives", "disagrees with evaluator.objectives");
    }
    c.dimension = d;
    c.objectives = c.external->objectives;
  }
  if (c.reference && static_cast<Eigen::Index>(c.reference->size()) != c.objectives) {
    throw ConfigError("/reference", "expected " + std::to_string(c.objectives) + " components");
  }
  if (constraints) {
    if (!constraints->is_array()) throw ConfigError("/known_constraints", "expected an array");
    for (std::size_t i = 0; i < constraints->size(); ++i) {
      c.known_constraints.push_back(
          parse_constraint((*constraints)[i], "/known_constraints/" + std::to_string(i), c.dimension));
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open configuration file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  if (c.benchmark) {
    j["benchmark"] = std::string(to_string(*c.benchmark));
    j["form"] = c.form == BenchmarkForm::Scaled ? "scaled" : "canonical";
    j["front_resolution"] = c.front_resolution;
  } else {
    j["evaluator"] = {{"command", c.external->command},
                      {"timeout", c.external->timeout_seconds},
                      {"lower", c.external->lower},
                      {"upper", c.external->upper},
                      {"objectives", c.external->objectives}};
  }
  j["dimension"] = c.dimension;
  j["objectives"] = c.objectives;
  j["n_init"] = c.n_init;
  j["budget"] = c.budget;
  j["seeds"] = c.run_seeds();
  j["variants"] = json::array();
  for (const auto& v : c.variants) j["variants"].push_back(v.name());
  j["rho"] = c.rho;
  j["lambda"] = c.lambda;
  j["kappa"] = c.kappa;
  j["kernel"] = std::string(to_string(c.kernel));
  j["checkpoint_every"] = c.checkpoint_every;
  if (c.reference) j["reference"] = *c.reference;
  j["known_constraints"] = json::array();
  for (const auto& k : c.known_constraints) {
    j["known_constraints"].push_back({{"coefficients", k.coefficients}, {"bound", k.bound}});
  }
  j["output"] = c.output.string();
  j["workers"] = c.workers;
  return j;
}

BenchmarkSpec benchmark_spec(const ExperimentConfig& config) {
  if (!config.benchmark) throw std::logic_error("benchmark_spec: configuration uses an external evaluator");
  return BenchmarkSpec::make(*config.benchmark, config.dimension, config.objectives, config.form);
}

int per_axis_resolution(Eigen::Index objectives, int points) {
  const double axes = static_cast<double>(std::max<Eigen::Index>(objectives - 1, 1));
  return std::max(2, static_cast<int>(std::ceil(std::pow(points, 1.0 / axes) - 1e-9)));
}

PointSet benchmark_front(const ExperimentConfig& config) {
  const BenchmarkSpec spec = benchmark_spec(config);
  return true_front(spec, per_axis_resolution(spec.objectives, config.front_resolution)).points;
}

OptimizerConfig optimizer_config(const ExperimentConfig& config, const AcquisitionSpec& variant,
                                 std::uint64_t seed) {
  OptimizerConfig oc;
  if (config.benchmark) {
    oc.bounds = benchmark_spec(config).bounds;
  } else {
    oc.bounds = Bounds(Eigen::Map<const Vector>(config.external->lower.data(),
                                                static_cast<Eigen::Index>(config.external->lower.size())),
                       Eigen::Map<const Vector>(config.external->upper.data(),
                                                static_cast<Eigen::Index>(config.external->upper.size())));
  }
  oc.objectives = config.objectives;
  oc.n_init = config.n_init;
  oc.seed = seed;
  oc.acquisition = variant;
  oc.acquisition.ucb_kappa = config.kappa;
  oc.rho = config.rho;
  oc.lambda = config.lambda;
  oc.kernel = config.kernel;
  for (const auto& k : config.known_constraints) {
    oc.known_constraints.add_linear(
        Eigen::Map<const Vector>(k.coefficients.data(), static_cast<Eigen::Index>(k.coefficients.size())),
        k.bound);
  }
  return oc;
}

}  // namespace mobo::harness
