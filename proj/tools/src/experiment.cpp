#include "mobo/harness/experiment.hpp"

#include "mobo/harness/external.hpp"
#include "mobo/harness/format.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

namespace mobo::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

json metrics_json(const MetricsReport& m) {
  return {{"gd", number_or_string(m.gd)},
          {"igd", number_or_string(m.igd)},
          {"hv", number_or_string(m.hv)},
          {"hv_ideal", number_or_string(m.hv_ideal)},
          {"lrhd", number_or_string(m.lrhd)},
          {"front_size", m.front_size},
          {"reference_point", std::vector<double>(m.reference_point.data(),
                                                  m.reference_point.data() + m.reference_point.size())}};
}

json summary_json(const RunSummary& s) {
  json j{{"run_id", s.run_id},     {"variant", s.variant},       {"benchmark", s.benchmark},
         {"seed", s.seed},         {"evaluations", s.evaluations}, {"feasible", s.feasible},
         {"status", s.error.empty() ? "ok" : "error"}, {"warnings", s.warnings},
         {"elapsed_seconds", s.elapsed_seconds}};
  j["final"] = s.final_metrics ? metrics_json(*s.final_metrics) : json(nullptr);
  if (!s.error.empty()) j["error"] = s.error;
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

// Read a number written by number_or_string.
std::optional<double> read_number(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
  }
  return std::nullopt;
}

}  // namespace

std::vector<RunSpec> plan_runs(const ExperimentConfig& config) {
  std::vector<RunSpec> out;
  for (const auto& variant : config.variants) {
    for (std::uint64_t seed : config.run_seeds()) {
      RunSpec spec;
      spec.variant = variant;
      spec.seed = seed;
      spec.run_id = config.problem_name() + "_" + variant.name() + "_s" + std::to_string(seed);
      out.push_back(std::move(spec));
    }
  }
  return out;
}

void write_results_csv(std::ostream& out, const RunSpec& spec, const std::string& benchmark,
                       const RunResult& result) {
  std::map<int, const MetricsReport*> checkpoints;
  for (const auto& c : result.checkpoints) checkpoints[c.evaluations] = &c.metrics;
  out << kCsvHeader << '\n';
  const std::string prefix =
      spec.run_id + ',' + spec.variant.name() + ',' + benchmark + ',' + std::to_string(spec.seed) + ',';
  for (std::size_t i = 0; i < result.dataset.size(); ++i) {
    const ObservationRecord& r = result.dataset[i];
    const int evaluation = static_cast<int>(i) + 1;
    out << prefix << evaluation << ',' << format_vector(r.x) << ',' << (r.feasible ? 1 : 0) << ','
        << (r.objectives ? format_vector(*r.objectives) : "") << ','
        << (r.scalarized ? format_double(*r.scalarized) : "");
    auto it = checkpoints.find(evaluation);
    if (it != checkpoints.end()) {
      const MetricsReport& m = *it->second;
      out << ',' << format_double(m.gd) << ',' << format_double(m.igd) << ',' << format_double(m.hv) << ','
          << format_double(m.lrhd);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

RunSummary execute_run(const ExperimentConfig& config, const RunSpec& spec, const fs::path& dir,
                       const PointSet* true_front) {
  RunSummary summary;
  summary.run_id = spec.run_id;
  summary.variant = spec.variant.name();
  summary.benchmark = config.problem_name();
  summary.seed = spec.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    fs::create_directories(dir);
    fs::remove(dir / "error.txt");
    const OptimizerConfig oc = optimizer_config(config, spec.variant, spec.seed);
    RunOptions options;
    options.budget = config.budget;
    options.checkpoint_every = config.checkpoint_every;
    if (config.reference) {
      options.reference = Eigen::Map<const Vector>(config.reference->data(),
                                                   static_cast<Eigen::Index>(config.reference->size()));
    }

    RunResult result;
    if (config.benchmark) {
      const BenchmarkSpec bench = benchmark_spec(config);
      options.true_front = true_front ? *true_front : benchmark_front(config);
      result = run(oc, [&](const Vector& x) { return EvaluationResult::success(evaluate(bench, x)); }, options);
    } else {
      std::ofstream log(dir / "evaluator.log", std::ios::binary);
      int call = 0;
      const ExternalProblem& ext = *config.external;
      const Evaluator evaluator = [&](const Vector& x) {
        const ExternalOutcome o = external_evaluate(ext.command, x, ext.timeout_seconds);
        log << "evaluation " << ++call << ' ' << to_string(o.status) << " exit=" << o.exit_code
            << " output=" << o.raw_output << '\n';
        return o.result;
      };
      result = run(oc, evaluator, options);
    }

    std::ofstream csv(dir / "results.csv", std::ios::binary);
    write_results_csv(csv, spec, summary.benchmark, result);
    csv.close();
    if (!csv) throw std::runtime_error("failed writing results.csv");

    summary.evaluations = static_cast<int>(result.dataset.size());
    summary.feasible = static_cast<int>(
        std::count_if(result.dataset.begin(), result.dataset.end(), [](const auto& r) { return r.feasible; }));
    if (!result.checkpoints.empty()) summary.final_metrics = result.checkpoints.back().metrics;
    summary.warnings = result.warnings;
  } catch (const std::exception& e) {
    summary.error = e.what();
  }
  summary.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    if (!summary.error.empty()) write_text(dir / "error.txt", summary.error + "\n");
    write_text(dir / "summary.json", summary_json(summary).dump(2) + "\n");
  } catch (const std::exception& e) {
    if (summary.error.empty()) summary.error = e.what();
  }
  return summary;
}

bool ExperimentOutcome::all_succeeded() const {
  return std::all_of(runs.begin(), runs.end(), [](const RunSummary& s) { return s.error.empty(); });
}

int worker_count(const ExperimentConfig& config) {
  if (config.workers > 0) return config.workers;
  if (const char* env = std::getenv("MOBO_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  const std::vector<RunSpec> runs = plan_runs(config);
  fs::create_directories(config.output);

  std::optional<PointSet> front;
  if (config.benchmark) front = benchmark_front(config);

  ExperimentOutcome outcome;
  outcome.runs.resize(runs.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      outcome.runs[i] = execute_run(config, runs[i], config.output / runs[i].run_id, front ? &*front : nullptr);
    }
  };
  const int workers = std::min<int>(worker_count(config), static_cast<int>(runs.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  json top{{"name", config.name}, {"runs", json::array()}};
  for (const auto& s : outcome.runs) {
    json entry = summary_json(s);
    entry["dir"] = s.run_id;
    top["runs"].push_back(std::move(entry));
  }
  write_text(config.output / "summary.json", top.dump(2) + "\n");

  json manifest = to_json(config);
  json meta{{"defaults_applied", config.defaults_applied},
            {"normalization", "objectives min-max normalized over feasible records before scalarizing"},
            {"reference_point", config.reference ? "configured" : "true-front nadir plus 10% of its range"},
            {"gd_igd_aggregate", "sqrt(sum of nearest distances) / n"},
            {"fit_starts", FitConfig{}.starts},
            {"acquisition_probes", AcquisitionOptimizerConfig{}.probes},
            {"acquisition_restarts", AcquisitionOptimizerConfig{}.restarts},
            {"runs", json::array()}};
  for (const auto& r : runs) meta["runs"].push_back(r.run_id);
  manifest["manifest"] = meta;
  write_text(config.output / "manifest.json", manifest.dump(2) + "\n");
  return outcome;
}

int emit_plot_data(const std::vector<fs::path>& dirs, std::ostream& out, std::ostream& warnings) {
  struct Row {
    std::string variant;
    std::string benchmark;
    std::uint64_t seed;
    std::string metric;
    std::string value;
  };
  std::vector<Row> rows;
  const auto add_run = [&](const fs::path& dir, const json& s) {
    if (s.value("status", "") != "ok" || !s.contains("final") || s["final"].is_null()) {
      warnings << "skipping " << dir.string() << ": run has no final metrics\n";
      return;
    }
    const json& f = s["final"];
    const auto gd = read_number(f.value("gd", json()));
    const auto igd = read_number(f.value("igd", json()));
    const auto lr = read_number(f.value("lrhd", json()));
    if (!gd || !igd || !lr) {
      warnings << "skipping " << dir.string() << ": malformed metrics\n";
      return;
    }
    const auto value = [](double v) { return std::isinf(v) && v < 0 ? std::string("exact") : format_double(v); };
    const std::string variant = s.value("variant", "");
    const std::string benchmark = s.value("benchmark", "");
    const std::uint64_t seed = s.value("seed", std::uint64_t{0});
    rows.push_back({variant, benchmark, seed, "log_gd", value(std::log(*gd))});
    rows.push_back({variant, benchmark, seed, "log_igd", value(std::log(*igd))});
    rows.push_back({variant, benchmark, seed, "lrhd", value(*lr)});
  };
  const auto read_json = [&](const fs::path& path) -> std::optional<json> {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    return j;
  };

  for (const auto& dir : dirs) {
    auto summary = read_json(dir / "summary.json");
    if (!summary) {
      warnings << "skipping " << dir.string() << ": missing or unreadable summary.json\n";
      continue;
    }
    if (summary->contains("runs")) {
      for (const auto& entry : (*summary)["runs"]) {
        const fs::path run_dir = dir / entry.value("dir", "");
        auto run_summary = read_json(run_dir / "summary.json");
        if (!run_summary) {
          warnings << "skipping " << run_dir.string() << ": missing or unreadable summary.json\n";
          continue;
        }
        add_run(run_dir, *run_summary);
      }
    } else {
      add_run(dir, *summary);
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.variant, a.benchmark, a.seed, a.metric) < std::tie(b.variant, b.benchmark, b.seed, b.metric);
  });
  out << "variant,benchmark,seed,metric,value\n";
  for (const auto& r : rows) {
    out << r.variant << ',' << r.benchmark << ',' << r.seed << ',' << r.metric << ',' << r.value << '\n';
  }
  return static_cast<int>(rows.size());
}

}  // namespace mobo::harness
