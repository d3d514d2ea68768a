#include "mobo/harness/config.hpp"
#include "mobo/harness/experiment.hpp"
#include "mobo/harness/format.hpp"

#include <CLI11.hpp>
#include <glog/logging.h>

#include <fstream>
#include <iostream>

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kConfigError = 2;

using namespace mobo;
using namespace mobo::harness;

int cmd_run(const std::string& path, const std::string& output, int budget, bool full_budget, int workers) {
  ExperimentConfig config = load_config(path);
  if (!output.empty()) config.output = output;
  if (full_budget) config.budget = 1500;
  if (budget > 0) config.budget = budget;
  if (workers > 0) config.workers = workers;
  const auto outcome = run_experiment(config);
  int failed = 0;
  for (const auto& run : outcome.runs) {
    std::cout << run.run_id << ": ";
    if (!run.error.empty()) {
      ++failed;
      std::cout << "FAILED " << run.error << '\n';
      continue;
    }
    std::cout << run.evaluations << " evaluations, " << run.feasible << " feasible";
    if (run.final_metrics) {
      std::cout << ", igd " << format_double(run.final_metrics->igd) << ", hv "
                << format_double(run.final_metrics->hv);
    }
    std::cout << '\n';
  }
  std::cout << "wrote " << config.output.string() << '\n';
  return failed ? kRuntimeFailure : 0;
}

int cmd_front(const std::string& name, int d, int m, int resolution, const std::string& form,
              const std::string& output) {
  auto bench = parse_benchmark_name(name);
  if (!bench) {
    std::string names;
    for (const auto& n : benchmark_names()) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError("benchmark", "unknown benchmark '" + name + "'; valid names: " + names);
  }
  if (form != "scaled" && form != "canonical") throw ConfigError("form", "expected 'scaled' or 'canonical'");
  BenchmarkSpec spec;
  try {
    spec = BenchmarkSpec::make(*bench, d, m, form == "scaled" ? BenchmarkForm::Scaled : BenchmarkForm::Canonical);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("dimension", e.what());
  }
  const TrueFront front = true_front(spec, per_axis_resolution(spec.objectives, resolution));
  std::ofstream file;
  if (!output.empty()) {
    file.open(output, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + output);
  }
  std::ostream& out = output.empty() ? std::cout : file;
  for (Eigen::Index i = 0; i < spec.objectives; ++i) out << (i ? "," : "") << 'f' << i + 1;
  out << '\n';
  for (const auto& p : front.points) {
    for (Eigen::Index i = 0; i < p.size(); ++i) out << (i ? "," : "") << format_double(p[i]);
    out << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  google::InitGoogleLogging(argv[0]);
  FLAGS_minloglevel = google::GLOG_ERROR;

  CLI::App app{"Constrained multi-objective Bayesian optimization harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output;
  int budget = 0;
  bool full_budget = false;
  int workers = 0;
  auto* run = app.add_subcommand("run", "Run every (variant, seed) pair of an experiment");
  run->add_option("config", config_path, "Experiment configuration (JSON)")->required();
  run->add_option("-o,--output", output, "Override the output directory");
  run->add_option("--budget", budget, "Override the evaluation budget");
  run->add_flag("--full-budget", full_budget, "Use the full 1500-evaluation budget");
  run->add_option("-j,--workers", workers, "Worker threads (default: MOBO_WORKERS or core count)");

  std::vector<std::string> plot_dirs;
  std::string plot_output;
  auto* plot = app.add_subcommand("plot-data", "Long-format final metrics for plotting");
  plot->add_option("dirs", plot_dirs, "Experiment or run directories")->required();
  plot->add_option("-o,--output", plot_output, "Write to a file instead of standard output");

  std::string bench_name;
  int d = 0;
  int m = 0;
  int resolution = 500;
  std::string form = "scaled";
  std::string front_output;
  auto* front = app.add_subcommand("front", "Export a discretized true Pareto front as CSV");
  front->add_option("benchmark", bench_name, "Benchmark name")->required();
  front->add_option("-d,--dimension", d, "Input dimension (0: default)");
  front->add_option("-m,--objectives", m, "Objective count (0: default)");
  front->add_option("-r,--resolution", resolution, "Approximate number of front points");
  front->add_option("--form", form, "scaled or canonical");
  front->add_option("-o,--output", front_output, "Write to a file instead of standard output");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate-config", "Check a configuration and print it fully resolved");
  validate->add_option("config", validate_path, "Experiment configuration (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path, output, budget, full_budget, workers);
    if (*plot) {
      std::ofstream file;
      if (!plot_output.empty()) {
        file.open(plot_output, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write " + plot_output);
      }
      std::vector<std::filesystem::path> dirs(plot_dirs.begin(), plot_dirs.end());
      const int rows = emit_plot_data(dirs, plot_output.empty() ? std::cout : file, std::cerr);
      if (rows == 0) {
        std::cerr << "no completed runs found\n";
        return kRuntimeFailure;
      }
      return 0;
    }
    if (*front) return cmd_front(bench_name, d, m, resolution, form, front_output);
    if (*validate) {
      const ExperimentConfig config = load_config(validate_path);
      std::cout << to_json(config).dump(2) << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return 0;
}
