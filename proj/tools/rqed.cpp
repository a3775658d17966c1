#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rqed/experiments.hpp"

namespace {

int threads_from_env(int fallback) {
  const char* env = std::getenv("RQED_THREADS");
  if (!env || !*env) return fallback;
  try {
    std::size_t pos = 0;
    const int n = std::stoi(env, &pos);
    if (pos != std::string(env).size() || n < 1) throw std::invalid_argument(env);
    return n;
  } catch (const std::exception&) {
    throw rqed::ConfigError(std::string("RQED_THREADS: expected a positive integer, got '") + env + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renormalized light-matter models: config-driven experiments writing CSV"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 1;
  double seed_tolerance = -1.0;

  for (const auto& name : rqed::experiment_names()) {
    auto* sub = app.add_subcommand(name, "Run the " + name + " experiment");
    sub->add_option("--config", config_path, "Config file (key = value)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory")->required();
    sub->add_option("--threads", threads, "Worker threads (RQED_THREADS overrides)")->check(CLI::PositiveNumber);
    sub->add_option("--seed-tolerance", seed_tolerance,
                    "Flag resolvent roots farther than X omega_c from their seed")
        ->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rqed::kExitConfig;
  }

  const std::string experiment = app.get_subcommands().front()->get_name();
  try {
    rqed::RunOptions opt;
    opt.threads = threads_from_env(threads);
    if (seed_tolerance > 0.0) opt.seed_tolerance = seed_tolerance;
    const auto cfg = rqed::Config::load(config_path);
    const auto result = rqed::run_experiment(experiment, cfg, out_dir, opt);
    for (const auto& f : result.files) std::cout << f.string() << "\n";
    return result.exit_code;
  } catch (const rqed::ConfigError& e) {
    std::cerr << "rqed: config error: " << e.what() << "\n";
    return rqed::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "rqed: " << e.what() << "\n";
    return rqed::kExitNumerical;
  }
}
