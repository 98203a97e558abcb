#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "newsrec/experiment.hpp"

using namespace newsrec;

int main(int argc, char** argv) {
  CLI::App app{"Content-based news recommender: generate, train, run, evaluate, compare"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> treatment;
  std::optional<double> lambda;
  std::optional<std::string> variant;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "Overrides the config seed");
    cmd->add_option("--out", out, "Overrides the output directory");
  };
  CLI::App* generate = app.add_subcommand("generate", "Generate or ingest the corpus");
  CLI::App* train = app.add_subcommand("train", "Train the nightly models");
  CLI::App* run = app.add_subcommand("run", "Run the serving pipeline, one emission log per treatment");
  CLI::App* evaluate = app.add_subcommand("evaluate", "Offline accuracy and per-treatment metric samples");
  CLI::App* compare = app.add_subcommand("compare", "Manual-vs-recommender, treatment A/B and behavior shift");
  for (auto* cmd : {generate, train, run, evaluate, compare}) common(cmd);
  for (auto* cmd : {run, evaluate, compare}) {
    cmd->add_option("--lambda", lambda, "Blend weight of the dynamism treatment")->check(CLI::Range(0.0, 1.0));
  }
  run->add_option("--treatment", treatment, "Run a single treatment")
      ->check(CLI::IsMember({"baseline", "dynamism"}));
  compare->add_option("--variant", variant, "t-test variant")->check(CLI::IsMember({"student", "welch"}));

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.set_seed(*seed);
    if (out) cfg.out = *out;
    if (lambda) cfg.set_lambda(*lambda);
    if (variant) cfg.compare.variant = *parse_variant(*variant);

    std::vector<std::filesystem::path> written;
    if (generate->parsed()) {
      written = cmd_generate(cfg);
    } else if (train->parsed()) {
      written = cmd_train(cfg);
    } else if (run->parsed()) {
      std::optional<Treatment> only;
      if (treatment) only = parse_treatment(*treatment);
      written = cmd_run(cfg, only);
    } else if (evaluate->parsed()) {
      written = cmd_evaluate(cfg);
    } else {
      written = cmd_compare(cfg);
    }
    for (const auto& p : written) std::cout << p.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "newsrec: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
