#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "newsrec/eval.hpp"
#include "newsrec/features.hpp"
#include "newsrec/ranker.hpp"
#include "newsrec/synthetic.hpp"

namespace newsrec {

/// Externally supplied corpus.
struct CorpusFiles {
  std::filesystem::path articles;
  std::filesystem::path events;
  std::filesystem::path vectors;
  /// Editorial updates; synthesized when absent.
  std::optional<std::filesystem::path> manual;
};

struct ExperimentConfig {
  /// Drives every stochastic choice (world, negative sampling, editor noise, random scorer).
  std::uint64_t seed = 1;
  std::filesystem::path out = "out";
  /// Exactly one corpus source.
  std::optional<SyntheticWorldConfig> synthetic;
  std::optional<CorpusFiles> files;
  FeatureConfig features;
  PipelineConfig pipeline;
  /// Days between the first event and the start of the serving clock, unless
  /// pipeline.t_start is given.
  int warmup_days = 0;
  ManualSynthesisConfig manual;
  std::vector<PipelineArm> treatments{{Treatment::Baseline, 0.5}, {Treatment::Dynamism, 0.5}};
  OfflineEvalConfig offline;
  CompareConfig compare;

  /// Every violated field, as "path: message".
  std::vector<std::string> validate() const;
  /// Re-seeds every component from one value.
  void set_seed(std::uint64_t s);
  /// Overrides the blend weight of every Dynamism arm.
  void set_lambda(double lambda);
};

/// Parses a JSON config. Unknown keys and type mismatches are reported along
/// with validation failures in a single Error.
ExperimentConfig parse_config(std::string_view text, const std::string& source = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Artifact locations under the output directory.
struct Layout {
  std::filesystem::path root;
  std::filesystem::path corpus_dir() const { return root / "corpus"; }
  std::filesystem::path articles() const { return corpus_dir() / "articles.jsonl"; }
  std::filesystem::path events() const { return corpus_dir() / "events.jsonl"; }
  std::filesystem::path vectors() const { return corpus_dir() / "vectors.txt"; }
  std::filesystem::path manual() const { return corpus_dir() / "manual.jsonl"; }
  std::filesystem::path ground_truth() const { return corpus_dir() / "ground_truth.json"; }
  std::filesystem::path models_dir() const { return root / "models"; }
  std::filesystem::path model_index() const { return models_dir() / "index.json"; }
  std::filesystem::path schema() const { return models_dir() / "schema.json"; }
  std::filesystem::path emissions_dir() const { return root / "emissions"; }
  std::filesystem::path emissions(std::string_view treatment) const {
    return emissions_dir() / (std::string(treatment) + ".jsonl");
  }
  std::filesystem::path reports_dir() const { return root / "reports"; }
};

/// Serving clock with the warm-up applied.
PipelineConfig resolve_pipeline(const ExperimentConfig& cfg, const Corpus& corpus);

/// Writes corpus/{articles,events}.jsonl, vectors.txt and manual.jsonl (plus
/// ground_truth.json for synthetic worlds). Returns the files written.
std::vector<std::filesystem::path> cmd_generate(const ExperimentConfig& cfg);
/// Nightly models as models/model-YYYYMMDD.json with index.json and schema.json.
std::vector<std::filesystem::path> cmd_train(const ExperimentConfig& cfg);
/// One emission log per treatment; `only` restricts to a single treatment.
std::vector<std::filesystem::path> cmd_run(const ExperimentConfig& cfg, std::optional<Treatment> only = std::nullopt);
/// accuracy.{json,txt} plus metrics_<treatment>.csv for every emission log present.
std::vector<std::filesystem::path> cmd_evaluate(const ExperimentConfig& cfg);
/// study1, study2 and behavior_shift reports as .json and .txt.
std::vector<std::filesystem::path> cmd_compare(const ExperimentConfig& cfg);

/// Loaders shared by the commands; each throws Error naming a missing file.
Corpus load_output_corpus(const Layout& layout);
std::vector<NightlyModel> load_models(const Layout& layout, const FeatureSchema& schema);

}  // namespace newsrec
