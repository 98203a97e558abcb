#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "newsrec/corpus.hpp"
#include "newsrec/features.hpp"
#include "newsrec/gbdt.hpp"

namespace newsrec {

enum class Section { Manual, MNWidget, MissedLW, MNPage };
std::string_view to_string(Section s);
std::optional<Section> parse_section(std::string_view s);

/// User id used for the non-personalized editorial stream.
inline const std::string kManualUser = "__manual__";

struct RankedItem {
  std::string article_id;
  double score = 0.0;
  /// Model confidence reached the RecommendedLabel threshold.
  bool recommended = false;

  bool operator==(const RankedItem&) const = default;
};

struct RankedList {
  std::string user_id;
  Section section = Section::MNPage;
  Timestamp at = 0;
  std::vector<RankedItem> items;
  /// No model existed yet; items are ordered by recency.
  bool fallback = false;

  bool operator==(const RankedList&) const = default;
};

enum class Treatment { Baseline, Dynamism };
std::string_view to_string(Treatment t);
std::optional<Treatment> parse_treatment(std::string_view s);

struct PipelineConfig {
  Timestamp candidate_window = kSecondsPerWeek;
  Timestamp refresh_interval = kSecondsPerHour;
  int nightly_train_hour = 3;
  int training_days = 7;
  Treatment treatment = Treatment::Baseline;
  double lambda = 0.5;
  double rec_label_threshold = 0.5;
  /// Start of the simulated clock and the reference time of the recency score.
  /// Defaults to the UTC midnight of the first event.
  std::optional<Timestamp> t_start;
  /// End of the simulated clock (exclusive). Defaults to the midnight after the last event.
  std::optional<Timestamp> t_end;
  std::size_t widget_size = 5;
  std::size_t missed_size = 5;
  /// Cap on stored MNPage items per emission; 0 keeps the full candidate list.
  std::size_t page_size = 0;
  TrainConfig train;
  std::uint64_t seed = 0;

  std::vector<std::string> validate() const;
};

/// Indices (into corpus.articles()) of articles with published_at in (at - window, at].
std::vector<std::size_t> candidates(const Corpus& corpus, Timestamp at, Timestamp window);

/// Descending score; ties go to the newer article, then the smaller id.
void sort_items(std::vector<RankedItem>& items, const Corpus& corpus);

/// Scores every candidate with the model (section = MNPage).
RankedList rank(const TreeEnsemble& model, const FeatureSchema& schema, const UserProfile& profile,
                const Corpus& corpus, const std::vector<std::size_t>& candidate_indices, Timestamp at,
                double rec_label_threshold = 0.5);

struct SectionLists {
  RankedList widget;  // age <= 24h, capped
  RankedList missed;  // 24h < age <= 7d, capped
  RankedList page;    // the full list
};

SectionLists slice_sections(const RankedList& full, const Corpus& corpus, Timestamp at, std::size_t widget_size = 5,
                            std::size_t missed_size = 5);

/// 1 - 1 / (1 + ln(1 + hours since t_start)); 0 for articles published before t_start.
double dyn_score(const Article& article, Timestamp t_start);
double dyn_score(Timestamp published_at, Timestamp t_start);

/// Rescores items as lambda * score + (1 - lambda) * Dyn and re-sorts. Throws
/// Error when lambda is outside [0, 1].
RankedList rerank(const RankedList& full, const Corpus& corpus, double lambda, Timestamp t_start);

struct NightlyModel {
  Timestamp trained_at = 0;
  TreeEnsemble model;
};

/// One model per nightly slot inside the horizon, each trained on the
/// preceding training_days calendar days. Nights without trainable data are
/// omitted.
std::vector<NightlyModel> train_nightly(const Corpus& corpus, const FeatureSchema& schema, const PipelineConfig& cfg);

struct PipelineArm {
  Treatment treatment = Treatment::Baseline;
  double lambda = 0.5;
};

/// Simulated serving clock. Each user's lists are regenerated every
/// refresh_interval and right after each of their clicks; every regeneration
/// emits MNWidget, MissedLW and MNPage lists. Output is sorted by (at, user, section).
std::vector<RankedList> run_pipeline(const Corpus& corpus, const FeatureSchema& schema, const PipelineConfig& cfg,
                                     const std::vector<std::string>& users);
std::vector<RankedList> run_pipeline(const Corpus& corpus, const FeatureSchema& schema, const PipelineConfig& cfg,
                                     const std::vector<std::string>& users, const std::vector<NightlyModel>& models);
/// Several treatments over identical model scores, one stream per arm.
std::vector<std::vector<RankedList>> run_pipeline_arms(const Corpus& corpus, const FeatureSchema& schema,
                                                       const PipelineConfig& cfg, const std::vector<std::string>& users,
                                                       const std::vector<NightlyModel>& models,
                                                       const std::vector<PipelineArm>& arms);

/// Resolved [t_start, t_end) of the simulated clock.
std::pair<Timestamp, Timestamp> pipeline_horizon(const Corpus& corpus, const PipelineConfig& cfg);

struct ManualSynthesisConfig {
  int min_updates_per_day = 8;
  int max_updates_per_day = 16;
  std::size_t list_size = 5;
  Timestamp freshness = 36 * kSecondsPerHour;
  double editor_noise = 0.5;
  std::uint64_t seed = 0;
};

/// Editorial top-5 stream from updates (validated: at most 5 items, all
/// published by the update time).
std::vector<RankedList> manual_lists(const std::vector<EditorialUpdate>& updates, const Corpus& corpus);
/// Synthesized stand-in: irregular daily updates, each the top 5 of recent
/// articles by recent-click popularity plus editor noise.
std::vector<EditorialUpdate> synthesize_manual_updates(const Corpus& corpus, Timestamp from, Timestamp to,
                                                       const ManualSynthesisConfig& cfg);

std::vector<EditorialUpdate> read_manual_jsonl(const std::filesystem::path& path);
void write_manual_jsonl(const std::vector<EditorialUpdate>& updates, const std::filesystem::path& path);

void write_emissions_jsonl(const std::vector<RankedList>& lists, const std::filesystem::path& path);
std::vector<RankedList> read_emissions_jsonl(const std::filesystem::path& path);

}  // namespace newsrec
