#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "newsrec/corpus.hpp"
#include "newsrec/features.hpp"
#include "newsrec/ranker.hpp"
#include "newsrec/stats.hpp"
#include "newsrec/synthetic.hpp"
#include "newsrec/usefulness.hpp"

namespace newsrec {

/// Binary-gain NDCG with log2(rank + 1) discounts. nullopt when the ranking
/// is empty or contains none of the clicked ids.
std::optional<double> ndcg(std::span<const std::string> ranking, const StringSet& clicked);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  std::size_t hits = 0;
};

/// Precision keeps k as its denominator even when the ranking is shorter.
/// nullopt when nothing was clicked.
std::optional<PrecisionRecall> precision_recall_at(std::span<const std::string> ranking, const StringSet& clicked,
                                                   std::size_t k);

struct AccuracyReport {
  double ndcg = 0.0;
  std::map<std::size_t, double> p_at;
  std::map<std::size_t, double> r_at;
  std::size_t n_user_days = 0;
  /// Days with clicks that the scorer could not serve.
  std::vector<std::int64_t> skipped_days;
};

/// Scores a (user, article) pair at a time; used to rank a user-day.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual bool has_day(std::int64_t day) const;
  virtual double score(const Corpus& corpus, const std::string& user, const Article& article, Timestamp at,
                       std::int64_t day) const = 0;
};

/// The latest nightly model trained on or before the evaluation day.
class ModelScorer final : public Scorer {
 public:
  ModelScorer(const std::vector<NightlyModel>& models, const FeatureSchema& schema);
  bool has_day(std::int64_t day) const override;
  double score(const Corpus& corpus, const std::string& user, const Article& article, Timestamp at,
               std::int64_t day) const override;

 private:
  const NightlyModel* model_for(std::int64_t day) const;
  const std::vector<NightlyModel>& models_;
  const FeatureSchema& schema_;
};

/// Ground-truth click probability of a synthetic world.
class OracleScorer final : public Scorer {
 public:
  explicit OracleScorer(const GroundTruth& truth) : truth_(truth) {}
  double score(const Corpus& corpus, const std::string& user, const Article& article, Timestamp at,
               std::int64_t day) const override;

 private:
  const GroundTruth& truth_;
};

/// Uniform scores from a hash of (seed, user, article).
class RandomScorer final : public Scorer {
 public:
  explicit RandomScorer(std::uint64_t seed) : seed_(seed) {}
  double score(const Corpus& corpus, const std::string& user, const Article& article, Timestamp at,
               std::int64_t day) const override;

 private:
  std::uint64_t seed_;
};

/// One user's displayed articles on one day (first-display order and time)
/// and the subset they clicked.
struct UserDay {
  std::string user;
  std::int64_t day = 0;
  std::vector<std::string> displayed;
  std::vector<Timestamp> first_seen;
  StringSet clicked;
};

/// User-days with at least one click, ordered by (day, user). Days are
/// calendar days within [first_day, last_day].
std::vector<UserDay> user_days(const Corpus& corpus, std::int64_t first_day, std::int64_t last_day);

struct OfflineEvalConfig {
  std::vector<std::size_t> ks{5, 10};
  /// Defaults to the day after the first event (so a model can exist) through the last event day.
  std::optional<std::int64_t> first_day;
  std::optional<std::int64_t> last_day;
};

/// Ranks each user-day's displayed articles by score at first display and
/// macro-averages NDCG, P@k and R@k over user-days.
AccuracyReport offline_eval(const Corpus& corpus, const Scorer& scorer, const OfflineEvalConfig& cfg = {});

struct CompareConfig {
  std::size_t top_n = 5;
  TTestVariant variant = TTestVariant::Student;
  std::vector<Section> sections{Section::MNWidget, Section::MissedLW};
  bool skip_fallback = true;
};

/// Named sample sets, e.g. "dynamism.mnwidget" or "diversity.tags.mnwidget".
using MetricSets = std::map<std::string, std::vector<double>>;

/// Usefulness and accuracy samples of one treatment stream, tagged with the label.
std::vector<MetricSample> treatment_samples(const std::vector<RankedList>& stream, const Corpus& corpus,
                                            const CompareConfig& cfg, const std::string& treatment = {});
/// Samples grouped by "metric[.attribute][.scope]", in sample order.
MetricSets to_sets(const std::vector<MetricSample>& samples);
MetricSets treatment_metrics(const std::vector<RankedList>& stream, const Corpus& corpus, const CompareConfig& cfg);

/// t-test per metric present in both sets with at least two samples on each side.
std::vector<ComparisonReport> compare_sets(const MetricSets& a, const MetricSets& b, TTestVariant variant);

/// Study-2 style A/B: throws Error when either stream is empty.
std::vector<ComparisonReport> compare_treatments(const std::vector<RankedList>& a, const std::vector<RankedList>& b,
                                                 const Corpus& corpus, const CompareConfig& cfg = {});

struct ManualComparison {
  MetricSets manual;
  MetricSets recsys;
  std::vector<ComparisonReport> reports;
  std::size_t aligned_pairs = 0;
};

/// Study-1 style editorial-vs-personalized comparison. The recsys stream is
/// reduced to its MNPage lists and compared on their top_n prefixes.
ManualComparison compare_manual(const std::vector<RankedList>& manual, const std::vector<RankedList>& recsys,
                                const Corpus& corpus, const CompareConfig& cfg = {});

struct Period {
  Timestamp from = 0;
  Timestamp to = 0;  // exclusive
};

/// Daily per-user click diversity per attribute and daily AllUsers click
/// coverage, before vs after. Throws Error when a period has no clicks.
std::vector<ComparisonReport> behavior_shift(const Corpus& corpus, Period before, Period after,
                                             TTestVariant variant = TTestVariant::Student,
                                             MetricSets* before_sets = nullptr, MetricSets* after_sets = nullptr);

/// Each day's clicks as one list per user, for reuse with coverage().
std::vector<RankedList> click_lists(const Corpus& corpus, Period period);

void write_report_json(const std::vector<ComparisonReport>& reports, const std::filesystem::path& path);
void write_report_json(const AccuracyReport& report, const std::filesystem::path& path);
/// One object keyed by scorer name.
void write_report_json(const std::vector<std::pair<std::string, AccuracyReport>>& reports,
                       const std::filesystem::path& path);
std::string format_table(const std::vector<ComparisonReport>& reports, const std::string& label_a,
                         const std::string& label_b);
std::string format_table(const AccuracyReport& report);
std::string format_table(const std::vector<std::pair<std::string, AccuracyReport>>& reports);

}  // namespace newsrec
