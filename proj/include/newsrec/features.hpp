#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "newsrec/corpus.hpp"

namespace newsrec {

/// Rolling aggregate of one user's clicks over [window_start, window_end).
struct UserProfile {
  std::string user_id;
  Timestamp window_start = 0;
  Timestamp window_end = 0;
  std::map<std::string, int> tag_freq;
  std::map<std::string, int> author_freq;
  std::map<std::string, int> section_freq;
  double mean_word_count = 0.0;
  Vector mean_embedding;
  int n_clicks = 0;
};

inline constexpr Timestamp kProfileWindow = kSecondsPerWeek;

/// Aggregates the user's clicks with at in [as_of - 7 days, as_of).
/// Unknown users get an empty profile.
UserProfile build_profile(const Corpus& corpus, std::string_view user_id, Timestamp as_of);

struct FeatureConfig {
  int hash_buckets = 16;
  int top_k = 3;
  std::size_t embedding_dim = 32;
};

struct FeatureVector {
  std::vector<double> values;
  std::uint32_t schema_version = 0;

  bool operator==(const FeatureVector&) const = default;
};

/// Ordered feature names; the version is a hash of the names, so it changes
/// exactly when the feature list does.
class FeatureSchema {
 public:
  explicit FeatureSchema(const FeatureConfig& cfg);

  const FeatureConfig& config() const { return cfg_; }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t width() const { return names_.size(); }
  std::uint32_t version() const { return version_; }
  std::size_t index_of(std::string_view name) const;

  /// Writes {"version", "width", "features": [...]} for audit.
  void write_json(const std::filesystem::path& path) const;

 private:
  FeatureConfig cfg_;
  std::vector<std::string> names_;
  std::uint32_t version_;
};

/// Article, user and user-article feature families. Throws Error when the
/// article and profile embedding widths differ from the configured dimension.
FeatureVector extract(const FeatureSchema& schema, const UserProfile& profile, const Article& article, Timestamp at);
void extract_into(const FeatureSchema& schema, const UserProfile& profile, const Article& article, Timestamp at,
                  std::span<double> out);

/// Profile-only quantities shared by every candidate scored against one profile.
struct ProfileSummary {
  double top_tag_mass = 0, top_author_mass = 0, top_section_mass = 0;
  double tag_total = 0, author_total = 0, section_total = 0;
};
ProfileSummary summarize(const UserProfile& profile, int top_k);
void extract_into(const FeatureSchema& schema, const UserProfile& profile, const ProfileSummary& summary,
                  const Article& article, Timestamp at, std::span<double> out);

/// |a ∩ b| / |a ∪ b|, 0 when both are empty.
double jaccard(const StringSet& a, const StringSet& b);

struct LabeledExample {
  FeatureVector features;
  int label = 0;
  std::string user_id;
  std::string article_id;
  Timestamp at = 0;
};

struct TrainingSet {
  std::vector<LabeledExample> examples;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  /// Set when the day had no clicks; examples is then empty.
  bool no_positives = false;
};

/// Clicks on the given calendar day are positives; an equal number of that
/// day's non-clicked impressions (first impression per user/article) are
/// sampled without replacement as negatives, or all of them if fewer exist.
TrainingSet build_training_set(const Corpus& corpus, const FeatureSchema& schema, std::int64_t day,
                               std::uint64_t rng_seed);

}  // namespace newsrec
