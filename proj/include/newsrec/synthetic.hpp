#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "newsrec/corpus.hpp"
#include "newsrec/embedding.hpp"

namespace newsrec {

/// Latent click model: logit = bias + affinity_weight * affinity[topic]
///   + quality_weight * quality - age_weight_per_day * age_days.
struct ClickModel {
  double bias = -3.0;
  double affinity_weight = 8.0;
  double quality_weight = 0.7;
  double age_weight_per_day = 0.8;
  double click_threshold = 0.5;
  bool operator==(const ClickModel&) const = default;
};

struct SyntheticWorldConfig {
  std::uint64_t seed = 1;
  int n_users = 200;
  int n_days = 14;
  int articles_per_day = 70;
  int n_tags = 300;
  int n_authors = 60;
  int n_sections = 8;
  double zipf_exponent = 1.1;
  /// Number of latent topics; users carry a preference weight per topic.
  int user_affinity_dim = 8;
  /// Probability that a display decision is a Bernoulli(p) draw instead of
  /// the deterministic p > click_threshold rule.
  double click_noise = 0.05;
  int embedding_dim = 32;

  Timestamp start = 1574640000;  // 2019-11-25T00:00:00Z, always a UTC midnight
  int vocab_per_topic = 60;
  int common_vocab = 240;
  double mean_visits_per_day = 2.0;
  /// Items per display slot (manual, widget, missed-last-week, other) on each visit.
  int slot_size = 5;
  int manual_updates_min = 8;
  int manual_updates_max = 16;
  /// Extra editorial weight for the front-page sections (section index 0 and 1).
  double editor_section_focus = 3.0;
  /// Probability that an article is filed under its topic's primary section.
  double topic_section_coherence = 0.4;
  ClickModel click_model;

  /// Field-by-field validation; returns human-readable violations (empty when valid).
  std::vector<std::string> validate() const;
};

/// Latent click model the generator samples from; the oracle for tests.
class GroundTruth {
 public:
  using Params = ClickModel;

  GroundTruth() = default;
  GroundTruth(Params params, std::unordered_map<std::string, std::vector<double>> user_affinity,
              std::unordered_map<std::string, int> article_topic, std::unordered_map<std::string, double> article_quality,
              std::unordered_map<std::string, Timestamp> article_published);

  const Params& params() const { return params_; }
  double click_threshold() const { return params_.click_threshold; }
  /// Latent logit; articles/users unknown to the model throw Error.
  double click_logit(const std::string& user_id, const std::string& article_id, Timestamp at) const;
  double click_probability(const std::string& user_id, const std::string& article_id, Timestamp at) const;
  int topic_of(const std::string& article_id) const;
  const std::vector<double>& affinity_of(const std::string& user_id) const;

  void save(const std::filesystem::path& path) const;
  static GroundTruth load(const std::filesystem::path& path);

  bool operator==(const GroundTruth&) const = default;

 private:
  Params params_;
  std::unordered_map<std::string, std::vector<double>> user_affinity_;
  std::unordered_map<std::string, int> article_topic_;
  std::unordered_map<std::string, double> article_quality_;
  std::unordered_map<std::string, Timestamp> article_published_;
};

struct SyntheticWorld {
  Corpus corpus;
  GroundTruth truth;
  WordVectors vectors;
  std::vector<EditorialUpdate> manual;
};

/// Deterministic in cfg (including seed). Throws Error on invalid config.
SyntheticWorld generate_world(const SyntheticWorldConfig& cfg);

}  // namespace newsrec
