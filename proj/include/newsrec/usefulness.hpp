#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "newsrec/corpus.hpp"
#include "newsrec/features.hpp"
#include "newsrec/ranker.hpp"

namespace newsrec {

enum class AttributeKind { Section, Tags, Authors, Embedding };
inline constexpr AttributeKind kAllAttributes[] = {AttributeKind::Section, AttributeKind::Tags, AttributeKind::Authors,
                                                   AttributeKind::Embedding};
std::string_view to_string(AttributeKind a);
std::optional<AttributeKind> parse_attribute(std::string_view s);

/// Jaccard of the attribute sets (section as a singleton); for embeddings
/// (cos + 1) / 2, or 0 when either vector is zero.
double sim(const Article& a, const Article& b, AttributeKind attr);

/// Mean pairwise dissimilarity. Embedding similarities are divided by the
/// largest pairwise similarity in the list first. nullopt for fewer than 2 items.
std::optional<double> intra_list_diversity(std::span<const Article* const> items, AttributeKind attr);
/// Over the first top_n items of the list (all items when top_n = 0).
std::optional<double> intra_list_diversity(const RankedList& list, const Corpus& corpus, AttributeKind attr,
                                           std::size_t top_n = 0);

/// Share of l2 not present in l1; nullopt when l2 is empty.
std::optional<double> dynamism(const RankedList& l1, const RankedList& l2, std::size_t top_n = 0);
std::optional<double> dynamism(std::span<const std::string> l1, std::span<const std::string> l2);

/// 1 minus the relative profile frequency of the item's attribute values
/// (summed), or 1 - (cos + 1) / 2 for embeddings. 1 for an empty profile.
double unexpectedness(const Article& item, const UserProfile& profile, AttributeKind attr);
/// Mean unexpectedness over the items; nullopt for an empty list.
std::optional<double> serendipity(std::span<const Article* const> items, const UserProfile& profile,
                                  AttributeKind attr);
std::optional<double> serendipity(const RankedList& list, const Corpus& corpus, const UserProfile& profile,
                                  AttributeKind attr, std::size_t top_n = 0);

enum class CoverageScope { PerUser, AllUsers, Manual };
std::string_view to_string(CoverageScope s);

/// Fraction of `published` served by the lists. PerUser macro-averages the
/// per-user fractions; AllUsers and Manual union first. nullopt when
/// nothing was published.
std::optional<double> coverage(std::span<const RankedList* const> lists, const StringSet& published,
                               CoverageScope scope, std::size_t top_n = 0);
std::optional<double> coverage(const std::vector<RankedList>& lists, const StringSet& published, CoverageScope scope,
                               std::size_t top_n = 0);

/// Mean absolute difference over twice the mean; nullopt for an empty map.
std::optional<double> gini(const std::map<std::string, int>& freqs);
std::optional<double> gini(std::span<const double> counts);
/// Shannon entropy in bits; nullopt for an empty map.
std::optional<double> entropy(const std::map<std::string, int>& freqs);
std::optional<double> entropy(std::span<const double> counts);

struct AlignedPair {
  std::size_t manual = 0;  // index into the manual stream
  std::size_t recsys = 0;  // index into the recsys stream
};

/// For each manual update, each user's most recent recsys list at or before
/// it. Streams may be in any order; output is ordered by (manual time, user).
std::vector<AlignedPair> align(const std::vector<RankedList>& manual, const std::vector<RankedList>& recsys);

struct MetricSample {
  std::string metric;
  std::string attribute;
  std::string treatment;
  std::string scope;
  double value = 0.0;
  Timestamp at = 0;
};

void write_metric_csv(const std::vector<MetricSample>& samples, const std::filesystem::path& path);

enum class DynamismMode {
  /// Every pair of consecutive emissions.
  Emissions,
  /// Consecutive list updates: emissions whose top_n prefix repeats the previous one are dropped.
  Updates,
};

/// Consecutive (user, section) pairs within the stream, compared on the
/// top_n prefix; fallback lists are skipped when skip_fallback is set.
std::vector<MetricSample> dynamism_samples(const std::vector<RankedList>& stream, std::size_t top_n,
                                           bool skip_fallback = true, DynamismMode mode = DynamismMode::Updates);

}  // namespace newsrec
