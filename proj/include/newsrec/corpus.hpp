#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "newsrec/embedding.hpp"
#include "newsrec/types.hpp"

namespace newsrec {

using StringSet = std::set<std::string>;

/// Editorial metadata as it appears in articles.jsonl.
struct ArticleMeta {
  std::string id;
  Timestamp published_at = 0;
  std::string section;
  StringSet tags;
  StringSet authors;
  std::string title;
  std::string body;
};

struct Article {
  std::string id;
  Timestamp published_at = 0;
  std::string section;
  StringSet tags;
  StringSet authors;
  std::string title;
  std::string body;
  std::int64_t word_count = 0;
  std::int64_t sentence_count = 0;
  std::int64_t paragraph_count = 0;
  std::int64_t char_length = 0;
  std::int64_t hapax_count = 0;
  std::int64_t dis_count = 0;
  Vector embedding;

  bool operator==(const Article&) const = default;
};

/// Derives content statistics and the mean word embedding from the body.
Article make_article(ArticleMeta meta, const EmbeddingProvider& provider);

struct InteractionEvent {
  std::string user_id;
  std::string article_id;
  Timestamp at = 0;
  EventKind kind = EventKind::Impression;
  DisplayContext context = DisplayContext::Other;

  bool operator==(const InteractionEvent&) const = default;
};

/// One update of the editor-curated, non-personalized front-page list.
struct EditorialUpdate {
  Timestamp at = 0;
  std::vector<std::string> items;

  bool operator==(const EditorialUpdate&) const = default;
};

/// Immutable article collection plus time-ordered interaction log.
class Corpus {
 public:
  /// Validates ids, sets and embedding width; sorts articles by
  /// (published_at, id) and events by time; collapses exact duplicate
  /// (user, article, at, kind) events. Throws Error on any violation.
  Corpus(std::vector<Article> articles, std::vector<InteractionEvent> events, std::size_t embedding_dim);

  const std::vector<Article>& articles() const { return articles_; }
  const std::vector<InteractionEvent>& events() const { return events_; }
  std::size_t embedding_dim() const { return embedding_dim_; }

  const Article* find(std::string_view id) const;
  std::optional<std::size_t> index_of(std::string_view id) const;
  /// Article index of each event, parallel to events().
  std::size_t event_article(std::size_t event_index) const { return event_article_[event_index]; }

  /// Sorted distinct user ids appearing in the event log.
  const std::vector<std::string>& users() const { return users_; }
  /// Indices into events() of the user's clicks, time-ordered. Empty for unknown users.
  std::span<const std::size_t> clicks_of(std::string_view user_id) const;
  std::span<const std::size_t> events_of(std::string_view user_id) const;

  /// Index range [first, last) of articles with published_at in [from, to).
  std::pair<std::size_t, std::size_t> published_between(Timestamp from, Timestamp to) const;
  /// Index range [first, last) of events with at in [from, to).
  std::pair<std::size_t, std::size_t> events_between(Timestamp from, Timestamp to) const;

  bool operator==(const Corpus& other) const {
    return embedding_dim_ == other.embedding_dim_ && articles_ == other.articles_ && events_ == other.events_;
  }

 private:
  std::vector<Article> articles_;
  std::vector<InteractionEvent> events_;
  std::size_t embedding_dim_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::vector<std::size_t> event_article_;
  std::vector<std::string> users_;
  std::unordered_map<std::string, std::vector<std::size_t>> user_clicks_;
  std::unordered_map<std::string, std::vector<std::size_t>> user_events_;
};

std::vector<ArticleMeta> read_articles_jsonl(const std::filesystem::path& path);
std::vector<InteractionEvent> read_events_jsonl(const std::filesystem::path& path);

Corpus load_corpus(const std::filesystem::path& articles_path, const std::filesystem::path& events_path,
                   const EmbeddingProvider& embeddings);

/// Writes metadata only; derived fields are recomputed on load.
void write_articles_jsonl(const Corpus& corpus, const std::filesystem::path& path);
void write_events_jsonl(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace newsrec
