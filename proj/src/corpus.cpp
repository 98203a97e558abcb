#include "newsrec/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <tuple>

#include "json.hpp"

#include "newsrec/text.hpp"

namespace newsrec {

using nlohmann::json;

Article make_article(ArticleMeta meta, const EmbeddingProvider& provider) {
  Article a;
  const TextStats stats = compute_text_stats(meta.body);
  a.embedding = compute_embedding(meta.body, provider);
  a.id = std::move(meta.id);
  a.published_at = meta.published_at;
  a.section = std::move(meta.section);
  a.tags = std::move(meta.tags);
  a.authors = std::move(meta.authors);
  a.title = std::move(meta.title);
  a.body = std::move(meta.body);
  a.word_count = stats.word_count;
  a.sentence_count = stats.sentence_count;
  a.paragraph_count = stats.paragraph_count;
  a.char_length = stats.char_length;
  a.hapax_count = stats.hapax_count;
  a.dis_count = stats.dis_count;
  return a;
}

Corpus::Corpus(std::vector<Article> articles, std::vector<InteractionEvent> events, std::size_t embedding_dim)
    : articles_(std::move(articles)), events_(std::move(events)), embedding_dim_(embedding_dim) {
  std::sort(articles_.begin(), articles_.end(), [](const Article& a, const Article& b) {
    return std::tie(a.published_at, a.id) < std::tie(b.published_at, b.id);
  });
  for (std::size_t i = 0; i < articles_.size(); ++i) {
    const Article& a = articles_[i];
    if (a.id.empty()) throw Error("article with empty id");
    if (!by_id_.emplace(a.id, i).second) throw Error("duplicate article id: " + a.id);
    if (a.embedding.size() != embedding_dim_) {
      throw Error("article " + a.id + ": embedding dimension " + std::to_string(a.embedding.size()) +
                  " != corpus dimension " + std::to_string(embedding_dim_));
    }
    if (a.tags.contains("") || a.authors.contains("")) throw Error("article " + a.id + ": empty tag or author");
    if (a.hapax_count < 0 || a.dis_count < 0 || a.hapax_count + 2 * a.dis_count > a.word_count) {
      throw Error("article " + a.id + ": inconsistent word statistics");
    }
  }

  std::sort(events_.begin(), events_.end(), [](const InteractionEvent& a, const InteractionEvent& b) {
    return std::tie(a.at, a.user_id, a.article_id, a.kind, a.context) <
           std::tie(b.at, b.user_id, b.article_id, b.kind, b.context);
  });
  // Context is not part of the duplicate key; the first context in sort order wins.
  events_.erase(std::unique(events_.begin(), events_.end(),
                            [](const InteractionEvent& a, const InteractionEvent& b) {
                              return a.at == b.at && a.user_id == b.user_id && a.article_id == b.article_id &&
                                     a.kind == b.kind;
                            }),
                events_.end());

  StringSet unknown;
  event_article_.reserve(events_.size());
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const auto& e = events_[i];
    auto it = by_id_.find(e.article_id);
    if (it == by_id_.end()) {
      unknown.insert(e.article_id);
      continue;
    }
    event_article_.push_back(it->second);
    user_events_[e.user_id].push_back(i);
    if (e.kind == EventKind::Click) user_clicks_[e.user_id].push_back(i);
  }
  if (!unknown.empty()) {
    std::string msg = "events reference unknown articles:";
    for (const auto& id : unknown) msg += " " + id;
    throw Error(msg);
  }
  users_.reserve(user_events_.size());
  for (const auto& [user, _] : user_events_) users_.push_back(user);
  std::sort(users_.begin(), users_.end());
}

const Article* Corpus::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &articles_[it->second];
}

std::optional<std::size_t> Corpus::index_of(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::span<const std::size_t> Corpus::clicks_of(std::string_view user_id) const {
  auto it = user_clicks_.find(std::string(user_id));
  if (it == user_clicks_.end()) return {};
  return it->second;
}

std::span<const std::size_t> Corpus::events_of(std::string_view user_id) const {
  auto it = user_events_.find(std::string(user_id));
  if (it == user_events_.end()) return {};
  return it->second;
}

std::pair<std::size_t, std::size_t> Corpus::published_between(Timestamp from, Timestamp to) const {
  auto by_time = [](const Article& a, Timestamp t) { return a.published_at < t; };
  auto first = std::lower_bound(articles_.begin(), articles_.end(), from, by_time);
  auto last = std::lower_bound(first, articles_.end(), to, by_time);
  return {static_cast<std::size_t>(first - articles_.begin()), static_cast<std::size_t>(last - articles_.begin())};
}

std::pair<std::size_t, std::size_t> Corpus::events_between(Timestamp from, Timestamp to) const {
  auto by_time = [](const InteractionEvent& e, Timestamp t) { return e.at < t; };
  auto first = std::lower_bound(events_.begin(), events_.end(), from, by_time);
  auto last = std::lower_bound(first, events_.end(), to, by_time);
  return {static_cast<std::size_t>(first - events_.begin()), static_cast<std::size_t>(last - events_.begin())};
}

namespace {

Timestamp parse_time_field(const json& j, const char* key, const std::string& file, std::size_t line) {
  if (!j.contains(key)) throw ParseError(file, line, std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (v.is_number_integer()) return v.get<Timestamp>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ParseError(file, line, std::string("non-finite '") + key + "'");
    return static_cast<Timestamp>(std::floor(d));
  }
  if (v.is_string()) {
    if (auto t = parse_iso8601(v.get<std::string>())) return *t;
  }
  throw ParseError(file, line, std::string("field '") + key + "' must be ISO-8601 or epoch seconds");
}

std::string string_field(const json& j, const char* key, const std::string& file, std::size_t line,
                         bool required = true) {
  if (!j.contains(key)) {
    if (required) throw ParseError(file, line, std::string("missing field '") + key + "'");
    return {};
  }
  if (!j.at(key).is_string()) throw ParseError(file, line, std::string("field '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

StringSet set_field(const json& j, const char* key, const std::string& file, std::size_t line) {
  StringSet out;
  if (!j.contains(key)) return out;
  const auto& v = j.at(key);
  if (!v.is_array()) throw ParseError(file, line, std::string("field '") + key + "' must be an array");
  for (const auto& x : v) {
    if (!x.is_string() || x.get<std::string>().empty()) {
      throw ParseError(file, line, std::string("field '") + key + "' must hold nonempty strings");
    }
    out.insert(x.get<std::string>());
  }
  return out;
}

template <typename F>
void for_each_json_line(const std::filesystem::path& path, F&& f) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(path.string(), line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(path.string(), line_no, "expected a JSON object");
    f(j, line_no);
  }
}

}  // namespace

std::vector<ArticleMeta> read_articles_jsonl(const std::filesystem::path& path) {
  std::vector<ArticleMeta> out;
  const std::string file = path.string();
  for_each_json_line(path, [&](const json& j, std::size_t line) {
    ArticleMeta m;
    m.id = string_field(j, "id", file, line);
    if (m.id.empty()) throw ParseError(file, line, "empty article id");
    m.published_at = parse_time_field(j, "published_at", file, line);
    m.section = string_field(j, "section", file, line);
    m.tags = set_field(j, "tags", file, line);
    m.authors = set_field(j, "authors", file, line);
    m.title = string_field(j, "title", file, line, false);
    m.body = string_field(j, "body", file, line, false);
    out.push_back(std::move(m));
  });
  return out;
}

std::vector<InteractionEvent> read_events_jsonl(const std::filesystem::path& path) {
  std::vector<InteractionEvent> out;
  const std::string file = path.string();
  for_each_json_line(path, [&](const json& j, std::size_t line) {
    InteractionEvent e;
    e.user_id = string_field(j, "user_id", file, line);
    e.article_id = string_field(j, "article_id", file, line);
    e.at = parse_time_field(j, "at", file, line);
    const auto kind = parse_event_kind(string_field(j, "kind", file, line));
    if (!kind) throw ParseError(file, line, "kind must be \"impression\" or \"click\"");
    e.kind = *kind;
    const std::string ctx = string_field(j, "context", file, line, false);
    if (ctx.empty()) {
      e.context = DisplayContext::Other;
    } else if (auto c = parse_display_context(ctx)) {
      e.context = *c;
    } else {
      throw ParseError(file, line, "unknown context '" + ctx + "'");
    }
    out.push_back(std::move(e));
  });
  return out;
}

Corpus load_corpus(const std::filesystem::path& articles_path, const std::filesystem::path& events_path,
                   const EmbeddingProvider& embeddings) {
  auto metas = read_articles_jsonl(articles_path);
  {
    StringSet seen;
    for (const auto& m : metas) {
      if (!seen.insert(m.id).second) throw Error("duplicate article id: " + m.id);
    }
  }
  std::vector<Article> articles;
  articles.reserve(metas.size());
  for (auto& m : metas) articles.push_back(make_article(std::move(m), embeddings));
  return Corpus(std::move(articles), read_events_jsonl(events_path), embeddings.dimension());
}

void write_articles_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& a : corpus.articles()) {
    json j;
    j["id"] = a.id;
    j["published_at"] = a.published_at;
    j["section"] = a.section;
    j["tags"] = a.tags;
    j["authors"] = a.authors;
    j["title"] = a.title;
    j["body"] = a.body;
    out << j.dump() << '\n';
  }
}

void write_events_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& e : corpus.events()) {
    json j;
    j["user_id"] = e.user_id;
    j["article_id"] = e.article_id;
    j["at"] = e.at;
    j["kind"] = to_string(e.kind);
    j["context"] = to_string(e.context);
    out << j.dump() << '\n';
  }
}

}  // namespace newsrec
