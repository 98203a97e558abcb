#include "newsrec/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <tuple>

#include "json.hpp"
#include "newsrec/random.hpp"

namespace newsrec {

UserProfile build_profile(const Corpus& corpus, std::string_view user_id, Timestamp as_of) {
  UserProfile p;
  p.user_id = std::string(user_id);
  p.window_start = as_of - kProfileWindow;
  p.window_end = as_of;
  p.mean_embedding.assign(corpus.embedding_dim(), 0.0);

  const auto clicks = corpus.clicks_of(user_id);
  const auto& events = corpus.events();
  auto first = std::lower_bound(clicks.begin(), clicks.end(), p.window_start,
                                [&](std::size_t e, Timestamp t) { return events[e].at < t; });
  double words = 0;
  for (auto it = first; it != clicks.end() && events[*it].at < as_of; ++it) {
    const Article& a = corpus.articles()[corpus.event_article(*it)];
    for (const auto& t : a.tags) ++p.tag_freq[t];
    for (const auto& au : a.authors) ++p.author_freq[au];
    ++p.section_freq[a.section];
    words += static_cast<double>(a.word_count);
    for (std::size_t d = 0; d < p.mean_embedding.size(); ++d) p.mean_embedding[d] += a.embedding[d];
    ++p.n_clicks;
  }
  if (p.n_clicks > 0) {
    p.mean_word_count = words / p.n_clicks;
    for (auto& x : p.mean_embedding) x /= p.n_clicks;
  }
  return p;
}

namespace {

std::string numbered(const char* prefix, int i) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%02d", prefix, i);
  return buf;
}

std::size_t bucket(std::string_view salt, std::string_view value, int buckets) {
  return static_cast<std::size_t>(fnv1a(value, fnv1a(salt)) % static_cast<std::uint64_t>(buckets));
}

double total(const std::map<std::string, int>& freq) {
  double t = 0;
  for (const auto& [_, n] : freq) t += n;
  return t;
}

double top_k_mass(const std::map<std::string, int>& freq, int k) {
  if (freq.empty()) return 0.0;
  std::vector<int> counts;
  counts.reserve(freq.size());
  for (const auto& [_, n] : freq) counts.push_back(n);
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), counts.size());
  std::partial_sort(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(take), counts.end(),
                    std::greater<>());
  double top = 0;
  for (std::size_t i = 0; i < take; ++i) top += counts[i];
  return top / total(freq);
}

/// Relative profile frequency of the given values, summed.
double affinity(const std::map<std::string, int>& freq, double freq_total, const StringSet& values) {
  if (freq.empty()) return 0.0;
  double hit = 0;
  for (const auto& v : values) {
    if (auto it = freq.find(v); it != freq.end()) hit += it->second;
  }
  return hit / freq_total;
}

double profile_jaccard(const std::map<std::string, int>& freq, const StringSet& values) {
  std::size_t common = 0;
  for (const auto& v : values) common += freq.contains(v) ? 1 : 0;
  const std::size_t uni = freq.size() + values.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

}  // namespace

double jaccard(const StringSet& a, const StringSet& b) {
  std::size_t common = 0;
  for (const auto& x : a) common += b.contains(x) ? 1 : 0;
  const std::size_t uni = a.size() + b.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

FeatureSchema::FeatureSchema(const FeatureConfig& cfg) : cfg_(cfg) {
  if (cfg_.hash_buckets < 1 || cfg_.top_k < 1 || cfg_.embedding_dim < 1) {
    throw Error("feature config: hash_buckets, top_k and embedding_dim must be >= 1");
  }
  for (int i = 0; i < cfg_.hash_buckets; ++i) names_.push_back(numbered("article.section_hash_", i));
  for (int i = 0; i < cfg_.hash_buckets; ++i) names_.push_back(numbered("article.tag_hash_", i));
  for (int i = 0; i < cfg_.hash_buckets; ++i) names_.push_back(numbered("article.author_hash_", i));
  for (const char* n : {"article.n_tags", "article.n_authors", "article.publish_hour", "article.publish_weekday",
                        "article.word_count", "article.sentence_count", "article.paragraph_count",
                        "article.char_length", "article.hapax_legomena", "article.dis_legomena"}) {
    names_.emplace_back(n);
  }
  for (std::size_t d = 0; d < cfg_.embedding_dim; ++d) {
    names_.push_back(numbered("article.embedding_", static_cast<int>(d)));
  }
  for (const char* n : {"user.n_clicks", "user.mean_word_count", "user.top_tag_mass", "user.top_author_mass",
                        "user.top_section_mass", "user_article.tag_jaccard", "user_article.author_jaccard",
                        "user_article.section_match", "user_article.tag_overlap", "user_article.tag_affinity",
                        "user_article.author_affinity", "user_article.section_affinity",
                        "user_article.embedding_cosine", "user_article.length_ratio", "user_article.age_hours"}) {
    names_.emplace_back(n);
  }
  std::uint64_t h = fnv1a("newsrec-features");
  for (const auto& n : names_) h = fnv1a(n, fnv1a("|", h));
  version_ = static_cast<std::uint32_t>(h ^ (h >> 32));
}

std::size_t FeatureSchema::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error("unknown feature: " + std::string(name));
  return static_cast<std::size_t>(it - names_.begin());
}

void FeatureSchema::write_json(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["version"] = version_;
  j["width"] = width();
  j["hash_buckets"] = cfg_.hash_buckets;
  j["top_k"] = cfg_.top_k;
  j["embedding_dim"] = cfg_.embedding_dim;
  j["features"] = names_;
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

ProfileSummary summarize(const UserProfile& profile, int top_k) {
  ProfileSummary s;
  s.top_tag_mass = top_k_mass(profile.tag_freq, top_k);
  s.top_author_mass = top_k_mass(profile.author_freq, top_k);
  s.top_section_mass = top_k_mass(profile.section_freq, top_k);
  s.tag_total = total(profile.tag_freq);
  s.author_total = total(profile.author_freq);
  s.section_total = total(profile.section_freq);
  return s;
}

void extract_into(const FeatureSchema& schema, const UserProfile& profile, const Article& article, Timestamp at,
                  std::span<double> out) {
  extract_into(schema, profile, summarize(profile, schema.config().top_k), article, at, out);
}

void extract_into(const FeatureSchema& schema, const UserProfile& profile, const ProfileSummary& summary,
                  const Article& article, Timestamp at, std::span<double> out) {
  const auto& cfg = schema.config();
  if (article.embedding.size() != cfg.embedding_dim || profile.mean_embedding.size() != cfg.embedding_dim) {
    throw Error("feature extraction: embedding dimension mismatch for article " + article.id);
  }
  if (out.size() != schema.width()) throw Error("feature extraction: output width mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  const auto buckets = static_cast<std::size_t>(cfg.hash_buckets);
  std::size_t pos = 0;

  out[pos + bucket("section", article.section, cfg.hash_buckets)] = 1.0;
  pos += buckets;
  for (const auto& t : article.tags) out[pos + bucket("tag", t, cfg.hash_buckets)] += 1.0;
  pos += buckets;
  for (const auto& a : article.authors) out[pos + bucket("author", a, cfg.hash_buckets)] += 1.0;
  pos += buckets;

  const Timestamp pub_day = day_of(article.published_at);
  out[pos++] = static_cast<double>(article.tags.size());
  out[pos++] = static_cast<double>(article.authors.size());
  out[pos++] = static_cast<double>((article.published_at - day_start(pub_day)) / kSecondsPerHour);
  out[pos++] = static_cast<double>(((pub_day % 7) + 7 + 3) % 7);  // Monday = 0; 1970-01-01 was a Thursday
  out[pos++] = static_cast<double>(article.word_count);
  out[pos++] = static_cast<double>(article.sentence_count);
  out[pos++] = static_cast<double>(article.paragraph_count);
  out[pos++] = static_cast<double>(article.char_length);
  out[pos++] = static_cast<double>(article.hapax_count);
  out[pos++] = static_cast<double>(article.dis_count);
  for (double x : article.embedding) out[pos++] = x;

  out[pos++] = static_cast<double>(profile.n_clicks);
  out[pos++] = profile.mean_word_count;
  out[pos++] = summary.top_tag_mass;
  out[pos++] = summary.top_author_mass;
  out[pos++] = summary.top_section_mass;

  std::size_t tag_common = 0;
  for (const auto& t : article.tags) tag_common += profile.tag_freq.contains(t) ? 1 : 0;
  out[pos++] = profile_jaccard(profile.tag_freq, article.tags);
  out[pos++] = profile_jaccard(profile.author_freq, article.authors);
  out[pos++] = profile.section_freq.contains(article.section) ? 1.0 : 0.0;
  out[pos++] = static_cast<double>(tag_common);
  out[pos++] = affinity(profile.tag_freq, summary.tag_total, article.tags);
  out[pos++] = affinity(profile.author_freq, summary.author_total, article.authors);
  if (auto it = profile.section_freq.find(article.section); it != profile.section_freq.end()) {
    out[pos++] = it->second / summary.section_total;
  } else {
    out[pos++] = 0.0;
  }
  out[pos++] = cosine(profile.mean_embedding, article.embedding);
  out[pos++] = profile.mean_word_count > 0 ? static_cast<double>(article.word_count) / profile.mean_word_count : 1.0;
  out[pos++] = static_cast<double>(at - article.published_at) / kSecondsPerHour;
}

FeatureVector extract(const FeatureSchema& schema, const UserProfile& profile, const Article& article, Timestamp at) {
  FeatureVector fv;
  fv.values.resize(schema.width());
  fv.schema_version = schema.version();
  extract_into(schema, profile, article, at, fv.values);
  return fv;
}

TrainingSet build_training_set(const Corpus& corpus, const FeatureSchema& schema, std::int64_t day,
                               std::uint64_t rng_seed) {
  TrainingSet set;
  const auto [first, last] = corpus.events_between(day_start(day), day_start(day + 1));
  const auto& events = corpus.events();

  std::set<std::pair<std::string, std::string>> clicked;
  std::vector<std::size_t> positives;
  for (std::size_t i = first; i < last; ++i) {
    if (events[i].kind == EventKind::Click) {
      clicked.emplace(events[i].user_id, events[i].article_id);
      positives.push_back(i);
    }
  }
  if (positives.empty()) {
    set.no_positives = true;
    return set;
  }
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<std::size_t> candidates;
  for (std::size_t i = first; i < last; ++i) {
    const auto& e = events[i];
    if (e.kind != EventKind::Impression) continue;
    auto key = std::pair{e.user_id, e.article_id};
    if (clicked.contains(key) || !seen.insert(std::move(key)).second) continue;
    candidates.push_back(i);
  }
  Rng rng(rng_seed);
  const std::size_t n_neg = std::min(positives.size(), candidates.size());
  for (std::size_t k = 0; k < n_neg; ++k) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(k),
                                                            static_cast<std::int64_t>(candidates.size()) - 1));
    std::swap(candidates[k], candidates[j]);
  }
  candidates.resize(n_neg);
  std::sort(candidates.begin(), candidates.end());

  auto add = [&](std::size_t event_index, int label) {
    const auto& e = events[event_index];
    const Article& a = corpus.articles()[corpus.event_article(event_index)];
    const UserProfile profile = build_profile(corpus, e.user_id, e.at);
    set.examples.push_back({extract(schema, profile, a, e.at), label, e.user_id, e.article_id, e.at});
  };
  for (std::size_t i : positives) add(i, 1);
  for (std::size_t i : candidates) add(i, 0);
  set.positives = positives.size();
  set.negatives = candidates.size();
  return set;
}

}  // namespace newsrec
