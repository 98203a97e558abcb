#include "newsrec/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "json.hpp"
#include "newsrec/random.hpp"

namespace newsrec {

using nlohmann::json;

std::vector<std::string> SyntheticWorldConfig::validate() const {
  std::vector<std::string> errors;
  auto at_least_one = [&](const char* name, int v) {
    if (v < 1) errors.push_back(std::string(name) + ": must be >= 1 (got " + std::to_string(v) + ")");
  };
  at_least_one("n_users", n_users);
  at_least_one("n_days", n_days);
  at_least_one("articles_per_day", articles_per_day);
  at_least_one("n_tags", n_tags);
  at_least_one("n_authors", n_authors);
  at_least_one("n_sections", n_sections);
  at_least_one("user_affinity_dim", user_affinity_dim);
  at_least_one("embedding_dim", embedding_dim);
  at_least_one("vocab_per_topic", vocab_per_topic);
  at_least_one("common_vocab", common_vocab);
  at_least_one("slot_size", slot_size);
  at_least_one("manual_updates_min", manual_updates_min);
  if (!(zipf_exponent > 0)) errors.push_back("zipf_exponent: must be > 0");
  if (!(click_noise >= 0 && click_noise <= 1)) errors.push_back("click_noise: must be in [0,1]");
  if (!(mean_visits_per_day > 0)) errors.push_back("mean_visits_per_day: must be > 0");
  if (manual_updates_max < manual_updates_min) errors.push_back("manual_updates_max: must be >= manual_updates_min");
  if (!(topic_section_coherence >= 0 && topic_section_coherence <= 1)) {
    errors.push_back("topic_section_coherence: must be in [0,1]");
  }
  if (start % kSecondsPerDay != 0) errors.push_back("start: must be a UTC midnight");
  return errors;
}

GroundTruth::GroundTruth(Params params, std::unordered_map<std::string, std::vector<double>> user_affinity,
                         std::unordered_map<std::string, int> article_topic,
                         std::unordered_map<std::string, double> article_quality,
                         std::unordered_map<std::string, Timestamp> article_published)
    : params_(params),
      user_affinity_(std::move(user_affinity)),
      article_topic_(std::move(article_topic)),
      article_quality_(std::move(article_quality)),
      article_published_(std::move(article_published)) {}

const std::vector<double>& GroundTruth::affinity_of(const std::string& user_id) const {
  auto it = user_affinity_.find(user_id);
  if (it == user_affinity_.end()) throw Error("ground truth: unknown user " + user_id);
  return it->second;
}

int GroundTruth::topic_of(const std::string& article_id) const {
  auto it = article_topic_.find(article_id);
  if (it == article_topic_.end()) throw Error("ground truth: unknown article " + article_id);
  return it->second;
}

double GroundTruth::click_logit(const std::string& user_id, const std::string& article_id, Timestamp at) const {
  const auto& affinity = affinity_of(user_id);
  const int topic = topic_of(article_id);
  const double quality = article_quality_.at(article_id);
  const double age_days =
      std::max<double>(0.0, static_cast<double>(at - article_published_.at(article_id))) / kSecondsPerDay;
  return params_.bias + params_.affinity_weight * affinity[static_cast<std::size_t>(topic)] +
         params_.quality_weight * quality - params_.age_weight_per_day * age_days;
}

double GroundTruth::click_probability(const std::string& user_id, const std::string& article_id, Timestamp at) const {
  return 1.0 / (1.0 + std::exp(-click_logit(user_id, article_id, at)));
}

void GroundTruth::save(const std::filesystem::path& path) const {
  json j;
  j["format"] = "newsrec-ground-truth";
  j["version"] = 1;
  j["params"] = {{"bias", params_.bias},
                 {"affinity_weight", params_.affinity_weight},
                 {"quality_weight", params_.quality_weight},
                 {"age_weight_per_day", params_.age_weight_per_day},
                 {"click_threshold", params_.click_threshold}};
  // std::map for a stable key order in the file.
  j["users"] = std::map<std::string, std::vector<double>>(user_affinity_.begin(), user_affinity_.end());
  json articles = json::object();
  for (const auto& [id, topic] : std::map<std::string, int>(article_topic_.begin(), article_topic_.end())) {
    articles[id] = {{"topic", topic},
                    {"quality", article_quality_.at(id)},
                    {"published_at", article_published_.at(id)}};
  }
  j["articles"] = std::move(articles);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

GroundTruth GroundTruth::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    const json j = json::parse(in);
    if (j.at("format") != "newsrec-ground-truth") throw Error(path.string() + ": not a ground-truth file");
    Params p;
    const auto& jp = j.at("params");
    p.bias = jp.at("bias");
    p.affinity_weight = jp.at("affinity_weight");
    p.quality_weight = jp.at("quality_weight");
    p.age_weight_per_day = jp.at("age_weight_per_day");
    p.click_threshold = jp.at("click_threshold");
    std::unordered_map<std::string, std::vector<double>> users;
    for (const auto& [k, v] : j.at("users").items()) users[k] = v.get<std::vector<double>>();
    std::unordered_map<std::string, int> topic;
    std::unordered_map<std::string, double> quality;
    std::unordered_map<std::string, Timestamp> published;
    for (const auto& [k, v] : j.at("articles").items()) {
      topic[k] = v.at("topic");
      quality[k] = v.at("quality");
      published[k] = v.at("published_at");
    }
    return GroundTruth(p, std::move(users), std::move(topic), std::move(quality), std::move(published));
  } catch (const json::exception& e) {
    throw Error(path.string() + ": malformed ground-truth file: " + e.what());
  }
}

namespace {

constexpr std::array<std::string_view, 16> kSyllables{"ka", "lo", "mi", "ne", "ru", "sa", "to", "vi",
                                                      "de", "po", "ga", "ho", "ji", "be", "fu", "we"};
constexpr std::array<std::string_view, 8> kSectionNames{"economie", "politiek", "markten", "bedrijven",
                                                        "tech",     "opinie",   "cultuur", "wereld"};

std::string pseudo_word(std::size_t index) {
  std::string w;
  for (int digit = 0; digit < 3; ++digit) {
    w += kSyllables[index % kSyllables.size()];
    index /= kSyllables.size();
  }
  while (index > 0) {
    w += kSyllables[index % kSyllables.size()];
    index /= kSyllables.size();
  }
  return w;
}

std::string padded(const char* prefix, long long n, int width) {
  std::string digits = std::to_string(n);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return prefix + digits;
}

int digits_for(long long n) {
  int d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

int poisson(Rng& rng, double mean) {
  const double limit = std::exp(-mean);
  double prod = rng.uniform();
  int k = 0;
  while (prod > limit) {
    prod *= rng.uniform();
    ++k;
  }
  return k;
}

Vector random_direction(Rng& rng, std::size_t dim, double scale) {
  Vector v(dim);
  for (auto& x : v) x = rng.normal() * scale / std::sqrt(static_cast<double>(dim));
  return v;
}

struct Topic {
  std::vector<std::size_t> tag_order;
  std::vector<std::size_t> author_order;
  std::vector<std::size_t> words;  // indices into the vocabulary
  int primary_section = 0;
};

struct LatentArticle {
  std::size_t index;  // into the generated article vector
  int topic;
  double quality;
  int section;
};

std::set<std::string> draw_distinct(Rng& rng, const ZipfSampler& zipf, const std::vector<std::size_t>& order,
                                    const std::vector<std::string>& names, int count) {
  std::set<std::string> out;
  for (int attempt = 0; static_cast<int>(out.size()) < count && attempt < 16 * count; ++attempt) {
    out.insert(names[order[zipf(rng)]]);
  }
  return out;
}

}  // namespace

SyntheticWorld generate_world(const SyntheticWorldConfig& cfg) {
  if (auto errors = cfg.validate(); !errors.empty()) {
    std::string msg = "invalid synthetic world config:";
    for (const auto& e : errors) msg += " " + e + ";";
    throw Error(msg);
  }
  Rng rng(cfg.seed);
  const auto n_topics = static_cast<std::size_t>(cfg.user_affinity_dim);
  const auto dim = static_cast<std::size_t>(cfg.embedding_dim);

  // Vocabulary: topical words cluster around a per-topic centroid, common words do not.
  const std::size_t n_topic_words = n_topics * static_cast<std::size_t>(cfg.vocab_per_topic);
  const std::size_t n_words = n_topic_words + static_cast<std::size_t>(cfg.common_vocab);
  std::vector<std::string> vocab(n_words);
  for (std::size_t i = 0; i < n_words; ++i) vocab[i] = pseudo_word(i);
  WordVectors vectors(dim);
  std::vector<Topic> topics(n_topics);
  {
    std::vector<Vector> centroids;
    for (std::size_t k = 0; k < n_topics; ++k) centroids.push_back(random_direction(rng, dim, 1.0));
    for (std::size_t i = 0; i < n_words; ++i) {
      Vector v = random_direction(rng, dim, i < n_topic_words ? 0.6 : 1.0);
      if (i < n_topic_words) {
        const std::size_t k = i / static_cast<std::size_t>(cfg.vocab_per_topic);
        for (std::size_t d = 0; d < dim; ++d) v[d] += centroids[k][d];
        topics[k].words.push_back(i);
      }
      vectors.add(vocab[i], std::move(v));
    }
  }

  std::vector<std::string> tag_names, author_names, section_names;
  for (int i = 0; i < cfg.n_tags; ++i) tag_names.push_back(padded("tag-", i, digits_for(cfg.n_tags - 1)));
  for (int i = 0; i < cfg.n_authors; ++i) author_names.push_back(padded("author-", i, digits_for(cfg.n_authors - 1)));
  for (int i = 0; i < cfg.n_sections; ++i) {
    section_names.push_back(i < static_cast<int>(kSectionNames.size()) ? std::string(kSectionNames[i])
                                                                        : padded("section-", i, 2));
  }

  for (std::size_t k = 0; k < n_topics; ++k) {
    auto& t = topics[k];
    t.tag_order.resize(static_cast<std::size_t>(cfg.n_tags));
    std::iota(t.tag_order.begin(), t.tag_order.end(), 0);
    rng.shuffle(t.tag_order);
    t.author_order.resize(static_cast<std::size_t>(cfg.n_authors));
    std::iota(t.author_order.begin(), t.author_order.end(), 0);
    rng.shuffle(t.author_order);
    t.primary_section = static_cast<int>(k % static_cast<std::size_t>(cfg.n_sections));
  }
  const ZipfSampler tag_zipf(static_cast<std::size_t>(cfg.n_tags), cfg.zipf_exponent);
  const ZipfSampler author_zipf(static_cast<std::size_t>(cfg.n_authors), cfg.zipf_exponent);
  const ZipfSampler topic_word_zipf(static_cast<std::size_t>(cfg.vocab_per_topic), cfg.zipf_exponent);
  const ZipfSampler common_word_zipf(static_cast<std::size_t>(cfg.common_vocab), cfg.zipf_exponent);

  // Users.
  std::vector<std::string> users;
  std::unordered_map<std::string, std::vector<double>> affinity;
  std::vector<double> visit_rate;
  for (int u = 0; u < cfg.n_users; ++u) {
    users.push_back(padded("u", u, std::max(4, digits_for(cfg.n_users - 1))));
    std::vector<double> w(n_topics);
    double total = 0;
    for (auto& x : w) {
      x = std::exp(1.6 * rng.normal());
      total += x;
    }
    for (auto& x : w) x /= total;
    affinity[users.back()] = std::move(w);
    visit_rate.push_back(cfg.mean_visits_per_day * rng.uniform(0.5, 1.5));
  }

  // Articles.
  std::vector<Article> articles;
  std::vector<LatentArticle> latent;
  std::unordered_map<std::string, int> truth_topic;
  std::unordered_map<std::string, double> truth_quality;
  std::unordered_map<std::string, Timestamp> truth_published;
  const int day_digits = std::max(2, digits_for(cfg.n_days - 1));
  const int item_digits = std::max(3, digits_for(cfg.articles_per_day - 1));
  for (int d = 0; d < cfg.n_days; ++d) {
    const Timestamp day0 = cfg.start + d * kSecondsPerDay;
    for (int i = 0; i < cfg.articles_per_day; ++i) {
      ArticleMeta m;
      m.id = padded("a", d, day_digits) + padded("-", i, item_digits);
      m.published_at = day0 + rng.uniform_int(5 * kSecondsPerHour, 23 * kSecondsPerHour - 1);
      const int topic = static_cast<int>(rng.uniform_int(0, static_cast<std::int64_t>(n_topics) - 1));
      const auto& t = topics[static_cast<std::size_t>(topic)];
      const double quality = rng.normal();
      const int section =
          rng.bernoulli(cfg.topic_section_coherence) ? t.primary_section : static_cast<int>(rng.uniform_int(0, cfg.n_sections - 1));
      m.section = section_names[static_cast<std::size_t>(section)];
      m.tags = draw_distinct(rng, tag_zipf, t.tag_order, tag_names, static_cast<int>(rng.uniform_int(1, 4)));
      m.authors =
          draw_distinct(rng, author_zipf, t.author_order, author_names, static_cast<int>(rng.uniform_int(1, 2)));

      std::string body;
      const auto n_paragraphs = rng.uniform_int(2, 5);
      for (std::int64_t p = 0; p < n_paragraphs; ++p) {
        if (p > 0) body += "\n\n";
        const auto n_sentences = rng.uniform_int(2, 5);
        for (std::int64_t s = 0; s < n_sentences; ++s) {
          if (s > 0) body += ' ';
          const auto n_tokens = rng.uniform_int(6, 16);
          for (std::int64_t w = 0; w < n_tokens; ++w) {
            std::string word;
            const double r = rng.uniform();
            if (r < 0.45) {
              word = vocab[t.words[topic_word_zipf(rng)]];
            } else if (r < 0.98) {
              word = vocab[n_topic_words + common_word_zipf(rng)];
            } else {
              word = std::to_string(rng.uniform_int(1, 2019));  // numerals carry no vector
            }
            if (w == 0) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
            if (w > 0) body += ' ';
            body += word;
          }
          body += '.';
        }
      }
      m.title = body.substr(0, body.find('.'));
      m.body = std::move(body);

      truth_topic[m.id] = topic;
      truth_quality[m.id] = quality;
      truth_published[m.id] = m.published_at;
      latent.push_back({articles.size(), topic, quality, section});
      articles.push_back(make_article(std::move(m), vectors));
    }
  }
  std::vector<std::size_t> by_time(articles.size());
  std::iota(by_time.begin(), by_time.end(), 0);
  std::sort(by_time.begin(), by_time.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(articles[a].published_at, articles[a].id) < std::tie(articles[b].published_at, articles[b].id);
  });
  // Index range of articles (in by_time order) published in (from, to].
  auto published_in = [&](Timestamp from, Timestamp to) {
    auto lo = std::upper_bound(by_time.begin(), by_time.end(), from,
                               [&](Timestamp t, std::size_t i) { return t < articles[i].published_at; });
    auto hi = std::upper_bound(lo, by_time.end(), to,
                               [&](Timestamp t, std::size_t i) { return t < articles[i].published_at; });
    return std::pair{lo, hi};
  };

  GroundTruth truth(cfg.click_model, affinity, truth_topic, truth_quality, truth_published);
  const auto slot = static_cast<std::size_t>(cfg.slot_size);

  // Editorial front page: non-personalized top list by quality, section focus and noise.
  std::vector<EditorialUpdate> manual;
  for (int d = 0; d < cfg.n_days; ++d) {
    const Timestamp day0 = cfg.start + d * kSecondsPerDay;
    const auto n_updates = rng.uniform_int(cfg.manual_updates_min, cfg.manual_updates_max);
    std::vector<Timestamp> times;
    for (std::int64_t k = 0; k < n_updates; ++k) {
      times.push_back(day0 + rng.uniform_int(6 * kSecondsPerHour, 23 * kSecondsPerHour + 30 * 60));
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    for (Timestamp t : times) {
      auto [lo, hi] = published_in(t - 36 * kSecondsPerHour, t);
      if (static_cast<std::size_t>(hi - lo) < slot) continue;
      std::vector<std::pair<double, std::size_t>> scored;
      for (auto it = lo; it != hi; ++it) {
        const auto& la = latent[*it];
        const double age_h = static_cast<double>(t - articles[*it].published_at) / kSecondsPerHour;
        const double score = la.quality + (la.section < 2 ? cfg.editor_section_focus : 0.0) - age_h / 24.0 +
                             rng.normal(0.0, 0.7);
        scored.emplace_back(-score, *it);
      }
      std::sort(scored.begin(), scored.end());
      EditorialUpdate up;
      up.at = t;
      for (std::size_t k = 0; k < slot; ++k) up.items.push_back(articles[scored[k].second].id);
      manual.push_back(std::move(up));
    }
  }

  // Visits, processed in time order so editorial state and per-user history are causal.
  struct Visit {
    Timestamp at;
    std::size_t user;
  };
  std::vector<Visit> visits;
  for (int d = 0; d < cfg.n_days; ++d) {
    const Timestamp day0 = cfg.start + d * kSecondsPerDay;
    for (std::size_t u = 0; u < users.size(); ++u) {
      const int n = poisson(rng, visit_rate[u]);
      for (int k = 0; k < n; ++k) {
        visits.push_back({day0 + rng.uniform_int(7 * kSecondsPerHour, kSecondsPerDay - 600), u});
      }
    }
  }
  std::sort(visits.begin(), visits.end(),
            [](const Visit& a, const Visit& b) { return std::tie(a.at, a.user) < std::tie(b.at, b.user); });

  std::vector<InteractionEvent> events;
  std::vector<std::set<std::size_t>> clicked(users.size());
  std::size_t manual_pos = 0;
  Timestamp last_at = std::numeric_limits<Timestamp>::min();
  std::size_t same_time_offset = 0;
  for (const auto& v : visits) {
    // Visits sharing a second are spread so each visit's events stay contiguous.
    same_time_offset = v.at == last_at ? same_time_offset + 1 : 0;
    last_at = v.at;
    while (manual_pos < manual.size() && manual[manual_pos].at <= v.at) ++manual_pos;
    const std::string& user = users[v.user];
    auto [lo, hi] = published_in(v.at - kSecondsPerWeek, v.at);

    std::vector<std::pair<std::size_t, DisplayContext>> shown;
    std::set<std::size_t> taken;
    auto show = [&](std::size_t idx, DisplayContext ctx) {
      if (clicked[v.user].contains(idx) || !taken.insert(idx).second) return;
      shown.emplace_back(idx, ctx);
    };
    if (manual_pos > 0) {
      for (const auto& id : manual[manual_pos - 1].items) {
        auto it = std::find_if(lo, hi, [&](std::size_t i) { return articles[i].id == id; });
        if (it != hi) show(*it, DisplayContext::Manual);
      }
    }
    // Pre-existing personalized slots ranked by a noisy view of the latent logit.
    std::vector<std::pair<double, std::size_t>> fresh, older;
    std::vector<std::size_t> rest;
    for (auto it = lo; it != hi; ++it) {
      if (clicked[v.user].contains(*it)) continue;
      const double noisy = truth.click_logit(user, articles[*it].id, v.at) + rng.normal(0.0, 1.0);
      (v.at - articles[*it].published_at <= kSecondsPerDay ? fresh : older).emplace_back(-noisy, *it);
      rest.push_back(*it);
    }
    std::sort(fresh.begin(), fresh.end());
    std::sort(older.begin(), older.end());
    for (std::size_t k = 0; k < std::min(slot, fresh.size()); ++k) show(fresh[k].second, DisplayContext::MNWidget);
    for (std::size_t k = 0; k < std::min(slot, older.size()); ++k) show(older[k].second, DisplayContext::MissedLW);
    rng.shuffle(rest);
    std::size_t others = 0;
    for (std::size_t idx : rest) {
      if (others == slot) break;
      if (taken.contains(idx)) continue;
      show(idx, DisplayContext::Other);
      ++others;
    }

    for (std::size_t k = 0; k < shown.size(); ++k) {
      const auto [idx, ctx] = shown[k];
      const Timestamp at = v.at + static_cast<Timestamp>(same_time_offset * 64 + k);
      const std::string& aid = articles[idx].id;
      events.push_back({user, aid, at, EventKind::Impression, ctx});
      const double p = truth.click_probability(user, aid, at);
      const bool noisy = rng.uniform() < cfg.click_noise;
      const double draw = rng.uniform();
      const bool click = noisy ? draw < p : p > truth.click_threshold();
      if (click) {
        events.push_back({user, aid, at, EventKind::Click, ctx});
        clicked[v.user].insert(idx);
      }
    }
  }

  Corpus corpus(std::move(articles), std::move(events), dim);
  return SyntheticWorld{std::move(corpus), std::move(truth), std::move(vectors), std::move(manual)};
}

}  // namespace newsrec
