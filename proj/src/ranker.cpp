#include "newsrec/ranker.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <tuple>
#include <unordered_map>

#include "json.hpp"
#include "newsrec/random.hpp"

namespace newsrec {

using nlohmann::json;

namespace {
constexpr std::array<std::pair<Section, std::string_view>, 4> kSectionNames{{
    {Section::Manual, "manual"},
    {Section::MNWidget, "mnwidget"},
    {Section::MissedLW, "missedlw"},
    {Section::MNPage, "mnpage"},
}};

struct Scored {
  std::size_t index;  // article index
  double score;
  bool recommended;
};

/// Score descending, then newer, then smaller id.
void sort_scored(std::vector<Scored>& items, const Corpus& corpus) {
  const auto& arts = corpus.articles();
  std::sort(items.begin(), items.end(), [&](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    const auto& x = arts[a.index];
    const auto& y = arts[b.index];
    if (x.published_at != y.published_at) return x.published_at > y.published_at;
    return x.id < y.id;
  });
}

std::vector<Scored> to_scored(const RankedList& list, const Corpus& corpus) {
  std::vector<Scored> out;
  out.reserve(list.items.size());
  for (const auto& item : list.items) {
    const auto idx = corpus.index_of(item.article_id);
    if (!idx) throw Error("ranked list references unknown article " + item.article_id);
    out.push_back({*idx, item.score, item.recommended});
  }
  return out;
}

std::vector<RankedItem> to_items(const std::vector<Scored>& scored, const Corpus& corpus) {
  std::vector<RankedItem> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back({corpus.articles()[s.index].id, s.score, s.recommended});
  return out;
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("lambda must be in [0, 1], got " + std::to_string(lambda));
}
}  // namespace

std::string_view to_string(Section s) {
  for (const auto& [v, name] : kSectionNames) {
    if (v == s) return name;
  }
  return "mnpage";
}

std::optional<Section> parse_section(std::string_view s) {
  for (const auto& [v, name] : kSectionNames) {
    if (name == s) return v;
  }
  return std::nullopt;
}

std::string_view to_string(Treatment t) { return t == Treatment::Dynamism ? "dynamism" : "baseline"; }

std::optional<Treatment> parse_treatment(std::string_view s) {
  if (s == "baseline") return Treatment::Baseline;
  if (s == "dynamism") return Treatment::Dynamism;
  return std::nullopt;
}

std::vector<std::string> PipelineConfig::validate() const {
  std::vector<std::string> errors;
  if (candidate_window <= 0) errors.push_back("candidate_window: must be > 0");
  if (refresh_interval <= 0) errors.push_back("refresh_interval: must be > 0");
  if (nightly_train_hour < 0 || nightly_train_hour > 23) errors.push_back("nightly_train_hour: must be in [0, 23]");
  if (training_days < 1) errors.push_back("training_days: must be >= 1");
  if (!(lambda >= 0 && lambda <= 1)) errors.push_back("lambda: must be in [0, 1]");
  if (!std::isfinite(rec_label_threshold)) errors.push_back("rec_label_threshold: must be finite");
  if (t_start && t_end && *t_end <= *t_start) errors.push_back("t_end: must be after t_start");
  for (auto& e : train.validate()) errors.push_back("train." + e);
  return errors;
}

std::vector<std::size_t> candidates(const Corpus& corpus, Timestamp at, Timestamp window) {
  if (window <= 0) throw Error("candidate window must be > 0");
  const auto [first, last] = corpus.published_between(at - window + 1, at + 1);
  std::vector<std::size_t> out(last - first);
  for (std::size_t i = first; i < last; ++i) out[i - first] = i;
  return out;
}

void sort_items(std::vector<RankedItem>& items, const Corpus& corpus) {
  RankedList tmp;
  tmp.items = std::move(items);
  auto scored = to_scored(tmp, corpus);
  sort_scored(scored, corpus);
  items = to_items(scored, corpus);
}

RankedList rank(const TreeEnsemble& model, const FeatureSchema& schema, const UserProfile& profile,
                const Corpus& corpus, const std::vector<std::size_t>& candidate_indices, Timestamp at,
                double rec_label_threshold) {
  RankedList list{profile.user_id, Section::MNPage, at, {}, false};
  std::vector<double> buf(schema.width());
  std::vector<Scored> scored;
  scored.reserve(candidate_indices.size());
  const ProfileSummary summary = summarize(profile, schema.config().top_k);
  for (std::size_t idx : candidate_indices) {
    extract_into(schema, profile, summary, corpus.articles()[idx], at, buf);
    const double s = model.predict(buf);
    scored.push_back({idx, s, s >= rec_label_threshold});
  }
  sort_scored(scored, corpus);
  list.items = to_items(scored, corpus);
  return list;
}

SectionLists slice_sections(const RankedList& full, const Corpus& corpus, Timestamp at, std::size_t widget_size,
                            std::size_t missed_size) {
  SectionLists out;
  out.widget = {full.user_id, Section::MNWidget, at, {}, full.fallback};
  out.missed = {full.user_id, Section::MissedLW, at, {}, full.fallback};
  out.page = full;
  out.page.section = Section::MNPage;
  out.page.at = at;
  for (const auto& item : full.items) {
    const Article* a = corpus.find(item.article_id);
    if (!a) throw Error("ranked list references unknown article " + item.article_id);
    const Timestamp age = at - a->published_at;
    if (age <= kSecondsPerDay) {
      if (out.widget.items.size() < widget_size) out.widget.items.push_back(item);
    } else if (age <= kSecondsPerWeek) {
      if (out.missed.items.size() < missed_size) out.missed.items.push_back(item);
    }
  }
  return out;
}

double dyn_score(Timestamp published_at, Timestamp t_start) {
  if (published_at <= t_start) return 0.0;
  const double hours = static_cast<double>(published_at - t_start) / 3600.0;
  return 1.0 - 1.0 / (1.0 + std::log1p(hours));
}

double dyn_score(const Article& article, Timestamp t_start) { return dyn_score(article.published_at, t_start); }

RankedList rerank(const RankedList& full, const Corpus& corpus, double lambda, Timestamp t_start) {
  check_lambda(lambda);
  auto scored = to_scored(full, corpus);
  for (auto& s : scored) {
    s.score = lambda * s.score + (1.0 - lambda) * dyn_score(corpus.articles()[s.index], t_start);
  }
  sort_scored(scored, corpus);
  RankedList out = full;
  out.items = to_items(scored, corpus);
  return out;
}

std::pair<Timestamp, Timestamp> pipeline_horizon(const Corpus& corpus, const PipelineConfig& cfg) {
  Timestamp start = 0, end = 0;
  if (!corpus.events().empty()) {
    start = day_start(day_of(corpus.events().front().at));
    end = day_start(day_of(corpus.events().back().at) + 1);
  } else if (!corpus.articles().empty()) {
    start = day_start(day_of(corpus.articles().front().published_at));
    end = day_start(day_of(corpus.articles().back().published_at) + 1);
  }
  return {cfg.t_start.value_or(start), cfg.t_end.value_or(end)};
}

std::vector<NightlyModel> train_nightly(const Corpus& corpus, const FeatureSchema& schema, const PipelineConfig& cfg) {
  if (auto errors = cfg.validate(); !errors.empty()) throw Error("invalid pipeline config: " + errors.front());
  const auto [t0, t1] = pipeline_horizon(corpus, cfg);
  std::vector<NightlyModel> models;
  for (std::int64_t d = day_of(t0); day_start(d) < t1; ++d) {
    const Timestamp when = day_start(d) + cfg.nightly_train_hour * kSecondsPerHour;
    if (when >= t1) break;
    std::vector<LabeledExample> examples;
    for (std::int64_t past = d - cfg.training_days; past < d; ++past) {
      auto set = build_training_set(corpus, schema, past, cfg.seed ^ fnv1a(std::to_string(past)));
      for (auto& e : set.examples) examples.push_back(std::move(e));
    }
    const auto pos = std::count_if(examples.begin(), examples.end(), [](const auto& e) { return e.label == 1; });
    if (pos == 0 || pos == static_cast<std::ptrdiff_t>(examples.size())) continue;
    models.push_back({when, train(examples, cfg.train)});
  }
  return models;
}

std::vector<RankedList> run_pipeline(const Corpus& corpus, const FeatureSchema& schema, const PipelineConfig& cfg,
                                     const std::vector<std::string>& users) {
  return run_pipeline(corpus, schema, cfg, users, train_nightly(corpus, schema, cfg));
}

std::vector<RankedList> run_pipeline(const Corpus& corpus, const FeatureSchema& schema, const PipelineConfig& cfg,
                                     const std::vector<std::string>& users, const std::vector<NightlyModel>& models) {
  return std::move(run_pipeline_arms(corpus, schema, cfg, users, models, {{cfg.treatment, cfg.lambda}}).front());
}

std::vector<std::vector<RankedList>> run_pipeline_arms(const Corpus& corpus, const FeatureSchema& schema,
                                                       const PipelineConfig& cfg, const std::vector<std::string>& users,
                                                       const std::vector<NightlyModel>& models,
                                                       const std::vector<PipelineArm>& arms) {
  if (auto errors = cfg.validate(); !errors.empty()) throw Error("invalid pipeline config: " + errors.front());
  for (const auto& arm : arms) check_lambda(arm.lambda);
  const auto [t0, t1] = pipeline_horizon(corpus, cfg);
  const auto& events = corpus.events();
  const auto& arts = corpus.articles();
  std::vector<std::vector<RankedList>> streams(arms.size());
  std::vector<double> buf(schema.width());

  for (const auto& user : users) {
    // Regeneration times: clock ticks plus this user's clicks. A click-triggered
    // regeneration sees the triggering click in the profile.
    std::map<Timestamp, bool> times;  // at -> includes a click at that instant
    for (Timestamp t = t0; t < t1; t += cfg.refresh_interval) times.emplace(t, false);
    for (std::size_t e : corpus.clicks_of(user)) {
      if (events[e].at >= t0 && events[e].at < t1) times[events[e].at] = true;
    }
    for (const auto& [at, after_click] : times) {
      const NightlyModel* model = nullptr;
      for (const auto& m : models) {
        if (m.trained_at <= at) model = &m;
      }
      const auto [first, last] = corpus.published_between(at - cfg.candidate_window + 1, at + 1);
      std::vector<Scored> scored;
      scored.reserve(last - first);
      if (model) {
        const UserProfile profile = build_profile(corpus, user, after_click ? at + 1 : at);
        const ProfileSummary summary = summarize(profile, schema.config().top_k);
        for (std::size_t idx = first; idx < last; ++idx) {
          extract_into(schema, profile, summary, arts[idx], at, buf);
          const double s = model->model.predict(buf);
          scored.push_back({idx, s, s >= cfg.rec_label_threshold});
        }
      } else {
        for (std::size_t idx = first; idx < last; ++idx) scored.push_back({idx, dyn_score(arts[idx], t0), false});
      }
      sort_scored(scored, corpus);
      for (std::size_t a = 0; a < arms.size(); ++a) {
        std::vector<Scored> arm_scored = scored;
        if (model && arms[a].treatment == Treatment::Dynamism) {
          const double lambda = arms[a].lambda;
          for (auto& s : arm_scored) s.score = lambda * s.score + (1.0 - lambda) * dyn_score(arts[s.index], t0);
          sort_scored(arm_scored, corpus);
        }
        const bool fallback = model == nullptr;
        RankedList widget{user, Section::MNWidget, at, {}, fallback};
        RankedList missed{user, Section::MissedLW, at, {}, fallback};
        RankedList page{user, Section::MNPage, at, {}, fallback};
        for (const auto& s : arm_scored) {
          const Article& art = arts[s.index];
          RankedItem item{art.id, s.score, s.recommended};
          const Timestamp age = at - art.published_at;
          if (age <= kSecondsPerDay) {
            if (widget.items.size() < cfg.widget_size) widget.items.push_back(item);
          } else if (age <= kSecondsPerWeek) {
            if (missed.items.size() < cfg.missed_size) missed.items.push_back(item);
          }
          if (cfg.page_size == 0 || page.items.size() < cfg.page_size) page.items.push_back(std::move(item));
        }
        auto& out = streams[a];
        out.push_back(std::move(widget));
        out.push_back(std::move(missed));
        out.push_back(std::move(page));
      }
    }
  }
  for (auto& s : streams) {
    std::stable_sort(s.begin(), s.end(), [](const RankedList& a, const RankedList& b) {
      return std::tie(a.at, a.user_id, a.section) < std::tie(b.at, b.user_id, b.section);
    });
  }
  return streams;
}

std::vector<RankedList> manual_lists(const std::vector<EditorialUpdate>& updates, const Corpus& corpus) {
  std::vector<RankedList> out;
  for (const auto& up : updates) {
    if (up.items.size() > 5) {
      throw Error("editorial update at " + format_iso8601(up.at) + " has " + std::to_string(up.items.size()) +
                  " items (max 5)");
    }
    RankedList list{kManualUser, Section::Manual, up.at, {}, false};
    StringSet seen;
    for (std::size_t r = 0; r < up.items.size(); ++r) {
      const Article* a = corpus.find(up.items[r]);
      if (!a) throw Error("editorial update references unknown article " + up.items[r]);
      if (a->published_at > up.at) throw Error("editorial update lists " + a->id + " before its publication");
      if (!seen.insert(a->id).second) throw Error("editorial update lists " + a->id + " twice");
      // Position-based score keeps the editor's order under the standard sort.
      list.items.push_back({a->id, static_cast<double>(up.items.size() - r), false});
    }
    out.push_back(std::move(list));
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedList& a, const RankedList& b) { return a.at < b.at; });
  return out;
}

std::vector<EditorialUpdate> synthesize_manual_updates(const Corpus& corpus, Timestamp from, Timestamp to,
                                                       const ManualSynthesisConfig& cfg) {
  Rng rng(cfg.seed ^ 0x6d616e75616cull);
  const auto& arts = corpus.articles();
  const auto& events = corpus.events();
  std::vector<EditorialUpdate> out;
  for (std::int64_t d = day_of(from); day_start(d) < to; ++d) {
    const auto n = rng.uniform_int(cfg.min_updates_per_day, cfg.max_updates_per_day);
    std::vector<Timestamp> times;
    for (std::int64_t k = 0; k < n; ++k) {
      times.push_back(day_start(d) + rng.uniform_int(6 * kSecondsPerHour, 23 * kSecondsPerHour + 30 * 60));
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    for (Timestamp t : times) {
      if (t < from || t >= to) continue;
      const auto [first, last] = corpus.published_between(t - cfg.freshness + 1, t + 1);
      if (last - first < cfg.list_size) continue;
      std::unordered_map<std::size_t, int> popularity;
      const auto [e0, e1] = corpus.events_between(t - kSecondsPerDay, t);
      for (std::size_t e = e0; e < e1; ++e) {
        if (events[e].kind == EventKind::Click) ++popularity[corpus.event_article(e)];
      }
      std::vector<std::pair<double, std::size_t>> scored;
      for (std::size_t idx = first; idx < last; ++idx) {
        const auto it = popularity.find(idx);
        const double pop = it == popularity.end() ? 0.0 : it->second;
        scored.emplace_back(-(std::log1p(pop) + rng.normal(0.0, cfg.editor_noise)), idx);
      }
      std::sort(scored.begin(), scored.end());
      EditorialUpdate up{t, {}};
      for (std::size_t k = 0; k < cfg.list_size; ++k) up.items.push_back(arts[scored[k].second].id);
      out.push_back(std::move(up));
    }
  }
  return out;
}

std::vector<EditorialUpdate> read_manual_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<EditorialUpdate> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      EditorialUpdate up;
      const auto& at = j.at("at");
      if (at.is_string()) {
        auto t = parse_iso8601(at.get<std::string>());
        if (!t) throw ParseError(path.string(), line_no, "bad timestamp");
        up.at = *t;
      } else {
        up.at = at.get<Timestamp>();
      }
      up.items = j.at("items").get<std::vector<std::string>>();
      if (up.items.size() > 5) {
        throw ParseError(path.string(), line_no, "editorial list has " + std::to_string(up.items.size()) +
                                                     " items (max 5)");
      }
      out.push_back(std::move(up));
    } catch (const json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.at < b.at; });
  return out;
}

void write_manual_jsonl(const std::vector<EditorialUpdate>& updates, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& up : updates) out << json{{"at", up.at}, {"items", up.items}}.dump() << '\n';
}

void write_emissions_jsonl(const std::vector<RankedList>& lists, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& l : lists) {
    json items = json::array();
    for (const auto& it : l.items) {
      items.push_back({{"id", it.article_id}, {"score", it.score}, {"recommended", it.recommended}});
    }
    json j{{"user", l.user_id}, {"section", to_string(l.section)}, {"at", l.at}, {"fallback", l.fallback},
           {"items", std::move(items)}};
    out << j.dump() << '\n';
  }
}

std::vector<RankedList> read_emissions_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<RankedList> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      RankedList l;
      l.user_id = j.at("user").get<std::string>();
      const auto section = parse_section(j.at("section").get<std::string>());
      if (!section) throw ParseError(path.string(), line_no, "unknown section");
      l.section = *section;
      l.at = j.at("at").get<Timestamp>();
      l.fallback = j.value("fallback", false);
      for (const auto& it : j.at("items")) {
        l.items.push_back({it.at("id").get<std::string>(), it.at("score").get<double>(), it.value("recommended", false)});
      }
      out.push_back(std::move(l));
    } catch (const json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return out;
}

}  // namespace newsrec
