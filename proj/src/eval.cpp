#include "newsrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "newsrec/random.hpp"

namespace newsrec {

using nlohmann::json;

std::optional<double> ndcg(std::span<const std::string> ranking, const StringSet& clicked) {
  if (ranking.empty() || clicked.empty()) return std::nullopt;
  double dcg = 0;
  bool any = false;
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (!seen.insert(ranking[i]).second) continue;
    if (clicked.contains(ranking[i])) {
      dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
      any = true;
    }
  }
  if (!any) return std::nullopt;
  double idcg = 0;
  for (std::size_t i = 0; i < clicked.size(); ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  return std::min(1.0, dcg / idcg);
}

std::optional<PrecisionRecall> precision_recall_at(std::span<const std::string> ranking, const StringSet& clicked,
                                                   std::size_t k) {
  if (clicked.empty() || k == 0) return std::nullopt;
  std::unordered_set<std::string_view> hit;
  for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
    if (clicked.contains(ranking[i])) hit.insert(ranking[i]);
  }
  PrecisionRecall pr;
  pr.hits = hit.size();
  pr.precision = static_cast<double>(pr.hits) / static_cast<double>(k);
  pr.recall = static_cast<double>(pr.hits) / static_cast<double>(clicked.size());
  return pr;
}

bool Scorer::has_day(std::int64_t) const { return true; }

ModelScorer::ModelScorer(const std::vector<NightlyModel>& models, const FeatureSchema& schema)
    : models_(models), schema_(schema) {}

const NightlyModel* ModelScorer::model_for(std::int64_t day) const {
  const NightlyModel* best = nullptr;
  for (const auto& m : models_) {
    if (m.trained_at < day_start(day + 1)) best = &m;
  }
  return best;
}

bool ModelScorer::has_day(std::int64_t day) const { return model_for(day) != nullptr; }

double ModelScorer::score(const Corpus& corpus, const std::string& user, const Article& article, Timestamp at,
                          std::int64_t day) const {
  const NightlyModel* m = model_for(day);
  if (!m) throw Error("no model for day " + format_iso8601(day_start(day)));
  return m->model.predict(extract(schema_, build_profile(corpus, user, at), article, at));
}

double OracleScorer::score(const Corpus&, const std::string& user, const Article& article, Timestamp at,
                           std::int64_t) const {
  return truth_.click_probability(user, article.id, at);
}

double RandomScorer::score(const Corpus&, const std::string& user, const Article& article, Timestamp,
                           std::int64_t) const {
  return hash_to_unit(fnv1a(article.id, fnv1a("|", fnv1a(user, seed_ ^ 0x72616e646f6dull))));
}

std::vector<UserDay> user_days(const Corpus& corpus, std::int64_t first_day, std::int64_t last_day) {
  std::vector<UserDay> out;
  const auto& events = corpus.events();
  for (std::int64_t d = first_day; d <= last_day; ++d) {
    const auto [e0, e1] = corpus.events_between(day_start(d), day_start(d + 1));
    std::map<std::string, UserDay> by_user;
    std::map<std::string, std::unordered_set<std::string>> shown;
    for (std::size_t i = e0; i < e1; ++i) {
      const auto& e = events[i];
      auto& ud = by_user[e.user_id];
      if (shown[e.user_id].insert(e.article_id).second) {
        ud.displayed.push_back(e.article_id);
        ud.first_seen.push_back(e.at);
      }
      if (e.kind == EventKind::Click) ud.clicked.insert(e.article_id);
    }
    for (auto& [user, ud] : by_user) {
      if (ud.clicked.empty()) continue;
      ud.user = user;
      ud.day = d;
      out.push_back(std::move(ud));
    }
  }
  return out;
}

AccuracyReport offline_eval(const Corpus& corpus, const Scorer& scorer, const OfflineEvalConfig& cfg) {
  AccuracyReport report;
  for (auto k : cfg.ks) {
    report.p_at[k] = 0.0;
    report.r_at[k] = 0.0;
  }
  if (corpus.events().empty()) return report;
  const std::int64_t first = cfg.first_day.value_or(day_of(corpus.events().front().at) + 1);
  const std::int64_t last = cfg.last_day.value_or(day_of(corpus.events().back().at));

  double ndcg_sum = 0;
  std::map<std::size_t, double> p_sum, r_sum;
  std::size_t n = 0;
  for (const auto& ud : user_days(corpus, first, last)) {
    if (!scorer.has_day(ud.day)) {
      if (report.skipped_days.empty() || report.skipped_days.back() != ud.day) report.skipped_days.push_back(ud.day);
      continue;
    }
    std::vector<RankedItem> items;
    items.reserve(ud.displayed.size());
    for (std::size_t i = 0; i < ud.displayed.size(); ++i) {
      const Article* a = corpus.find(ud.displayed[i]);
      items.push_back({a->id, scorer.score(corpus, ud.user, *a, ud.first_seen[i], ud.day), false});
    }
    sort_items(items, corpus);
    std::vector<std::string> ranking;
    ranking.reserve(items.size());
    for (auto& it : items) ranking.push_back(std::move(it.article_id));
    const auto g = ndcg(ranking, ud.clicked);
    if (!g) continue;
    ndcg_sum += *g;
    for (auto k : cfg.ks) {
      const auto pr = precision_recall_at(ranking, ud.clicked, k);
      p_sum[k] += pr->precision;
      r_sum[k] += pr->recall;
    }
    ++n;
  }
  report.n_user_days = n;
  if (n > 0) {
    report.ndcg = ndcg_sum / static_cast<double>(n);
    for (auto k : cfg.ks) {
      report.p_at[k] = p_sum[k] / static_cast<double>(n);
      report.r_at[k] = r_sum[k] / static_cast<double>(n);
    }
  }
  return report;
}

namespace {

std::string set_name(std::string_view metric, std::string_view attribute, std::string_view scope) {
  std::string k(metric);
  for (auto part : {attribute, scope}) {
    if (part.empty()) continue;
    k += '.';
    k += part;
  }
  return k;
}

std::string key(std::string_view metric, std::string_view a, std::string_view b = {}) { return set_name(metric, a, b); }

std::optional<Section> section_of(DisplayContext c) {
  switch (c) {
    case DisplayContext::MNWidget: return Section::MNWidget;
    case DisplayContext::MissedLW: return Section::MissedLW;
    case DisplayContext::MNPage: return Section::MNPage;
    case DisplayContext::Manual: return Section::Manual;
    default: return std::nullopt;
  }
}

StringSet published_on(const Corpus& corpus, std::int64_t day) {
  StringSet out;
  const auto [first, last] = corpus.published_between(day_start(day), day_start(day + 1));
  for (std::size_t i = first; i < last; ++i) out.insert(corpus.articles()[i].id);
  return out;
}

std::vector<std::string> prefix_ids(const RankedList& l, std::size_t top_n) {
  const std::size_t n = top_n == 0 ? l.items.size() : std::min(top_n, l.items.size());
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(l.items[i].article_id);
  return out;
}

/// Disjoint lists grouped by the calendar day of their timestamp.
std::map<std::int64_t, std::vector<const RankedList*>> by_day(const std::vector<const RankedList*>& lists) {
  std::map<std::int64_t, std::vector<const RankedList*>> out;
  for (const RankedList* l : lists) out[day_of(l->at)].push_back(l);
  return out;
}

using Emit = std::function<void(std::string_view metric, std::string_view attribute, std::string_view scope,
                                double value, Timestamp at)>;

void add_coverage(const Emit& emit, const Corpus& corpus, const std::vector<const RankedList*>& lists,
                  std::size_t top_n, bool manual) {
  for (const auto& [day, group] : by_day(lists)) {
    const StringSet published = published_on(corpus, day);
    const Timestamp at = day_start(day);
    if (manual) {
      if (auto c = coverage(group, published, CoverageScope::Manual, top_n)) {
        emit("coverage", "", "all_users", *c, at);
        emit("coverage", "", "per_user", *c, at);
      }
    } else {
      if (auto c = coverage(group, published, CoverageScope::AllUsers, top_n)) emit("coverage", "", "all_users", *c, at);
      if (auto c = coverage(group, published, CoverageScope::PerUser, top_n)) emit("coverage", "", "per_user", *c, at);
    }
  }
}

Emit into(MetricSets& sets) {
  return [&sets](std::string_view metric, std::string_view attribute, std::string_view scope, double value,
                 Timestamp) { sets[set_name(metric, attribute, scope)].push_back(value); };
}

/// Profiles keyed by (user, as_of), rebuilt only when the key changes.
class ProfileCache {
 public:
  explicit ProfileCache(const Corpus& corpus) : corpus_(corpus) {}
  const UserProfile& get(const std::string& user, Timestamp as_of) {
    if (!valid_ || user != profile_.user_id || as_of != profile_.window_end) {
      profile_ = build_profile(corpus_, user, as_of);
      valid_ = true;
    }
    return profile_;
  }

 private:
  const Corpus& corpus_;
  UserProfile profile_;
  bool valid_ = false;
};

void add_ndcg(const Emit& emit, const Corpus& corpus, const std::vector<const RankedList*>& lists) {
  // Stream lookup: (user, section) -> lists ordered by time.
  std::map<std::pair<std::string, Section>, std::vector<const RankedList*>> streams;
  for (const RankedList* l : lists) streams[{l->user_id, l->section}].push_back(l);
  for (auto& [_, s] : streams) {
    std::stable_sort(s.begin(), s.end(), [](const RankedList* a, const RankedList* b) { return a->at < b->at; });
  }
  if (streams.empty()) return;

  // (user, day, section) -> clicked ids and first click time.
  struct ClickGroup {
    StringSet clicked;
    Timestamp first = 0;
  };
  std::map<std::tuple<std::string, std::int64_t, Section>, ClickGroup> groups;
  for (const auto& e : corpus.events()) {
    if (e.kind != EventKind::Click) continue;
    const auto section = section_of(e.context);
    if (!section || !streams.contains({e.user_id, *section})) continue;
    auto& g = groups[{e.user_id, day_of(e.at), *section}];
    if (g.clicked.empty()) g.first = e.at;
    g.clicked.insert(e.article_id);
  }
  for (const auto& [k, g] : groups) {
    const auto& [user, day, section] = k;
    const auto& s = streams.at({user, section});
    auto it = std::lower_bound(s.begin(), s.end(), g.first,
                               [](const RankedList* l, Timestamp t) { return l->at < t; });
    if (it == s.begin()) continue;
    const RankedList& in_effect = **(it - 1);
    const auto ranking = prefix_ids(in_effect, 0);
    if (auto v = ndcg(ranking, g.clicked)) emit("ndcg", "", to_string(section), *v, g.first);
  }
}

}  // namespace

std::vector<MetricSample> treatment_samples(const std::vector<RankedList>& stream, const Corpus& corpus,
                                            const CompareConfig& cfg, const std::string& treatment) {
  std::vector<MetricSample> out;
  const Emit emit = [&](std::string_view metric, std::string_view attribute, std::string_view scope, double value,
                        Timestamp at) {
    out.push_back({std::string(metric), std::string(attribute), treatment, std::string(scope), value, at});
  };
  std::vector<const RankedList*> lists;
  std::vector<const RankedList*> any_section;
  for (const auto& l : stream) {
    if (cfg.skip_fallback && l.fallback) continue;
    if (l.section == Section::Manual) continue;
    any_section.push_back(&l);
    if (std::find(cfg.sections.begin(), cfg.sections.end(), l.section) != cfg.sections.end()) lists.push_back(&l);
  }

  std::vector<RankedList> selected;
  selected.reserve(lists.size());
  for (const RankedList* l : lists) selected.push_back(*l);
  for (const auto& s : dynamism_samples(selected, cfg.top_n, cfg.skip_fallback)) {
    emit("dynamism", "", s.scope, s.value, s.at);
  }

  ProfileCache profiles(corpus);
  for (const RankedList* l : lists) {
    const auto section = to_string(l->section);
    std::vector<const Article*> items;
    for (const auto& id : prefix_ids(*l, cfg.top_n)) items.push_back(corpus.find(id));
    const UserProfile& profile = profiles.get(l->user_id, l->at);
    for (AttributeKind attr : kAllAttributes) {
      if (auto d = intra_list_diversity(items, attr)) emit("diversity", to_string(attr), section, *d, l->at);
      if (auto s = serendipity(items, profile, attr)) emit("serendipity", to_string(attr), section, *s, l->at);
    }
  }
  add_coverage(emit, corpus, lists, cfg.top_n, false);
  add_ndcg(emit, corpus, any_section);
  return out;
}

MetricSets to_sets(const std::vector<MetricSample>& samples) {
  MetricSets sets;
  for (const auto& s : samples) sets[set_name(s.metric, s.attribute, s.scope)].push_back(s.value);
  return sets;
}

MetricSets treatment_metrics(const std::vector<RankedList>& stream, const Corpus& corpus, const CompareConfig& cfg) {
  return to_sets(treatment_samples(stream, corpus, cfg));
}

std::vector<ComparisonReport> compare_sets(const MetricSets& a, const MetricSets& b, TTestVariant variant) {
  std::vector<ComparisonReport> out;
  for (const auto& [name, xs] : a) {
    auto it = b.find(name);
    if (it == b.end() || xs.size() < 2 || it->second.size() < 2) continue;
    out.push_back(t_test(xs, it->second, variant, name));
  }
  return out;
}

std::vector<ComparisonReport> compare_treatments(const std::vector<RankedList>& a, const std::vector<RankedList>& b,
                                                 const Corpus& corpus, const CompareConfig& cfg) {
  if (a.empty() || b.empty()) throw Error("compare_treatments: empty emission stream");
  return compare_sets(treatment_metrics(a, corpus, cfg), treatment_metrics(b, corpus, cfg), cfg.variant);
}

ManualComparison compare_manual(const std::vector<RankedList>& manual, const std::vector<RankedList>& recsys,
                                const Corpus& corpus, const CompareConfig& cfg) {
  if (manual.empty() || recsys.empty()) throw Error("compare_manual: empty emission stream");
  ManualComparison out;
  std::vector<RankedList> pages;
  for (const auto& l : recsys) {
    if (l.section == Section::MNPage && !(cfg.skip_fallback && l.fallback)) pages.push_back(l);
  }
  std::vector<RankedList> man(manual);
  std::stable_sort(man.begin(), man.end(), [](const RankedList& x, const RankedList& y) { return x.at < y.at; });
  const auto pairs = align(man, pages);
  out.aligned_pairs = pairs.size();

  auto resolve = [&](const RankedList& l) {
    std::vector<const Article*> items;
    for (const auto& id : prefix_ids(l, cfg.top_n)) items.push_back(corpus.find(id));
    return items;
  };

  for (const auto& l : man) {
    const auto items = resolve(l);
    for (AttributeKind attr : kAllAttributes) {
      if (auto d = intra_list_diversity(items, attr)) out.manual[key("diversity", to_string(attr))].push_back(*d);
    }
  }
  for (std::size_t i = 1; i < man.size(); ++i) {
    if (auto d = dynamism(man[i - 1], man[i], cfg.top_n)) {
      out.manual["dynamism.aligned"].push_back(*d);
      out.manual["dynamism.all"].push_back(*d);
    }
  }

  std::map<std::string, std::vector<std::size_t>> aligned_by_user;
  ProfileCache profiles(corpus);
  for (const auto& p : pairs) {
    const RankedList& m = man[p.manual];
    const RankedList& r = pages[p.recsys];
    aligned_by_user[r.user_id].push_back(p.recsys);
    const auto r_items = resolve(r);
    const auto m_items = resolve(m);
    const UserProfile& profile = profiles.get(r.user_id, m.at);
    for (AttributeKind attr : kAllAttributes) {
      const auto name = to_string(attr);
      if (auto d = intra_list_diversity(r_items, attr)) out.recsys[key("diversity", name)].push_back(*d);
      if (auto s = serendipity(r_items, profile, attr)) out.recsys[key("serendipity", name)].push_back(*s);
      if (auto s = serendipity(m_items, profile, attr)) out.manual[key("serendipity", name)].push_back(*s);
    }
  }
  for (const auto& [_, seq] : aligned_by_user) {
    for (std::size_t i = 1; i < seq.size(); ++i) {
      if (auto d = dynamism(pages[seq[i - 1]], pages[seq[i]], cfg.top_n)) out.recsys["dynamism.aligned"].push_back(*d);
    }
  }
  for (const auto& s : dynamism_samples(pages, cfg.top_n, cfg.skip_fallback)) {
    out.recsys["dynamism.all"].push_back(s.value);
  }

  std::vector<const RankedList*> man_ptrs, page_ptrs;
  for (const auto& l : man) man_ptrs.push_back(&l);
  for (const auto& l : pages) page_ptrs.push_back(&l);
  add_coverage(into(out.manual), corpus, man_ptrs, cfg.top_n, true);
  add_coverage(into(out.recsys), corpus, page_ptrs, cfg.top_n, false);

  out.reports = compare_sets(out.manual, out.recsys, cfg.variant);
  return out;
}

std::vector<RankedList> click_lists(const Corpus& corpus, Period period) {
  std::vector<RankedList> out;
  const auto& events = corpus.events();
  for (std::int64_t d = day_of(period.from); day_start(d) < period.to; ++d) {
    const Timestamp from = std::max(period.from, day_start(d));
    const Timestamp to = std::min(period.to, day_start(d + 1));
    const auto [e0, e1] = corpus.events_between(from, to);
    std::map<std::string, RankedList> by_user;
    std::map<std::string, std::unordered_set<std::string>> seen;
    for (std::size_t i = e0; i < e1; ++i) {
      const auto& e = events[i];
      if (e.kind != EventKind::Click || !seen[e.user_id].insert(e.article_id).second) continue;
      auto& l = by_user[e.user_id];
      l.user_id = e.user_id;
      l.section = Section::MNPage;
      l.at = from;
      l.items.push_back({e.article_id, 0.0, false});
    }
    for (auto& [_, l] : by_user) out.push_back(std::move(l));
  }
  return out;
}

std::vector<ComparisonReport> behavior_shift(const Corpus& corpus, Period before, Period after,
                                             TTestVariant variant, MetricSets* before_sets,
                                             MetricSets* after_sets) {
  auto collect = [&](Period p, const char* label) {
    const auto lists = click_lists(corpus, p);
    if (lists.empty()) throw Error(std::string("behavior_shift: no clicks in the ") + label + " period");
    MetricSets sets;
    std::vector<const RankedList*> ptrs;
    for (const auto& l : lists) {
      ptrs.push_back(&l);
      std::vector<const Article*> items;
      for (const auto& it : l.items) items.push_back(corpus.find(it.article_id));
      for (AttributeKind attr : kAllAttributes) {
        if (auto d = intra_list_diversity(items, attr)) sets[key("diversity", to_string(attr))].push_back(*d);
      }
    }
    for (const auto& [day, group] : by_day(ptrs)) {
      if (auto c = coverage(group, published_on(corpus, day), CoverageScope::AllUsers)) {
        sets["coverage.all_users"].push_back(*c);
      }
    }
    return sets;
  };
  MetricSets a = collect(before, "before");
  MetricSets b = collect(after, "after");
  auto reports = compare_sets(a, b, variant);
  if (before_sets) *before_sets = std::move(a);
  if (after_sets) *after_sets = std::move(b);
  return reports;
}

namespace {

json summary_json(const SampleSummary& s) { return {{"n", s.n}, {"mean", s.mean}, {"sd", s.sd}}; }

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string fixed(double v, int digits = 4) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

void write_report_json(const std::vector<ComparisonReport>& reports, const std::filesystem::path& path) {
  json arr = json::array();
  for (const auto& r : reports) {
    arr.push_back({{"metric", r.metric},
                   {"variant", to_string(r.variant)},
                   {"a", summary_json(r.group_a)},
                   {"b", summary_json(r.group_b)},
                   {"t", std::isfinite(r.t_stat) ? json(r.t_stat) : json(r.t_stat > 0 ? "inf" : "-inf")},
                   {"df", r.df},
                   {"p", r.p_value},
                   {"significant", r.significant}});
  }
  write_json(arr, path);
}

json accuracy_json(const AccuracyReport& report) {
  json p = json::object(), r = json::object();
  for (const auto& [k, v] : report.p_at) p[std::to_string(k)] = v;
  for (const auto& [k, v] : report.r_at) r[std::to_string(k)] = v;
  return {{"ndcg", report.ndcg},
          {"p_at", p},
          {"r_at", r},
          {"n_user_days", report.n_user_days},
          {"skipped_days", report.skipped_days}};
}

void write_report_json(const AccuracyReport& report, const std::filesystem::path& path) {
  write_json(accuracy_json(report), path);
}

void write_report_json(const std::vector<std::pair<std::string, AccuracyReport>>& reports,
                       const std::filesystem::path& path) {
  json j = json::object();
  for (const auto& [name, r] : reports) j[name] = accuracy_json(r);
  write_json(j, path);
}

std::string format_table(const std::vector<ComparisonReport>& reports, const std::string& label_a,
                         const std::string& label_b) {
  std::size_t w = 6;
  for (const auto& r : reports) w = std::max(w, r.metric.size());
  std::string out = pad("metric", w + 2) + pad(label_a, 20) + pad(label_b, 20) + pad("t", 10) + pad("p", 10) + "sig\n";
  for (const auto& r : reports) {
    out += pad(r.metric, w + 2);
    out += pad(fixed(r.group_a.mean) + " (" + fixed(r.group_a.sd) + ")", 20);
    out += pad(fixed(r.group_b.mean) + " (" + fixed(r.group_b.sd) + ")", 20);
    out += pad(fixed(r.t_stat, 3), 10);
    out += pad(fixed(r.p_value), 10);
    out += r.significant ? "*\n" : "\n";
  }
  return out;
}

std::string format_table(const AccuracyReport& report) { return format_table({{"", report}}); }

std::string format_table(const std::vector<std::pair<std::string, AccuracyReport>>& reports) {
  if (reports.empty()) return {};
  std::size_t w = 0;
  for (const auto& [name, _] : reports) w = std::max(w, name.size() + 2);
  const AccuracyReport& head = reports.front().second;
  std::string out = pad("", w) + "NDCG    ";
  for (const auto& [k, _] : head.r_at) out += pad("R@" + std::to_string(k), 8);
  for (const auto& [k, _] : head.p_at) out += pad("P@" + std::to_string(k), 8);
  out += "user-days\n";
  for (const auto& [name, report] : reports) {
    out += pad(name, w) + pad(fixed(report.ndcg), 8);
    for (const auto& [_, v] : report.r_at) out += pad(fixed(v), 8);
    for (const auto& [_, v] : report.p_at) out += pad(fixed(v), 8);
    out += std::to_string(report.n_user_days) + "\n";
  }
  return out;
}

}  // namespace newsrec
