// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "newsrec/eval.hpp"
#include "newsrec/experiment.hpp"
#include "ttest_reference.hpp"

using namespace newsrec;
namespace fs = std::filesystem;

#ifndef NEWSREC_SOURCE_DIR
#error "NEWSREC_SOURCE_DIR must be defined"
#endif
#ifndef NEWSREC_CLI
#error "NEWSREC_CLI must be defined"
#endif

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "" : "FAILED ") + what);
  }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os.setf(std::ios::scientific);
  os.precision(2);
  os << v;
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("newsrec_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int failures = 0;

void report(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body,
            double carried_s = 0.0) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() + carried_s;
  out.require(secs < limit_s, "time " + fmt(secs, 1) + "s < " + fmt(limit_s, 0) + "s");
  if (!out.pass) ++failures;
  std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title;
  for (const auto& n : out.notes) std::cout << "\n    " << n;
  std::cout << std::endl;
}

// ---- independent oracles ------------------------------------------------

double oracle_jaccard(const StringSet& a, const StringSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

double oracle_cos(const Vector& a, const Vector& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

bool zero(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

double oracle_sim(const Article& a, const Article& b, AttributeKind attr) {
  switch (attr) {
    case AttributeKind::Section: return a.section == b.section ? 1.0 : 0.0;
    case AttributeKind::Tags: return oracle_jaccard(a.tags, b.tags);
    case AttributeKind::Authors: return oracle_jaccard(a.authors, b.authors);
    case AttributeKind::Embedding:
      if (zero(a.embedding) || zero(b.embedding)) return 0.0;
      return (oracle_cos(a.embedding, b.embedding) + 1.0) / 2.0;
  }
  return 0.0;
}

double oracle_ild(const std::vector<const Article*>& items, AttributeKind attr) {
  std::vector<double> sims;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = 0; j < items.size(); ++j) {
      if (i < j) sims.push_back(oracle_sim(*items[i], *items[j], attr));
    }
  }
  double scale = 1.0;
  if (attr == AttributeKind::Embedding) {
    double top = 0;
    for (double s : sims) top = std::max(top, s);
    scale = top > 0 ? 1.0 / top : 0.0;
  }
  double total = 0;
  for (double s : sims) total += 1.0 - s * scale;
  return total / static_cast<double>(sims.size());
}

double oracle_share(const std::map<std::string, int>& freq, const StringSet& values) {
  double total = 0, hit = 0;
  for (const auto& [k, n] : freq) {
    total += n;
    if (values.count(k)) hit += n;
  }
  return total > 0 ? hit / total : 0.0;
}

double oracle_unexpected(const Article& a, const UserProfile& p, AttributeKind attr) {
  if (p.n_clicks == 0) return 1.0;
  switch (attr) {
    case AttributeKind::Section: return 1.0 - oracle_share(p.section_freq, {a.section});
    case AttributeKind::Tags: return 1.0 - oracle_share(p.tag_freq, a.tags);
    case AttributeKind::Authors: return 1.0 - oracle_share(p.author_freq, a.authors);
    case AttributeKind::Embedding:
      if (zero(p.mean_embedding) || zero(a.embedding)) return 1.0;
      return 1.0 - (oracle_cos(p.mean_embedding, a.embedding) + 1.0) / 2.0;
  }
  return 1.0;
}

double oracle_dynamism(const std::vector<std::string>& l1, const std::vector<std::string>& l2) {
  int fresh = 0;
  for (const auto& id : l2) fresh += std::find(l1.begin(), l1.end(), id) == l1.end() ? 1 : 0;
  return static_cast<double>(fresh) / static_cast<double>(l2.size());
}

double oracle_gini(const std::vector<double>& x) {
  double diff = 0, sum = 0;
  for (double a : x) {
    sum += a;
    for (double b : x) diff += std::abs(a - b);
  }
  const double n = static_cast<double>(x.size());
  return sum > 0 ? (diff / (n * n)) / (2.0 * sum / n) : 0.0;
}

double oracle_entropy(const std::vector<double>& x) {
  double sum = 0, h = 0;
  for (double a : x) sum += a;
  for (double a : x) {
    if (a > 0) h -= (a / sum) * std::log2(a / sum);
  }
  return h;
}

// ---- criteria -----------------------------------------------------------

Outcome metric_oracles() {
  Outcome out;
  SyntheticWorldConfig wc;
  wc.seed = 501;
  wc.n_users = 30;
  wc.n_days = 4;
  wc.articles_per_day = 60;
  const SyntheticWorld w = generate_world(wc);
  const Corpus& c = w.corpus;
  std::mt19937_64 gen(2024);
  const auto& arts = c.articles();
  const auto& users = c.users();
  const Timestamp t_lo = arts.front().published_at, t_hi = arts.back().published_at;

  std::vector<RankedList> lists;
  for (int i = 0; i < 500; ++i) {
    RankedList l;
    l.user_id = users[gen() % users.size()];
    l.at = t_lo + static_cast<Timestamp>(gen() % static_cast<std::uint64_t>(t_hi - t_lo + 1));
    const std::size_t n = 2 + gen() % 9;
    std::vector<std::size_t> pick(arts.size());
    std::iota(pick.begin(), pick.end(), 0);
    std::shuffle(pick.begin(), pick.end(), gen);
    for (std::size_t k = 0; k < n; ++k) l.items.push_back({arts[pick[k]].id, 0.0, false});
    lists.push_back(std::move(l));
  }

  double worst = 0;
  std::size_t checks = 0;
  auto check = [&](double got, double want) {
    worst = std::max(worst, std::abs(got - want));
    ++checks;
  };
  auto ids_of = [](const RankedList& l) {
    std::vector<std::string> v;
    for (const auto& it : l.items) v.push_back(it.article_id);
    return v;
  };

  for (std::size_t i = 0; i < lists.size(); ++i) {
    const RankedList& l = lists[i];
    std::vector<const Article*> items;
    for (const auto& it : l.items) items.push_back(c.find(it.article_id));
    const UserProfile profile = build_profile(c, l.user_id, l.at);
    for (AttributeKind attr : kAllAttributes) {
      check(*intra_list_diversity(l, c, attr), oracle_ild(items, attr));
      double u = 0;
      for (const Article* a : items) u += oracle_unexpected(*a, profile, attr);
      check(*serendipity(l, c, profile, attr), u / static_cast<double>(items.size()));
    }
    if (i > 0) check(*dynamism(lists[i - 1], l), oracle_dynamism(ids_of(lists[i - 1]), ids_of(l)));

    const StringSet clicked{l.items[gen() % l.items.size()].article_id, l.items[gen() % l.items.size()].article_id};
    double dcg = 0, idcg = 0;
    const auto ranking = ids_of(l);
    for (std::size_t r = 0; r < ranking.size(); ++r) {
      if (clicked.count(ranking[r])) dcg += 1.0 / std::log2(r + 2.0);
    }
    for (std::size_t r = 0; r < clicked.size(); ++r) idcg += 1.0 / std::log2(r + 2.0);
    check(*ndcg(ranking, clicked), dcg / idcg);
  }

  for (std::size_t start = 0; start < lists.size(); start += 50) {
    const std::vector<RankedList> group(lists.begin() + start, lists.begin() + start + 50);
    const std::int64_t day = day_of(group.front().at);
    StringSet published;
    for (const auto& a : arts) {
      if (day_of(a.published_at) == day) published.insert(a.id);
    }
    if (published.empty()) continue;
    StringSet all;
    std::map<std::string, StringSet> per;
    for (const auto& l : group) {
      for (const auto& it : l.items) {
        if (published.count(it.article_id)) {
          all.insert(it.article_id);
          per[l.user_id].insert(it.article_id);
        }
      }
      per[l.user_id];
    }
    double mean = 0;
    for (const auto& [_, s] : per) mean += static_cast<double>(s.size()) / static_cast<double>(published.size());
    mean /= static_cast<double>(per.size());
    check(*coverage(group, published, CoverageScope::AllUsers),
          static_cast<double>(all.size()) / static_cast<double>(published.size()));
    check(*coverage(group, published, CoverageScope::PerUser), mean);

    std::map<std::string, int> freq;
    for (const auto& l : group) ++freq[l.items.front().article_id.substr(0, 6)];
    std::vector<double> counts;
    for (const auto& [_, n] : freq) counts.push_back(n);
    check(*gini(freq), oracle_gini(counts));
    check(*entropy(freq), oracle_entropy(counts));
  }

  out.require(lists.size() == 500, std::to_string(lists.size()) + " random lists");
  out.require(worst <= 1e-12, std::to_string(checks) + " values, max |error| " + sci(worst) + " <= 1e-12");
  return out;
}

Outcome dyn_checks() {
  Outcome out;
  const Timestamp t0 = 1574640000;
  auto art = [](std::string id, Timestamp at) {
    Article a;
    a.id = std::move(id);
    a.published_at = at;
    a.section = "s";
    a.embedding = {0.0, 0.0};
    return a;
  };
  const Corpus c({art("old", t0 - 3600), art("hour", t0 + 3600), art("day", t0 + kSecondsPerDay)}, {}, 2);
  const double one_hour = 1.0 - 1.0 / (1.0 + std::log(2.0));
  out.require(std::abs(dyn_score(t0 + 3600, t0) - one_hour) < 1e-12, "Dyn(1h) = " + fmt(dyn_score(t0 + 3600, t0)));
  out.require(std::abs(dyn_score(t0 + 3600, t0) - 0.4094) < 5e-5, "Dyn(1h) = 0.4094 to 4 dp");
  out.require(dyn_score(t0 - 1, t0) == 0.0 && dyn_score(t0, t0) == 0.0, "Dyn = 0 at or before t_start");
  bool increasing = true;
  for (int h = 1; h < 2000; ++h) increasing &= dyn_score(t0 + (h + 1) * 3600, t0) > dyn_score(t0 + h * 3600, t0);
  out.require(increasing && dyn_score(t0 + 100000 * 3600LL, t0) < 1.0, "Dyn strictly increasing and < 1");

  RankedList full{"u", Section::MNPage, t0, {{"old", 0.9, false}, {"hour", 0.8, false}, {"day", 0.1, false}}, false};
  const RankedList half = rerank(full, c, 0.5, t0);
  double hour_score = -1;
  for (const auto& it : half.items) {
    if (it.article_id == "hour") hour_score = it.score;
  }
  out.require(std::abs(hour_score - 0.6047) < 5e-5, "lambda 0.5, S 0.8, 1h: " + fmt(hour_score));
  out.require(rerank(full, c, 1.0, t0) == full, "lambda 1 is the identity");
  const RankedList recency = rerank(full, c, 0.0, t0);
  out.require(recency.items[0].article_id == "day" && recency.items[1].article_id == "hour" &&
                  recency.items[2].article_id == "old",
              "lambda 0 orders by recency");
  bool threw = false;
  try {
    rerank(full, c, 1.01, t0);
  } catch (const Error&) {
    threw = true;
  }
  out.require(threw, "lambda outside [0, 1] is rejected");
  return out;
}

Outcome gbdt_checks() {
  Outcome out;
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Dataset d;
  d.n_features = 4;
  for (int i = 0; i < 200; ++i) {
    const double a = u(gen), b = u(gen), x = u(gen), y = u(gen);
    d.values.insert(d.values.end(), {a, b, x, y});
    d.labels.push_back(a + 0.5 * b * b - 0.3 * x + 0.2 * u(gen) > 0.1 ? 1 : 0);
  }
  TrainConfig cfg;
  TrainReport rep;
  const TreeEnsemble m = train(d, cfg, &rep);
  bool mono = true;
  for (std::size_t i = 1; i < rep.loss_history.size(); ++i) mono &= rep.loss_history[i] <= rep.loss_history[i - 1];
  out.require(mono && rep.loss_non_increasing,
              "training loss non-increasing over " + std::to_string(rep.loss_history.size() - 1) + " trees (" +
                  fmt(rep.loss_history.front()) + " -> " + fmt(rep.loss_history.back()) + ")");

  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    for (std::size_t j = 0; j < d.n_rows(); ++j) {
      if (d.labels[i] == 1 && d.labels[j] == 0) {
        const double pi = m.predict(d.row(i)), pj = m.predict(d.row(j));
        wins += pi > pj ? 1.0 : (pi == pj ? 0.5 : 0.0);
        pairs += 1;
      }
    }
  }
  out.require(wins / pairs >= 0.95, "AUC on 200 examples " + fmt(wins / pairs) + " >= 0.95");

  TrainConfig stump;
  stump.n_trees = 1;
  stump.max_depth = 0;
  stump.learning_rate = 1.0;
  stump.l2_reg = 1.5;
  stump.base_score = 0.3;
  const TreeEnsemble s = train(d, stump);
  const double p = 1.0 / (1.0 + std::exp(-0.3));
  double g = 0, h = 0;
  for (int y : d.labels) {
    g += p - y;
    h += p * (1 - p);
  }
  const double newton = -g / (h + 1.5);
  const double leaf = s.trees().at(0).nodes.at(0).weight;
  out.require(std::abs(leaf - newton) < 1e-9, "depth-0 leaf " + fmt(leaf, 9) + " vs Newton step " + fmt(newton, 9));
  return out;
}

/// The reference world written through the same generate and train commands as the CLI.
struct Reference {
  ExperimentConfig cfg;
  std::optional<Corpus> corpus;
  GroundTruth truth;
  PipelineConfig pipeline;
  Timestamp t0 = 0, t1 = 0;
  std::vector<NightlyModel> models;
  std::vector<std::vector<RankedList>> streams;  // baseline, dynamism
  std::vector<RankedList> manual;
  double generate_s = 0, pipeline_s = 0;
};

std::vector<RankedList> window(const std::vector<RankedList>& lists, Timestamp from, Timestamp to) {
  std::vector<RankedList> out;
  for (const auto& l : lists) {
    if (l.at >= from && l.at < to) out.push_back(l);
  }
  return out;
}

double since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

void prepare_world(Reference& ref) {
  const auto t = std::chrono::steady_clock::now();
  ref.cfg = load_config(fs::path(NEWSREC_SOURCE_DIR) / "configs" / "reference_world.json");
  ref.cfg.out = scratch("reference");
  cmd_generate(ref.cfg);
  const Layout layout{ref.cfg.out};
  ref.corpus.emplace(load_output_corpus(layout));
  ref.truth = GroundTruth::load(layout.ground_truth());
  ref.pipeline = resolve_pipeline(ref.cfg, *ref.corpus);
  std::tie(ref.t0, ref.t1) = pipeline_horizon(*ref.corpus, ref.pipeline);
  ref.manual = window(manual_lists(read_manual_jsonl(layout.manual()), *ref.corpus), ref.t0, ref.t1);
  ref.generate_s = since(t);
}

void prepare_pipeline(Reference& ref) {
  const auto t = std::chrono::steady_clock::now();
  cmd_train(ref.cfg);
  const Layout layout{ref.cfg.out};
  const FeatureSchema schema(ref.cfg.features);
  ref.models = load_models(layout, schema);
  const std::vector<PipelineArm> arms{{Treatment::Baseline, ref.cfg.pipeline.lambda},
                                      {Treatment::Dynamism, ref.cfg.pipeline.lambda}};
  auto streams = run_pipeline_arms(*ref.corpus, schema, ref.pipeline, ref.corpus->users(), ref.models, arms);
  for (auto& s : streams) ref.streams.push_back(window(s, ref.t0, ref.t1));
  ref.pipeline_s = since(t);
}

Outcome offline_baselines(Reference& ref) {
  Outcome out;
  prepare_world(ref);
  const Corpus& c = *ref.corpus;
  OfflineEvalConfig oc;
  oc.ks = {5};
  oc.first_day = day_of(ref.t0);
  oc.last_day = day_of(ref.t1 - 1);

  const AccuracyReport oracle = offline_eval(c, OracleScorer(ref.truth), oc);
  out.require(oracle.ndcg >= 0.95, "oracle NDCG " + fmt(oracle.ndcg) + " >= 0.95");

  double base = 0;
  std::size_t n = 0;
  for (const auto& ud : user_days(c, *oc.first_day, *oc.last_day)) {
    const double shown = static_cast<double>(ud.displayed.size());
    base += std::min(shown, 5.0) * static_cast<double>(ud.clicked.size()) / (shown * 5.0);
    ++n;
  }
  base /= static_cast<double>(n);
  const AccuracyReport random = offline_eval(c, RandomScorer(ref.cfg.seed), oc);
  out.require(random.n_user_days >= 1000 && random.n_user_days == n,
              std::to_string(random.n_user_days) + " user-days >= 1000");
  const double p5 = random.p_at.at(5);
  out.require(std::abs(p5 - base) <= 0.05, "random P@5 " + fmt(p5) + " vs analytic " + fmt(base) + " (+-0.05)");
  return out;
}

const ComparisonReport* find(const std::vector<ComparisonReport>& rs, const std::string& metric) {
  for (const auto& r : rs) {
    if (r.metric == metric) return &r;
  }
  return nullptr;
}

std::string describe(const ComparisonReport& r) {
  return r.metric + ": " + fmt(r.group_a.mean) + " -> " + fmt(r.group_b.mean) + ", t " + fmt(r.t_stat, 3) + ", p " +
         fmt(r.p_value);
}

Outcome study2(Reference& ref) {
  Outcome out;
  if (!ref.corpus) throw Error("reference world unavailable");
  prepare_pipeline(ref);
  out.require(ref.corpus->users().size() >= 200, std::to_string(ref.corpus->users().size()) + " users");
  out.require(ref.cfg.synthetic && ref.cfg.synthetic->n_days == 14, "14-day world");
  CompareConfig cc = ref.cfg.compare;
  cc.variant = TTestVariant::Student;
  const auto reports = compare_treatments(ref.streams[0], ref.streams[1], *ref.corpus, cc);
  for (const char* section : {"mnwidget", "missedlw"}) {
    const ComparisonReport* dyn = find(reports, std::string("dynamism.") + section);
    out.require(dyn && dyn->significant && dyn->group_b.mean > dyn->group_a.mean,
                dyn ? describe(*dyn) + " (significant increase)" : std::string("dynamism.") + section + " missing");
    const ComparisonReport* acc = find(reports, std::string("ndcg.") + section);
    out.require(acc && !acc->significant,
                acc ? describe(*acc) + " (not significant)" : std::string("ndcg.") + section + " missing");
  }
  return out;
}

Outcome study1(Reference& ref) {
  Outcome out;
  if (ref.streams.size() != 2) throw Error("reference pipeline unavailable");
  CompareConfig cc = ref.cfg.compare;
  const ManualComparison m = compare_manual(ref.manual, ref.streams[0], *ref.corpus, cc);
  out.notes.push_back(std::to_string(m.aligned_pairs) + " aligned pairs");
  auto mean = [](const MetricSets& s, const std::string& k) {
    const auto& v = s.at(k);
    double t = 0;
    for (double x : v) t += x;
    return t / static_cast<double>(v.size());
  };
  const double all_m = mean(m.manual, "coverage.all_users"), all_r = mean(m.recsys, "coverage.all_users");
  const double per_m = mean(m.manual, "coverage.per_user"), per_r = mean(m.recsys, "coverage.per_user");
  const double ild_m = mean(m.manual, "diversity.section"), ild_r = mean(m.recsys, "diversity.section");
  out.require(all_r > all_m, "AllUsers coverage recsys " + fmt(all_r) + " > manual " + fmt(all_m));
  out.require(per_r < per_m, "PerUser coverage recsys " + fmt(per_r) + " < manual " + fmt(per_m));
  out.require(ild_r > ild_m, "section ILD recsys " + fmt(ild_r) + " > manual " + fmt(ild_m));
  return out;
}

Outcome ttest_checks() {
  Outcome out;
  double worst = 0;
  for (const auto& c : kTTestReference) {
    const auto r = t_test(c.a, c.b, c.variant);
    worst = std::max({worst, std::abs(r.t_stat - c.t), std::abs(r.p_value - c.p)});
  }
  out.require(std::size(kTTestReference) >= 5 && worst <= 1e-4,
              std::to_string(std::size(kTTestReference)) + " reference cases, max |error| " + sci(worst) + " <= 1e-4");

  std::mt19937_64 gen(4242);
  std::normal_distribution<double> z(0.0, 1.0);
  for (TTestVariant v : {TTestVariant::Student, TTestVariant::Welch}) {
    const int n_null = 2000;
    std::vector<double> ps;
    for (int k = 0; k < n_null; ++k) {
      std::vector<double> a(12), b(v == TTestVariant::Welch ? 20 : 12);
      const double sd_b = v == TTestVariant::Welch ? 3.0 : 1.0;
      for (auto& x : a) x = z(gen);
      for (auto& x : b) x = sd_b * z(gen);
      ps.push_back(t_test(a, b, v).p_value);
    }
    std::sort(ps.begin(), ps.end());
    double dmax = 0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const double n = static_cast<double>(ps.size());
      dmax = std::max({dmax, (i + 1) / n - ps[i], ps[i] - i / n});
    }
    const double crit = 1.628 / std::sqrt(static_cast<double>(ps.size()));
    out.require(dmax < crit, std::string(to_string(v)) + " null p-values: KS D " + fmt(dmax) + " < " + fmt(crit) +
                                 " over " + std::to_string(ps.size()));
  }
  return out;
}

std::map<std::string, std::string> tree_contents(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(in), {}};
  }
  return out;
}

Outcome cli_determinism() {
  Outcome out;
  const fs::path config = fs::path(NEWSREC_SOURCE_DIR) / "configs" / "smoke.json";
  std::vector<fs::path> dirs{scratch("cli_a"), scratch("cli_b")};
  for (const auto& dir : dirs) {
    for (const char* cmd : {"generate", "train", "run", "evaluate", "compare"}) {
      const std::string line = std::string("\"") + NEWSREC_CLI + "\" " + cmd + " --config \"" + config.string() +
                               "\" --seed 7 --out \"" + dir.string() + "\" > /dev/null";
      const int rc = std::system(line.c_str());
      if (rc != 0) {
        out.require(false, std::string(cmd) + " exited with " + std::to_string(rc));
        return out;
      }
    }
  }
  const auto a = tree_contents(dirs[0] / "reports"), b = tree_contents(dirs[1] / "reports");
  out.require(a.size() >= 8, std::to_string(a.size()) + " report files");
  out.require(a == b, "reports byte-identical across two runs");
  out.require(tree_contents(dirs[0] / "emissions") == tree_contents(dirs[1] / "emissions"),
              "emission logs byte-identical");
  return out;
}

}  // namespace

int main() {
  report(1, "usefulness and accuracy metrics match brute-force oracles", 10, metric_oracles);
  report(2, "Dyn score and re-rank", 1, dyn_checks);
  report(3, "GBDT loss, separability and Newton leaf", 10, gbdt_checks);

  Reference ref;
  report(4, "oracle and random offline baselines", 60, [&] { return offline_baselines(ref); });
  report(5, "study 2: dynamism up, per-section NDCG unchanged", 300, [&] { return study2(ref); }, ref.generate_s);
  report(6, "study 1: coverage and section diversity against manual", 300, [&] { return study1(ref); },
         ref.generate_s + ref.pipeline_s);

  report(7, "t-test reference values and null calibration", 30, ttest_checks);
  report(8, "CLI chain is deterministic", 300, cli_determinism);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
