#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "newsrec/ranker.hpp"
#include "newsrec/synthetic.hpp"

using namespace newsrec;
using fixtures::article;

namespace {

constexpr Timestamp kT0 = 1574640000;  // 2019-11-25T00:00:00Z

std::vector<std::string> ids(const RankedList& l) {
  std::vector<std::string> out;
  for (const auto& i : l.items) out.push_back(i.article_id);
  return out;
}

RankedList list_of(std::vector<std::pair<std::string, double>> items) {
  RankedList l{"u", Section::MNPage, kT0, {}, false};
  for (auto& [id, s] : items) l.items.push_back({id, s, false});
  return l;
}

SyntheticWorldConfig small_world() {
  SyntheticWorldConfig cfg;
  cfg.seed = 17;
  cfg.n_users = 8;
  cfg.n_days = 4;
  cfg.articles_per_day = 30;
  return cfg;
}

PipelineConfig small_pipeline(Timestamp t_start) {
  PipelineConfig cfg;
  cfg.t_start = t_start;
  cfg.training_days = 2;
  cfg.train.n_trees = 8;
  cfg.seed = 4;
  return cfg;
}

}  // namespace

TEST_CASE("candidate window is (at - window, at]") {
  Corpus c({article("a", 90), article("b", 91), article("c", 100), article("d", 101)}, {}, 2);
  const auto cand = candidates(c, 100, 10);
  std::vector<std::string> got;
  for (auto i : cand) got.push_back(c.articles()[i].id);
  CHECK(got == std::vector<std::string>{"b", "c"});
  CHECK_THROWS_AS(candidates(c, 100, 0), Error);
}

TEST_CASE("ties go to the newer article, then the smaller id") {
  Corpus c({article("old", kT0), article("new", kT0 + 60), article("x2", kT0 + 30), article("x1", kT0 + 30)}, {}, 2);
  std::vector<RankedItem> items{{"old", 0.5, false}, {"x2", 0.5, false}, {"new", 0.5, false},
                                {"x1", 0.5, false}};
  sort_items(items, c);
  std::vector<std::string> got;
  for (const auto& i : items) got.push_back(i.article_id);
  CHECK(got == std::vector<std::string>{"new", "x1", "x2", "old"});
}

TEST_CASE("section slices use inclusive 24h and 7d age bounds") {
  const Timestamp at = kT0 + 10 * kSecondsPerDay;
  Corpus c({article("day", at - kSecondsPerDay), article("day+1", at - kSecondsPerDay - 1),
            article("week", at - kSecondsPerWeek), article("week+1", at - kSecondsPerWeek - 1),
            article("fresh", at - 5)},
           {}, 2);
  RankedList full = list_of({{"week+1", 0.9}, {"week", 0.8}, {"day+1", 0.7}, {"day", 0.6}, {"fresh", 0.5}});
  const SectionLists s = slice_sections(full, c, at, 5, 5);
  CHECK(ids(s.widget) == std::vector<std::string>{"day", "fresh"});
  CHECK(ids(s.missed) == std::vector<std::string>{"week", "day+1"});
  CHECK(ids(s.page) == ids(full));
  CHECK(s.widget.section == Section::MNWidget);
  CHECK(s.missed.section == Section::MissedLW);

  const SectionLists capped = slice_sections(full, c, at, 1, 1);
  CHECK(ids(capped.widget) == std::vector<std::string>{"day"});
  CHECK(ids(capped.missed) == std::vector<std::string>{"week"});
}

TEST_CASE("Dyn score values") {
  CHECK(dyn_score(kT0 - 100, kT0) == 0.0);
  CHECK(dyn_score(kT0, kT0) == 0.0);
  CHECK(dyn_score(kT0 + 3600, kT0) == doctest::Approx(1.0 - 1.0 / (1.0 + std::log(2.0))).epsilon(1e-12));
  CHECK(dyn_score(kT0 + 3600, kT0) == doctest::Approx(0.4094).epsilon(1e-4));
  double prev = 0;
  for (int h = 1; h < 500; h += 7) {
    const double d = dyn_score(kT0 + h * 3600, kT0);
    CHECK(d > prev);
    CHECK(d < 1.0);
    prev = d;
  }
}

TEST_CASE("rerank blends model score and recency") {
  Corpus c({article("old", kT0 - 3600), article("hour", kT0 + 3600), article("day", kT0 + kSecondsPerDay)}, {}, 2);
  RankedList full = list_of({{"old", 0.9}, {"hour", 0.8}, {"day", 0.1}});

  const RankedList half = rerank(full, c, 0.5, kT0);
  std::map<std::string, double> score;
  for (const auto& i : half.items) score[i.article_id] = i.score;
  CHECK(score["hour"] == doctest::Approx(0.6047).epsilon(1e-4));
  CHECK(score["hour"] == doctest::Approx(0.5 * 0.8 + 0.5 * dyn_score(kT0 + 3600, kT0)).epsilon(1e-12));
  CHECK(score["old"] == doctest::Approx(0.45));

  CHECK(rerank(full, c, 1.0, kT0) == full);
  CHECK(ids(rerank(full, c, 0.0, kT0)) == std::vector<std::string>{"day", "hour", "old"});
  CHECK_THROWS_AS(rerank(full, c, 1.5, kT0), Error);
  CHECK_THROWS_AS(rerank(full, c, -0.1, kT0), Error);
}

TEST_CASE("manual lists are validated") {
  Corpus c({article("a", kT0), article("b", kT0), article("c", kT0), article("d", kT0), article("e", kT0),
            article("f", kT0), article("late", kT0 + 100)},
           {}, 2);
  const auto ok = manual_lists({{kT0 + 50, {"b", "a"}}, {kT0 + 10, {"c"}}}, c);
  REQUIRE(ok.size() == 2);
  CHECK(ok[0].at == kT0 + 10);
  CHECK(ids(ok[1]) == std::vector<std::string>{"b", "a"});
  CHECK(ok[1].user_id == kManualUser);
  CHECK(ok[1].section == Section::Manual);

  CHECK_THROWS_AS(manual_lists({{kT0 + 50, {"a", "b", "c", "d", "e", "f"}}}, c), Error);
  CHECK_THROWS_AS(manual_lists({{kT0 + 50, {"late"}}}, c), Error);
  CHECK_THROWS_AS(manual_lists({{kT0 + 50, {"a", "a"}}}, c), Error);
  CHECK_THROWS_AS(manual_lists({{kT0 + 50, {"nope"}}}, c), Error);
}

TEST_CASE("synthesized editorial updates respect their bounds") {
  const SyntheticWorld w = generate_world(small_world());
  ManualSynthesisConfig cfg;
  cfg.min_updates_per_day = 2;
  cfg.max_updates_per_day = 4;
  cfg.seed = 9;
  const Timestamp from = kT0 + kSecondsPerDay, to = kT0 + 3 * kSecondsPerDay;
  const auto ups = synthesize_manual_updates(w.corpus, from, to, cfg);
  std::map<std::int64_t, int> per_day;
  for (const auto& u : ups) {
    CHECK(u.at >= from);
    CHECK(u.at < to);
    const Timestamp tod = u.at - day_start(day_of(u.at));
    CHECK(tod >= 6 * kSecondsPerHour);
    CHECK(tod <= 23 * kSecondsPerHour + 30 * 60);
    CHECK(u.items.size() == cfg.list_size);
    for (const auto& id : u.items) {
      const Article* a = w.corpus.find(id);
      REQUIRE(a != nullptr);
      CHECK(a->published_at <= u.at);
      CHECK(u.at - a->published_at < cfg.freshness);
    }
    ++per_day[day_of(u.at)];
  }
  CHECK(per_day.size() == 2);
  for (const auto& [d, n] : per_day) {
    CHECK(n >= 1);
    CHECK(n <= cfg.max_updates_per_day);
  }
  CHECK(synthesize_manual_updates(w.corpus, from, to, cfg) == ups);
  CHECK_NOTHROW(manual_lists(ups, w.corpus));
}

TEST_CASE("pipeline emits every refresh and after every click") {
  const SyntheticWorld w = generate_world(small_world());
  const FeatureSchema schema({8, 3, w.corpus.embedding_dim()});
  const Timestamp t_start = kT0 + 2 * kSecondsPerDay;
  PipelineConfig cfg = small_pipeline(t_start);
  const auto models = train_nightly(w.corpus, schema, cfg);
  REQUIRE(models.size() == 2);
  CHECK(models[0].trained_at == t_start + 3 * kSecondsPerHour);

  const auto [t0, t1] = pipeline_horizon(w.corpus, cfg);
  CHECK(t0 == t_start);
  CHECK(t1 == kT0 + 4 * kSecondsPerDay);

  const std::string user = w.corpus.users().front();
  const auto stream = run_pipeline(w.corpus, schema, cfg, {user, "ghost"}, models);

  std::map<std::pair<std::string, Section>, int> count;
  std::set<Timestamp> user_times;
  for (const auto& l : stream) {
    ++count[{l.user_id, l.section}];
    if (l.user_id == user) user_times.insert(l.at);
    CHECK(l.at >= t0);
    CHECK(l.at < t1);
    if (l.section != Section::MNPage) CHECK(l.items.size() <= 5);
    CHECK(l.fallback == (l.at < models[0].trained_at));
  }
  for (auto s : {Section::MNWidget, Section::MissedLW, Section::MNPage}) CHECK(count[{"ghost", s}] == 48);

  std::set<Timestamp> expected;
  for (Timestamp t = t0; t < t1; t += kSecondsPerHour) expected.insert(t);
  for (std::size_t e : w.corpus.clicks_of(user)) {
    const Timestamp at = w.corpus.events()[e].at;
    if (at >= t0 && at < t1) expected.insert(at);
  }
  CHECK(expected.size() > 48);
  CHECK(user_times == expected);
  for (auto s : {Section::MNWidget, Section::MissedLW, Section::MNPage}) {
    CHECK(count[{user, s}] == static_cast<int>(expected.size()));
  }

  for (std::size_t i = 1; i < stream.size(); ++i) {
    CHECK(std::tie(stream[i - 1].at, stream[i - 1].user_id, stream[i - 1].section) <
          std::tie(stream[i].at, stream[i].user_id, stream[i].section));
  }
}

TEST_CASE("fallback lists are ordered by recency") {
  const SyntheticWorld w = generate_world(small_world());
  const FeatureSchema schema({8, 3, w.corpus.embedding_dim()});
  PipelineConfig cfg = small_pipeline(kT0 + kSecondsPerDay);
  cfg.t_end = kT0 + kSecondsPerDay + 3 * kSecondsPerHour;
  const auto stream = run_pipeline(w.corpus, schema, cfg, {"ghost"}, {});
  REQUIRE(stream.size() == 9);
  for (const auto& l : stream) {
    CHECK(l.fallback);
    for (std::size_t i = 1; i < l.items.size(); ++i) {
      CHECK(w.corpus.find(l.items[i - 1].article_id)->published_at >= w.corpus.find(l.items[i].article_id)->published_at);
    }
  }
}

TEST_CASE("arms share model scores; lambda 1 equals baseline") {
  const SyntheticWorld w = generate_world(small_world());
  const FeatureSchema schema({8, 3, w.corpus.embedding_dim()});
  PipelineConfig cfg = small_pipeline(kT0 + 2 * kSecondsPerDay);
  const auto models = train_nightly(w.corpus, schema, cfg);
  const std::vector<std::string> users(w.corpus.users().begin(), w.corpus.users().begin() + 3);
  const auto arms = run_pipeline_arms(w.corpus, schema, cfg, users, models,
                                      {{Treatment::Baseline, 0.5}, {Treatment::Dynamism, 1.0}, {Treatment::Dynamism, 0.5}});
  REQUIRE(arms.size() == 3);
  CHECK(arms[0] == arms[1]);
  CHECK(arms[0].size() == arms[2].size());
  CHECK(arms[0] != arms[2]);
  CHECK(run_pipeline(w.corpus, schema, cfg, users, models) == arms[0]);

  CHECK_THROWS_AS(run_pipeline_arms(w.corpus, schema, cfg, users, models, {{Treatment::Dynamism, 2.0}}), Error);
}

TEST_CASE("emission and manual logs round-trip") {
  const auto dir = fixtures::temp_dir("ranker_io");
  std::vector<RankedList> lists{{"u1", Section::MNWidget, kT0, {{"a", 0.25, true}, {"b", 0.125, false}}, false},
                                {"u2", Section::MNPage, kT0 + 5, {}, true}};
  write_emissions_jsonl(lists, dir / "e.jsonl");
  CHECK(read_emissions_jsonl(dir / "e.jsonl") == lists);

  std::vector<EditorialUpdate> ups{{kT0 + 60, {"a", "b"}}, {kT0 + 120, {}}};
  write_manual_jsonl(ups, dir / "m.jsonl");
  CHECK(read_manual_jsonl(dir / "m.jsonl") == ups);

  fixtures::write_file(dir / "bad.jsonl", fixtures::read_file(dir / "e.jsonl") + "{\"section\":\"nowhere\"}\n");
  try {
    read_emissions_jsonl(dir / "bad.jsonl");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }
}

TEST_CASE("names of sections and treatments") {
  for (auto s : {Section::Manual, Section::MNWidget, Section::MissedLW, Section::MNPage}) {
    CHECK(parse_section(to_string(s)) == s);
  }
  CHECK(parse_treatment("dynamism") == Treatment::Dynamism);
  CHECK_FALSE(parse_treatment("other").has_value());
}
