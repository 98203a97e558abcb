#include "doctest.h"
#include "fixtures.hpp"
#include "newsrec/corpus.hpp"
#include "newsrec/embedding.hpp"

using namespace newsrec;
using fixtures::article;
using fixtures::click;
using fixtures::impression;

TEST_CASE("ISO-8601 parsing and formatting") {
  CHECK(parse_iso8601("1970-01-01") == 0);
  CHECK(parse_iso8601("2019-11-25") == 1574640000);
  CHECK(parse_iso8601("2019-11-25T01:30Z") == 1574640000 + 5400);
  CHECK(parse_iso8601("2019-11-25T01:30:15") == 1574640000 + 5415);
  CHECK(parse_iso8601("2019-11-25T02:00:00+01:00") == 1574640000 + 3600);
  CHECK(parse_iso8601("2019-11-25T00:00:00-00:30") == 1574640000 + 1800);
  CHECK_FALSE(parse_iso8601("2019-13-01").has_value());
  CHECK_FALSE(parse_iso8601("25/11/2019").has_value());
  CHECK_FALSE(parse_iso8601("2019-11-25T25:00").has_value());
  CHECK(format_iso8601(1574640000 + 5415) == "2019-11-25T01:30:15Z");
  CHECK(format_iso8601(-1) == "1969-12-31T23:59:59Z");
}

TEST_CASE("day arithmetic floors toward negative infinity") {
  CHECK(day_of(0) == 0);
  CHECK(day_of(kSecondsPerDay - 1) == 0);
  CHECK(day_of(-1) == -1);
  CHECK(day_start(day_of(1574640000 + 7)) == 1574640000);
}

TEST_CASE("make_article derives statistics and the embedding") {
  WordVectors wv(2);
  wv.add("rates", {1.0, 0.0});
  wv.add("rise", {0.0, 1.0});
  ArticleMeta m{"a1", 100, "economy", {"rates"}, {"Jan"}, "Title", "Rates rise. Rates fall."};
  const Article a = make_article(m, wv);
  CHECK(a.word_count == 4);
  CHECK(a.sentence_count == 2);
  CHECK(a.paragraph_count == 1);
  CHECK(a.hapax_count == 2);
  CHECK(a.dis_count == 1);
  REQUIRE(a.embedding.size() == 2);
  CHECK(a.embedding[0] == doctest::Approx(2.0 / 3.0));
  CHECK(a.embedding[1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("corpus sorts, indexes and collapses exact duplicates") {
  Corpus c({article("b", 200), article("a", 100), article("c", 200)},
           {click("u2", "a", 500), impression("u1", "a", 300), click("u1", "b", 400), click("u1", "b", 400),
            click("u2", "c", 450, DisplayContext::MNPage)},
           2);
  REQUIRE(c.articles().size() == 3);
  CHECK(c.articles()[0].id == "a");
  CHECK(c.articles()[1].id == "b");
  CHECK(c.articles()[2].id == "c");
  CHECK(c.events().size() == 4);
  for (std::size_t i = 1; i < c.events().size(); ++i) CHECK(c.events()[i - 1].at <= c.events()[i].at);
  CHECK(c.users() == std::vector<std::string>{"u1", "u2"});
  CHECK(c.clicks_of("u1").size() == 1);
  CHECK(c.clicks_of("u2").size() == 2);
  CHECK(c.events_of("u1").size() == 2);
  CHECK(c.clicks_of("nobody").empty());
  CHECK(c.find("c") != nullptr);
  CHECK(c.find("zzz") == nullptr);
  CHECK(c.index_of("b") == 1u);
  for (std::size_t i = 0; i < c.events().size(); ++i) {
    CHECK(c.articles()[c.event_article(i)].id == c.events()[i].article_id);
  }
}

TEST_CASE("corpus range queries are half-open") {
  Corpus c({article("a", 100), article("b", 200), article("c", 300)},
           {click("u", "a", 100), click("u", "b", 200), click("u", "c", 300)}, 2);
  CHECK(c.published_between(100, 300) == std::pair<std::size_t, std::size_t>{0, 2});
  CHECK(c.published_between(101, 301) == std::pair<std::size_t, std::size_t>{1, 3});
  CHECK(c.published_between(400, 500).first == c.published_between(400, 500).second);
  CHECK(c.events_between(200, 300) == std::pair<std::size_t, std::size_t>{1, 2});
}

TEST_CASE("corpus validation errors") {
  CHECK_THROWS_AS(Corpus({article("a", 1), article("a", 2)}, {}, 2), Error);
  CHECK_THROWS_AS(Corpus({article("", 1)}, {}, 2), Error);
  CHECK_THROWS_AS(Corpus({article("a", 1, "s", {}, {}, {1.0})}, {}, 2), Error);
  CHECK_THROWS_AS(Corpus({article("a", 1, "s", {""})}, {}, 2), Error);
  CHECK_THROWS_AS(Corpus({article("a", 1)}, {click("u", "missing", 5)}, 2), Error);
  Article bad = article("a", 1);
  bad.word_count = 2;
  bad.hapax_count = 1;
  bad.dis_count = 1;
  CHECK_THROWS_AS(Corpus({bad}, {}, 2), Error);
}

TEST_CASE("click without a prior impression is accepted") {
  Corpus c({article("a", 1)}, {click("u", "a", 5)}, 2);
  CHECK(c.clicks_of("u").size() == 1);
}

TEST_CASE("JSONL round trip and parse errors carry line numbers") {
  const auto dir = fixtures::temp_dir("corpus_io");
  WordVectors wv(2);
  wv.add("news", {0.5, 0.5});
  fixtures::write_file(dir / "articles.jsonl",
                       R"({"id":"x","published_at":"2019-11-25T08:00Z","section":"tech","tags":["ai"],"authors":["Kim"],"title":"T","body":"News today."})"
                       "\n\n"
                       R"({"id":"y","published_at":1574672400,"section":"tech","tags":[],"authors":[],"body":"More news."})"
                       "\n");
  fixtures::write_file(dir / "events.jsonl",
                       R"({"user_id":"u","article_id":"x","at":1574672500,"kind":"impression","context":"mnwidget"})"
                       "\n"
                       R"({"user_id":"u","article_id":"x","at":1574672600,"kind":"click"})"
                       "\n");
  const Corpus c = load_corpus(dir / "articles.jsonl", dir / "events.jsonl", wv);
  CHECK(c.articles().size() == 2);
  CHECK(c.find("x")->published_at == 1574640000 + 8 * 3600);
  CHECK(c.events()[1].context == DisplayContext::Other);

  write_articles_jsonl(c, dir / "a2.jsonl");
  write_events_jsonl(c, dir / "e2.jsonl");
  const Corpus back = load_corpus(dir / "a2.jsonl", dir / "e2.jsonl", wv);
  CHECK(back == c);

  fixtures::write_file(dir / "bad.jsonl", R"({"id":"x","published_at":1,"section":"s","tags":[],"authors":[]})"
                                          "\n"
                                          R"({"id":"y","section":"s","tags":[],"authors":[]})"
                                          "\n");
  try {
    read_articles_jsonl(dir / "bad.jsonl");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("published_at") != std::string::npos);
  }
  fixtures::write_file(dir / "bad_events.jsonl", R"({"user_id":"u","article_id":"x","at":1,"kind":"view"})"
                                                 "\n");
  CHECK_THROWS_AS(read_events_jsonl(dir / "bad_events.jsonl"), ParseError);
  fixtures::write_file(dir / "garbage.jsonl", "{not json\n");
  CHECK_THROWS_AS(read_articles_jsonl(dir / "garbage.jsonl"), ParseError);
  CHECK_THROWS_AS(read_articles_jsonl(dir / "absent.jsonl"), Error);
}
