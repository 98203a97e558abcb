#include "newsrec/usefulness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <tuple>
#include <unordered_set>

namespace newsrec {

namespace {

constexpr std::pair<AttributeKind, std::string_view> kAttributeNames[] = {
    {AttributeKind::Section, "section"},
    {AttributeKind::Tags, "tags"},
    {AttributeKind::Authors, "authors"},
    {AttributeKind::Embedding, "embedding"},
};

std::size_t prefix_len(const RankedList& list, std::size_t top_n) {
  return top_n == 0 ? list.items.size() : std::min(top_n, list.items.size());
}

std::vector<const Article*> resolve(const RankedList& list, const Corpus& corpus, std::size_t top_n) {
  const std::size_t n = prefix_len(list, top_n);
  std::vector<const Article*> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Article* a = corpus.find(list.items[i].article_id);
    if (!a) throw Error("ranked list references unknown article " + list.items[i].article_id);
    out.push_back(a);
  }
  return out;
}

double embedding_sim(const Article& a, const Article& b) {
  if (is_zero(a.embedding) || is_zero(b.embedding)) return 0.0;
  return (cosine(a.embedding, b.embedding) + 1.0) / 2.0;
}

double mass(const std::map<std::string, int>& freq, const StringSet& values) {
  double total = 0, hit = 0;
  for (const auto& [_, n] : freq) total += n;
  if (total <= 0) return 0.0;
  for (const auto& v : values) {
    if (auto it = freq.find(v); it != freq.end()) hit += it->second;
  }
  return hit / total;
}

}  // namespace

std::string_view to_string(AttributeKind a) {
  for (const auto& [k, name] : kAttributeNames) {
    if (k == a) return name;
  }
  return "section";
}

std::optional<AttributeKind> parse_attribute(std::string_view s) {
  for (const auto& [k, name] : kAttributeNames) {
    if (name == s) return k;
  }
  return std::nullopt;
}

std::string_view to_string(CoverageScope s) {
  switch (s) {
    case CoverageScope::PerUser: return "per_user";
    case CoverageScope::AllUsers: return "all_users";
    case CoverageScope::Manual: return "manual";
  }
  return "all_users";
}

double sim(const Article& a, const Article& b, AttributeKind attr) {
  switch (attr) {
    case AttributeKind::Section: return a.section == b.section ? 1.0 : 0.0;
    case AttributeKind::Tags: return a.tags == b.tags ? 1.0 : jaccard(a.tags, b.tags);
    case AttributeKind::Authors: return a.authors == b.authors ? 1.0 : jaccard(a.authors, b.authors);
    case AttributeKind::Embedding: return embedding_sim(a, b);
  }
  return 0.0;
}

std::optional<double> intra_list_diversity(std::span<const Article* const> items, AttributeKind attr) {
  const std::size_t n = items.size();
  if (n < 2) return std::nullopt;
  std::vector<double> sims;
  sims.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) sims.push_back(sim(*items[i], *items[j], attr));
  }
  if (attr == AttributeKind::Embedding) {
    const double top = *std::max_element(sims.begin(), sims.end());
    for (auto& s : sims) s = top > 0 ? s / top : 0.0;
  }
  double total = 0;
  for (double s : sims) total += 1.0 - s;
  return std::clamp(total / static_cast<double>(sims.size()), 0.0, 1.0);
}

std::optional<double> intra_list_diversity(const RankedList& list, const Corpus& corpus, AttributeKind attr,
                                           std::size_t top_n) {
  const auto items = resolve(list, corpus, top_n);
  return intra_list_diversity(items, attr);
}

std::optional<double> dynamism(std::span<const std::string> l1, std::span<const std::string> l2) {
  if (l2.empty()) return std::nullopt;
  const std::unordered_set<std::string_view> prev(l1.begin(), l1.end());
  const std::unordered_set<std::string_view> next(l2.begin(), l2.end());
  std::size_t fresh = 0;
  for (auto id : next) fresh += prev.contains(id) ? 0 : 1;
  return static_cast<double>(fresh) / static_cast<double>(l2.size());
}

std::optional<double> dynamism(const RankedList& l1, const RankedList& l2, std::size_t top_n) {
  std::vector<std::string> a, b;
  for (std::size_t i = 0; i < prefix_len(l1, top_n); ++i) a.push_back(l1.items[i].article_id);
  for (std::size_t i = 0; i < prefix_len(l2, top_n); ++i) b.push_back(l2.items[i].article_id);
  return dynamism(a, b);
}

double unexpectedness(const Article& item, const UserProfile& profile, AttributeKind attr) {
  if (profile.n_clicks == 0) return 1.0;
  switch (attr) {
    case AttributeKind::Section: return 1.0 - mass(profile.section_freq, StringSet{item.section});
    case AttributeKind::Tags: return 1.0 - mass(profile.tag_freq, item.tags);
    case AttributeKind::Authors: return 1.0 - mass(profile.author_freq, item.authors);
    case AttributeKind::Embedding: {
      if (is_zero(profile.mean_embedding) || is_zero(item.embedding)) return 1.0;
      return 1.0 - (cosine(profile.mean_embedding, item.embedding) + 1.0) / 2.0;
    }
  }
  return 1.0;
}

std::optional<double> serendipity(std::span<const Article* const> items, const UserProfile& profile,
                                  AttributeKind attr) {
  if (items.empty()) return std::nullopt;
  double total = 0;
  for (const Article* a : items) total += unexpectedness(*a, profile, attr);
  return std::clamp(total / static_cast<double>(items.size()), 0.0, 1.0);
}

std::optional<double> serendipity(const RankedList& list, const Corpus& corpus, const UserProfile& profile,
                                  AttributeKind attr, std::size_t top_n) {
  const auto items = resolve(list, corpus, top_n);
  return serendipity(items, profile, attr);
}

std::optional<double> coverage(std::span<const RankedList* const> lists, const StringSet& published,
                               CoverageScope scope, std::size_t top_n) {
  if (published.empty()) return std::nullopt;
  const double denom = static_cast<double>(published.size());
  auto served_fraction = [&](auto begin, auto end) {
    std::unordered_set<std::string_view> served;
    for (auto it = begin; it != end; ++it) {
      const RankedList& l = **it;
      for (std::size_t i = 0; i < prefix_len(l, top_n); ++i) {
        if (published.contains(l.items[i].article_id)) served.insert(l.items[i].article_id);
      }
    }
    return static_cast<double>(served.size()) / denom;
  };
  if (scope != CoverageScope::PerUser) return served_fraction(lists.begin(), lists.end());

  std::vector<const RankedList*> sorted(lists.begin(), lists.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const RankedList* a, const RankedList* b) { return a->user_id < b->user_id; });
  double total = 0;
  std::size_t users = 0;
  for (auto it = sorted.begin(); it != sorted.end();) {
    auto end = std::find_if(it, sorted.end(), [&](const RankedList* l) { return l->user_id != (*it)->user_id; });
    total += served_fraction(it, end);
    ++users;
    it = end;
  }
  if (users == 0) return 0.0;
  return total / static_cast<double>(users);
}

std::optional<double> coverage(const std::vector<RankedList>& lists, const StringSet& published, CoverageScope scope,
                               std::size_t top_n) {
  std::vector<const RankedList*> ptrs;
  ptrs.reserve(lists.size());
  for (const auto& l : lists) ptrs.push_back(&l);
  return coverage(ptrs, published, scope, top_n);
}

std::optional<double> gini(std::span<const double> counts) {
  if (counts.empty()) return std::nullopt;
  std::vector<double> x(counts.begin(), counts.end());
  std::sort(x.begin(), x.end());
  const double sum = std::accumulate(x.begin(), x.end(), 0.0);
  if (sum <= 0) return 0.0;
  const double k = static_cast<double>(x.size());
  double weighted = 0;
  for (std::size_t i = 0; i < x.size(); ++i) weighted += (2.0 * static_cast<double>(i + 1) - k - 1.0) * x[i];
  return std::max(0.0, weighted / (k * sum));
}

std::optional<double> gini(const std::map<std::string, int>& freqs) {
  std::vector<double> counts;
  for (const auto& [_, n] : freqs) counts.push_back(n);
  return gini(counts);
}

std::optional<double> entropy(std::span<const double> counts) {
  if (counts.empty()) return std::nullopt;
  const double sum = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (sum <= 0) return 0.0;
  double h = 0;
  for (double c : counts) {
    if (c > 0) {
      const double p = c / sum;
      h -= p * std::log2(p);
    }
  }
  return std::max(0.0, h);
}

std::optional<double> entropy(const std::map<std::string, int>& freqs) {
  std::vector<double> counts;
  for (const auto& [_, n] : freqs) counts.push_back(n);
  return entropy(counts);
}

std::vector<AlignedPair> align(const std::vector<RankedList>& manual, const std::vector<RankedList>& recsys) {
  auto ids_less = [](const RankedList& a, const RankedList& b) {
    return std::lexicographical_compare(a.items.begin(), a.items.end(), b.items.begin(), b.items.end(),
                                        [](const RankedItem& x, const RankedItem& y) {
                                          return x.article_id < y.article_id;
                                        });
  };
  std::vector<std::size_t> rec(recsys.size());
  std::iota(rec.begin(), rec.end(), 0);
  std::sort(rec.begin(), rec.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = recsys[a];
    const auto& y = recsys[b];
    if (x.user_id != y.user_id) return x.user_id < y.user_id;
    if (x.at != y.at) return x.at < y.at;
    if (ids_less(x, y) != ids_less(y, x)) return ids_less(x, y);
    return a < b;
  });
  std::vector<std::size_t> man(manual.size());
  std::iota(man.begin(), man.end(), 0);
  std::sort(man.begin(), man.end(), [&](std::size_t a, std::size_t b) {
    if (manual[a].at != manual[b].at) return manual[a].at < manual[b].at;
    if (ids_less(manual[a], manual[b]) != ids_less(manual[b], manual[a])) return ids_less(manual[a], manual[b]);
    return a < b;
  });

  std::vector<AlignedPair> out;
  for (std::size_t m : man) {
    const Timestamp t = manual[m].at;
    for (auto it = rec.begin(); it != rec.end();) {
      const std::string& user = recsys[*it].user_id;
      auto end = std::find_if(it, rec.end(), [&](std::size_t r) { return recsys[r].user_id != user; });
      auto past = std::upper_bound(it, end, t, [&](Timestamp v, std::size_t r) { return v < recsys[r].at; });
      if (past != it) out.push_back({m, *(past - 1)});
      it = end;
    }
  }
  return out;
}

void write_metric_csv(const std::vector<MetricSample>& samples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "metric,attribute,treatment,scope,value,timestamp\n";
  char buf[64];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.17g", s.value);
    out << s.metric << ',' << s.attribute << ',' << s.treatment << ',' << s.scope << ',' << buf << ',' << s.at
        << '\n';
  }
}

std::vector<MetricSample> dynamism_samples(const std::vector<RankedList>& stream, std::size_t top_n,
                                           bool skip_fallback, DynamismMode mode) {
  std::vector<std::size_t> order;
  order.reserve(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (!(skip_fallback && stream[i].fallback)) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(stream[a].user_id, stream[a].section, stream[a].at) <
           std::tie(stream[b].user_id, stream[b].section, stream[b].at);
  });
  auto same_prefix = [&](const RankedList& a, const RankedList& b) {
    const std::size_t n = prefix_len(a, top_n);
    if (n != prefix_len(b, top_n)) return false;
    for (std::size_t i = 0; i < n; ++i) {
      if (a.items[i].article_id != b.items[i].article_id) return false;
    }
    return true;
  };
  std::vector<MetricSample> out;
  const RankedList* prev = nullptr;
  for (std::size_t idx : order) {
    const RankedList& cur = stream[idx];
    if (!prev || prev->user_id != cur.user_id || prev->section != cur.section) {
      prev = &cur;
      continue;
    }
    if (mode == DynamismMode::Updates && same_prefix(*prev, cur)) continue;
    if (auto d = dynamism(*prev, cur, top_n)) {
      out.push_back({"dynamism", "", "", std::string(to_string(cur.section)), *d, cur.at});
    }
    prev = &cur;
  }
  return out;
}

}  // namespace newsrec
