#include "newsrec/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace newsrec {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Reads known keys out of one JSON object, collecting every problem.
class Reader {
 public:
  Reader(const json* j, std::string path, std::vector<std::string>& errors)
      : j_(j), path_(std::move(path)), errors_(errors) {
    if (j_ && !j_->is_object()) {
      fail("", "must be an object");
      j_ = nullptr;
    }
  }

  bool has(const char* key) const { return j_ && j_->contains(key); }

  template <typename T>
  void get(const char* key, T& out) {
    const json* v = take(key);
    if (!v) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v->is_boolean()) return fail(key, "must be a boolean");
      out = v->get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v->is_number_integer()) return fail(key, "must be an integer");
      if (std::is_unsigned_v<T> && v->is_number_integer() && !v->is_number_unsigned() && v->get<std::int64_t>() < 0) {
        return fail(key, "must be >= 0");
      }
      out = v->get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v->is_number()) return fail(key, "must be a number");
      out = v->get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v->is_string()) return fail(key, "must be a string");
      out = v->get<std::string>();
    } else {
      static_assert(sizeof(T) == 0, "unsupported config field type");
    }
  }

  template <typename T>
  void get(const char* key, std::optional<T>& out) {
    if (!has(key)) return;
    T value{};
    const std::size_t before = errors_.size();
    get(key, value);
    if (errors_.size() == before) out = value;
  }

  /// Epoch seconds or an ISO-8601 string.
  void time(const char* key, std::optional<Timestamp>& out) {
    const json* v = take(key);
    if (!v) return;
    if (v->is_number_integer()) {
      out = v->get<Timestamp>();
    } else if (v->is_string()) {
      if (auto t = parse_iso8601(v->get<std::string>())) {
        out = *t;
      } else {
        fail(key, "is not an ISO-8601 time");
      }
    } else {
      fail(key, "must be epoch seconds or an ISO-8601 string");
    }
  }

  void path(const char* key, fs::path& out, const fs::path& base) {
    std::string s;
    const std::size_t before = errors_.size();
    get(key, s);
    if (errors_.size() != before || !j_ || !j_->contains(key)) return;
    if (s.empty()) return fail(key, "must not be empty");
    fs::path p(s);
    out = p.is_absolute() || base.empty() ? p : base / p;
  }

  /// Array of strings, each mapped through parse; nullopt entries are errors.
  template <typename T, typename Parse>
  void list(const char* key, std::vector<T>& out, Parse parse, const char* what) {
    const json* v = take(key);
    if (!v) return;
    if (!v->is_array()) return fail(key, "must be an array");
    std::vector<T> parsed;
    for (const auto& e : *v) {
      if (!e.is_string()) return fail(key, "entries must be strings");
      auto p = parse(e.get<std::string>());
      if (!p) return fail(key, "unknown " + std::string(what) + " '" + e.get<std::string>() + "'");
      parsed.push_back(*p);
    }
    out = std::move(parsed);
  }

  void sizes(const char* key, std::vector<std::size_t>& out) {
    const json* v = take(key);
    if (!v) return;
    if (!v->is_array()) return fail(key, "must be an array");
    std::vector<std::size_t> parsed;
    for (const auto& e : *v) {
      if (!e.is_number_unsigned()) return fail(key, "entries must be non-negative integers");
      parsed.push_back(e.get<std::size_t>());
    }
    out = std::move(parsed);
  }

  Reader child(const char* key) {
    const json* v = take(key);
    return Reader(v, join(key), errors_);
  }

  /// Reports keys that were never read.
  void finish() const {
    if (!j_) return;
    for (const auto& [k, _] : j_->items()) {
      if (!seen_.contains(k)) errors_.push_back(join(k) + ": unknown key");
    }
  }

  void fail(std::string_view key, const std::string& msg) { errors_.push_back(join(key) + ": " + msg); }

 private:
  const json* take(const char* key) {
    if (!j_) return nullptr;
    seen_.insert(key);
    auto it = j_->find(key);
    if (it == j_->end() || it->is_null()) return nullptr;
    return &*it;
  }
  std::string join(std::string_view key) const {
    if (key.empty()) return path_;
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* j_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

void read_world(Reader r, SyntheticWorldConfig& w) {
  r.get("n_users", w.n_users);
  r.get("n_days", w.n_days);
  r.get("articles_per_day", w.articles_per_day);
  r.get("n_tags", w.n_tags);
  r.get("n_authors", w.n_authors);
  r.get("n_sections", w.n_sections);
  r.get("zipf_exponent", w.zipf_exponent);
  r.get("user_affinity_dim", w.user_affinity_dim);
  r.get("click_noise", w.click_noise);
  r.get("embedding_dim", w.embedding_dim);
  std::optional<Timestamp> start;
  r.time("start", start);
  if (start) w.start = *start;
  r.get("vocab_per_topic", w.vocab_per_topic);
  r.get("common_vocab", w.common_vocab);
  r.get("mean_visits_per_day", w.mean_visits_per_day);
  r.get("slot_size", w.slot_size);
  r.get("manual_updates_min", w.manual_updates_min);
  r.get("manual_updates_max", w.manual_updates_max);
  r.get("editor_section_focus", w.editor_section_focus);
  r.get("topic_section_coherence", w.topic_section_coherence);
  Reader cm = r.child("click_model");
  cm.get("bias", w.click_model.bias);
  cm.get("affinity_weight", w.click_model.affinity_weight);
  cm.get("quality_weight", w.click_model.quality_weight);
  cm.get("age_weight_per_day", w.click_model.age_weight_per_day);
  cm.get("click_threshold", w.click_model.click_threshold);
  cm.finish();
  r.finish();
}

void read_train(Reader r, TrainConfig& t) {
  r.get("n_trees", t.n_trees);
  r.get("max_depth", t.max_depth);
  r.get("learning_rate", t.learning_rate);
  r.get("min_child_weight", t.min_child_weight);
  r.get("l2_reg", t.l2_reg);
  r.get("base_score", t.base_score);
  r.finish();
}

void read_pipeline(Reader r, PipelineConfig& p, int& warmup_days) {
  std::optional<std::int64_t> window_h, refresh_min;
  r.get("candidate_window_hours", window_h);
  r.get("refresh_interval_minutes", refresh_min);
  if (window_h) p.candidate_window = *window_h * kSecondsPerHour;
  if (refresh_min) p.refresh_interval = *refresh_min * 60;
  r.get("nightly_train_hour", p.nightly_train_hour);
  r.get("training_days", p.training_days);
  r.get("lambda", p.lambda);
  r.get("rec_label_threshold", p.rec_label_threshold);
  r.time("t_start", p.t_start);
  r.time("t_end", p.t_end);
  r.get("warmup_days", warmup_days);
  r.get("widget_size", p.widget_size);
  r.get("missed_size", p.missed_size);
  r.get("page_size", p.page_size);
  read_train(r.child("train"), p.train);
  r.finish();
}

void read_manual(Reader r, ManualSynthesisConfig& m) {
  r.get("min_updates_per_day", m.min_updates_per_day);
  r.get("max_updates_per_day", m.max_updates_per_day);
  r.get("list_size", m.list_size);
  std::optional<std::int64_t> fresh_h;
  r.get("freshness_hours", fresh_h);
  if (fresh_h) m.freshness = *fresh_h * kSecondsPerHour;
  r.get("editor_noise", m.editor_noise);
  r.finish();
}

void read_evaluation(Reader r, OfflineEvalConfig& o, CompareConfig& c) {
  r.sizes("ks", o.ks);
  std::optional<Timestamp> first, last;
  r.time("first_day", first);
  r.time("last_day", last);
  if (first) o.first_day = day_of(*first);
  if (last) o.last_day = day_of(*last);
  r.get("top_n", c.top_n);
  if (r.has("variant")) {
    std::string variant;
    r.get("variant", variant);
    if (auto v = parse_variant(variant)) {
      c.variant = *v;
    } else if (!variant.empty()) {
      r.fail("variant", "unknown variant '" + variant + "'");
    }
  }
  r.list("sections", c.sections, parse_section, "section");
  r.get("skip_fallback", c.skip_fallback);
  r.finish();
}

std::string join_errors(const std::string& source, const std::vector<std::string>& errors) {
  std::string msg = source + ": invalid config";
  for (const auto& e : errors) msg += "\n  " + e;
  return msg;
}

void ensure_exists(const fs::path& p) {
  if (!fs::exists(p)) throw Error("missing input file: " + p.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_text(const std::string& text, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string model_file_name(Timestamp trained_at) {
  const std::string iso = format_iso8601(trained_at);  // YYYY-MM-DDTHH:MM:SSZ
  return "model-" + iso.substr(0, 4) + iso.substr(5, 2) + iso.substr(8, 2) + ".json";
}

std::pair<Timestamp, Timestamp> corpus_days(const Corpus& corpus) {
  return pipeline_horizon(corpus, PipelineConfig{});
}

Timestamp shift_split(const Corpus& corpus, const PipelineConfig& resolved) {
  const auto [first, last] = corpus_days(corpus);
  if (resolved.t_start && *resolved.t_start > first && *resolved.t_start < last) return *resolved.t_start;
  return day_start(day_of(first) + (day_of(last) - day_of(first)) / 2);
}

std::vector<RankedList> in_window(const std::vector<RankedList>& lists, Timestamp from, Timestamp to) {
  std::vector<RankedList> out;
  for (const auto& l : lists) {
    if (l.at >= from && l.at < to) out.push_back(l);
  }
  return out;
}

std::vector<RankedList> load_emissions(const Layout& layout, std::string_view treatment) {
  const fs::path p = layout.emissions(treatment);
  ensure_exists(p);
  return read_emissions_jsonl(p);
}

}  // namespace

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> errors;
  auto prefixed = [&](const std::string& prefix, const std::vector<std::string>& es) {
    for (const auto& e : es) {
      std::string field = e.substr(0, e.find(':'));
      if (field == "candidate_window") field = "candidate_window_hours";
      if (field == "refresh_interval") field = "refresh_interval_minutes";
      errors.push_back(prefix + field + e.substr(std::min(e.size(), e.find(':'))));
    }
  };
  if (synthetic.has_value() == files.has_value()) {
    errors.push_back("corpus: exactly one of 'synthetic' or 'files' is required");
  }
  if (synthetic) {
    prefixed("corpus.synthetic.", synthetic->validate());
    if (static_cast<std::size_t>(synthetic->embedding_dim) != features.embedding_dim) {
      errors.push_back("features.embedding_dim: must equal corpus.synthetic.embedding_dim (" +
                       std::to_string(synthetic->embedding_dim) + ")");
    }
  }
  if (files) {
    if (files->articles.empty()) errors.push_back("corpus.files.articles: required");
    if (files->events.empty()) errors.push_back("corpus.files.events: required");
    if (files->vectors.empty()) errors.push_back("corpus.files.vectors: required");
  }
  if (out.empty()) errors.push_back("out: must not be empty");
  if (features.hash_buckets < 1) errors.push_back("features.hash_buckets: must be >= 1");
  if (features.top_k < 1) errors.push_back("features.top_k: must be >= 1");
  if (features.embedding_dim < 1) errors.push_back("features.embedding_dim: must be >= 1");
  prefixed("pipeline.", pipeline.validate());
  if (warmup_days < 0) errors.push_back("pipeline.warmup_days: must be >= 0");
  if (warmup_days > 0 && pipeline.t_start) {
    errors.push_back("pipeline.warmup_days: cannot be combined with pipeline.t_start");
  }
  if (manual.min_updates_per_day < 1) errors.push_back("manual.min_updates_per_day: must be >= 1");
  if (manual.max_updates_per_day < manual.min_updates_per_day) {
    errors.push_back("manual.max_updates_per_day: must be >= manual.min_updates_per_day");
  }
  if (manual.list_size < 1 || manual.list_size > 5) errors.push_back("manual.list_size: must be in [1, 5]");
  if (manual.freshness <= 0) errors.push_back("manual.freshness_hours: must be > 0");
  if (!(manual.editor_noise >= 0)) errors.push_back("manual.editor_noise: must be >= 0");
  if (treatments.empty()) errors.push_back("treatments: at least one is required");
  std::set<Treatment> seen;
  for (const auto& t : treatments) {
    if (!seen.insert(t.treatment).second) {
      errors.push_back("treatments: '" + std::string(to_string(t.treatment)) + "' listed twice");
    }
    if (!(t.lambda >= 0 && t.lambda <= 1)) errors.push_back("treatments: lambda must be in [0, 1]");
  }
  if (offline.ks.empty()) errors.push_back("evaluation.ks: must not be empty");
  for (auto k : offline.ks) {
    if (k < 1) errors.push_back("evaluation.ks: entries must be >= 1");
  }
  if (offline.first_day && offline.last_day && *offline.last_day < *offline.first_day) {
    errors.push_back("evaluation.last_day: must not precede evaluation.first_day");
  }
  if (compare.top_n < 1) errors.push_back("evaluation.top_n: must be >= 1");
  if (compare.sections.empty()) errors.push_back("evaluation.sections: must not be empty");
  for (auto s : compare.sections) {
    if (s == Section::Manual) errors.push_back("evaluation.sections: 'manual' is not a recommender section");
  }
  return errors;
}

void ExperimentConfig::set_seed(std::uint64_t s) {
  seed = s;
  if (synthetic) synthetic->seed = s;
  pipeline.seed = s;
  pipeline.train.rng_seed = s;
  manual.seed = s;
}

void ExperimentConfig::set_lambda(double lambda) {
  pipeline.lambda = lambda;
  for (auto& t : treatments) {
    if (t.treatment == Treatment::Dynamism) t.lambda = lambda;
  }
}

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(source + ": " + e.what());
  }
  const fs::path base = fs::path(source).has_parent_path() ? fs::path(source).parent_path() : fs::path();
  ExperimentConfig cfg;
  std::vector<std::string> errors;
  Reader root(&j, "", errors);

  std::uint64_t seed = cfg.seed;
  root.get("seed", seed);
  root.path("out", cfg.out, {});

  Reader corpus = root.child("corpus");
  if (corpus.has("synthetic")) {
    cfg.synthetic = SyntheticWorldConfig{};
    read_world(corpus.child("synthetic"), *cfg.synthetic);
  }
  if (corpus.has("files")) {
    cfg.files = CorpusFiles{};
    Reader f = corpus.child("files");
    f.path("articles", cfg.files->articles, base);
    f.path("events", cfg.files->events, base);
    f.path("vectors", cfg.files->vectors, base);
    if (f.has("manual")) {
      fs::path m;
      f.path("manual", m, base);
      if (!m.empty()) cfg.files->manual = m;
    }
    f.finish();
  }
  corpus.finish();

  Reader feat = root.child("features");
  feat.get("hash_buckets", cfg.features.hash_buckets);
  feat.get("top_k", cfg.features.top_k);
  feat.get("embedding_dim", cfg.features.embedding_dim);
  feat.finish();

  read_pipeline(root.child("pipeline"), cfg.pipeline, cfg.warmup_days);
  read_manual(root.child("manual"), cfg.manual);

  std::vector<Treatment> arms;
  root.list("treatments", arms, parse_treatment, "treatment");
  if (!arms.empty()) {
    cfg.treatments.clear();
    for (auto t : arms) cfg.treatments.push_back({t, cfg.pipeline.lambda});
  }
  read_evaluation(root.child("evaluation"), cfg.offline, cfg.compare);
  root.finish();

  cfg.set_lambda(cfg.pipeline.lambda);
  cfg.set_seed(seed);
  for (auto& e : cfg.validate()) errors.push_back(std::move(e));
  if (!errors.empty()) throw Error(join_errors(source, errors));
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

PipelineConfig resolve_pipeline(const ExperimentConfig& cfg, const Corpus& corpus) {
  PipelineConfig p = cfg.pipeline;
  if (!p.t_start && cfg.warmup_days > 0) {
    const auto [first, last] = corpus_days(corpus);
    p.t_start = first + cfg.warmup_days * kSecondsPerDay;
    if (*p.t_start >= p.t_end.value_or(last)) {
      throw Error("pipeline.warmup_days: warm-up covers the whole corpus");
    }
  }
  return p;
}

Corpus load_output_corpus(const Layout& layout) {
  for (const auto& p : {layout.articles(), layout.events(), layout.vectors()}) ensure_exists(p);
  const WordVectors vectors = WordVectors::load(layout.vectors());
  return load_corpus(layout.articles(), layout.events(), vectors);
}

std::vector<NightlyModel> load_models(const Layout& layout, const FeatureSchema& schema) {
  ensure_exists(layout.model_index());
  std::ifstream in(layout.model_index());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(layout.model_index().string() + ": " + e.what());
  }
  std::vector<NightlyModel> models;
  try {
    for (const auto& m : j.at("models")) {
      const fs::path file = layout.models_dir() / m.at("file").get<std::string>();
      ensure_exists(file);
      auto loaded = load_model(file, schema.version());
      if (loaded.schema_mismatch) {
        throw Error(file.string() + ": trained against a different feature schema; re-run train");
      }
      models.push_back({m.at("trained_at").get<Timestamp>(), std::move(loaded.model)});
    }
  } catch (const json::exception& e) {
    throw Error(layout.model_index().string() + ": " + e.what());
  }
  return models;
}

std::vector<fs::path> cmd_generate(const ExperimentConfig& cfg) {
  const Layout layout{cfg.out};
  std::vector<fs::path> written;
  std::optional<Corpus> corpus;
  std::vector<EditorialUpdate> manual;
  if (cfg.synthetic) {
    SyntheticWorld world = generate_world(*cfg.synthetic);
    ensure_dir(layout.corpus_dir());
    world.vectors.save(layout.vectors());
    world.truth.save(layout.ground_truth());
    written.push_back(layout.vectors());
    written.push_back(layout.ground_truth());
    manual = std::move(world.manual);
    corpus.emplace(std::move(world.corpus));
  } else {
    for (const auto& p : {cfg.files->articles, cfg.files->events, cfg.files->vectors}) ensure_exists(p);
    const WordVectors vectors = WordVectors::load(cfg.files->vectors);
    corpus.emplace(load_corpus(cfg.files->articles, cfg.files->events, vectors));
    if (corpus->embedding_dim() != cfg.features.embedding_dim) {
      throw Error("features.embedding_dim is " + std::to_string(cfg.features.embedding_dim) + " but " +
                  cfg.files->vectors.string() + " has dimension " + std::to_string(corpus->embedding_dim()));
    }
    if (cfg.files->manual) {
      ensure_exists(*cfg.files->manual);
      manual = read_manual_jsonl(*cfg.files->manual);
      manual_lists(manual, *corpus);  // validates ids, sizes and causality
    } else {
      const auto [from, to] = corpus_days(*corpus);
      manual = synthesize_manual_updates(*corpus, from, to, cfg.manual);
    }
    ensure_dir(layout.corpus_dir());
    vectors.save(layout.vectors());
    written.push_back(layout.vectors());
    std::error_code ec;
    fs::remove(layout.ground_truth(), ec);
  }
  write_articles_jsonl(*corpus, layout.articles());
  write_events_jsonl(*corpus, layout.events());
  write_manual_jsonl(manual, layout.manual());
  written.insert(written.end(), {layout.articles(), layout.events(), layout.manual()});
  std::sort(written.begin(), written.end());
  return written;
}

std::vector<fs::path> cmd_train(const ExperimentConfig& cfg) {
  const Layout layout{cfg.out};
  const Corpus corpus = load_output_corpus(layout);
  const FeatureSchema schema(cfg.features);
  const PipelineConfig pipeline = resolve_pipeline(cfg, corpus);
  const auto models = train_nightly(corpus, schema, pipeline);
  if (models.empty()) throw Error("no trainable data inside the serving horizon; no models written");

  ensure_dir(layout.models_dir());
  for (const auto& entry : fs::directory_iterator(layout.models_dir())) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("model-", 0) == 0 && entry.path().extension() == ".json") fs::remove(entry.path());
  }
  std::vector<fs::path> written;
  json index{{"schema_version", schema.version()}, {"models", json::array()}};
  for (const auto& m : models) {
    const std::string name = model_file_name(m.trained_at);
    save_model(m.model, layout.models_dir() / name);
    index["models"].push_back({{"trained_at", m.trained_at}, {"file", name}});
    written.push_back(layout.models_dir() / name);
  }
  write_text(index.dump(2) + "\n", layout.model_index());
  schema.write_json(layout.schema());
  written.push_back(layout.model_index());
  written.push_back(layout.schema());
  return written;
}

std::vector<fs::path> cmd_run(const ExperimentConfig& cfg, std::optional<Treatment> only) {
  const Layout layout{cfg.out};
  const Corpus corpus = load_output_corpus(layout);
  const FeatureSchema schema(cfg.features);
  const auto models = load_models(layout, schema);
  const PipelineConfig pipeline = resolve_pipeline(cfg, corpus);

  std::vector<PipelineArm> arms;
  for (const auto& t : cfg.treatments) {
    if (!only || t.treatment == *only) arms.push_back(t);
  }
  if (arms.empty()) throw Error("treatment '" + std::string(to_string(*only)) + "' is not configured");

  const auto streams = run_pipeline_arms(corpus, schema, pipeline, corpus.users(), models, arms);
  ensure_dir(layout.emissions_dir());
  std::vector<fs::path> written;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    const fs::path p = layout.emissions(to_string(arms[i].treatment));
    write_emissions_jsonl(streams[i], p);
    written.push_back(p);
  }
  return written;
}

std::vector<fs::path> cmd_evaluate(const ExperimentConfig& cfg) {
  const Layout layout{cfg.out};
  const Corpus corpus = load_output_corpus(layout);
  const FeatureSchema schema(cfg.features);
  const auto models = load_models(layout, schema);
  const PipelineConfig pipeline = resolve_pipeline(cfg, corpus);
  const auto [t0, t1] = pipeline_horizon(corpus, pipeline);

  OfflineEvalConfig offline = cfg.offline;
  if (!offline.first_day) offline.first_day = day_of(t0);
  if (!offline.last_day) offline.last_day = day_of(t1 - 1);

  std::vector<std::pair<std::string, AccuracyReport>> accuracy;
  accuracy.emplace_back("model", offline_eval(corpus, ModelScorer(models, schema), offline));
  accuracy.emplace_back("random", offline_eval(corpus, RandomScorer(cfg.seed), offline));
  if (fs::exists(layout.ground_truth())) {
    const GroundTruth truth = GroundTruth::load(layout.ground_truth());
    accuracy.emplace_back("oracle", offline_eval(corpus, OracleScorer(truth), offline));
  }

  std::vector<std::pair<fs::path, std::vector<MetricSample>>> metrics;
  for (const auto& t : cfg.treatments) {
    const std::string name(to_string(t.treatment));
    const auto stream = load_emissions(layout, name);
    metrics.emplace_back(layout.reports_dir() / ("metrics_" + name + ".csv"),
                         treatment_samples(in_window(stream, t0, t1), corpus, cfg.compare, name));
  }

  ensure_dir(layout.reports_dir());
  std::vector<fs::path> written{layout.reports_dir() / "accuracy.json", layout.reports_dir() / "accuracy.txt"};
  write_report_json(accuracy, written[0]);
  write_text(format_table(accuracy), written[1]);
  for (const auto& [path, samples] : metrics) {
    write_metric_csv(samples, path);
    written.push_back(path);
  }
  return written;
}

std::vector<fs::path> cmd_compare(const ExperimentConfig& cfg) {
  const Layout layout{cfg.out};
  const Corpus corpus = load_output_corpus(layout);
  const PipelineConfig pipeline = resolve_pipeline(cfg, corpus);
  const auto [t0, t1] = pipeline_horizon(corpus, pipeline);

  auto configured = [&](Treatment t) {
    return std::any_of(cfg.treatments.begin(), cfg.treatments.end(),
                       [&](const PipelineArm& a) { return a.treatment == t; });
  };
  const Treatment primary = configured(Treatment::Baseline) ? Treatment::Baseline : cfg.treatments.front().treatment;
  const auto recsys = in_window(load_emissions(layout, to_string(primary)), t0, t1);
  ensure_exists(layout.manual());
  const auto manual = in_window(manual_lists(read_manual_jsonl(layout.manual()), corpus), t0, t1);

  ensure_dir(layout.reports_dir());
  std::vector<fs::path> written;
  auto emit = [&](const std::string& stem, const std::vector<ComparisonReport>& reports, const std::string& a,
                  const std::string& b, const std::string& header) {
    const fs::path json_path = layout.reports_dir() / (stem + ".json");
    const fs::path txt_path = layout.reports_dir() / (stem + ".txt");
    write_report_json(reports, json_path);
    write_text(header + format_table(reports, a, b), txt_path);
    written.push_back(json_path);
    written.push_back(txt_path);
  };

  const ManualComparison study1 = compare_manual(manual, recsys, corpus, cfg.compare);
  emit("study1", study1.reports, "manual", std::string(to_string(primary)),
       "aligned pairs: " + std::to_string(study1.aligned_pairs) + "\n");

  if (configured(Treatment::Baseline) && configured(Treatment::Dynamism)) {
    const auto dyn = in_window(load_emissions(layout, "dynamism"), t0, t1);
    emit("study2", compare_treatments(recsys, dyn, corpus, cfg.compare), "baseline", "dynamism", "");
  }

  const Timestamp split = shift_split(corpus, pipeline);
  const auto [first, last] = corpus_days(corpus);
  const Period before{first, split}, after{split, last};
  emit("behavior_shift", behavior_shift(corpus, before, after, cfg.compare.variant), "before", "after",
       "before: " + format_iso8601(before.from) + " .. " + format_iso8601(before.to) + "\n" +
           "after:  " + format_iso8601(after.from) + " .. " + format_iso8601(after.to) + "\n");
  return written;
}

}  // namespace newsrec
