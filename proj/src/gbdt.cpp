#include "newsrec/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"

namespace newsrec {

namespace {
constexpr double kMinSplitGain = 1e-12;
constexpr double kLossTolerance = 1e-12;

double log_loss(std::span<const double> margins, const std::vector<int>& labels) {
  double total = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double m = margins[i];
    // log(1 + e^m) - y*m, evaluated stably.
    const double softplus = m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
    total += softplus - labels[i] * m;
  }
  return total / static_cast<double>(labels.size());
}

struct SplitCandidate {
  double gain = kMinSplitGain;
  int feature = -1;
  double threshold = 0.0;
};

struct NodeStats {
  double g = 0;
  double h = 0;
};

double leaf_weight(const NodeStats& s, double lambda) { return -s.g / (s.h + lambda); }

double score(double g, double h, double lambda) { return g * g / (h + lambda); }
}  // namespace

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

int Tree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

TreeEnsemble::TreeEnsemble(std::vector<Tree> trees, double learning_rate, double base_score,
                           std::uint32_t schema_version, std::size_t n_features)
    : trees_(std::move(trees)),
      learning_rate_(learning_rate),
      base_score_(base_score),
      schema_version_(schema_version),
      n_features_(n_features) {}

double TreeEnsemble::margin(std::span<const double> x) const {
  double sum = 0;
  for (const auto& t : trees_) sum += t.leaf_value(x);
  return base_score_ + learning_rate_ * sum;
}

double TreeEnsemble::predict(std::span<const double> x) const {
  if (x.size() != n_features_) {
    throw Error("predict: feature width " + std::to_string(x.size()) + " != model width " +
                std::to_string(n_features_));
  }
  return sigmoid(margin(x));
}

std::vector<std::string> TrainConfig::validate() const {
  std::vector<std::string> errors;
  if (n_trees < 1) errors.push_back("n_trees: must be >= 1");
  if (max_depth < 0) errors.push_back("max_depth: must be >= 0");
  if (!(learning_rate > 0 && learning_rate <= 1)) errors.push_back("learning_rate: must be in (0, 1]");
  if (!(min_child_weight >= 0)) errors.push_back("min_child_weight: must be >= 0");
  if (!(l2_reg >= 0)) errors.push_back("l2_reg: must be >= 0");
  if (base_score && !std::isfinite(*base_score)) errors.push_back("base_score: must be finite");
  return errors;
}

Dataset to_dataset(const std::vector<LabeledExample>& examples) {
  Dataset d;
  if (examples.empty()) return d;
  d.n_features = examples.front().features.values.size();
  d.schema_version = examples.front().features.schema_version;
  d.values.reserve(examples.size() * d.n_features);
  for (const auto& e : examples) {
    if (e.features.values.size() != d.n_features) throw Error("training examples have mixed feature widths");
    d.values.insert(d.values.end(), e.features.values.begin(), e.features.values.end());
    d.labels.push_back(e.label);
  }
  return d;
}

TreeEnsemble train(const std::vector<LabeledExample>& examples, const TrainConfig& cfg, TrainReport* report) {
  return train(to_dataset(examples), cfg, report);
}

TreeEnsemble train(const Dataset& data, const TrainConfig& cfg, TrainReport* report) {
  if (auto errors = cfg.validate(); !errors.empty()) {
    std::string msg = "invalid train config:";
    for (const auto& e : errors) msg += " " + e + ";";
    throw Error(msg);
  }
  const std::size_t n = data.n_rows();
  const std::size_t nf = data.n_features;
  if (n == 0) throw Error("train: no examples");
  if (data.values.size() != n * nf) throw Error("train: design matrix width mismatch");
  const auto positives = static_cast<std::size_t>(std::count(data.labels.begin(), data.labels.end(), 1));
  if (positives == 0 || positives == n) throw Error("train: need at least one positive and one negative example");
  for (int y : data.labels) {
    if (y != 0 && y != 1) throw Error("train: labels must be 0 or 1");
  }

  const double rate = static_cast<double>(positives) / static_cast<double>(n);
  const double base = cfg.base_score.value_or(std::log(rate / (1.0 - rate)));
  const double lambda = cfg.l2_reg;

  // Column-major copy and per-feature sort order, computed once.
  std::vector<double> columns(n * nf);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < nf; ++f) columns[f * n + i] = data.values[i * nf + f];
  }
  std::vector<std::vector<std::uint32_t>> order(nf, std::vector<std::uint32_t>(n));
  for (std::size_t f = 0; f < nf; ++f) {
    auto& o = order[f];
    std::iota(o.begin(), o.end(), 0u);
    const double* col = columns.data() + f * n;
    std::stable_sort(o.begin(), o.end(), [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
  }

  std::vector<double> margins(n, base);
  std::vector<double> grad(n), hess(n);
  std::vector<int> node_of(n);
  std::vector<Tree> trees;
  TrainReport local;
  local.loss_history.push_back(log_loss(margins, data.labels));

  for (int t = 0; t < cfg.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margins[i]);
      grad[i] = p - data.labels[i];
      hess[i] = p * (1.0 - p);
    }
    Tree tree;
    tree.nodes.emplace_back();
    std::fill(node_of.begin(), node_of.end(), 0);
    std::vector<int> frontier{0};

    for (int level = 0; level < cfg.max_depth && !frontier.empty(); ++level) {
      // Local slot per frontier node; -1 for rows sitting in finished leaves.
      std::vector<int> slot_of_node(tree.nodes.size(), -1);
      for (std::size_t s = 0; s < frontier.size(); ++s) slot_of_node[static_cast<std::size_t>(frontier[s])] = static_cast<int>(s);
      std::vector<NodeStats> totals(frontier.size());
      for (std::size_t i = 0; i < n; ++i) {
        const int s = slot_of_node[static_cast<std::size_t>(node_of[i])];
        if (s < 0) continue;
        totals[static_cast<std::size_t>(s)].g += grad[i];
        totals[static_cast<std::size_t>(s)].h += hess[i];
      }
      std::vector<SplitCandidate> best(frontier.size());
      struct Running {
        NodeStats left;
        double last = 0;
        bool any = false;
      };
      std::vector<Running> running(frontier.size());
      for (std::size_t f = 0; f < nf; ++f) {
        std::fill(running.begin(), running.end(), Running{});
        const double* col = columns.data() + f * n;
        for (std::uint32_t i : order[f]) {
          const int s = slot_of_node[static_cast<std::size_t>(node_of[i])];
          if (s < 0) continue;
          auto& r = running[static_cast<std::size_t>(s)];
          const double v = col[i];
          if (r.any && v != r.last) {
            const auto& tot = totals[static_cast<std::size_t>(s)];
            const double gl = r.left.g, hl = r.left.h;
            const double gr = tot.g - gl, hr = tot.h - hl;
            if (hl >= cfg.min_child_weight && hr >= cfg.min_child_weight) {
              const double gain =
                  0.5 * (score(gl, hl, lambda) + score(gr, hr, lambda) - score(tot.g, tot.h, lambda));
              auto& b = best[static_cast<std::size_t>(s)];
              if (gain > b.gain) {
                double threshold = r.last + (v - r.last) / 2;
                if (!(threshold > r.last)) threshold = v;
                b = {gain, static_cast<int>(f), threshold};
              }
            }
          }
          r.left.g += grad[i];
          r.left.h += hess[i];
          r.last = v;
          r.any = true;
        }
      }
      std::vector<int> next;
      for (std::size_t s = 0; s < frontier.size(); ++s) {
        if (best[s].feature < 0) continue;
        const int id = frontier[s];
        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        auto& node = tree.nodes[static_cast<std::size_t>(id)];
        node.feature = best[s].feature;
        node.threshold = best[s].threshold;
        node.left = left;
        node.right = left + 1;
        next.push_back(left);
        next.push_back(left + 1);
      }
      for (std::size_t i = 0; i < n; ++i) {
        const auto& node = tree.nodes[static_cast<std::size_t>(node_of[i])];
        if (node.is_leaf()) continue;
        node_of[i] = data.values[i * nf + static_cast<std::size_t>(node.feature)] < node.threshold ? node.left
                                                                                                   : node.right;
      }
      frontier = std::move(next);
    }

    std::vector<NodeStats> leaf_stats(tree.nodes.size());
    for (std::size_t i = 0; i < n; ++i) {
      leaf_stats[static_cast<std::size_t>(node_of[i])].g += grad[i];
      leaf_stats[static_cast<std::size_t>(node_of[i])].h += hess[i];
    }
    for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
      if (tree.nodes[k].is_leaf()) tree.nodes[k].weight = leaf_weight(leaf_stats[k], lambda);
    }
    for (std::size_t i = 0; i < n; ++i) {
      margins[i] += cfg.learning_rate * tree.nodes[static_cast<std::size_t>(node_of[i])].weight;
    }
    trees.push_back(std::move(tree));
    const double loss = log_loss(margins, data.labels);
    if (loss > local.loss_history.back() + kLossTolerance) local.loss_non_increasing = false;
    local.loss_history.push_back(loss);
  }

  if (report) *report = std::move(local);
  return TreeEnsemble(std::move(trees), cfg.learning_rate, base, data.schema_version, nf);
}

void save_model(const TreeEnsemble& model, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "newsrec-gbdt";
  j["version"] = 1;
  j["schema_version"] = model.schema_version();
  j["n_features"] = model.n_features();
  j["learning_rate"] = model.learning_rate();
  j["base_score"] = model.base_score();
  auto& trees = j["trees"] = nlohmann::json::array();
  for (const auto& t : model.trees()) {
    nlohmann::json jt;
    for (const auto& node : t.nodes) {
      jt["feature"].push_back(node.feature);
      jt["threshold"].push_back(node.threshold);
      jt["left"].push_back(node.left);
      jt["right"].push_back(node.right);
      jt["weight"].push_back(node.weight);
    }
    trees.push_back(std::move(jt));
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump() << '\n';
}

LoadedModel load_model(const std::filesystem::path& path, std::optional<std::uint32_t> expected_schema) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file " + path.string());
  const std::string where = path.string() + ": ";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(where + "not valid JSON (" + e.what() + ")");
  }
  try {
    if (!j.is_object() || j.value("format", "") != "newsrec-gbdt") throw ModelError(where + "not a newsrec-gbdt model");
    if (j.at("version").get<int>() != 1) throw ModelError(where + "unsupported model version");
    const auto schema = j.at("schema_version").get<std::uint32_t>();
    const auto nf = j.at("n_features").get<std::size_t>();
    const double lr = j.at("learning_rate").get<double>();
    const double base = j.at("base_score").get<double>();
    if (!(lr > 0 && lr <= 1) || !std::isfinite(base)) throw ModelError(where + "invalid learning_rate or base_score");
    std::vector<Tree> trees;
    for (const auto& jt : j.at("trees")) {
      const auto feature = jt.at("feature").get<std::vector<int>>();
      const auto threshold = jt.at("threshold").get<std::vector<double>>();
      const auto left = jt.at("left").get<std::vector<int>>();
      const auto right = jt.at("right").get<std::vector<int>>();
      const auto weight = jt.at("weight").get<std::vector<double>>();
      const std::size_t m = feature.size();
      if (m == 0 || threshold.size() != m || left.size() != m || right.size() != m || weight.size() != m) {
        throw ModelError(where + "tree arrays have inconsistent lengths");
      }
      Tree t;
      for (std::size_t k = 0; k < m; ++k) {
        TreeNode node{feature[k], threshold[k], left[k], right[k], weight[k]};
        if (!node.is_leaf()) {
          const auto self = static_cast<int>(k);
          if (static_cast<std::size_t>(node.feature) >= nf || node.left <= self || node.right <= self ||
              static_cast<std::size_t>(node.left) >= m || static_cast<std::size_t>(node.right) >= m ||
              !std::isfinite(node.threshold)) {
            throw ModelError(where + "invalid internal node " + std::to_string(k));
          }
        } else if (!std::isfinite(node.weight)) {
          throw ModelError(where + "non-finite leaf weight at node " + std::to_string(k));
        }
        t.nodes.push_back(node);
      }
      trees.push_back(std::move(t));
    }
    LoadedModel out{TreeEnsemble(std::move(trees), lr, base, schema, nf), false};
    out.schema_mismatch = expected_schema.has_value() && *expected_schema != schema;
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(where + "malformed model (" + e.what() + ")");
  }
}

}  // namespace newsrec
