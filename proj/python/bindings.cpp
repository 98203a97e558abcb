#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "newsrec/experiment.hpp"

namespace py = pybind11;
using namespace newsrec;

namespace {

ExperimentConfig configured(const std::string& path, std::optional<std::uint64_t> seed,
                            std::optional<std::string> out, std::optional<double> lambda) {
  ExperimentConfig cfg = load_config(path);
  if (seed) cfg.set_seed(*seed);
  if (out) cfg.out = *out;
  if (lambda) cfg.set_lambda(*lambda);
  return cfg;
}

std::vector<std::string> strings(const std::vector<std::filesystem::path>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) out.push_back(p.string());
  return out;
}

TTestVariant variant_of(const std::string& name) {
  auto v = parse_variant(name);
  if (!v) throw Error("unknown t-test variant '" + name + "'");
  return *v;
}

py::dict t_test_dict(const std::vector<double>& a, const std::vector<double>& b, const std::string& variant) {
  const ComparisonReport r = t_test(a, b, variant_of(variant));
  py::dict d;
  d["t"] = r.t_stat;
  d["df"] = r.df;
  d["p"] = r.p_value;
  d["significant"] = r.significant;
  d["mean_a"] = r.group_a.mean;
  d["mean_b"] = r.group_b.mean;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Content-based news recommender: experiment commands and metrics";
  py::register_exception<Error>(m, "NewsrecError", PyExc_RuntimeError);

  m.def(
      "generate",
      [](const std::string& c, std::optional<std::uint64_t> seed, std::optional<std::string> out) {
        return strings(cmd_generate(configured(c, seed, out, std::nullopt)));
      },
      py::arg("config"), py::kw_only(), py::arg("seed") = py::none(), py::arg("out") = py::none());
  m.def(
      "train",
      [](const std::string& c, std::optional<std::uint64_t> seed, std::optional<std::string> out) {
        return strings(cmd_train(configured(c, seed, out, std::nullopt)));
      },
      py::arg("config"), py::kw_only(), py::arg("seed") = py::none(), py::arg("out") = py::none());
  m.def(
      "run",
      [](const std::string& c, std::optional<std::uint64_t> seed, std::optional<std::string> out,
         std::optional<double> lambda, std::optional<std::string> treatment) {
        std::optional<Treatment> only;
        if (treatment) {
          only = parse_treatment(*treatment);
          if (!only) throw Error("unknown treatment '" + *treatment + "'");
        }
        return strings(cmd_run(configured(c, seed, out, lambda), only));
      },
      py::arg("config"), py::kw_only(), py::arg("seed") = py::none(), py::arg("out") = py::none(),
      py::arg("lam") = py::none(), py::arg("treatment") = py::none());
  m.def(
      "evaluate",
      [](const std::string& c, std::optional<std::uint64_t> seed, std::optional<std::string> out,
         std::optional<double> lambda) { return strings(cmd_evaluate(configured(c, seed, out, lambda))); },
      py::arg("config"), py::kw_only(), py::arg("seed") = py::none(), py::arg("out") = py::none(),
      py::arg("lam") = py::none());
  m.def(
      "compare",
      [](const std::string& c, std::optional<std::uint64_t> seed, std::optional<std::string> out,
         std::optional<double> lambda, std::optional<std::string> variant) {
        ExperimentConfig cfg = configured(c, seed, out, lambda);
        if (variant) cfg.compare.variant = variant_of(*variant);
        return strings(cmd_compare(cfg));
      },
      py::arg("config"), py::kw_only(), py::arg("seed") = py::none(), py::arg("out") = py::none(),
      py::arg("lam") = py::none(), py::arg("variant") = py::none());

  m.def("validate_config", [](const std::string& path) { return load_config(path).validate(); }, py::arg("path"));

  m.def("dyn_score", py::overload_cast<Timestamp, Timestamp>(&dyn_score), py::arg("published_at"),
        py::arg("t_start"), "1 - 1 / (1 + ln(1 + hours since t_start)); 0 at or before t_start.");
  m.def(
      "dynamism",
      [](const std::vector<std::string>& previous, const std::vector<std::string>& current) {
        return dynamism(std::span<const std::string>(previous), std::span<const std::string>(current));
      },
      py::arg("previous"), py::arg("current"));
  m.def(
      "ndcg", [](const std::vector<std::string>& ranking, const StringSet& clicked) { return ndcg(ranking, clicked); },
      py::arg("ranking"), py::arg("clicked"));
  m.def(
      "precision_recall_at",
      [](const std::vector<std::string>& ranking, const StringSet& clicked, std::size_t k)
          -> std::optional<std::pair<double, double>> {
        const auto pr = precision_recall_at(ranking, clicked, k);
        if (!pr) return std::nullopt;
        return std::make_pair(pr->precision, pr->recall);
      },
      py::arg("ranking"), py::arg("clicked"), py::arg("k"));
  m.def("gini", [](const std::vector<double>& counts) { return gini(std::span<const double>(counts)); },
        py::arg("counts"));
  m.def("entropy", [](const std::vector<double>& counts) { return entropy(std::span<const double>(counts)); },
        py::arg("counts"));
  m.def("t_test", &t_test_dict, py::arg("a"), py::arg("b"), py::arg("variant") = "student");
}
