#include "newsrec/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "newsrec/text.hpp"
#include "newsrec/types.hpp"

namespace newsrec {

WordVectors::WordVectors(std::size_t dimension) : dim_(dimension) {
  if (dim_ == 0) throw Error("word vectors: dimension must be >= 1");
}

void WordVectors::add(std::string word, Vector vec) {
  if (vec.size() != dim_) {
    throw Error("word vectors: '" + word + "' has dimension " + std::to_string(vec.size()) +
                ", expected " + std::to_string(dim_));
  }
  if (auto it = index_.find(word); it != index_.end()) {
    std::copy(vec.begin(), vec.end(), data_.begin() + static_cast<std::ptrdiff_t>(it->second * dim_));
    return;
  }
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  data_.insert(data_.end(), vec.begin(), vec.end());
}

std::span<const double> WordVectors::lookup(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return {};
  return {data_.data() + it->second * dim_, dim_};
}

WordVectors WordVectors::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open word-vector file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string(), 1, "missing header");
  std::istringstream header(line);
  std::size_t vocab = 0, dim = 0;
  if (!(header >> vocab >> dim) || dim == 0) {
    throw ParseError(path.string(), 1, "header must be '<vocab> <dim>'");
  }
  WordVectors vectors(dim);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string word;
    row >> word;
    Vector v(dim);
    for (auto& x : v) {
      if (!(row >> x)) throw ParseError(path.string(), line_no, "expected " + std::to_string(dim) + " values");
    }
    std::string extra;
    if (row >> extra) throw ParseError(path.string(), line_no, "too many values");
    vectors.add(std::move(word), std::move(v));
  }
  if (vectors.size() != vocab) {
    throw ParseError(path.string(), line_no,
                     "header declares " + std::to_string(vocab) + " words, found " + std::to_string(vectors.size()));
  }
  return vectors;
}

void WordVectors::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write word-vector file: " + path.string());
  out << words_.size() << ' ' << dim_ << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out << words_[i];
    for (std::size_t j = 0; j < dim_; ++j) out << ' ' << data_[i * dim_ + j];
    out << '\n';
  }
}

Vector compute_embedding(std::string_view body, const EmbeddingProvider& provider) {
  Vector sum(provider.dimension(), 0.0);
  std::size_t n = 0;
  for (const auto& token : tokenize(body)) {
    const auto v = provider.lookup(token);
    if (v.empty()) continue;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v[i];
    ++n;
  }
  if (n > 0) {
    for (auto& x : sum) x /= static_cast<double>(n);
  }
  return sum;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0, na = 0, nb = 0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

bool is_zero(std::span<const double> v) {
  for (double x : v) {
    if (x != 0) return false;
  }
  return true;
}

}  // namespace newsrec
