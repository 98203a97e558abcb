#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace newsrec {

using Vector = std::vector<double>;

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  /// Vector for a (lowercased) token, or empty span when the word is unknown.
  virtual std::span<const double> lookup(std::string_view word) const = 0;
};

/// In-memory word-vector table. Text format: first line "<vocab> <dim>",
/// then "<word> <f1> ... <fD>" per line.
class WordVectors final : public EmbeddingProvider {
 public:
  explicit WordVectors(std::size_t dimension);

  static WordVectors load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  /// Replaces any existing entry. Throws if the vector has the wrong dimension.
  void add(std::string word, Vector vec);

  std::size_t dimension() const override { return dim_; }
  std::span<const double> lookup(std::string_view word) const override;
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::size_t dim_;
  std::vector<std::string> words_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Elementwise mean over the body's tokens that have a vector (repeats
/// included); the zero vector when none resolve.
Vector compute_embedding(std::string_view body, const EmbeddingProvider& provider);

/// Cosine similarity; 0 when either side is the zero vector.
double cosine(std::span<const double> a, std::span<const double> b);

bool is_zero(std::span<const double> v);

}  // namespace newsrec
