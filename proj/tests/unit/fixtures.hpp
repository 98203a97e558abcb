#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "newsrec/corpus.hpp"

namespace fixtures {

using namespace newsrec;

inline Article article(std::string id, Timestamp published_at, std::string section = "economy",
                       StringSet tags = {}, StringSet authors = {}, Vector embedding = {0.0, 0.0}) {
  Article a;
  a.id = std::move(id);
  a.published_at = published_at;
  a.section = std::move(section);
  a.tags = std::move(tags);
  a.authors = std::move(authors);
  a.embedding = std::move(embedding);
  return a;
}

inline InteractionEvent click(std::string user, std::string article, Timestamp at,
                              DisplayContext ctx = DisplayContext::MNWidget) {
  return {std::move(user), std::move(article), at, EventKind::Click, ctx};
}

inline InteractionEvent impression(std::string user, std::string article, Timestamp at,
                                   DisplayContext ctx = DisplayContext::MNWidget) {
  return {std::move(user), std::move(article), at, EventKind::Impression, ctx};
}

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("newsrec_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace fixtures
