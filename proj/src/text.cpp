#include "newsrec/text.hpp"

#include <unordered_map>

namespace newsrec {

namespace {
bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

char fold(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

bool has_token(std::string_view s) {
  for (unsigned char c : s) {
    if (is_word_byte(c)) return true;
  }
  return false;
}
}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      current.push_back(fold(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

TextStats compute_text_stats(std::string_view body) {
  TextStats stats;
  const auto tokens = tokenize(body);
  stats.word_count = static_cast<std::int64_t>(tokens.size());

  std::unordered_map<std::string_view, int> counts;
  for (const auto& t : tokens) ++counts[t];
  for (const auto& [_, n] : counts) {
    if (n == 1) ++stats.hapax_count;
    if (n == 2) ++stats.dis_count;
  }

  for (unsigned char c : body) {
    if ((c & 0xC0) != 0x80) ++stats.char_length;
  }

  std::size_t start = 0;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    if (i == body.size() || body[i] == '.' || body[i] == '!' || body[i] == '?') {
      if (has_token(body.substr(start, i - start))) ++stats.sentence_count;
      start = i + 1;
    }
  }

  // Paragraph breaks: a newline followed by optional horizontal whitespace and another newline.
  start = 0;
  std::size_t i = 0;
  while (i <= body.size()) {
    bool boundary = i == body.size();
    std::size_t next = i + 1;
    if (!boundary && body[i] == '\n') {
      std::size_t j = i + 1;
      while (j < body.size() && (body[j] == ' ' || body[j] == '\t' || body[j] == '\r')) ++j;
      if (j < body.size() && body[j] == '\n') {
        boundary = true;
        next = j + 1;
      }
    }
    if (boundary) {
      if (has_token(body.substr(start, i - start))) ++stats.paragraph_count;
      start = next;
    }
    i = next;
  }
  return stats;
}

}  // namespace newsrec
