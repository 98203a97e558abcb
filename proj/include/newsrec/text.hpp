#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace newsrec {

/// Lowercased tokens from maximal alphanumeric runs. Bytes >= 0x80 (UTF-8
/// multibyte sequences) count as word characters; only ASCII is case-folded.
std::vector<std::string> tokenize(std::string_view text);

struct TextStats {
  std::int64_t word_count = 0;
  std::int64_t sentence_count = 0;
  std::int64_t paragraph_count = 0;
  std::int64_t char_length = 0;  // UTF-8 code points
  std::int64_t hapax_count = 0;  // distinct tokens occurring exactly once
  std::int64_t dis_count = 0;    // distinct tokens occurring exactly twice
};

/// Sentences are runs of text terminated by '.', '!' or '?' (or end of text)
/// that contain at least one token. Paragraphs are blocks separated by one or
/// more blank lines that contain at least one token.
TextStats compute_text_stats(std::string_view body);

}  // namespace newsrec
