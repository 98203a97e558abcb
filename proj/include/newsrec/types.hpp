#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace newsrec {

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

inline constexpr Timestamp kSecondsPerHour = 3600;
inline constexpr Timestamp kSecondsPerDay = 24 * kSecondsPerHour;
inline constexpr Timestamp kSecondsPerWeek = 7 * kSecondsPerDay;

/// Calendar day index (days since epoch) of a timestamp.
constexpr std::int64_t day_of(Timestamp t) {
  return t >= 0 ? t / kSecondsPerDay : -((-t + kSecondsPerDay - 1) / kSecondsPerDay);
}
constexpr Timestamp day_start(std::int64_t day) { return day * kSecondsPerDay; }

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

enum class EventKind { Impression, Click };

enum class DisplayContext { Manual, MNWidget, MissedLW, MNPage, RecommendedLabel, Other };

std::string_view to_string(EventKind kind);
std::string_view to_string(DisplayContext context);
std::optional<EventKind> parse_event_kind(std::string_view s);
std::optional<DisplayContext> parse_display_context(std::string_view s);

/// Parses "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS][Z|+HH:MM|-HH:MM]" into epoch seconds.
std::optional<Timestamp> parse_iso8601(std::string_view s);
std::string format_iso8601(Timestamp t);

/// FNV-1a, stable across platforms and runs.
constexpr std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace newsrec
