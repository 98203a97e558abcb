#include "newsrec/types.hpp"

#include <array>
#include <chrono>
#include <cstdio>

namespace newsrec {

std::string_view to_string(EventKind kind) {
  return kind == EventKind::Click ? "click" : "impression";
}

namespace {
constexpr std::array<std::pair<DisplayContext, std::string_view>, 6> kContextNames{{
    {DisplayContext::Manual, "manual"},
    {DisplayContext::MNWidget, "mnwidget"},
    {DisplayContext::MissedLW, "missedlw"},
    {DisplayContext::MNPage, "mnpage"},
    {DisplayContext::RecommendedLabel, "recommended_label"},
    {DisplayContext::Other, "other"},
}};

bool parse_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}
}  // namespace

std::string_view to_string(DisplayContext context) {
  for (const auto& [c, name] : kContextNames) {
    if (c == context) return name;
  }
  return "other";
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
  if (s == "click") return EventKind::Click;
  if (s == "impression") return EventKind::Impression;
  return std::nullopt;
}

std::optional<DisplayContext> parse_display_context(std::string_view s) {
  for (const auto& [c, name] : kContextNames) {
    if (name == s) return c;
  }
  return std::nullopt;
}

std::optional<Timestamp> parse_iso8601(std::string_view s) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, hh = 0, mm = 0, ss = 0;
  if (!parse_digits(s, 0, 4, y) || s.size() < 10 || s[4] != '-' || !parse_digits(s, 5, 2, mo) ||
      s[7] != '-' || !parse_digits(s, 8, 2, d)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  std::size_t pos = 10;
  Timestamp offset = 0;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
    if (!parse_digits(s, pos + 1, 2, hh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
        !parse_digits(s, pos + 4, 2, mm)) {
      return std::nullopt;
    }
    pos += 6;
    if (pos < s.size() && s[pos] == ':') {
      if (!parse_digits(s, pos + 1, 2, ss)) return std::nullopt;
      pos += 3;
    }
    if (pos < s.size()) {
      if (s[pos] == 'Z' && pos + 1 == s.size()) {
        pos += 1;
      } else if ((s[pos] == '+' || s[pos] == '-') && pos + 6 == s.size() && s[pos + 3] == ':') {
        int oh = 0, om = 0;
        if (!parse_digits(s, pos + 1, 2, oh) || !parse_digits(s, pos + 4, 2, om)) return std::nullopt;
        offset = (s[pos] == '+' ? 1 : -1) * (oh * kSecondsPerHour + om * 60);
        pos = s.size();
      } else {
        return std::nullopt;
      }
    }
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  }
  const Timestamp days = sys_days{ymd}.time_since_epoch().count();
  return days * kSecondsPerDay + hh * kSecondsPerHour + mm * 60 + ss - offset;
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const auto day_index = day_of(t);
  const year_month_day ymd{sys_days{days{day_index}}};
  const Timestamp rem = t - day_start(day_index);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(rem / kSecondsPerHour), static_cast<int>(rem % kSecondsPerHour / 60),
                static_cast<int>(rem % 60));
  return buf;
}

}  // namespace newsrec
