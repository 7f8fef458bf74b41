#pragma once

// UTC instants with seconds precision and civil-calendar window math.
// Timestamps parse from unix seconds or ISO-8601; windows align to UTC
// day / month / year boundaries.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "mtnet/error.hpp"
#include "mtnet/strings.hpp"

namespace mtnet::time {

using UnixSeconds = std::int64_t;

enum class Resolution { day, month, year };

inline std::string_view resolution_name(Resolution r) {
  switch (r) {
    case Resolution::day: return "day";
    case Resolution::month: return "month";
    case Resolution::year: return "year";
  }
  return "?";
}

inline Resolution parse_resolution(std::string_view s) {
  if (s == "day") return Resolution::day;
  if (s == "month") return Resolution::month;
  if (s == "year") return Resolution::year;
  throw Error("unknown resolution '" + std::string(s) + "' (expected day|month|year)");
}

namespace detail {

inline UnixSeconds from_civil(int y, unsigned m, unsigned d, unsigned hh, unsigned mm,
                              unsigned ss) {
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) throw Error("invalid calendar date");
  if (hh > 23 || mm > 59 || ss > 59) throw Error("invalid time of day");
  sys_days days{ymd};
  return duration_cast<seconds>(days.time_since_epoch()).count() +
         static_cast<UnixSeconds>(hh) * 3600 + mm * 60 + ss;
}

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

inline unsigned parse_fixed(std::string_view s, std::size_t pos, std::size_t len) {
  std::uint64_t v = 0;
  std::string_view part = s.substr(pos, len);
  if (part.size() != len || !all_digits(part) || !parse_u64(part, v))
    throw Error("malformed timestamp component");
  return static_cast<unsigned>(v);
}

}  // namespace detail

// Accepts unix seconds (optionally signed) or ISO-8601:
//   YYYY-MM-DD
//   YYYY-MM-DD[T ]HH:MM:SS with optional trailing Z or +00:00
inline UnixSeconds parse_timestamp(std::string_view raw) {
  std::string_view s = trim(raw);
  if (s.empty()) throw Error("empty timestamp");

  bool numeric = detail::all_digits(s) || (s[0] == '-' && detail::all_digits(s.substr(1)));
  if (numeric) {
    std::int64_t v = 0;
    if (!parse_i64(s, v)) throw Error("unparseable unix timestamp");
    return v;
  }

  if (s.size() < 10 || s[4] != '-' || s[7] != '-')
    throw Error("unparseable timestamp '" + std::string(raw) + "'");
  int y = static_cast<int>(detail::parse_fixed(s, 0, 4));
  unsigned mo = detail::parse_fixed(s, 5, 2);
  unsigned d = detail::parse_fixed(s, 8, 2);
  if (s.size() == 10) return detail::from_civil(y, mo, d, 0, 0, 0);

  if (s[10] != 'T' && s[10] != ' ')
    throw Error("unparseable timestamp '" + std::string(raw) + "'");
  if (s.size() < 19 || s[13] != ':' || s[16] != ':')
    throw Error("unparseable timestamp '" + std::string(raw) + "'");
  unsigned hh = detail::parse_fixed(s, 11, 2);
  unsigned mi = detail::parse_fixed(s, 14, 2);
  unsigned ss = detail::parse_fixed(s, 17, 2);
  std::string_view tail = s.substr(19);
  if (!(tail.empty() || tail == "Z" || tail == "+00:00"))
    throw Error("unsupported timestamp zone suffix '" + std::string(tail) + "' (UTC only)");
  return detail::from_civil(y, mo, d, hh, mi, ss);
}

struct CivilParts {
  int year;
  unsigned month;
  unsigned day;
  unsigned hour, minute, second;
};

inline CivilParts civil_parts(UnixSeconds t) {
  using namespace std::chrono;
  sys_seconds tp{seconds{t}};
  sys_days dp = floor<days>(tp);
  year_month_day ymd{dp};
  auto tod = t - duration_cast<seconds>(dp.time_since_epoch()).count();
  return {int{ymd.year()}, unsigned{ymd.month()}, unsigned{ymd.day()},
          static_cast<unsigned>(tod / 3600), static_cast<unsigned>((tod / 60) % 60),
          static_cast<unsigned>(tod % 60)};
}

inline std::string format_iso(UnixSeconds t) {
  CivilParts p = civil_parts(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02u:%02u:%02uZ", p.year, p.month, p.day,
                p.hour, p.minute, p.second);
  return buf;
}

// Start of the calendar window containing t.
inline UnixSeconds floor_to(UnixSeconds t, Resolution r) {
  CivilParts p = civil_parts(t);
  switch (r) {
    case Resolution::day: return detail::from_civil(p.year, p.month, p.day, 0, 0, 0);
    case Resolution::month: return detail::from_civil(p.year, p.month, 1, 0, 0, 0);
    case Resolution::year: return detail::from_civil(p.year, 1, 1, 0, 0, 0);
  }
  throw Error("bad resolution");
}

// Start of the window following the one beginning at window_start.
inline UnixSeconds next_window(UnixSeconds window_start, Resolution r) {
  CivilParts p = civil_parts(window_start);
  switch (r) {
    case Resolution::day: return window_start + 86400;
    case Resolution::month:
      return p.month == 12 ? detail::from_civil(p.year + 1, 1, 1, 0, 0, 0)
                           : detail::from_civil(p.year, p.month + 1, 1, 0, 0, 0);
    case Resolution::year: return detail::from_civil(p.year + 1, 1, 1, 0, 0, 0);
  }
  throw Error("bad resolution");
}

}  // namespace mtnet::time
