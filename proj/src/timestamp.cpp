#include "lmap/timestamp.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "lmap/core.hpp"

namespace lmap {
namespace {

// Howard Hinnant's days_from_civil / civil_from_days.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

int read_int(std::string_view s, std::size_t pos, std::size_t len) {
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (i >= s.size() || !is_digit(s[i])) {
      throw InputError("malformed ISO-8601 timestamp: '" + std::string(s) + "'");
    }
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

}  // namespace

double parse_iso8601(std::string_view s) {
  auto fail = [&]() {
    throw InputError("malformed ISO-8601 timestamp: '" + std::string(s) + "'");
  };
  if (s.size() < 19) fail();
  const int year = read_int(s, 0, 4);
  if (s[4] != '-') fail();
  const int month = read_int(s, 5, 2);
  if (s[7] != '-') fail();
  const int day = read_int(s, 8, 2);
  if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') fail();
  const int hour = read_int(s, 11, 2);
  if (s[13] != ':') fail();
  const int minute = read_int(s, 14, 2);
  if (s[16] != ':') fail();
  const int second = read_int(s, 17, 2);
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 ||
      second > 60) {
    fail();
  }

  std::size_t pos = 19;
  double fraction = 0.0;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    double scale = 0.1;
    const std::size_t start = pos;
    while (pos < s.size() && is_digit(s[pos])) {
      fraction += (s[pos] - '0') * scale;
      scale *= 0.1;
      ++pos;
    }
    if (pos == start) fail();
  }
  int offset_seconds = 0;
  if (pos < s.size()) {
    const std::string_view zone = s.substr(pos);
    if (zone == "Z" || zone == "z") {
    } else if (zone.size() == 6 && (zone[0] == '+' || zone[0] == '-') && zone[3] == ':') {
      const int oh = read_int(zone, 1, 2);
      const int om = read_int(zone, 4, 2);
      offset_seconds = (zone[0] == '+' ? 1 : -1) * (oh * 3600 + om * 60);
    } else {
      fail();
    }
  }

  const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                            static_cast<unsigned>(day));
  const std::int64_t whole =
      days * 86400 + hour * 3600 + minute * 60 + second - offset_seconds;
  return static_cast<double>(whole) + fraction;
}

std::string format_iso8601(double t) {
  if (!std::isfinite(t)) throw InputError("cannot format non-finite timestamp");
  std::int64_t micros = std::llround(t * 1e6);
  std::int64_t whole = micros / 1000000;
  std::int64_t frac = micros % 1000000;
  if (frac < 0) {
    frac += 1000000;
    whole -= 1;
  }
  std::int64_t days = whole / 86400;
  std::int64_t rem = whole % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[64];
  const int hh = static_cast<int>(rem / 3600), mm = static_cast<int>(rem % 3600 / 60),
            ss = static_cast<int>(rem % 60);
  if (frac == 0) {
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<long long>(y), m, d, hh, mm, ss);
  } else {
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02d.%06lldZ",
                  static_cast<long long>(y), m, d, hh, mm, ss,
                  static_cast<long long>(frac));
  }
  return buf;
}

}  // namespace lmap
