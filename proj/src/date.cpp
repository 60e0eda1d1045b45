#include "coincast/date.hpp"

#include <chrono>
#include <cstdio>

#include "coincast/errors.hpp"

namespace coincast {

namespace {

bool read_digits(std::string_view s, std::size_t pos, std::size_t count, int& value) {
  if (pos + count > s.size()) return false;
  value = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    value = value * 10 + (s[i] - '0');
  }
  return true;
}

bool make_day(int y, int m, int d, Day& out) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return false;
  out = Day(sys_days(ymd).time_since_epoch().count());
  return true;
}

}  // namespace

Day Day::from_ymd(int year, unsigned month, unsigned day) {
  Day out;
  if (!make_day(year, static_cast<int>(month), static_cast<int>(day), out))
    throw ArgumentError("invalid calendar date " + std::to_string(year) + "-" + std::to_string(month) + "-" +
                        std::to_string(day));
  return out;
}

bool Day::try_parse(std::string_view text, Day& out) {
  int y = 0, m = 0, d = 0;
  if (text.size() != 10) return false;
  if (text[4] == '-' && text[7] == '-') {
    if (!read_digits(text, 0, 4, y) || !read_digits(text, 5, 2, m) || !read_digits(text, 8, 2, d)) return false;
  } else if (text[2] == '.' && text[5] == '.') {
    if (!read_digits(text, 0, 2, d) || !read_digits(text, 3, 2, m) || !read_digits(text, 6, 4, y)) return false;
  } else {
    return false;
  }
  return make_day(y, m, d, out);
}

Day Day::parse(std::string_view text) {
  Day out;
  if (!try_parse(text, out)) throw ParseError("unparseable date '" + std::string(text) + "'");
  return out;
}

std::string Day::iso() const {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{ordinal_}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace coincast
