#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace coincast {

/// A UTC calendar day, stored as the number of days since 1970-01-01.
class Day {
 public:
  constexpr Day() = default;
  constexpr explicit Day(std::int64_t ordinal) : ordinal_(ordinal) {}

  /// Throws ArgumentError for out-of-range fields (e.g. 2019-02-30).
  static Day from_ymd(int year, unsigned month, unsigned day);

  /// Accepts YYYY-MM-DD and DD.MM.YYYY. Returns false on anything else.
  static bool try_parse(std::string_view text, Day& out);
  /// Like try_parse, but throws ParseError.
  static Day parse(std::string_view text);

  constexpr std::int64_t ordinal() const { return ordinal_; }
  std::string iso() const;

  constexpr Day operator+(std::int64_t days) const { return Day(ordinal_ + days); }
  constexpr Day operator-(std::int64_t days) const { return Day(ordinal_ - days); }
  constexpr std::int64_t operator-(Day other) const { return ordinal_ - other.ordinal_; }

  constexpr auto operator<=>(const Day&) const = default;

 private:
  std::int64_t ordinal_ = 0;
};

}  // namespace coincast
