#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "coincast/date.hpp"

namespace coincast {

/// Numeric columns of a daily candle. Date is carried separately.
enum class Attribute { Open, High, Low, Close, Volume, MarketCap };

inline constexpr std::array<Attribute, 6> kAllAttributes = {Attribute::Open,  Attribute::High,   Attribute::Low,
                                                            Attribute::Close, Attribute::Volume, Attribute::MarketCap};

/// Lower-case key used in specs and feature names ("close", "market_cap").
std::string_view attribute_name(Attribute a);
/// Inverse of attribute_name; throws ArgumentError for unknown names.
Attribute parse_attribute(std::string_view name);

struct OhlcvRecord {
  Day date;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  std::optional<double> volume;
  std::optional<double> market_cap;

  std::optional<double> value(Attribute a) const;
  bool operator==(const OhlcvRecord&) const = default;
};

/// A run of consecutive calendar days with no record.
struct DateGap {
  Day last_before;
  Day first_after;
  std::int64_t missing_days() const { return first_after - last_before - 1; }
};

/// Nonempty, strictly date-ascending daily series. Immutable once built.
class PriceSeries {
 public:
  /// Validates ordering and per-record invariants.
  PriceSeries(std::string symbol, std::vector<OhlcvRecord> records);

  const std::string& symbol() const { return symbol_; }
  const std::vector<OhlcvRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  const OhlcvRecord& operator[](std::size_t i) const { return records_[i]; }
  const OhlcvRecord& front() const { return records_.front(); }
  const OhlcvRecord& back() const { return records_.back(); }

  /// True when every record carries the attribute.
  bool has_attribute(Attribute a) const;
  /// Throws ArgumentError when any record lacks the attribute.
  Eigen::VectorXd column(Attribute a) const;
  std::vector<Day> dates() const;
  std::vector<DateGap> gaps() const;

  bool operator==(const PriceSeries&) const = default;

 private:
  std::string symbol_;
  std::vector<OhlcvRecord> records_;
};

/// Maps header names to attributes. Volume and market cap may be absent.
struct CsvSchema {
  std::string date = "Date";
  std::string open = "Open";
  std::string high = "High";
  std::string low = "Low";
  std::string close = "Close";
  std::string volume = "Volume";
  std::string market_cap = "MarketCap";

  const std::string& column_for(Attribute a) const;
  std::string& column_for(Attribute a);
};

PriceSeries parse_csv(std::istream& source, const CsvSchema& schema = {}, std::string symbol = {});
PriceSeries load_csv(const std::string& path, const CsvSchema& schema = {}, std::string symbol = {});

/// Writes the canonical layout: ISO dates, shortest round-trip decimals, empty cells for missing values.
void write_csv(std::ostream& out, const PriceSeries& series);

/// Inclusive on both ends. Throws EmptySliceError when nothing falls inside.
PriceSeries slice_by_date(const PriceSeries& series, Day start, Day end);

/// Size of the leading part of a linear split: floor(ratio * n) clamped to [1, n - 1].
std::size_t linear_split_point(std::size_t n, double ratio);

std::pair<PriceSeries, PriceSeries> split_linear(const PriceSeries& series, double ratio);

}  // namespace coincast
