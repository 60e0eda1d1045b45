#include "coincast/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "coincast/errors.hpp"
#include "coincast/numeric_text.hpp"

namespace coincast {

std::string_view attribute_name(Attribute a) {
  switch (a) {
    case Attribute::Open: return "open";
    case Attribute::High: return "high";
    case Attribute::Low: return "low";
    case Attribute::Close: return "close";
    case Attribute::Volume: return "volume";
    case Attribute::MarketCap: return "market_cap";
  }
  return "?";
}

Attribute parse_attribute(std::string_view name) {
  for (Attribute a : kAllAttributes)
    if (attribute_name(a) == name) return a;
  throw ArgumentError("unknown attribute '" + std::string(name) + "'");
}

std::optional<double> OhlcvRecord::value(Attribute a) const {
  switch (a) {
    case Attribute::Open: return open;
    case Attribute::High: return high;
    case Attribute::Low: return low;
    case Attribute::Close: return close;
    case Attribute::Volume: return volume;
    case Attribute::MarketCap: return market_cap;
  }
  return std::nullopt;
}

namespace {

void validate_record(const OhlcvRecord& r) {
  const std::string when = r.date.iso();
  for (double p : {r.open, r.high, r.low, r.close})
    if (!(p > 0.0) || !std::isfinite(p)) throw ArgumentError("non-positive price on " + when);
  if (r.low > r.high)
    throw InconsistentCandleError("inconsistent candle on " + when + ": low " + format_double(r.low) + " > high " +
                                  format_double(r.high));
  if (r.volume && !(*r.volume >= 0.0)) throw ArgumentError("negative volume on " + when);
  if (r.market_cap && !(*r.market_cap >= 0.0)) throw ArgumentError("negative market cap on " + when);
}

}  // namespace

PriceSeries::PriceSeries(std::string symbol, std::vector<OhlcvRecord> records)
    : symbol_(std::move(symbol)), records_(std::move(records)) {
  if (records_.empty()) throw EmptySliceError("price series '" + symbol_ + "' is empty");
  for (std::size_t i = 0; i < records_.size(); ++i) {
    validate_record(records_[i]);
    if (i > 0 && !(records_[i - 1].date < records_[i].date)) {
      if (records_[i - 1].date == records_[i].date)
        throw DuplicateDateError("duplicate date " + records_[i].date.iso());
      throw ArgumentError("records not in ascending date order at " + records_[i].date.iso());
    }
  }
}

bool PriceSeries::has_attribute(Attribute a) const {
  return std::all_of(records_.begin(), records_.end(), [a](const OhlcvRecord& r) { return r.value(a).has_value(); });
}

Eigen::VectorXd PriceSeries::column(Attribute a) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(records_.size()));
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto v = records_[i].value(a);
    if (!v)
      throw ArgumentError("attribute '" + std::string(attribute_name(a)) + "' missing on " + records_[i].date.iso() +
                          " in series '" + symbol_ + "'");
    out[static_cast<Eigen::Index>(i)] = *v;
  }
  return out;
}

std::vector<Day> PriceSeries::dates() const {
  std::vector<Day> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.date);
  return out;
}

std::vector<DateGap> PriceSeries::gaps() const {
  std::vector<DateGap> out;
  for (std::size_t i = 1; i < records_.size(); ++i)
    if (records_[i].date - records_[i - 1].date > 1) out.push_back({records_[i - 1].date, records_[i].date});
  return out;
}

const std::string& CsvSchema::column_for(Attribute a) const {
  switch (a) {
    case Attribute::Open: return open;
    case Attribute::High: return high;
    case Attribute::Low: return low;
    case Attribute::Close: return close;
    case Attribute::Volume: return volume;
    case Attribute::MarketCap: return market_cap;
  }
  return close;
}

std::string& CsvSchema::column_for(Attribute a) {
  return const_cast<std::string&>(static_cast<const CsvSchema&>(*this).column_for(a));
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::string(trim(current)));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(std::string(trim(current)));
  return fields;
}

}  // namespace

PriceSeries parse_csv(std::istream& source, const CsvSchema& schema, std::string symbol) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(source, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw ParseError("missing header row");

  const auto find_column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  };

  const auto date_col = find_column(schema.date);
  if (!date_col) throw ParseError("header lacks date column '" + schema.date + "'");
  std::array<std::optional<std::size_t>, kAllAttributes.size()> cols;
  for (std::size_t k = 0; k < kAllAttributes.size(); ++k) {
    const Attribute a = kAllAttributes[k];
    cols[k] = find_column(schema.column_for(a));
    const bool optional_attr = a == Attribute::Volume || a == Attribute::MarketCap;
    if (!cols[k] && !optional_attr) throw ParseError("header lacks column '" + schema.column_for(a) + "'");
  }

  std::vector<OhlcvRecord> records;
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string row = "line " + std::to_string(line_no);
    const auto field = [&](std::size_t col) -> const std::string& {
      if (col >= fields.size()) throw ParseError(row + ": expected at least " + std::to_string(col + 1) + " fields");
      return fields[col];
    };

    OhlcvRecord r;
    if (!Day::try_parse(field(*date_col), r.date))
      throw ParseError(row + ": unparseable date '" + field(*date_col) + "'");
    for (std::size_t k = 0; k < kAllAttributes.size(); ++k) {
      if (!cols[k]) continue;
      const Attribute a = kAllAttributes[k];
      const std::string& text = field(*cols[k]);
      const bool optional_attr = a == Attribute::Volume || a == Attribute::MarketCap;
      if (text.empty() && optional_attr) continue;
      const auto v = parse_double(text);
      if (!v)
        throw ParseError(row + ": non-numeric " + std::string(attribute_name(a)) + " value '" + text + "'");
      switch (a) {
        case Attribute::Open: r.open = *v; break;
        case Attribute::High: r.high = *v; break;
        case Attribute::Low: r.low = *v; break;
        case Attribute::Close: r.close = *v; break;
        case Attribute::Volume: r.volume = *v; break;
        case Attribute::MarketCap: r.market_cap = *v; break;
      }
    }
    for (double p : {r.open, r.high, r.low, r.close})
      if (!(p > 0.0)) throw ParseError(row + ": prices must be positive");
    if ((r.volume && *r.volume < 0.0) || (r.market_cap && *r.market_cap < 0.0))
      throw ParseError(row + ": volume and market cap must be nonnegative");
    if (r.low > r.high)
      throw InconsistentCandleError("inconsistent candle on " + r.date.iso() + " (" + row + "): low " +
                                    format_double(r.low) + " > high " + format_double(r.high));
    records.push_back(r);
  }
  if (records.empty()) throw ParseError("no data rows");

  std::stable_sort(records.begin(), records.end(),
                   [](const OhlcvRecord& a, const OhlcvRecord& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].date == records[i - 1].date) throw DuplicateDateError("duplicate date " + records[i].date.iso());

  return PriceSeries(std::move(symbol), std::move(records));
}

PriceSeries load_csv(const std::string& path, const CsvSchema& schema, std::string symbol) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_csv(in, schema, std::move(symbol));
}

void write_csv(std::ostream& out, const PriceSeries& series) {
  out << "Date,Open,High,Low,Close,Volume,MarketCap\n";
  for (const auto& r : series.records()) {
    out << r.date.iso() << ',' << format_double(r.open) << ',' << format_double(r.high) << ','
        << format_double(r.low) << ',' << format_double(r.close) << ',';
    if (r.volume) out << format_double(*r.volume);
    out << ',';
    if (r.market_cap) out << format_double(*r.market_cap);
    out << '\n';
  }
}

PriceSeries slice_by_date(const PriceSeries& series, Day start, Day end) {
  if (end < start) throw ArgumentError("slice start " + start.iso() + " is after end " + end.iso());
  std::vector<OhlcvRecord> kept;
  for (const auto& r : series.records())
    if (start <= r.date && r.date <= end) kept.push_back(r);
  if (kept.empty())
    throw EmptySliceError("no records of '" + series.symbol() + "' between " + start.iso() + " and " + end.iso());
  return PriceSeries(series.symbol(), std::move(kept));
}

std::size_t linear_split_point(std::size_t n, double ratio) {
  if (n < 2) throw ArgumentError("linear split needs at least 2 items, got " + std::to_string(n));
  if (!(ratio > 0.0 && ratio < 1.0)) throw ArgumentError("split ratio must lie in (0,1)");
  const auto first = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
  return std::clamp<std::size_t>(first, 1, n - 1);
}

std::pair<PriceSeries, PriceSeries> split_linear(const PriceSeries& series, double ratio) {
  const std::size_t cut = linear_split_point(series.size(), ratio);
  const auto& recs = series.records();
  const auto mid = recs.begin() + static_cast<std::ptrdiff_t>(cut);
  return {PriceSeries(series.symbol(), {recs.begin(), mid}), PriceSeries(series.symbol(), {mid, recs.end()})};
}

}  // namespace coincast
