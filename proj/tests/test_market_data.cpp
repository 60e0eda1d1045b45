#include <gtest/gtest.h>

#include <sstream>

#include "coincast/errors.hpp"
#include "coincast/market_data.hpp"
#include "support.hpp"

using namespace coincast;

namespace {

const char* kHeader = "Date,Open,High,Low,Close,Volume,MarketCap\n";

PriceSeries parse(const std::string& body) {
  std::istringstream in(std::string(kHeader) + body);
  return parse_csv(in, {}, "btc");
}

}  // namespace

TEST(ParseCsv, SingleRow) {
  const auto s = parse("2019-01-01,100.0,110.0,90.0,105.0,1000,50000\n");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].close, 105.0);
  EXPECT_EQ(s[0].open, 100.0);
  EXPECT_EQ(*s[0].volume, 1000.0);
  EXPECT_EQ(*s[0].market_cap, 50000.0);
  EXPECT_EQ(s[0].date, Day::from_ymd(2019, 1, 1));
  EXPECT_EQ(s.symbol(), "btc");
}

TEST(ParseCsv, DuplicateDate) {
  EXPECT_THROW(parse("2019-01-01,100,110,90,105,1,1\n2019-01-01,100,110,90,105,1,1\n"), DuplicateDateError);
}

TEST(ParseCsv, InconsistentCandleNamesDate) {
  try {
    parse("2019-01-02,100,90,110,105,1,1\n");
    FAIL();
  } catch (const InconsistentCandleError& e) {
    EXPECT_NE(std::string(e.what()).find("2019-01-02"), std::string::npos);
  }
}

TEST(ParseCsv, MalformedRowNamesLine) {
  try {
    parse("2019-01-01,100,110,90,105,1,1\n2019-01-02,abc,110,90,105,1,1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse("2019-13-45,100,110,90,105,1,1\n"), ParseError);
}

TEST(ParseCsv, RejectsThousandsSeparatorsAndCurrency) {
  EXPECT_THROW(parse("2019-01-01,\"1,000\",1100,900,1050,1,1\n"), ParseError);
  EXPECT_THROW(parse("2019-01-01,$100,110,90,105,1,1\n"), ParseError);
}

TEST(ParseCsv, DescendingInputIsSorted) {
  const auto s = parse("03.01.2019,1,2,1,2,1,1\n02.01.2019,1,2,1,1.5,1,1\n2019-01-01,1,2,1,1,1,1\n");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].date, Day::from_ymd(2019, 1, 1));
  EXPECT_EQ(s[2].date, Day::from_ymd(2019, 1, 3));
  EXPECT_EQ(s[1].close, 1.5);
}

TEST(ParseCsv, IndexWithoutVolumeColumns) {
  std::istringstream in("Date,Open,High,Low,Close\n2019-01-01,1,2,0.5,1.5\n");
  const auto s = parse_csv(in);
  EXPECT_FALSE(s[0].volume.has_value());
  EXPECT_FALSE(s.has_attribute(Attribute::Volume));
  EXPECT_THROW(s.column(Attribute::MarketCap), ArgumentError);
}

TEST(ParseCsv, EmptyCellIsMissingNotZero) {
  const auto s = parse("2019-01-01,1,2,0.5,1.5,,\n");
  EXPECT_FALSE(s[0].volume.has_value());
  EXPECT_FALSE(s[0].market_cap.has_value());
}

TEST(ParseCsv, RemappedSchema) {
  CsvSchema schema;
  schema.date = "day";
  schema.close = "Adj Close";
  std::istringstream in("day,Open,High,Low,Adj Close\n2019-01-01,1,2,0.5,1.5\n");
  EXPECT_EQ(parse_csv(in, schema)[0].close, 1.5);
}

TEST(ParseCsv, GapsAreReportedNotFilled) {
  const auto s = parse("2019-01-01,1,2,1,1,1,1\n2019-01-04,1,2,1,1,1,1\n");
  EXPECT_EQ(s.size(), 2u);
  ASSERT_EQ(s.gaps().size(), 1u);
  EXPECT_EQ(s.gaps()[0].missing_days(), 2);
}

TEST(CsvRoundTrip, FieldIdentical) {
  const auto s = testsupport::series_from_closes(testsupport::random_walk(60, 7));
  std::ostringstream out;
  write_csv(out, s);
  std::istringstream in(out.str());
  const auto back = parse_csv(in, {}, "test");
  EXPECT_EQ(back, s);
}

TEST(CsvRoundTrip, MissingStaysMissing) {
  const auto s = testsupport::series_from_closes({1, 2, 3}, Day::from_ymd(2019, 1, 1), false);
  std::ostringstream out;
  write_csv(out, s);
  std::istringstream in(out.str());
  EXPECT_EQ(parse_csv(in, {}, "test"), s);
}

TEST(SliceByDate, Basics) {
  const auto s = testsupport::series_from_closes({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  const auto part = slice_by_date(s, Day::from_ymd(2019, 1, 3), Day::from_ymd(2019, 1, 5));
  ASSERT_EQ(part.size(), 3u);
  EXPECT_EQ(part[0].close, 3.0);
  EXPECT_EQ(slice_by_date(s, s.front().date, s.back().date), s);
  EXPECT_THROW(slice_by_date(s, Day::from_ymd(2019, 2, 1), Day::from_ymd(2019, 2, 2)), EmptySliceError);
  EXPECT_THROW(slice_by_date(s, Day::from_ymd(2019, 1, 5), Day::from_ymd(2019, 1, 3)), ArgumentError);
}

TEST(SliceByDate, Idempotent) {
  const auto s = testsupport::series_from_closes(testsupport::random_walk(40, 3));
  const Day a = Day::from_ymd(2019, 1, 5), b = Day::from_ymd(2019, 1, 20);
  const auto once = slice_by_date(s, a, b);
  EXPECT_EQ(slice_by_date(once, a, b), once);
}

TEST(SplitLinear, TenAtSixty) {
  const auto s = testsupport::series_from_closes({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  const auto [a, b] = split_linear(s, 0.6);
  EXPECT_EQ(a.size(), 6u);
  EXPECT_EQ(b.size(), 4u);
  EXPECT_EQ(b[0].close, 7.0);
}

TEST(SplitLinear, PartitionProperty) {
  for (std::size_t n = 2; n <= 200; ++n) {
    std::vector<double> closes(n);
    for (std::size_t i = 0; i < n; ++i) closes[i] = 1.0 + static_cast<double>(i);
    const auto s = testsupport::series_from_closes(closes);
    for (int r = 1; r <= 9; ++r) {
      const auto [a, b] = split_linear(s, r / 10.0);
      ASSERT_GE(a.size(), 1u);
      ASSERT_GE(b.size(), 1u);
      ASSERT_EQ(a.size() + b.size(), n);
      std::vector<OhlcvRecord> joined = a.records();
      joined.insert(joined.end(), b.records().begin(), b.records().end());
      ASSERT_EQ(joined, s.records()) << "n=" << n << " ratio=" << r;
    }
  }
}

TEST(SplitLinear, TooShort) {
  EXPECT_THROW(split_linear(testsupport::series_from_closes({1}), 0.6), ArgumentError);
}

TEST(PriceSeries, Invariants) {
  EXPECT_THROW(PriceSeries("x", {}), Error);
  OhlcvRecord r;
  r.date = Day::from_ymd(2019, 1, 1);
  r.open = r.high = r.low = 1;
  r.close = -1;
  EXPECT_THROW(PriceSeries("x", {r}), Error);
}

TEST(Day, Formats) {
  EXPECT_EQ(Day::parse("27.12.2013"), Day::from_ymd(2013, 12, 27));
  EXPECT_EQ(Day::parse("1970-01-01").ordinal(), 0);
  EXPECT_EQ(Day::from_ymd(2019, 1, 31).iso(), "2019-01-31");
  EXPECT_THROW(Day::parse("2019-02-30"), ParseError);
  EXPECT_THROW(Day::parse("2019/01/01"), ParseError);
}
