#pragma once
// Shared fixtures for the unit and acceptance tests.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "coincast/market_data.hpp"
#include "coincast/numeric_text.hpp"

namespace testsupport {

using coincast::Day;

/// Daily series starting at `first` whose close follows `closes`; open is the
/// previous close and the candle is widened by 1%.
inline coincast::PriceSeries series_from_closes(const std::vector<double>& closes,
                                                Day first = Day::from_ymd(2019, 1, 1), bool with_volume = true) {
  std::vector<coincast::OhlcvRecord> recs;
  for (std::size_t i = 0; i < closes.size(); ++i) {
    coincast::OhlcvRecord r;
    r.date = first + static_cast<std::int64_t>(i);
    r.close = closes[i];
    r.open = i == 0 ? closes[i] : closes[i - 1];
    r.high = std::max(r.open, r.close) * 1.01;
    r.low = std::min(r.open, r.close) * 0.99;
    if (with_volume) {
      r.volume = 1000.0 + 10.0 * static_cast<double>(i % 7);
      r.market_cap = r.close * 1e6;
    }
    recs.push_back(r);
  }
  return coincast::PriceSeries("test", std::move(recs));
}

/// Geometric random walk, always positive.
inline std::vector<double> random_walk(std::size_t n, std::uint64_t seed, double start = 1000.0, double vol = 0.03) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> step(0.0, vol);
  std::vector<double> out;
  double p = start;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(p);
    p *= std::exp(step(rng));
  }
  return out;
}

inline void write_series_csv(const std::filesystem::path& path, const coincast::PriceSeries& s) {
  std::ofstream out(path);
  coincast::write_csv(out, s);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("coincast_" + tag + "_" + std::to_string(rng() % 1000000007));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Naive loop implementations of the seven metrics, written independently of
// perf_metrics.cpp. Used as the oracle.
struct NaiveMetrics {
  double rmse, trend, abs_mean, abs_std, rel_mean, rel_std, sq_mean, sq_std;
  std::optional<double> corr;
};

inline NaiveMetrics naive_metrics(const std::vector<double>& a, const std::vector<double>& p,
                                  const std::vector<double>& prev) {
  const double n = static_cast<double>(a.size());
  NaiveMetrics m{};
  auto mean_std = [&](auto term, double& mean, double& sd) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += term(i);
    mean = s / n;
    double v = 0;
    for (std::size_t i = 0; i < a.size(); ++i) v += (term(i) - mean) * (term(i) - mean);
    sd = std::sqrt(v / n);
  };
  mean_std([&](std::size_t i) { return std::fabs(p[i] - a[i]); }, m.abs_mean, m.abs_std);
  mean_std([&](std::size_t i) { return std::fabs(p[i] - a[i]) / std::fabs(a[i]); }, m.rel_mean, m.rel_std);
  mean_std([&](std::size_t i) { return (p[i] - a[i]) * (p[i] - a[i]); }, m.sq_mean, m.sq_std);
  m.rmse = std::sqrt(m.sq_mean);
  int hits = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool up_pred = p[i] - prev[i] >= 0;
    const bool up_act = a[i] - prev[i] >= 0;
    hits += up_pred == up_act;
  }
  m.trend = hits / n;
  double ma = 0, mp = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mp += p[i];
  }
  ma /= n;
  mp /= n;
  double sap = 0, saa = 0, spp = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sap += (a[i] - ma) * (p[i] - mp);
    saa += (a[i] - ma) * (a[i] - ma);
    spp += (p[i] - mp) * (p[i] - mp);
  }
  if (saa > 0 && spp > 0) m.corr = sap / std::sqrt(saa * spp);
  return m;
}

inline Eigen::VectorXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace testsupport
