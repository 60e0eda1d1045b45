#include "coincast/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "coincast/errors.hpp"
#include "coincast/numeric_text.hpp"

namespace coincast {

namespace {

/// Runs one stage and prefixes any failure with its name, keeping the error class.
template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.error_class(), std::string("stage '") + name + "': " + e.what());
  }
}

std::vector<PredictionRow> make_rows(const std::vector<Day>& dates, const Eigen::VectorXd& actuals,
                                     const Eigen::VectorXd& predictions, const Eigen::VectorXd& prev) {
  std::vector<PredictionRow> rows;
  rows.reserve(dates.size());
  for (std::size_t i = 0; i < dates.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    rows.push_back({dates[i], actuals[r], predictions[r], prev[r]});
  }
  return rows;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw ArgumentError("failed writing '" + path.string() + "'");
}

std::string model_file_text(const AnyModel& m) {
  std::ostringstream o;
  save_model(o, m);
  return o.str();
}

}  // namespace

WindowedExampleSet build_examples(const RunSpec& spec, const PriceSeries& series) {
  if (spec.examples.mode == ExampleMode::Lagged) return window(series, spec.attributes, spec.examples.window, spec.label);
  WindowedExampleSet set = make_same_day_examples(series, spec.attributes, spec.label);
  if (spec.examples.previous_label) set = with_previous_label(set, std::string(attribute_name(spec.label)));
  return set;
}

Trainer make_trainer(const RunSpec& spec, const std::vector<std::string>& feature_names, unsigned threads) {
  const GbtParams gbt = spec.gbt;
  const MlpParams nn = spec.neural_net;
  const Trainer gbt_trainer = [gbt](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::uint64_t seed) {
    GbtParams p = gbt;
    p.seed = seed;
    return AnyModel(fit_gbt(x, y, p));
  };
  const Trainer nn_trainer = [nn](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::uint64_t seed) {
    MlpParams p = nn;
    p.seed = seed;
    return AnyModel(fit_mlp(x, y, p));
  };
  const Trainer linear_trainer = [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::uint64_t) {
    return AnyModel(fit_linear(x, y));
  };

  switch (spec.model) {
    case ModelKind::Gbt: return gbt_trainer;
    case ModelKind::NeuralNet: return nn_trainer;
    case ModelKind::Knn: throw ArgumentError("knn is a forecaster, not a feature-based trainer");
    case ModelKind::Ensemble: break;
  }

  std::vector<NamedTrainer> members;
  for (const auto& name : spec.members) {
    if (name == "gbt") {
      members.push_back({name, gbt_trainer});
    } else if (name == "neural_net") {
      members.push_back({name, nn_trainer});
    } else if (name == "linear") {
      members.push_back({name, linear_trainer});
    } else if (name == "relative") {
      const auto it = std::find(feature_names.begin(), feature_names.end(), spec.relative.base_feature);
      if (it == feature_names.end())
        throw ArgumentError("relative regression base feature '" + spec.relative.base_feature +
                            "' is not among the example features");
      const auto index = static_cast<std::size_t>(it - feature_names.begin());
      const RelativeSpec rel = spec.relative;
      members.push_back({name, [rel, index, linear_trainer](const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                                             std::uint64_t seed) {
                           return AnyModel(fit_relative(x, y, index, rel.base_feature, rel.transform, linear_trainer, seed));
                         }});
    } else {
      throw ArgumentError("unknown ensemble member '" + name + "'");
    }
  }
  return [members, threads](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::uint64_t seed) {
    return AnyModel(fit_vote(members, x, y, seed, threads));
  };
}

RunReport run(const RunSpec& spec, const RunOptions& options) {
  RunReport report;
  report.spec = spec;
  report.spec_echo = to_text(spec);

  const PriceSeries series =
      stage("ingest", [&] { return load_csv(spec.data_path.string(), spec.columns, spec.symbol); });

  if (spec.model == ModelKind::Knn) {
    const auto& d = std::get<DateRangeSplit>(spec.split);
    const PriceSeries train = stage("slice", [&] { return slice_by_date(series, d.train_start, d.train_end); });
    const PriceSeries test = stage("slice", [&] { return slice_by_date(series, d.test_start, d.test_end); });
    const KnnRunResult result = stage("forecast", [&] {
      return knn_run(train, test.dates(), test.column(Attribute::Close), spec.knn.k, spec.knn.weighting);
    });
    Eigen::VectorXd prev(static_cast<Eigen::Index>(test.size()));
    for (std::size_t i = 0; i < test.size(); ++i) prev[static_cast<Eigen::Index>(i)] = i == 0 ? train.back().close : test[i - 1].close;
    report.predictions = make_rows(test.dates(), test.column(Attribute::Close), result.forecasts, prev);
    report.metrics = result.performance;
    report.residuals = result.residuals;
  } else if (spec.sliding) {
    const auto& d = std::get<DateRangeSplit>(spec.split);
    const WindowedExampleSet examples = stage("examples", [&] {
      const PriceSeries range = slice_by_date(series, d.train_start, d.test_end);
      return select_by_label_date(build_examples(spec, range), d.train_start, d.test_end);
    });
    const Trainer trainer = stage("fit", [&] { return make_trainer(spec, examples.feature_names, options.threads); });
    ValidationReport v =
        stage("validate", [&] { return sliding_validate(examples, trainer, *spec.sliding, spec.seed, options.threads); });
    report.predictions =
        make_rows(v.pooled_dates(), v.pooled_actuals(), v.pooled_predictions(), v.pooled_prev_actuals());
    report.metrics = v.micro;
    report.validation = std::move(v);
  } else {
    WindowedExampleSet train, test;
    stage("examples", [&] {
      if (const auto* d = std::get_if<DateRangeSplit>(&spec.split)) {
        const PriceSeries range = slice_by_date(series, d->train_start, d->test_end);
        const WindowedExampleSet all = build_examples(spec, range);
        train = select_by_label_date(all, d->train_start, d->train_end);
        test = select_by_label_date(all, d->test_start, d->test_end);
      } else {
        const auto& l = std::get<LinearSplit>(spec.split);
        const WindowedExampleSet all = build_examples(spec, slice_by_date(series, l.start, l.end));
        std::tie(train, test) = split_linear(all, l.ratio);
      }
      return 0;
    });
    const Trainer trainer = stage("fit", [&] { return make_trainer(spec, train.feature_names, options.threads); });
    report.model = stage("fit", [&] { return trainer(train.features, train.labels, spec.seed); });
    const Eigen::VectorXd predictions = stage("predict", [&] { return report.model.predict_all(test.features); });
    report.predictions = make_rows(test.label_dates, test.labels, predictions, test.prev_actuals);
    report.metrics = stage("metrics", [&] { return performance_vector(test.labels, predictions, test.prev_actuals); });
  }

  if (!options.write_outputs) return report;

  std::vector<std::pair<std::string, std::string>> files;
  {
    std::ostringstream o;
    write_predictions_csv(o, report.predictions);
    files.emplace_back("predictions.csv", o.str());
  }
  files.emplace_back("metrics.txt", metrics_text(report));
  files.emplace_back("metrics.json", metrics_json(report));
  files.emplace_back("spec_echo.txt", report.spec_echo);
  if (report.validation) {
    std::ostringstream o;
    write_folds_csv(o, *report.validation);
    files.emplace_back("folds.csv", o.str());
  }
  if (report.residuals) {
    std::ostringstream o;
    o << "date,forecast,actual,residual\n";
    const auto& r = *report.residuals;
    for (std::size_t i = 0; i < r.dates.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      o << r.dates[i].iso() << ',' << format_double(report.predictions[i].prediction) << ','
        << format_double(report.predictions[i].actual) << ',' << format_double(r.residuals[k]) << '\n';
    }
    files.emplace_back("residuals.csv", o.str());
  }
  if (!report.model.empty()) files.emplace_back("model.txt", model_file_text(report.model));

  std::vector<std::filesystem::path> written;
  try {
    std::filesystem::create_directories(spec.output_dir);
    for (const auto& [name, content] : files) {
      const auto path = spec.output_dir / name;
      write_text_file(path, content);
      written.push_back(path);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) std::filesystem::remove(p, ec);
    try {
      throw;
    } catch (const std::filesystem::filesystem_error& e) {
      throw ArgumentError(std::string("stage 'write': ") + e.what());
    } catch (const Error& e) {
      throw Error(e.error_class(), std::string("stage 'write': ") + e.what());
    }
  }
  report.artifacts = std::move(written);
  return report;
}

void write_predictions_csv(std::ostream& out, const std::vector<PredictionRow>& rows) {
  out << "date,actual,prediction,previous_actual\n";
  for (const auto& r : rows)
    out << r.date.iso() << ',' << format_double(r.actual) << ',' << format_double(r.prediction) << ','
        << format_double(r.previous_actual) << '\n';
}

std::vector<PredictionRow> read_predictions_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "date,actual,prediction,previous_actual")
    throw ParseError("predictions file: unexpected header");
  std::vector<PredictionRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest = trim(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1))
      f.push_back(rest.substr(0, pos));
    f.push_back(rest);
    if (f.size() != 4) throw ParseError("predictions file line " + std::to_string(line_no) + ": expected 4 fields");
    PredictionRow r;
    const auto a = parse_double(f[1]), p = parse_double(f[2]), prev = parse_double(f[3]);
    if (!Day::try_parse(f[0], r.date) || !a || !p || !prev)
      throw ParseError("predictions file line " + std::to_string(line_no) + ": malformed row");
    r.actual = *a;
    r.prediction = *p;
    r.previous_actual = *prev;
    rows.push_back(r);
  }
  return rows;
}

PerformanceVector metrics_from_predictions(const std::vector<PredictionRow>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::VectorXd a(n), p(n), prev(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    a[i] = r.actual;
    p[i] = r.prediction;
    prev[i] = r.previous_actual;
  }
  return performance_vector(a, p, prev);
}

namespace {

nlohmann::json metrics_object(const PerformanceVector& pv) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, value] : metric_entries(pv)) j[key] = value ? nlohmann::json(*value) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

std::string metrics_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["symbol"] = report.spec.symbol;
  j["model"] = std::string(model_kind_name(report.spec.model));
  j["protocol"] = report.validation ? "sliding" : "holdout";
  j["n_predictions"] = report.predictions.size();
  j["metrics"] = metrics_object(report.metrics);
  if (report.validation) {
    nlohmann::json macro = nlohmann::json::object();
    for (const auto& [key, v] : report.validation->macro)
      macro[key] = v ? nlohmann::json{{"mean", v->mean}, {"std", v->std}} : nlohmann::json(nullptr);
    j["macro"] = macro;
    j["n_folds"] = report.validation->folds.size();
  }
  if (report.residuals) j["residual_mean"] = report.residuals->mean;
  return j.dump(2) + "\n";
}

std::string metrics_text(const RunReport& report) {
  std::string s = report.spec.symbol + " / " + std::string(model_kind_name(report.spec.model)) + "\n";
  if (report.validation) {
    s += "Sliding window validation, " + std::to_string(report.validation->folds.size()) + " folds\n";
    s += render_text(report.validation->macro, report.validation->micro);
  } else {
    s += render_text(report.metrics);
  }
  if (report.residuals) s += "Residuals (average): " + format_double(report.residuals->mean) + "\n";
  return s;
}

ConsistencyCheck check_self_consistency(const std::filesystem::path& output_dir, double tolerance) {
  ConsistencyCheck check;
  std::ifstream pred_in(output_dir / "predictions.csv");
  std::ifstream metrics_in(output_dir / "metrics.json");
  if (!pred_in || !metrics_in) {
    check.detail = "missing predictions.csv or metrics.json in " + output_dir.string();
    return check;
  }
  const PerformanceVector recomputed = metrics_from_predictions(read_predictions_csv(pred_in));
  const auto stored = nlohmann::json::parse(metrics_in).at("metrics");
  check.ok = true;
  for (const auto& [key, value] : metric_entries(recomputed)) {
    const auto& s = stored.at(key);
    if (s.is_null() != !value.has_value()) {
      check.ok = false;
      check.detail += key + ": defined in one source only; ";
      continue;
    }
    if (!value) continue;
    const double diff = std::abs(s.get<double>() - *value);
    check.max_abs_diff = std::max(check.max_abs_diff, diff);
    if (diff > tolerance * std::max(1.0, std::abs(*value))) {
      check.ok = false;
      check.detail += key + " differs by " + format_double(diff) + "; ";
    }
  }
  return check;
}

std::vector<ReferenceValue> load_reference_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open reference file '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  if (trim(line) != "symbol,model,metric,value") throw ParseError("reference file: expected header symbol,model,metric,value");
  std::vector<ReferenceValue> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> f;
    std::string_view rest = t;
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1))
      f.emplace_back(trim(rest.substr(0, pos)));
    f.emplace_back(trim(rest));
    const auto v = f.size() == 4 ? parse_double(f[3]) : std::nullopt;
    if (!v) throw ParseError("reference file line " + std::to_string(line_no) + ": malformed row");
    out.push_back({f[0], f[1], f[2], *v});
  }
  return out;
}

Comparison compare(const std::vector<RunReport>& reports, const std::vector<ReferenceValue>& references) {
  if (reports.size() < 2) throw ArgumentError("compare needs at least two runs");
  const std::string& symbol = reports.front().spec.symbol;
  for (const auto& r : reports)
    if (r.spec.symbol != symbol)
      throw ArgumentError("compare: symbol mismatch ('" + symbol + "' vs '" + r.spec.symbol + "')");

  std::vector<std::string> columns;
  std::map<std::string, int> seen;
  for (const auto& r : reports) {
    std::string name(model_kind_name(r.spec.model));
    if (++seen[name] > 1) name += "#" + std::to_string(seen[name]);
    columns.push_back(name);
  }

  std::vector<std::string> keys;
  for (const auto& [k, v] : metric_entries(reports.front().metrics)) keys.push_back(k);
  keys.push_back("residual_mean");

  std::vector<std::string> ref_models;
  for (const auto& ref : references)
    if (ref.symbol == symbol && std::find(ref_models.begin(), ref_models.end(), ref.model) == ref_models.end())
      ref_models.push_back(ref.model);

  const auto value_of = [](const RunReport& r, const std::string& key) -> std::optional<double> {
    if (key == "residual_mean") return r.residuals ? std::optional<double>(r.residuals->mean) : std::nullopt;
    for (const auto& [k, v] : metric_entries(r.metrics))
      if (k == key) return v;
    return std::nullopt;
  };
  const auto ref_of = [&](const std::string& model, const std::string& key) -> std::optional<double> {
    for (const auto& ref : references)
      if (ref.symbol == symbol && ref.model == model && ref.metric == key) return ref.value;
    return std::nullopt;
  };

  Comparison out;
  std::ostringstream csv, txt;
  csv << "metric";
  for (const auto& c : columns) csv << ',' << c;
  for (const auto& m : ref_models) csv << ",paper-reported " << m;
  csv << '\n';

  txt << "Symbol: " << symbol << '\n' << std::left << std::setw(22) << "metric";
  for (const auto& c : columns) txt << std::setw(18) << c;
  for (const auto& m : ref_models) txt << std::setw(18) << ("paper-reported " + m);
  txt << '\n';

  for (const auto& key : keys) {
    csv << key;
    txt << std::setw(22) << key;
    const auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    const auto shown = [](const std::optional<double>& v) {
      if (!v) return std::string("-");
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6g", *v);
      return std::string(buf);
    };
    for (const auto& r : reports) {
      const auto v = value_of(r, key);
      csv << ',' << cell(v);
      txt << std::setw(18) << shown(v);
    }
    for (const auto& m : ref_models) {
      const auto v = ref_of(m, key);
      csv << ',' << cell(v);
      txt << std::setw(18) << shown(v);
    }
    csv << '\n';
    txt << '\n';
  }

  std::ostringstream plot;
  plot << "date,actual,model,prediction\n";
  for (std::size_t i = 0; i < reports.size(); ++i)
    for (const auto& row : reports[i].predictions)
      plot << row.date.iso() << ',' << format_double(row.actual) << ',' << columns[i] << ','
           << format_double(row.prediction) << '\n';

  out.text = txt.str();
  out.table_csv = csv.str();
  out.plot_csv = plot.str();
  return out;
}

std::vector<GridAxis> parse_grid(std::string_view text) {
  std::vector<GridAxis> axes;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw SpecError("grid line " + std::to_string(line_no) + ": expected 'key = v1; v2'");
    GridAxis axis;
    const std::string_view full = trim(line.substr(0, eq));
    const auto dot = full.find('.');
    axis.section = dot == std::string_view::npos ? "" : std::string(full.substr(0, dot));
    axis.key = std::string(dot == std::string_view::npos ? full : full.substr(dot + 1));
    std::string_view values = line.substr(eq + 1);
    while (true) {
      const auto semi = values.find(';');
      const auto v = trim(values.substr(0, semi));
      if (!v.empty()) axis.values.emplace_back(v);
      if (semi == std::string_view::npos) break;
      values.remove_prefix(semi + 1);
    }
    if (axis.values.empty()) throw SpecError("grid line " + std::to_string(line_no) + ": no values");
    axes.push_back(std::move(axis));
  }
  if (axes.empty()) throw SpecError("grid is empty");
  return axes;
}

std::string sweep(const std::filesystem::path& spec_path, const std::vector<GridAxis>& grid, const RunOptions& options) {
  std::ifstream in(spec_path);
  if (!in) throw SpecError("cannot open spec file '" + spec_path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const SpecDocument base = parse_spec_document(buf.str());
  auto dir = spec_path.parent_path();
  if (dir.empty()) dir = ".";
  dir = std::filesystem::absolute(dir);
  const RunSpec base_spec = resolve_spec(base, dir);

  std::ostringstream csv;
  for (const auto& axis : grid) csv << (axis.section.empty() ? axis.key : axis.section + "." + axis.key) << ',';
  for (const auto& [k, v] : metric_entries(PerformanceVector{})) csv << k << ',';
  csv << "output_dir\n";

  std::vector<std::size_t> choice(grid.size(), 0);
  for (std::size_t combo = 0;; ++combo) {
    SpecDocument doc = base;
    for (std::size_t a = 0; a < grid.size(); ++a) doc[grid[a].section][grid[a].key] = SpecEntry{grid[a].values[choice[a]], 0};
    char name[32];
    std::snprintf(name, sizeof name, "sweep_%03zu", combo);
    doc[""]["output_dir"] = SpecEntry{(base_spec.output_dir / name).string(), 0};
    const RunSpec spec = resolve_spec(doc, dir);
    const RunReport report = run(spec, options);

    for (std::size_t a = 0; a < grid.size(); ++a) csv << grid[a].values[choice[a]] << ',';
    for (const auto& [k, v] : metric_entries(report.metrics)) csv << (v ? format_double(*v) : "") << ',';
    csv << spec.output_dir.string() << '\n';

    std::size_t a = 0;
    for (; a < grid.size(); ++a) {
      if (++choice[a] < grid[a].values.size()) break;
      choice[a] = 0;
    }
    if (a == grid.size()) break;
  }
  return csv.str();
}

}  // namespace coincast
