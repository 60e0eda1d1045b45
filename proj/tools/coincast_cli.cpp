// coincast command line: ingest, run, compare, dump-model, sweep.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "coincast/boosted_trees.hpp"
#include "coincast/errors.hpp"
#include "coincast/market_data.hpp"
#include "coincast/model.hpp"
#include "coincast/numeric_text.hpp"
#include "coincast/pipeline.hpp"

namespace {

using namespace coincast;

int exit_code(ErrorClass c) { return static_cast<int>(c); }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) throw ArgumentError("cannot write '" + path.string() + "'");
}

int cmd_ingest(const std::string& path, const CsvSchema& schema) {
  const PriceSeries s = load_csv(path, schema, std::filesystem::path(path).stem().string());
  std::cout << "file: " << path << "\n"
            << "records: " << s.size() << "\n"
            << "range: " << s.front().date.iso() << " .. " << s.back().date.iso() << "\n";
  for (Attribute a : kAllAttributes) {
    if (!s.has_attribute(a)) {
      std::cout << attribute_name(a) << ": missing in some rows\n";
      continue;
    }
    const Eigen::VectorXd c = s.column(a);
    std::cout << attribute_name(a) << ": min " << format_double(c.minCoeff()) << ", max " << format_double(c.maxCoeff())
              << ", mean " << format_double(c.mean()) << "\n";
  }
  for (const auto& g : s.gaps())
    std::cerr << "warning: " << g.missing_days() << " missing day(s) between " << g.last_before.iso() << " and "
              << g.first_after.iso() << "\n";
  return 0;
}

int cmd_run(const std::string& spec_path, unsigned jobs) {
  RunOptions opt;
  opt.threads = jobs;
  const RunReport r = run(load_spec(spec_path), opt);
  std::cout << metrics_text(r);
  for (const auto& a : r.artifacts) std::cout << "wrote " << a.string() << "\n";
  const ConsistencyCheck check = check_self_consistency(r.spec.output_dir);
  if (!check.ok) throw InvariantError("emitted metrics do not match predictions: " + check.detail);
  return 0;
}

int cmd_compare(const std::vector<std::string>& specs, const std::string& refs, const std::string& out_dir,
                unsigned jobs) {
  RunOptions opt;
  opt.threads = jobs;
  std::vector<RunSpec> resolved;
  for (const auto& p : specs) resolved.push_back(load_spec(p));
  std::vector<ReferenceValue> references;
  if (!refs.empty()) references = load_reference_values(refs);
  std::vector<RunReport> reports;
  if (!resolved.empty())
    for (const auto& s : resolved)
      if (s.symbol != resolved.front().symbol)
        throw ArgumentError("compare: symbol mismatch ('" + resolved.front().symbol + "' vs '" + s.symbol + "')");
  for (const auto& s : resolved) reports.push_back(run(s, opt));
  const Comparison c = compare(reports, references);
  std::cout << c.text;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_file(std::filesystem::path(out_dir) / "comparison.csv", c.table_csv);
    write_file(std::filesystem::path(out_dir) / "plot_data.csv", c.plot_csv);
  }
  return 0;
}

int cmd_dump_model(const std::string& path, std::optional<std::size_t> tree) {
  const AnyModel m = load_model_file(path);
  if (tree) {
    const auto* gbt = m.as<GbtModel>();
    if (!gbt) throw ArgumentError("--tree needs a gbt model, got '" + std::string(m.kind()) + "'");
    std::cout << dump_model(*gbt, *tree);
    return 0;
  }
  save_model(std::cout, m);
  return 0;
}

int cmd_sweep(const std::string& spec, const std::string& grid_path, unsigned jobs) {
  std::ifstream in(grid_path);
  if (!in) throw ArgumentError("cannot open grid file '" + grid_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  RunOptions opt;
  opt.threads = jobs;
  std::cout << sweep(spec, parse_grid(buf.str()), opt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coincast: cryptocurrency price prediction and forecasting runs"};
  app.require_subcommand(1);

  std::string csv_path;
  CsvSchema schema;
  auto* ingest = app.add_subcommand("ingest", "validate and summarize an OHLCV CSV");
  ingest->add_option("csv", csv_path, "CSV file")->required();
  for (Attribute a : kAllAttributes)
    ingest->add_option("--" + std::string(attribute_name(a)) + "-column", schema.column_for(a),
                       "header of the " + std::string(attribute_name(a)) + " column");
  ingest->add_option("--date-column", schema.date, "header of the date column");

  std::string spec_path;
  unsigned jobs = 1;
  auto* run_cmd = app.add_subcommand("run", "execute one run spec");
  run_cmd->add_option("spec", spec_path, "spec file")->required();
  run_cmd->add_option("-j,--jobs", jobs, "worker threads (results do not depend on this)")->check(CLI::PositiveNumber);

  std::vector<std::string> specs;
  std::string refs, out_dir;
  auto* cmp = app.add_subcommand("compare", "run several specs of one symbol side by side");
  cmp->add_option("specs", specs, "spec files")->required()->expected(2, -1);
  cmp->add_option("--paper-refs", refs, "CSV of reference values (symbol,model,metric,value)");
  cmp->add_option("--out", out_dir, "directory for comparison.csv and plot_data.csv");
  cmp->add_option("-j,--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  std::string model_path;
  std::optional<std::size_t> tree;
  auto* dump = app.add_subcommand("dump-model", "print a saved model, or one tree of a gbt model");
  dump->add_option("model", model_path, "model file")->required();
  dump->add_option("--tree", tree, "tree index (gbt)");

  std::string grid_path;
  auto* sw = app.add_subcommand("sweep", "run a hyperparameter grid over a base spec");
  sw->add_option("spec", spec_path, "base spec file")->required();
  sw->add_option("--grid", grid_path, "grid file: section.key = v1; v2")->required();
  sw->add_option("-j,--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*ingest) return cmd_ingest(csv_path, schema);
    if (*run_cmd) return cmd_run(spec_path, jobs);
    if (*cmp) return cmd_compare(specs, refs, out_dir, jobs);
    if (*dump) return cmd_dump_model(model_path, tree);
    if (*sw) return cmd_sweep(spec_path, grid_path, jobs);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.error_class());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
