#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "coincast/boosted_trees.hpp"
#include "coincast/ensemble_learners.hpp"
#include "coincast/errors.hpp"
#include "coincast/model.hpp"
#include "coincast/neural_net.hpp"
#include "text_io.hpp"

namespace coincast {

void save_model(std::ostream& out, const AnyModel& m) {
  if (m.empty()) throw ArgumentError("cannot save an empty model");
  m.save(out);
}

AnyModel load_model(std::istream& in) {
  const auto start = in.tellg();
  std::istringstream head(textio::next_line(in, "model"));
  in.seekg(start);
  std::string kind;
  head >> kind;
  if (kind == "gbt") return load_gbt(in);
  if (kind == "neural_net") return load_mlp(in);
  if (kind == "linear") return load_linear(in);
  if (kind == "relative") return load_relative(in);
  if (kind == "vote") return load_vote(in);
  throw ParseError("unknown model kind '" + kind + "'");
}

AnyModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  return load_model(in);
}

void save_model_file(const std::string& path, const AnyModel& m) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write model file '" + path + "'");
  save_model(out, m);
}

}  // namespace coincast
