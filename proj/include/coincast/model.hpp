#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Core>

namespace coincast {

/// A feature row; accepts rows of column-major matrices without copying.
using RowRef = Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

namespace detail {
// Member names inside AnyModel would hide these free functions from lookup.
template <class T>
double adl_predict(const T& m, RowRef row) { return predict(m, row); }
template <class T>
std::size_t adl_n_features(const T& m) { return n_features(m); }
template <class T>
std::string_view adl_kind(const T& m) { return model_kind(m); }
template <class T>
void adl_save(std::ostream& out, const T& m) { save_model(out, m); }
}  // namespace detail

/// Immutable, cheaply copyable handle to any fitted regression model.
///
/// A model type M plugs in by providing, findable through ADL:
///   double predict(const M&, RowRef);
///   std::size_t n_features(const M&);
///   std::string_view model_kind(const M&);
///   void save_model(std::ostream&, const M&);
class AnyModel {
 public:
  AnyModel() = default;

  template <class M>
  AnyModel(M model) : self_(std::make_shared<Holder<M>>(std::move(model))) {}  // NOLINT(implicit)

  bool empty() const { return self_ == nullptr; }
  double predict(RowRef row) const { return self_->predict(row); }
  Eigen::VectorXd predict_all(const Eigen::MatrixXd& rows) const;
  std::size_t n_features() const { return self_->n_features(); }
  std::string_view kind() const { return self_->kind(); }
  void save(std::ostream& out) const { self_->save(out); }

  template <class M>
  const M* as() const {
    const auto* h = dynamic_cast<const Holder<M>*>(self_.get());
    return h ? &h->model : nullptr;
  }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual double predict(RowRef row) const = 0;
    virtual std::size_t n_features() const = 0;
    virtual std::string_view kind() const = 0;
    virtual void save(std::ostream& out) const = 0;
  };

  template <class M>
  struct Holder final : Concept {
    explicit Holder(M m) : model(std::move(m)) {}
    double predict(RowRef row) const override { return detail::adl_predict(model, row); }
    std::size_t n_features() const override { return detail::adl_n_features(model); }
    std::string_view kind() const override { return detail::adl_kind(model); }
    void save(std::ostream& out) const override { detail::adl_save(out, model); }
    M model;
  };

  std::shared_ptr<const Concept> self_;
};

inline double predict(const AnyModel& m, RowRef row) { return m.predict(row); }
inline std::size_t n_features(const AnyModel& m) { return m.n_features(); }
inline std::string_view model_kind(const AnyModel& m) { return m.kind(); }
void save_model(std::ostream& out, const AnyModel& m);

/// Predicts every row of a matrix.
template <class M>
Eigen::VectorXd predict_rows(const M& model, const Eigen::MatrixXd& rows) {
  Eigen::VectorXd out(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out[i] = predict(model, rows.row(i));
  return out;
}

inline Eigen::VectorXd AnyModel::predict_all(const Eigen::MatrixXd& rows) const { return predict_rows(*this, rows); }

/// Fits a model on (features, targets) with a deterministic seed.
using Trainer = std::function<AnyModel(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                                       std::uint64_t seed)>;

/// Reads any model written by save_model. Throws ParseError on malformed input.
AnyModel load_model(std::istream& in);
AnyModel load_model_file(const std::string& path);
void save_model_file(const std::string& path, const AnyModel& m);

}  // namespace coincast
