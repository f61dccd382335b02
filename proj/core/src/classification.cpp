#include <algorithm>
#include <cmath>
#include <numeric>

#include "elaine/errors.hpp"
#include "elaine/eval.hpp"
#include "elaine/random.hpp"

namespace elaine::eval {

namespace {

Eigen::VectorXd stable_sigmoid(const Eigen::VectorXd& t) {
  Eigen::VectorXd out(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double x = t[i];
    if (x >= 0) {
      out[i] = 1.0 / (1.0 + std::exp(-x));
    } else {
      const double e = std::exp(x);
      out[i] = e / (1.0 + e);
    }
  }
  return out;
}

}  // namespace

void LogisticRegression::fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  ELAINE_EXPECTS(x.rows() == y.size() && x.rows() > 0, "logistic regression needs matching x, y");
  const auto n = static_cast<double>(x.rows());
  mean_ = x.colwise().mean().transpose();
  scale_ = ((x.rowwise() - mean_.transpose()).array().square().colwise().sum() / n)
               .sqrt()
               .transpose();
  for (Eigen::Index c = 0; c < scale_.size(); ++c) {
    if (!(scale_[c] > 1e-12)) scale_[c] = 1.0;
  }
  const Eigen::MatrixXd xs =
      ((x.rowwise() - mean_.transpose()).array().rowwise() / scale_.transpose().array()).matrix();

  // Step 1/L with L the Lipschitz constant of the mean log-loss gradient.
  Eigen::MatrixXd augmented(xs.rows(), xs.cols() + 1);
  augmented << xs, Eigen::VectorXd::Ones(xs.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(augmented.transpose() * augmented,
                                                     Eigen::EigenvaluesOnly);
  const double lipschitz = 0.25 * eig.eigenvalues().maxCoeff() / n + options_.l2;
  const double step = 1.0 / lipschitz;

  weights_ = Eigen::VectorXd::Zero(xs.cols());
  intercept_ = 0.0;
  iterations_ = 0;
  while (iterations_ < options_.max_iterations) {
    const Eigen::VectorXd residual =
        stable_sigmoid(((xs * weights_).array() + intercept_).matrix()) - y;
    const Eigen::VectorXd grad_w = xs.transpose() * residual / n + options_.l2 * weights_;
    const double grad_b = residual.mean();
    const double worst = std::max(grad_w.size() ? grad_w.cwiseAbs().maxCoeff() : 0.0,
                                  std::abs(grad_b));
    if (worst < options_.tolerance) break;
    weights_ -= step * grad_w;
    intercept_ -= step * grad_b;
    ++iterations_;
  }
}

Eigen::VectorXd LogisticRegression::predict_proba(const Eigen::MatrixXd& x) const {
  ELAINE_EXPECTS(x.cols() == weights_.size(), "feature width differs from the fitted model");
  const Eigen::MatrixXd xs =
      ((x.rowwise() - mean_.transpose()).array().rowwise() / scale_.transpose().array()).matrix();
  return stable_sigmoid(((xs * weights_).array() + intercept_).matrix());
}

F1Scores node_classification(const Eigen::MatrixXd& y, const NodeLabels& labels,
                             double train_ratio, std::uint64_t seed,
                             const LogisticOptions& options) {
  ELAINE_EXPECTS(static_cast<std::size_t>(y.rows()) == labels.num_nodes(),
                 "embedding rows do not match the labelled node count");
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    throw ValidationError("train ratio must lie in (0, 1)");
  }
  std::vector<NodeId> labelled;
  for (std::size_t u = 0; u < labels.num_nodes(); ++u) {
    if (!labels.labels[u].empty()) labelled.push_back(static_cast<NodeId>(u));
  }
  if (labelled.size() < 2 || labels.num_labels == 0) {
    throw ValidationError("node classification needs at least two labelled nodes");
  }
  const std::size_t n = labelled.size();
  const auto train_count = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(train_ratio * static_cast<double>(n))), 1, n - 1);

  std::vector<NodeId> order;
  bool covered = false;
  for (std::uint64_t attempt = 0; attempt < 10 && !covered; ++attempt) {
    order = labelled;
    Rng rng = make_rng(seed, attempt);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> seen(labels.num_labels, false);
    for (std::size_t i = 0; i < train_count; ++i) {
      for (int l : labels.labels[static_cast<std::size_t>(order[i])]) seen[static_cast<std::size_t>(l)] = true;
    }
    covered = std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  }
  if (!covered) {
    throw ValidationError("could not draw a split with a training example for every label");
  }

  const auto d = y.cols();
  Eigen::MatrixXd x_train(static_cast<Eigen::Index>(train_count), d);
  Eigen::MatrixXd x_test(static_cast<Eigen::Index>(n - train_count), d);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < train_count) x_train.row(static_cast<Eigen::Index>(i)) = y.row(order[i]);
    else x_test.row(static_cast<Eigen::Index>(i - train_count)) = y.row(order[i]);
  }

  Eigen::MatrixXd proba(x_test.rows(), static_cast<Eigen::Index>(labels.num_labels));
  for (std::size_t l = 0; l < labels.num_labels; ++l) {
    Eigen::VectorXd target(x_train.rows());
    for (std::size_t i = 0; i < train_count; ++i) {
      target[static_cast<Eigen::Index>(i)] = labels.has(order[i], static_cast<int>(l)) ? 1.0 : 0.0;
    }
    LogisticRegression clf(options);
    clf.fit(x_train, target);
    proba.col(static_cast<Eigen::Index>(l)) = clf.predict_proba(x_test);
  }

  std::vector<std::vector<int>> predicted(static_cast<std::size_t>(x_test.rows()));
  std::vector<std::vector<int>> truth(predicted.size());
  for (Eigen::Index r = 0; r < x_test.rows(); ++r) {
    auto& p = predicted[static_cast<std::size_t>(r)];
    for (Eigen::Index l = 0; l < proba.cols(); ++l) {
      if (proba(r, l) > 0.5) p.push_back(static_cast<int>(l));
    }
    if (p.empty()) {
      Eigen::Index best = 0;
      proba.row(r).maxCoeff(&best);
      p.push_back(static_cast<int>(best));
    }
    truth[static_cast<std::size_t>(r)] = labels.labels[static_cast<std::size_t>(order[train_count + static_cast<std::size_t>(r)])];
  }
  return f1_scores(predicted, truth, labels.num_labels);
}

std::vector<ClassificationRow> run_node_classification(const Eigen::MatrixXd& y,
                                                       const NodeLabels& labels,
                                                       std::span<const double> train_ratios,
                                                       std::size_t repeats, std::uint64_t seed) {
  if (repeats < 1) throw ValidationError("repeats must be >= 1");
  std::vector<ClassificationRow> rows;
  for (double ratio : train_ratios) {
    std::vector<double> micro, macro;
    for (std::size_t r = 0; r < repeats; ++r) {
      const auto s = node_classification(y, labels, ratio, seed + r);
      micro.push_back(s.micro);
      macro.push_back(s.macro);
    }
    rows.push_back({ratio, MetricSummary::of(std::move(micro)), MetricSummary::of(std::move(macro))});
  }
  return rows;
}

}  // namespace elaine::eval
