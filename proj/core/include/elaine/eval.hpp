#pragma once

// Link-prediction and node-classification protocols and their metrics.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "elaine/graph.hpp"
#include "elaine/model.hpp"

namespace elaine::eval {

// ---------------------------------------------------------------------------
// Splits

struct LinkPredSplit {
  Graph train_graph;                // same node set, held-out edges removed
  std::vector<EdgeKey> held_out;    // sorted
  std::vector<NodeId> eval_nodes;   // sorted
  std::uint64_t seed = 0;

  /// Hash of (train edges, held-out edges, eval nodes).
  std::uint64_t hash() const;
};

/// Holds out round(m * holdout_frac) edges uniformly at random and samples
/// min(n, max_eval_nodes) evaluation nodes without replacement.
LinkPredSplit make_split(const Graph& g, double holdout_frac, std::size_t max_eval_nodes,
                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// Ranking metrics

using PairSet = std::unordered_set<std::uint64_t>;  // EdgeKey::packed()

PairSet make_pair_set(std::span<const EdgeKey> pairs);

struct ScoredPair {
  EdgeKey pair;
  double score = 0.0;
};

/// Descending score; ties broken by ascending (u, v).
std::vector<EdgeKey> rank_pairs(std::vector<ScoredPair> scored);

/// |top-k & truth| / k. ContractViolation when k == 0 or k > ranked.size().
double precision_at_k(std::span<const EdgeKey> ranked, const PairSet& truth, std::size_t k);

/// Average precision of one ranked hit list; 0 when there are no hits.
double average_precision(const std::vector<bool>& hits);

/// ranked[i] and truth[i] describe node i's candidate partners in rank
/// order and its true partners (sorted). Nodes without true partners are
/// left out of the mean; if none remain, ValidationError.
double mean_average_precision(std::span<const std::vector<NodeId>> ranked,
                              std::span<const std::vector<NodeId>> truth);

// ---------------------------------------------------------------------------
// Multi-label classification

struct F1Scores {
  double micro = 0.0;
  double macro = 0.0;
};

/// Per-node predicted and true label sets over labels 0..num_labels-1.
/// A label with no positives predicted or present scores F1 = 0.
F1Scores f1_scores(std::span<const std::vector<int>> predicted,
                   std::span<const std::vector<int>> truth, std::size_t num_labels);

struct LogisticOptions {
  double l2 = 1e-4;
  double tolerance = 1e-6;
  std::size_t max_iterations = 2000;
};

/// Binary L2-regularized logistic regression fitted by full-batch gradient
/// descent on standardized inputs.
class LogisticRegression {
 public:
  explicit LogisticRegression(LogisticOptions options = {}) : options_(options) {}

  /// y entries are 0 or 1.
  void fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
  Eigen::VectorXd predict_proba(const Eigen::MatrixXd& x) const;
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  LogisticOptions options_;
  Eigen::VectorXd mean_;
  Eigen::VectorXd scale_;
  Eigen::VectorXd weights_;
  double intercept_ = 0.0;
  std::size_t iterations_ = 0;
};

/// One-vs-rest classification on embedding rows. Only labelled nodes take
/// part. A test node receives every label with probability > 0.5, or its
/// most probable label if none passes. Re-draws the split (up to 10 seeds)
/// until every label has a training example.
F1Scores node_classification(const Eigen::MatrixXd& y, const NodeLabels& labels,
                             double train_ratio, std::uint64_t seed,
                             const LogisticOptions& options = {});

// ---------------------------------------------------------------------------
// Protocols

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for one value
  std::vector<double> values;

  static MetricSummary of(std::vector<double> values);
};

struct EvalReport {
  std::vector<std::pair<std::size_t, MetricSummary>> precision_at_k;
  MetricSummary map;
  std::optional<MetricSummary> micro_f1;
  std::optional<MetricSummary> macro_f1;
  std::size_t repeats = 0;
  std::vector<std::string> failures;
  std::vector<std::uint64_t> split_hashes;
};

inline const std::vector<std::size_t> kDefaultPrecisionKs = {2, 10, 100, 200, 300, 500, 800, 1000};

struct LinkPredOptions {
  double holdout_frac = 0.2;
  std::size_t max_eval_nodes = 1024;
  std::size_t repeats = 5;
  std::uint64_t seed = 0;  // split i uses seed + i
  std::size_t jobs = 1;
  std::vector<std::size_t> ks = kDefaultPrecisionKs;
};

/// n x n pair scores for one split; only candidate pairs are read.
using PairScorer = std::function<Eigen::MatrixXd(const LinkPredSplit& split,
                                                 const EdgeAttributes& train_attrs,
                                                 std::size_t repeat)>;

/// Trains on the split's training graph with seeds offset by the repeat.
PairScorer elaine_scorer(const ElaineConfig& cfg);
/// Independent uniform scores.
PairScorer random_scorer(std::uint64_t seed);
/// 1 for held-out pairs, 0 otherwise.
PairScorer oracle_scorer();

struct SplitResult {
  double map = 0.0;
  std::vector<std::pair<std::size_t, double>> precision_at_k;
};

/// Ranks all unordered eval-node pairs that are not training edges.
SplitResult evaluate_split(const LinkPredSplit& split, const Eigen::MatrixXd& scores,
                           std::span<const std::size_t> ks);

EvalReport run_link_prediction(const Graph& g, const EdgeAttributes& attrs,
                               const PairScorer& scorer, const LinkPredOptions& options);
EvalReport run_link_prediction(const Graph& g, const EdgeAttributes& attrs,
                               const ElaineConfig& cfg, const LinkPredOptions& options);

struct Variant {
  std::string name;
  ElaineConfig config;
};

/// AE, VAE, VAE+HO, VAE+HO-R, NA-ELAINE, ELAINE derived from `base`.
std::vector<Variant> ablation_variants(const ElaineConfig& base);

struct TableRow {
  std::string label;
  EvalReport report;
};

/// Every variant sees the same splits and seeds per repeat.
std::vector<TableRow> run_ablation(const Graph& g, const EdgeAttributes& attrs,
                                   const ElaineConfig& base, const LinkPredOptions& options);

enum class SweepParam { kDim, kAlpha1 };
SweepParam parse_sweep_param(std::string_view text);
std::string_view to_string(SweepParam param);
ElaineConfig with_param(const ElaineConfig& base, SweepParam param, double value);

std::vector<TableRow> run_sweep(const Graph& g, const EdgeAttributes& attrs,
                                const ElaineConfig& base, SweepParam param,
                                std::span<const double> values, const LinkPredOptions& options);

struct ClassificationRow {
  double train_ratio = 0.0;
  MetricSummary micro_f1;
  MetricSummary macro_f1;
};

/// `repeats` splits per ratio; split r of every ratio uses seed + r.
std::vector<ClassificationRow> run_node_classification(const Eigen::MatrixXd& y,
                                                       const NodeLabels& labels,
                                                       std::span<const double> train_ratios,
                                                       std::size_t repeats, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Reports

/// Long format: <label_name>,metric,k,mean,stddev,repeats.
void write_report_csv(std::ostream& out, std::string_view label_name,
                      std::span<const TableRow> rows);
/// One row per entry: <label_name>,map_mean,map_stddev,repeats.
void write_map_csv(std::ostream& out, std::string_view label_name, std::span<const TableRow> rows);
void write_classification_csv(std::ostream& out, std::span<const ClassificationRow> rows);
void print_table(std::ostream& out, std::string_view label_name, std::span<const TableRow> rows);

}  // namespace elaine::eval
