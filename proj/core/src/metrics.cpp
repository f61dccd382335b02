#include <algorithm>
#include <cmath>
#include <numeric>

#include "elaine/errors.hpp"
#include "elaine/eval.hpp"

namespace elaine::eval {

PairSet make_pair_set(std::span<const EdgeKey> pairs) {
  PairSet set;
  set.reserve(pairs.size());
  for (const auto& p : pairs) set.insert(EdgeKey::of(p.u, p.v).packed());
  return set;
}

std::vector<EdgeKey> rank_pairs(std::vector<ScoredPair> scored) {
  std::sort(scored.begin(), scored.end(), [](const ScoredPair& a, const ScoredPair& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.pair < b.pair;
  });
  std::vector<EdgeKey> ranked;
  ranked.reserve(scored.size());
  for (const auto& s : scored) ranked.push_back(s.pair);
  return ranked;
}

double precision_at_k(std::span<const EdgeKey> ranked, const PairSet& truth, std::size_t k) {
  ELAINE_EXPECTS(k > 0, "precision@k needs k >= 1");
  ELAINE_EXPECTS(k <= ranked.size(), "k exceeds the number of candidates");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (truth.contains(EdgeKey::of(ranked[i].u, ranked[i].v).packed())) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

double average_precision(const std::vector<bool>& hits) {
  double sum = 0.0;
  std::size_t found = 0;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (!hits[i]) continue;
    ++found;
    sum += static_cast<double>(found) / static_cast<double>(i + 1);
  }
  return found == 0 ? 0.0 : sum / static_cast<double>(found);
}

double mean_average_precision(std::span<const std::vector<NodeId>> ranked,
                              std::span<const std::vector<NodeId>> truth) {
  ELAINE_EXPECTS(ranked.size() == truth.size(), "ranked and truth lists differ in length");
  double sum = 0.0;
  std::size_t contributing = 0;
  std::vector<bool> hits;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (truth[i].empty()) continue;
    hits.assign(ranked[i].size(), false);
    for (std::size_t r = 0; r < ranked[i].size(); ++r) {
      hits[r] = std::binary_search(truth[i].begin(), truth[i].end(), ranked[i][r]);
    }
    sum += average_precision(hits);
    ++contributing;
  }
  if (contributing == 0) {
    throw ValidationError("MAP undefined: no evaluation node has a held-out edge");
  }
  return sum / static_cast<double>(contributing);
}

F1Scores f1_scores(std::span<const std::vector<int>> predicted,
                   std::span<const std::vector<int>> truth, std::size_t num_labels) {
  ELAINE_EXPECTS(predicted.size() == truth.size(), "prediction and truth counts differ");
  std::vector<std::size_t> tp(num_labels, 0), fp(num_labels, 0), fn(num_labels, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& p = predicted[i];
    const auto& t = truth[i];
    for (int l : p) {
      ELAINE_EXPECTS(l >= 0 && static_cast<std::size_t>(l) < num_labels, "label out of range");
      if (std::find(t.begin(), t.end(), l) != t.end()) ++tp[l];
      else ++fp[l];
    }
    for (int l : t) {
      ELAINE_EXPECTS(l >= 0 && static_cast<std::size_t>(l) < num_labels, "label out of range");
      if (std::find(p.begin(), p.end(), l) == p.end()) ++fn[l];
    }
  }
  auto f1 = [](std::size_t tp_, std::size_t fp_, std::size_t fn_) {
    const std::size_t denom = 2 * tp_ + fp_ + fn_;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp_) / static_cast<double>(denom);
  };
  F1Scores s;
  double macro = 0.0;
  for (std::size_t l = 0; l < num_labels; ++l) macro += f1(tp[l], fp[l], fn[l]);
  s.macro = num_labels == 0 ? 0.0 : macro / static_cast<double>(num_labels);

  const auto sum = [](const std::vector<std::size_t>& v) {
    return std::accumulate(v.begin(), v.end(), std::size_t{0});
  };
  const double all_tp = static_cast<double>(sum(tp));
  const double all_fp = static_cast<double>(sum(fp));
  const double all_fn = static_cast<double>(sum(fn));
  const double precision = all_tp + all_fp > 0 ? all_tp / (all_tp + all_fp) : 0.0;
  const double recall = all_tp + all_fn > 0 ? all_tp / (all_tp + all_fn) : 0.0;
  s.micro = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  return s;
}

MetricSummary MetricSummary::of(std::vector<double> values) {
  MetricSummary s;
  s.values = std::move(values);
  if (s.values.empty()) return s;
  const double n = static_cast<double>(s.values.size());
  s.mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / n;
  if (s.values.size() > 1) {
    double ss = 0.0;
    for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

}  // namespace elaine::eval
