#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "elaine/errors.hpp"
#include "elaine/eval.hpp"
#include "elaine/parallel.hpp"
#include "elaine/random.hpp"
#include "text_util.hpp"

namespace elaine::eval {

namespace {

constexpr std::uint64_t kSplitStream = 0x5b117ULL;
constexpr std::uint64_t kRandomScoreStream = 0x7a4d0ULL;

void fnv(std::uint64_t& h, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xffU;
    h *= 0x100000001b3ULL;
  }
}

EdgeAttributes attributes_for(const Graph& g, const EdgeAttributes& attrs, const Graph& sub) {
  if (attrs.size() == 0) return EdgeAttributes::zeros(sub, attrs.dim());
  return attrs.restrict_to(g, sub);
}

}  // namespace

std::uint64_t LinkPredSplit::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  fnv(h, train_graph.fingerprint());
  fnv(h, held_out.size());
  for (const auto& e : held_out) fnv(h, e.packed());
  fnv(h, eval_nodes.size());
  for (NodeId u : eval_nodes) fnv(h, static_cast<std::uint64_t>(u));
  return h;
}

LinkPredSplit make_split(const Graph& g, double holdout_frac, std::size_t max_eval_nodes,
                         std::uint64_t seed) {
  if (!(holdout_frac > 0.0 && holdout_frac < 1.0)) {
    throw ValidationError("holdout fraction must lie in (0, 1)");
  }
  if (max_eval_nodes == 0) throw ValidationError("max_eval_nodes must be >= 1");
  const auto edges = g.edges();
  const std::size_t m = edges.size();
  const auto held = static_cast<std::size_t>(std::llround(holdout_frac * static_cast<double>(m)));
  if (held >= m) {
    throw ValidationError("holdout of " + std::to_string(held) + " of " + std::to_string(m) +
                          " edges leaves no training edge");
  }

  Rng rng = make_rng(seed, kSplitStream);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  LinkPredSplit split;
  split.seed = seed;
  std::vector<Edge> kept;
  kept.reserve(m - held);
  for (std::size_t i = 0; i < m; ++i) {
    const Edge& e = edges[order[i]];
    if (i < held) split.held_out.push_back(EdgeKey::of(e.u, e.v));
    else kept.push_back(e);
  }
  std::sort(split.held_out.begin(), split.held_out.end());
  split.train_graph = Graph::from_edges(g.num_nodes(), kept);

  const std::size_t n = g.num_nodes();
  split.eval_nodes.resize(n);
  std::iota(split.eval_nodes.begin(), split.eval_nodes.end(), 0);
  if (n > max_eval_nodes) {
    std::shuffle(split.eval_nodes.begin(), split.eval_nodes.end(), rng);
    split.eval_nodes.resize(max_eval_nodes);
    std::sort(split.eval_nodes.begin(), split.eval_nodes.end());
  }
  return split;
}

SplitResult evaluate_split(const LinkPredSplit& split, const Eigen::MatrixXd& scores,
                           std::span<const std::size_t> ks) {
  const auto n = static_cast<Eigen::Index>(split.train_graph.num_nodes());
  ELAINE_EXPECTS(scores.rows() == n && scores.cols() == n, "score matrix must be n x n");
  const Graph& train = split.train_graph;
  const auto& nodes = split.eval_nodes;
  const PairSet truth = make_pair_set(split.held_out);

  std::vector<ScoredPair> scored;
  std::vector<std::vector<NodeId>> ranked(nodes.size());
  std::vector<std::vector<NodeId>> partners(nodes.size());
  std::vector<std::pair<double, NodeId>> row;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    const NodeId i = nodes[a];
    row.clear();
    for (std::size_t b = 0; b < nodes.size(); ++b) {
      const NodeId j = nodes[b];
      if (i == j || train.has_edge(i, j)) continue;
      const double s = scores(i, j);
      row.emplace_back(s, j);
      if (truth.contains(EdgeKey::of(i, j).packed())) partners[a].push_back(j);
      if (i < j) scored.push_back({EdgeKey{i, j}, 0.5 * (s + scores(j, i))});
    }
    std::sort(row.begin(), row.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return x.second < y.second;
    });
    ranked[a].reserve(row.size());
    for (const auto& [s, j] : row) ranked[a].push_back(j);
  }

  SplitResult result;
  const auto order = rank_pairs(std::move(scored));
  for (std::size_t k : ks) {
    if (k >= 1 && k <= order.size()) {
      result.precision_at_k.emplace_back(k, precision_at_k(order, truth, k));
    }
  }
  result.map = mean_average_precision(ranked, partners);
  return result;
}

PairScorer elaine_scorer(const ElaineConfig& cfg) {
  cfg.validate();
  return [cfg](const LinkPredSplit& split, const EdgeAttributes& train_attrs,
               std::size_t repeat) {
    ElaineConfig c = cfg;
    c.seed = cfg.seed + repeat;
    c.walk.seed = cfg.walk.seed + repeat;
    const auto features = assemble_features(split.train_graph, train_attrs, c);
    const auto trained = train(features, split.train_graph, train_attrs, c);
    const auto y = embed(trained.model, features).values;
    return score_matrix(trained.model, y);
  };
}

PairScorer random_scorer(std::uint64_t seed) {
  return [seed](const LinkPredSplit& split, const EdgeAttributes&, std::size_t repeat) {
    const auto n = static_cast<Eigen::Index>(split.train_graph.num_nodes());
    Rng rng = make_rng(seed + repeat, kRandomScoreStream);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) s(i, j) = s(j, i) = unit(rng);
    }
    return s;
  };
}

PairScorer oracle_scorer() {
  return [](const LinkPredSplit& split, const EdgeAttributes&, std::size_t) {
    const auto n = static_cast<Eigen::Index>(split.train_graph.num_nodes());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : split.held_out) s(e.u, e.v) = s(e.v, e.u) = 1.0;
    return s;
  };
}

EvalReport run_link_prediction(const Graph& g, const EdgeAttributes& attrs,
                               const PairScorer& scorer, const LinkPredOptions& options) {
  if (options.repeats < 1) throw ValidationError("repeats must be >= 1");
  const std::size_t r = options.repeats;
  std::vector<std::optional<SplitResult>> results(r);
  std::vector<std::string> failures(r);
  std::vector<std::uint64_t> hashes(r, 0);

  parallel_for(r, options.jobs, [&](std::size_t i) {
    const auto split = make_split(g, options.holdout_frac, options.max_eval_nodes,
                                  options.seed + i);
    hashes[i] = split.hash();
    try {
      const auto train_attrs = attributes_for(g, attrs, split.train_graph);
      const auto scores = scorer(split, train_attrs, i);
      results[i] = evaluate_split(split, scores, options.ks);
    } catch (const TrainingFault& e) {
      failures[i] = "repeat " + std::to_string(i) + ": " + e.what();
    }
  });

  EvalReport report;
  report.split_hashes = hashes;
  std::vector<const SplitResult*> ok;
  for (std::size_t i = 0; i < r; ++i) {
    if (results[i]) ok.push_back(&*results[i]);
    else report.failures.push_back(failures[i]);
  }
  if (ok.empty()) {
    std::string all = "every repeat failed";
    for (const auto& f : report.failures) all += "; " + f;
    throw TrainingFault(all);
  }
  report.repeats = ok.size();

  std::vector<double> maps;
  for (const auto* s : ok) maps.push_back(s->map);
  report.map = MetricSummary::of(std::move(maps));

  for (const auto& [k, value] : ok.front()->precision_at_k) {
    std::vector<double> values;
    for (const auto* s : ok) {
      const auto it = std::find_if(s->precision_at_k.begin(), s->precision_at_k.end(),
                                   [k = k](const auto& kv) { return kv.first == k; });
      if (it == s->precision_at_k.end()) break;
      values.push_back(it->second);
    }
    if (values.size() == ok.size()) {
      report.precision_at_k.emplace_back(k, MetricSummary::of(std::move(values)));
    }
  }
  return report;
}

EvalReport run_link_prediction(const Graph& g, const EdgeAttributes& attrs,
                               const ElaineConfig& cfg, const LinkPredOptions& options) {
  return run_link_prediction(g, attrs, elaine_scorer(cfg), options);
}

std::vector<Variant> ablation_variants(const ElaineConfig& base) {
  ElaineConfig ae = base;
  ae.use_vae = false;
  ae.use_higher_order = false;
  ae.use_roles = false;
  ae.edge_attr_mode = EdgeAttrMode::kNone;

  ElaineConfig vae = ae;
  vae.use_vae = true;
  ElaineConfig ho = vae;
  ho.use_higher_order = true;
  ElaineConfig hor = ho;
  hor.use_roles = true;
  ElaineConfig na = hor;
  na.edge_attr_mode = EdgeAttrMode::kNodeAggregated;
  ElaineConfig full = hor;
  full.edge_attr_mode = EdgeAttrMode::kCoupled;

  return {{"AE", ae},           {"VAE", vae},      {"VAE+HO", ho},
          {"VAE+HO-R", hor},    {"NA-ELAINE", na}, {"ELAINE", full}};
}

std::vector<TableRow> run_ablation(const Graph& g, const EdgeAttributes& attrs,
                                   const ElaineConfig& base, const LinkPredOptions& options) {
  std::vector<TableRow> rows;
  for (auto& v : ablation_variants(base)) {
    rows.push_back({v.name, run_link_prediction(g, attrs, v.config, options)});
  }
  return rows;
}

SweepParam parse_sweep_param(std::string_view text) {
  if (text == "dim" || text == "d") return SweepParam::kDim;
  if (text == "alpha_1" || text == "alpha-1" || text == "alpha1") return SweepParam::kAlpha1;
  throw ValidationError("unknown sweep parameter '" + std::string(text) +
                        "' (expected dim or alpha_1)");
}

std::string_view to_string(SweepParam param) {
  return param == SweepParam::kDim ? "dim" : "alpha_1";
}

ElaineConfig with_param(const ElaineConfig& base, SweepParam param, double value) {
  ElaineConfig c = base;
  switch (param) {
    case SweepParam::kDim:
      if (!(value >= 1.0) || std::floor(value) != value) {
        throw ValidationError("dim sweep values must be positive integers");
      }
      c.dim = static_cast<std::size_t>(value);
      break;
    case SweepParam::kAlpha1:
      c.alpha_1 = value;
      break;
  }
  c.validate();
  return c;
}

std::vector<TableRow> run_sweep(const Graph& g, const EdgeAttributes& attrs,
                                const ElaineConfig& base, SweepParam param,
                                std::span<const double> values, const LinkPredOptions& options) {
  if (values.empty()) throw ValidationError("sweep needs at least one value");
  std::vector<TableRow> rows;
  for (double v : values) {
    rows.push_back({detail::format_double(v),
                    run_link_prediction(g, attrs, with_param(base, param, v), options)});
  }
  return rows;
}

void write_report_csv(std::ostream& out, std::string_view label_name,
                      std::span<const TableRow> rows) {
  using detail::format_double;
  out << label_name << ",metric,k,mean,stddev,repeats\n";
  auto line = [&](const std::string& label, std::string_view metric, std::string k,
                  const MetricSummary& s, std::size_t repeats) {
    out << label << ',' << metric << ',' << k << ',' << format_double(s.mean) << ','
        << format_double(s.stddev) << ',' << repeats << '\n';
  };
  for (const auto& row : rows) {
    const auto& r = row.report;
    line(row.label, "map", "", r.map, r.repeats);
    for (const auto& [k, s] : r.precision_at_k) {
      line(row.label, "precision_at_k", std::to_string(k), s, r.repeats);
    }
    if (r.micro_f1) line(row.label, "micro_f1", "", *r.micro_f1, r.repeats);
    if (r.macro_f1) line(row.label, "macro_f1", "", *r.macro_f1, r.repeats);
  }
}

void write_map_csv(std::ostream& out, std::string_view label_name, std::span<const TableRow> rows) {
  using detail::format_double;
  out << label_name << ",map_mean,map_stddev,repeats\n";
  for (const auto& row : rows) {
    out << row.label << ',' << format_double(row.report.map.mean) << ','
        << format_double(row.report.map.stddev) << ',' << row.report.repeats << '\n';
  }
}

void write_classification_csv(std::ostream& out, std::span<const ClassificationRow> rows) {
  using detail::format_double;
  out << "train_ratio,micro_f1_mean,micro_f1_stddev,macro_f1_mean,macro_f1_stddev,repeats\n";
  for (const auto& row : rows) {
    out << format_double(row.train_ratio) << ',' << format_double(row.micro_f1.mean) << ','
        << format_double(row.micro_f1.stddev) << ',' << format_double(row.macro_f1.mean) << ','
        << format_double(row.macro_f1.stddev) << ',' << row.micro_f1.values.size() << '\n';
  }
}

void print_table(std::ostream& out, std::string_view label_name, std::span<const TableRow> rows) {
  std::size_t width = label_name.size();
  for (const auto& row : rows) width = std::max(width, row.label.size());
  std::vector<std::size_t> ks;
  if (!rows.empty()) {
    for (const auto& [k, s] : rows.front().report.precision_at_k) {
      if (k == 10 || k == 100 || k == 1000) ks.push_back(k);
    }
  }
  out << std::left << std::setw(static_cast<int>(width)) << label_name << "  MAP (mean +/- sd)   ";
  for (auto k : ks) out << std::setw(10) << ("p@" + std::to_string(k));
  out << "repeats\n";
  out << std::fixed << std::setprecision(4);
  for (const auto& row : rows) {
    const auto& r = row.report;
    std::ostringstream map;
    map << std::fixed << std::setprecision(4) << r.map.mean << " +/- " << r.map.stddev;
    out << std::setw(static_cast<int>(width)) << row.label << "  " << std::setw(20) << map.str();
    for (auto k : ks) {
      const auto it = std::find_if(r.precision_at_k.begin(), r.precision_at_k.end(),
                                   [k](const auto& kv) { return kv.first == k; });
      std::ostringstream cell;
      if (it != r.precision_at_k.end()) cell << std::fixed << std::setprecision(4) << it->second.mean;
      else cell << "-";
      out << std::setw(10) << cell.str();
    }
    out << r.repeats;
    if (!r.failures.empty()) out << " (" << r.failures.size() << " failed)";
    out << '\n';
  }
  out << std::defaultfloat << std::setprecision(6);
}

}  // namespace elaine::eval
