#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace elaine::oracle {

Graph make_graph(std::size_t n, std::initializer_list<std::pair<int, int>> edges) {
  std::vector<Edge> list;
  for (auto [u, v] : edges) list.push_back({u, v, 1.0});
  return Graph::from_edges(n, list);
}

Graph path_graph(std::size_t n) {
  std::vector<Edge> list;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    list.push_back({static_cast<NodeId>(i), static_cast<NodeId>(i + 1), 1.0});
  }
  return Graph::from_edges(n, list);
}

Graph cycle_graph(std::size_t n) {
  std::vector<Edge> list;
  for (std::size_t i = 0; i < n; ++i) {
    list.push_back({static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n), 1.0});
  }
  return Graph::from_edges(n, list);
}

Graph star_graph(std::size_t leaves) {
  std::vector<Edge> list;
  for (std::size_t i = 1; i <= leaves; ++i) list.push_back({0, static_cast<NodeId>(i), 1.0});
  return Graph::from_edges(leaves + 1, list);
}

Graph complete_graph(std::size_t n) {
  std::vector<Edge> list;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      list.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), 1.0});
    }
  }
  return Graph::from_edges(n, list);
}

Graph random_graph(std::size_t n, double p, std::uint64_t seed, bool weighted) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> weight(0.5, 2.0);
  std::vector<Edge> list;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (unit(rng) < p) {
        list.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j),
                        weighted ? weight(rng) : 1.0});
      }
    }
  }
  return Graph::from_edges(n, list);
}

Eigen::MatrixXd random_attributes(const Graph& g, std::size_t p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(g.num_edges()), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) rows(i, j) = unit(rng);
  }
  return rows;
}

Eigen::MatrixXd binary_adjacency(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) a(e.u, e.v) = a(e.v, e.u) = 1.0;
  return a;
}

Eigen::MatrixXd exact_visit_distribution(const Graph& g, std::size_t l) {
  const Eigen::MatrixXd a = binary_adjacency(g);
  const auto n = a.rows();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = a.row(i).sum();
    if (d > 0) p.row(i) = a.row(i) / d;
  }
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t t = 1; t <= l; ++t) {
    power = power * p;
    sum += power;
  }
  return sum / static_cast<double>(l);
}

Eigen::MatrixXd katz_by_solve(const Graph& g, double beta) {
  const Eigen::MatrixXd a = binary_adjacency(g);
  const auto n = a.rows();
  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - beta * a;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) k.col(j) = lu.solve(Eigen::VectorXd(beta * a.col(j)));
  return k;
}

Eigen::MatrixXd common_neighbors_by_square(const Graph& g) {
  const Eigen::MatrixXd a = binary_adjacency(g);
  Eigen::MatrixXd cn = a * a;
  cn.diagonal().setZero();
  return cn;
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[idx[t]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

Eigen::MatrixXd naive_forward(const nn::LayerStack& stack, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd cur = x;
  for (const auto& layer : stack) {
    Eigen::MatrixXd next(cur.rows(), layer.weights.cols());
    for (Eigen::Index r = 0; r < cur.rows(); ++r) {
      for (Eigen::Index o = 0; o < layer.weights.cols(); ++o) {
        double s = layer.bias[o];
        for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) s += cur(r, i) * layer.weights(i, o);
        switch (layer.activation) {
          case nn::Activation::kSigmoid: s = 1.0 / (1.0 + std::exp(-s)); break;
          case nn::Activation::kRelu: s = s > 0 ? s : 0.0; break;
          case nn::Activation::kIdentity: break;
        }
        next(r, o) = s;
      }
    }
    cur = std::move(next);
  }
  return cur;
}

double monte_carlo_kl(const Eigen::MatrixXd& mean, const Eigen::MatrixXd& log_variance,
                      std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double total = 0.0;
  for (Eigen::Index r = 0; r < mean.rows(); ++r) {
    double row = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
      double log_ratio = 0.0;
      for (Eigen::Index c = 0; c < mean.cols(); ++c) {
        const double sigma = std::exp(0.5 * log_variance(r, c));
        const double e = normal(rng);
        const double z = mean(r, c) + sigma * e;
        // log q(z) - log p(z); the 2*pi terms cancel
        log_ratio += -0.5 * e * e - 0.5 * log_variance(r, c) + 0.5 * z * z;
      }
      row += log_ratio;
    }
    total += row / static_cast<double>(samples);
  }
  return total / static_cast<double>(mean.rows());
}

double lipschitz_bound(const nn::LayerStack& stack) {
  double bound = 1.0;
  for (const auto& layer : stack) {
    const double act = layer.activation == nn::Activation::kSigmoid ? 0.25 : 1.0;
    bound *= act * layer.weights.norm();
  }
  return bound;
}

namespace {

// A ReLU unit whose pre-activation lies within h of zero makes the step-h
// difference straddle the kink. Entries where steps h and h/10 disagree by
// more than roundoff are taken from the finer step.
std::vector<double> kink_aware_difference(const std::function<double()>& loss,
                                          std::span<double> params, double h, double floor) {
  auto coarse = nn::central_difference(loss, params, h);
  const auto fine = nn::central_difference(loss, params, h / 10.0);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const double scale = std::max(std::abs(coarse[i]), std::abs(fine[i]));
    if (std::abs(coarse[i] - fine[i]) > 1e-2 * scale + floor) coarse[i] = fine[i];
  }
  return coarse;
}

}  // namespace

GradCheck check_model_gradient(ElaineModel& model, const FeatureMatrix& features,
                               const EdgeBatch& batch, const Eigen::MatrixXd& eps, double h,
                               double floor) {
  const auto analytic = evaluate_loss(model, features, batch, eps, true);
  auto loss = [&] { return evaluate_loss(model, features, batch, eps, false).terms.total; };
  GradCheck out;
  const auto layers = model.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    auto& w = layers[k]->weights;
    auto& b = layers[k]->bias;
    const auto nw = kink_aware_difference(loss, {w.data(), static_cast<std::size_t>(w.size())}, h, floor);
    const auto nb = kink_aware_difference(loss, {b.data(), static_cast<std::size_t>(b.size())}, h, floor);
    const auto& gw = analytic.grads[k].weights;
    const auto& gb = analytic.grads[k].bias;
    out.max_relative_error = std::max(
        {out.max_relative_error,
         nn::max_relative_error({gw.data(), static_cast<std::size_t>(gw.size())}, nw, floor),
         nn::max_relative_error({gb.data(), static_cast<std::size_t>(gb.size())}, nb, floor)});
    out.checked += nw.size() + nb.size();
  }
  return out;
}

void jitter_biases(ElaineModel& model, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  for (auto* l : model.layers()) {
    for (Eigen::Index k = 0; k < l->bias.size(); ++k) l->bias[k] = normal(rng);
  }
}

GradInstance make_grad_instance(bool use_vae, bool use_higher_order, bool use_roles,
                                EdgeAttrMode mode, std::uint64_t seed) {
  GradInstance inst;
  for (std::uint64_t attempt = 0;; ++attempt) {
    inst.graph = random_graph(6, 0.5, seed * 131 + attempt, true);
    if (inst.graph.num_edges() >= 3) break;
  }
  inst.attrs = EdgeAttributes::from_rows(inst.graph, random_attributes(inst.graph, 3, seed + 7));

  ElaineConfig& c = inst.config;
  c.dim = 2;
  c.encoder_hidden = {5, 4};
  c.edge_decoder_hidden = seed % 2 == 0 ? std::vector<std::size_t>{3} : std::vector<std::size_t>{};
  c.alpha_1 = 0.7;
  c.alpha_v = 0.3;
  c.alpha_l = 0.01;
  c.alpha_r = 0.02;
  c.beta_penalty = 3.0;
  c.walk = {4, 3, seed};
  c.use_vae = use_vae;
  c.use_higher_order = use_higher_order;
  c.use_roles = use_roles;
  c.edge_attr_mode = mode;
  c.seed = seed;

  inst.features = assemble_features(inst.graph, inst.attrs, c);
  std::vector<std::size_t> all(inst.graph.num_edges());
  std::iota(all.begin(), all.end(), 0);
  inst.batch = make_batch(inst.graph, inst.attrs, all);

  std::mt19937_64 rng(seed + 99);
  std::normal_distribution<double> normal(0.0, 1.0);
  inst.eps.resize(2 * static_cast<Eigen::Index>(inst.batch.size()), static_cast<Eigen::Index>(c.dim));
  for (Eigen::Index i = 0; i < inst.eps.size(); ++i) inst.eps.data()[i] = normal(rng);
  return inst;
}

eval::F1Scores confusion_f1(std::span<const std::vector<int>> predicted,
                            std::span<const std::vector<int>> truth, std::size_t num_labels) {
  const auto n = static_cast<Eigen::Index>(truth.size());
  const auto l = static_cast<Eigen::Index>(num_labels);
  Eigen::MatrixXi p = Eigen::MatrixXi::Zero(n, l);
  Eigen::MatrixXi t = Eigen::MatrixXi::Zero(n, l);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int x : predicted[static_cast<std::size_t>(i)]) p(i, x) = 1;
    for (int x : truth[static_cast<std::size_t>(i)]) t(i, x) = 1;
  }
  const Eigen::MatrixXi tp = p.cwiseProduct(t);
  const Eigen::MatrixXi fp = p - tp;
  const Eigen::MatrixXi fn = t - tp;
  eval::F1Scores s;
  for (Eigen::Index c = 0; c < l; ++c) {
    const double a = tp.col(c).sum(), b = fp.col(c).sum(), d = fn.col(c).sum();
    s.macro += (2 * a + b + d) > 0 ? 2 * a / (2 * a + b + d) : 0.0;
  }
  s.macro = l > 0 ? s.macro / static_cast<double>(l) : 0.0;
  const double a = tp.sum(), b = fp.sum(), d = fn.sum();
  s.micro = (2 * a + b + d) > 0 ? 2 * a / (2 * a + b + d) : 0.0;
  return s;
}

Eigen::MatrixXd block_scores(std::size_t blocks, std::size_t nodes_per_block) {
  const auto n = static_cast<Eigen::Index>(blocks * nodes_per_block);
  Eigen::MatrixXd s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      s(i, j) = (i / static_cast<Eigen::Index>(nodes_per_block)) ==
                        (j / static_cast<Eigen::Index>(nodes_per_block))
                    ? 1.0
                    : 0.0;
    }
  }
  return s;
}

}  // namespace elaine::oracle
