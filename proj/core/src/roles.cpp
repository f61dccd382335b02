#include "elaine/roles.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <queue>
#include <vector>

#include "elaine/errors.hpp"
#include "elaine/parallel.hpp"
#include "text_util.hpp"

namespace elaine {

double clustering_coefficient(const Graph& g, NodeId u) {
  const auto nbrs = g.neighbors(u);
  const std::size_t d = nbrs.size();
  if (d < 2) return 0.0;
  std::size_t links = 0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a + 1; b < d; ++b) {
      if (g.has_edge(nbrs[a], nbrs[b])) ++links;
    }
  }
  return 2.0 * static_cast<double>(links) / static_cast<double>(d * (d - 1));
}

std::size_t eccentricity(const Graph& g, NodeId u) {
  std::vector<std::ptrdiff_t> dist(g.num_nodes(), -1);
  std::queue<NodeId> frontier;
  dist[static_cast<std::size_t>(u)] = 0;
  frontier.push(u);
  std::ptrdiff_t farthest = 0;
  while (!frontier.empty()) {
    const NodeId x = frontier.front();
    frontier.pop();
    for (NodeId y : g.neighbors(x)) {
      auto& dy = dist[static_cast<std::size_t>(y)];
      if (dy >= 0) continue;
      dy = dist[static_cast<std::size_t>(x)] + 1;
      farthest = std::max(farthest, dy);
      frontier.push(y);
    }
  }
  return static_cast<std::size_t>(farthest);
}

double burt_constraint(const Graph& g, NodeId u) {
  if (g.degree(u) == 0) return 0.0;
  const auto& a = g.adjacency();
  auto share = [&](NodeId x, NodeId y) { return a(x, y) / g.weighted_degree(x); };
  double total = 0.0;
  for (NodeId j : g.neighbors(u)) {
    double indirect = 0.0;
    for (NodeId q : g.neighbors(u)) {
      if (q != j && g.has_edge(q, j)) indirect += share(u, q) * share(q, j);
    }
    const double c = share(u, j) + indirect;
    total += c * c;
  }
  return total;
}

std::size_t neighborhood_components(const Graph& g, NodeId u) {
  const auto nbrs = g.neighbors(u);
  const std::size_t d = nbrs.size();
  std::vector<std::size_t> parent(d);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = d;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a + 1; b < d; ++b) {
      if (!g.has_edge(nbrs[a], nbrs[b])) continue;
      const auto ra = find(a);
      const auto rb = find(b);
      if (ra != rb) {
        parent[ra] = rb;
        --components;
      }
    }
  }
  return components;
}

Eigen::MatrixXd min_max_scale(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  if (m.rows() == 0) return out;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double lo = m.col(c).minCoeff();
    const double hi = m.col(c).maxCoeff();
    if (hi > lo) out.col(c) = (m.col(c).array() - lo) / (hi - lo);
  }
  return out;
}

RoleMatrix role_features(const Graph& g, std::size_t jobs) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  RoleMatrix r;
  r.raw = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(kRoleFeatureCount));
  parallel_for(g.num_nodes(), jobs, [&](std::size_t i) {
    const auto u = static_cast<NodeId>(i);
    const auto row = static_cast<Eigen::Index>(i);
    r.raw(row, 0) = static_cast<double>(g.degree(u));
    r.raw(row, 1) = g.weighted_degree(u);
    r.raw(row, 2) = clustering_coefficient(g, u);
    r.raw(row, 3) = static_cast<double>(eccentricity(g, u));
    r.raw(row, 4) = burt_constraint(g, u);
    r.raw(row, 5) = static_cast<double>(neighborhood_components(g, u));
  });
  r.scaled = min_max_scale(r.raw);
  return r;
}

Eigen::MatrixXd aggregate_edge_attributes(const Graph& g, const EdgeAttributes& attrs) {
  ELAINE_EXPECTS(attrs.size() == g.num_edges(), "edge attributes not aligned with graph");
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  const auto p = static_cast<Eigen::Index>(attrs.dim());
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, p);
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    sum.row(edges[i].u) += attrs.row(i);
    sum.row(edges[i].v) += attrs.row(i);
  }
  for (Eigen::Index u = 0; u < n; ++u) {
    const auto d = g.degree(static_cast<NodeId>(u));
    if (d > 0) sum.row(u) /= static_cast<double>(d);
  }
  return sum;
}

void write_role_csv(std::ostream& out, const RoleMatrix& roles) {
  out << "node";
  for (auto name : kRoleFeatureNames) out << ',' << name;
  for (auto name : kRoleFeatureNames) out << ",scaled_" << name;
  out << '\n';
  for (Eigen::Index u = 0; u < roles.raw.rows(); ++u) {
    out << u;
    for (Eigen::Index c = 0; c < roles.raw.cols(); ++c) out << ',' << detail::format_double(roles.raw(u, c));
    for (Eigen::Index c = 0; c < roles.scaled.cols(); ++c) out << ',' << detail::format_double(roles.scaled(u, c));
    out << '\n';
  }
}

}  // namespace elaine
