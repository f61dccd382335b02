#include <cmath>
#include <string>

#include "elaine/errors.hpp"
#include "elaine/graph.hpp"
#include "elaine/random.hpp"

namespace elaine {

SyntheticGraph generate_sbm_with_edge_topics(const SbmParams& params) {
  if (params.blocks == 0 || params.nodes_per_block == 0) {
    throw ValidationError("SBM needs at least one block and one node per block");
  }
  if (!(params.p_out >= 0.0 && params.p_in <= 1.0)) {
    throw ValidationError("SBM probabilities must lie in [0, 1]");
  }
  if (!(params.p_in > params.p_out)) {
    throw ValidationError("SBM requires p_in > p_out (planted structure)");
  }
  if (params.topics < params.blocks) {
    throw ValidationError("SBM needs at least one topic per block (topics=" +
                          std::to_string(params.topics) + ", blocks=" +
                          std::to_string(params.blocks) + ")");
  }
  if (!(params.noise >= 0.0 && params.noise <= 1.0)) {
    throw ValidationError("topic noise must lie in [0, 1]");
  }

  const std::size_t n = params.blocks * params.nodes_per_block;
  const auto block_of = [&](std::size_t u) { return u / params.nodes_per_block; };

  Rng rng = make_rng(params.seed, 0x5bd1e995);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const double p = block_of(u) == block_of(v) ? params.p_in : params.p_out;
      // One draw per pair keeps the stream layout independent of p.
      if (coin(rng) < p) {
        edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), 1.0});
      }
    }
  }

  SyntheticGraph out;
  out.graph = Graph::from_edges(n, edges);

  const auto p = static_cast<Eigen::Index>(params.topics);
  const double uniform = 1.0 / static_cast<double>(params.topics);
  Eigen::MatrixXd attrs(static_cast<Eigen::Index>(out.graph.num_edges()), p);
  Eigen::Index row = 0;
  for (const Edge& e : out.graph.edges()) {
    const auto bu = block_of(static_cast<std::size_t>(e.u));
    const auto bv = block_of(static_cast<std::size_t>(e.v));
    if (bu == bv) {
      attrs.row(row).setConstant(params.noise * uniform);
      attrs(row, static_cast<Eigen::Index>(bu)) += 1.0 - params.noise;
    } else {
      attrs.row(row).setConstant(uniform);
    }
    ++row;
  }
  out.attributes = EdgeAttributes::from_rows(out.graph, std::move(attrs));

  out.labels.num_labels = params.blocks;
  out.labels.labels.resize(n);
  for (std::size_t u = 0; u < n; ++u) out.labels.labels[u] = {static_cast<int>(block_of(u))};
  return out;
}

}  // namespace elaine
