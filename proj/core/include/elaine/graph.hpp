#pragma once

// Weighted undirected graphs with per-edge attribute vectors and multi-label
// node annotations, plus their text file formats.
//
// Edge list:        one edge per line, "u v [w]", w defaults to 1.0.
// Edge attributes:  "u v a1 a2 ... ap".
// Node labels:      "u l1,l2,...".
// Blank lines and anything after '#' are ignored. A comment of the form
// "# nodes: N" fixes the node count so trailing isolated nodes survive a
// save/load cycle.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace elaine {

using NodeId = std::int32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 1.0;
};

/// Unordered pair stored with u < v.
struct EdgeKey {
  NodeId u = 0;
  NodeId v = 0;

  static EdgeKey of(NodeId a, NodeId b) noexcept {
    return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
  }
  std::uint64_t packed() const noexcept {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
           static_cast<std::uint32_t>(v);
  }
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

/// Immutable weighted undirected graph with dense adjacency.
///
/// Invariants: A is symmetric with zero diagonal, A_uv > 0 exactly for the
/// stored edges, and the degree caches agree with A.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph over nodes 0..n-1. Duplicate pairs (in either
  /// orientation) are merged by summing weights. Throws ValidationError on
  /// self-loops, non-positive or non-finite weights, and out-of-range ids.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges);

  std::size_t num_nodes() const noexcept { return neighbors_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  const Eigen::MatrixXd& adjacency() const noexcept { return adjacency_; }
  double weight(NodeId u, NodeId v) const { return adjacency_(u, v); }
  bool has_edge(NodeId u, NodeId v) const { return adjacency_(u, v) > 0.0; }

  /// Canonical edges (u < v), sorted lexicographically.
  std::span<const Edge> edges() const noexcept { return edges_; }
  /// Sorted neighbor ids of u.
  std::span<const NodeId> neighbors(NodeId u) const { return neighbors_[u]; }

  std::size_t degree(NodeId u) const { return neighbors_[u].size(); }
  double weighted_degree(NodeId u) const { return weighted_degree_[u]; }

  /// Position of edge {u, v} in edges(), or -1 when absent.
  std::ptrdiff_t edge_index(NodeId u, NodeId v) const;

  /// Order-independent hash of (n, edge set, weights).
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

 private:
  Eigen::MatrixXd adjacency_;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> neighbors_;
  std::vector<double> weighted_degree_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::uint64_t fingerprint_ = 0;
};

/// Attribute vectors aligned with Graph::edges(); row i belongs to edge i.
class EdgeAttributes {
 public:
  EdgeAttributes() = default;

  /// All-zero attributes of dimension p for every edge of g.
  static EdgeAttributes zeros(const Graph& g, std::size_t p);
  /// Takes ownership of an m x p matrix aligned with g.edges(). Entries must
  /// be finite and nonnegative.
  static EdgeAttributes from_rows(const Graph& g, Eigen::MatrixXd rows,
                                  std::size_t missing = 0);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(rows_.cols()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
  const Eigen::MatrixXd& rows() const noexcept { return rows_; }
  /// Edges that had no line in the source file and were zero-filled.
  std::size_t missing_count() const noexcept { return missing_; }

  auto row(std::size_t edge) const { return rows_.row(static_cast<Eigen::Index>(edge)); }
  /// Attribute vector of edge {u, v} in g; ContractViolation if not an edge.
  Eigen::VectorXd at(const Graph& g, NodeId u, NodeId v) const;

  /// Attributes of the edges of `sub`, looked up from `parent`. Every edge
  /// of `sub` must exist in `parent`.
  EdgeAttributes restrict_to(const Graph& parent, const Graph& sub) const;

 private:
  Eigen::MatrixXd rows_;
  std::size_t missing_ = 0;
};

/// Multi-label node annotations; label ids are dense 0..L-1.
struct NodeLabels {
  std::vector<std::vector<int>> labels;  // per node, sorted, unique
  std::size_t num_labels = 0;

  std::size_t num_nodes() const noexcept { return labels.size(); }
  bool has(NodeId u, int label) const;
};

Graph load_graph(const std::filesystem::path& path);
Graph read_graph(std::istream& in, const std::string& source = "<stream>");
void save_graph(const Graph& g, const std::filesystem::path& path);
void write_graph(const Graph& g, std::ostream& out);

/// Zero-fills edges with no line and counts them in missing_count().
EdgeAttributes load_edge_attributes(const std::filesystem::path& path, const Graph& g);
EdgeAttributes read_edge_attributes(std::istream& in, const Graph& g,
                                    const std::string& source = "<stream>");
void save_edge_attributes(const Graph& g, const EdgeAttributes& attrs,
                          const std::filesystem::path& path);

/// `num_nodes` sizes the result; nodes without a line get no labels.
NodeLabels load_node_labels(const std::filesystem::path& path, std::size_t num_nodes);
NodeLabels read_node_labels(std::istream& in, std::size_t num_nodes,
                            const std::string& source = "<stream>");
void save_node_labels(const NodeLabels& labels, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Synthetic benchmark graphs

struct SbmParams {
  std::size_t blocks = 4;
  std::size_t nodes_per_block = 50;
  double p_in = 0.15;
  double p_out = 0.02;
  std::size_t topics = 4;
  double noise = 0.2;
  std::uint64_t seed = 0;
};

struct SyntheticGraph {
  Graph graph;
  EdgeAttributes attributes;
  NodeLabels labels;
};

/// Stochastic block model with planted edge topics. Node u sits in block
/// u / nodes_per_block and is labelled with it. Block b owns topic b; an
/// intra-block edge carries (1 - noise) * onehot(b) + noise * uniform and an
/// inter-block edge carries the uniform vector (1/topics, ...).
SyntheticGraph generate_sbm_with_edge_topics(const SbmParams& params);

}  // namespace elaine
