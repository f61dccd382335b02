#include "elaine/graph.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "elaine/errors.hpp"
#include "text_util.hpp"

namespace elaine {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_mix(std::uint64_t& h, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xffU;
    h *= kFnvPrime;
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
  if (n > static_cast<std::size_t>(std::numeric_limits<NodeId>::max())) {
    throw ValidationError("node count exceeds NodeId range");
  }
  std::map<std::pair<NodeId, NodeId>, double> merged;
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || static_cast<std::size_t>(e.u) >= n ||
        static_cast<std::size_t>(e.v) >= n) {
      throw ValidationError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") references a node outside 0.." + std::to_string(n) + "-1");
    }
    if (e.u == e.v) {
      throw ValidationError("self-loop on node " + std::to_string(e.u));
    }
    if (!std::isfinite(e.weight) || e.weight <= 0.0) {
      throw ValidationError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") has non-positive weight");
    }
    const EdgeKey key = EdgeKey::of(e.u, e.v);
    merged[{key.u, key.v}] += e.weight;
  }

  Graph g;
  const auto nn = static_cast<Eigen::Index>(n);
  g.adjacency_ = Eigen::MatrixXd::Zero(nn, nn);
  g.neighbors_.assign(n, {});
  g.weighted_degree_.assign(n, 0.0);
  g.edges_.reserve(merged.size());
  g.index_.reserve(merged.size());

  std::uint64_t h = kFnvOffset;
  fnv_mix(h, n);
  for (const auto& [uv, w] : merged) {
    const auto [u, v] = uv;
    g.index_.emplace(EdgeKey{u, v}.packed(), g.edges_.size());
    g.edges_.push_back({u, v, w});
    g.adjacency_(u, v) = w;
    g.adjacency_(v, u) = w;
    g.neighbors_[u].push_back(v);
    g.neighbors_[v].push_back(u);
    g.weighted_degree_[u] += w;
    g.weighted_degree_[v] += w;
    fnv_mix(h, EdgeKey{u, v}.packed());
    fnv_mix(h, std::bit_cast<std::uint64_t>(w));
  }
  for (auto& list : g.neighbors_) std::sort(list.begin(), list.end());
  g.fingerprint_ = h;
  return g;
}

std::ptrdiff_t Graph::edge_index(NodeId u, NodeId v) const {
  if (u == v) return -1;
  const auto it = index_.find(EdgeKey::of(u, v).packed());
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

// ---------------------------------------------------------------------------

EdgeAttributes EdgeAttributes::zeros(const Graph& g, std::size_t p) {
  EdgeAttributes a;
  a.rows_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.num_edges()),
                                  static_cast<Eigen::Index>(p));
  return a;
}

EdgeAttributes EdgeAttributes::from_rows(const Graph& g, Eigen::MatrixXd rows,
                                         std::size_t missing) {
  if (static_cast<std::size_t>(rows.rows()) != g.num_edges()) {
    throw ValidationError("edge attribute rows (" + std::to_string(rows.rows()) +
                          ") do not match edge count (" + std::to_string(g.num_edges()) + ")");
  }
  if (!rows.allFinite() || (rows.size() > 0 && rows.minCoeff() < 0.0)) {
    throw ValidationError("edge attributes must be finite and nonnegative");
  }
  EdgeAttributes a;
  a.rows_ = std::move(rows);
  a.missing_ = missing;
  return a;
}

Eigen::VectorXd EdgeAttributes::at(const Graph& g, NodeId u, NodeId v) const {
  const auto idx = g.edge_index(u, v);
  ELAINE_EXPECTS(idx >= 0, "attribute lookup on a non-edge");
  return rows_.row(idx).transpose();
}

EdgeAttributes EdgeAttributes::restrict_to(const Graph& parent, const Graph& sub) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(sub.num_edges()), rows_.cols());
  Eigen::Index r = 0;
  for (const Edge& e : sub.edges()) {
    const auto idx = parent.edge_index(e.u, e.v);
    ELAINE_EXPECTS(idx >= 0, "subgraph edge missing from parent graph");
    out.row(r++) = rows_.row(idx);
  }
  EdgeAttributes a;
  a.rows_ = std::move(out);
  return a;
}

bool NodeLabels::has(NodeId u, int label) const {
  const auto& l = labels[static_cast<std::size_t>(u)];
  return std::binary_search(l.begin(), l.end(), label);
}

// ---------------------------------------------------------------------------
// Text I/O

Graph read_graph(std::istream& in, const std::string& source) {
  std::vector<Edge> edges;
  std::size_t n = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto declared = detail::node_count_directive(line)) n = std::max(n, *declared);
    const auto tokens = detail::tokenize(detail::strip_comment(line));
    if (tokens.empty()) continue;
    if (tokens.size() < 2 || tokens.size() > 3) {
      throw ParseError(source, line_no, "expected \"u v [w]\"");
    }
    const auto u = detail::parse_node(tokens[0], source, line_no);
    const auto v = detail::parse_node(tokens[1], source, line_no);
    double w = 1.0;
    if (tokens.size() == 3) w = detail::parse_double(tokens[2], source, line_no);
    if (w < 0.0) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": negative weight");
    }
    if (u == v) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": self-loop on node " +
                            std::to_string(u));
    }
    edges.push_back({u, v, w});
    n = std::max(n, static_cast<std::size_t>(std::max(u, v)) + 1);
  }
  return Graph::from_edges(n, edges);
}

Graph load_graph(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_graph(in, path.string());
}

void write_graph(const Graph& g, std::ostream& out) {
  out << "# nodes: " << g.num_nodes() << '\n';
  for (const Edge& e : g.edges()) {
    out << e.u << '\t' << e.v << '\t' << detail::format_double(e.weight) << '\n';
  }
}

void save_graph(const Graph& g, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_graph(g, out);
}

EdgeAttributes read_edge_attributes(std::istream& in, const Graph& g, const std::string& source) {
  const std::size_t m = g.num_edges();
  std::vector<std::vector<double>> rows(m);
  std::vector<bool> seen(m, false);
  std::ptrdiff_t p = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = detail::tokenize(detail::strip_comment(line));
    if (tokens.empty()) continue;
    if (tokens.size() < 3) throw ParseError(source, line_no, "expected \"u v a1 ... ap\"");
    const auto u = detail::parse_node(tokens[0], source, line_no);
    const auto v = detail::parse_node(tokens[1], source, line_no);
    const auto width = static_cast<std::ptrdiff_t>(tokens.size() - 2);
    if (p >= 0 && width != p) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": attribute dimension " +
                            std::to_string(width) + " differs from " + std::to_string(p));
    }
    p = width;
    const bool in_range = static_cast<std::size_t>(std::max(u, v)) < g.num_nodes();
    const auto idx = in_range ? g.edge_index(u, v) : -1;
    if (idx < 0) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": (" + std::to_string(u) +
                            ", " + std::to_string(v) + ") is not an edge of the graph");
    }
    std::vector<double> values;
    values.reserve(tokens.size() - 2);
    for (std::size_t t = 2; t < tokens.size(); ++t) {
      const double a = detail::parse_double(tokens[t], source, line_no);
      if (!std::isfinite(a) || a < 0.0) {
        throw ValidationError(source + ":" + std::to_string(line_no) +
                              ": attributes must be finite and nonnegative");
      }
      values.push_back(a);
    }
    rows[static_cast<std::size_t>(idx)] = std::move(values);
    seen[static_cast<std::size_t>(idx)] = true;
  }
  const auto dim = static_cast<Eigen::Index>(std::max<std::ptrdiff_t>(p, 0));
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), dim);
  std::size_t missing = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!seen[i]) {
      ++missing;
      continue;
    }
    for (Eigen::Index c = 0; c < dim; ++c) mat(static_cast<Eigen::Index>(i), c) = rows[i][c];
  }
  return EdgeAttributes::from_rows(g, std::move(mat), missing);
}

EdgeAttributes load_edge_attributes(const std::filesystem::path& path, const Graph& g) {
  auto in = open_input(path);
  return read_edge_attributes(in, g, path.string());
}

void save_edge_attributes(const Graph& g, const EdgeAttributes& attrs,
                          const std::filesystem::path& path) {
  ELAINE_EXPECTS(attrs.size() == g.num_edges(), "attributes not aligned with graph");
  auto out = open_output(path);
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out << edges[i].u << '\t' << edges[i].v;
    for (Eigen::Index c = 0; c < attrs.rows().cols(); ++c) {
      out << '\t' << detail::format_double(attrs.rows()(static_cast<Eigen::Index>(i), c));
    }
    out << '\n';
  }
}

NodeLabels read_node_labels(std::istream& in, std::size_t num_nodes, const std::string& source) {
  NodeLabels result;
  result.labels.assign(num_nodes, {});
  int max_label = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body(detail::strip_comment(line));
    std::replace(body.begin(), body.end(), ',', ' ');
    const auto tokens = detail::tokenize(body);
    if (tokens.empty()) continue;
    const auto u = detail::parse_node(tokens[0], source, line_no);
    if (static_cast<std::size_t>(u) >= num_nodes) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": node " +
                            std::to_string(u) + " outside the graph");
    }
    auto& set = result.labels[static_cast<std::size_t>(u)];
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const int l = detail::parse_node(tokens[t], source, line_no);
      set.push_back(l);
      max_label = std::max(max_label, l);
    }
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
  }
  result.num_labels = static_cast<std::size_t>(max_label + 1);
  std::vector<bool> used(result.num_labels, false);
  for (const auto& set : result.labels) {
    for (int l : set) used[static_cast<std::size_t>(l)] = true;
  }
  for (std::size_t l = 0; l < used.size(); ++l) {
    if (!used[l]) {
      throw ValidationError(source + ": label ids must be dense; label " + std::to_string(l) +
                            " is never used");
    }
  }
  return result;
}

NodeLabels load_node_labels(const std::filesystem::path& path, std::size_t num_nodes) {
  auto in = open_input(path);
  return read_node_labels(in, num_nodes, path.string());
}

void save_node_labels(const NodeLabels& labels, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (std::size_t u = 0; u < labels.labels.size(); ++u) {
    if (labels.labels[u].empty()) continue;
    out << u << '\t';
    for (std::size_t i = 0; i < labels.labels[u].size(); ++i) {
      if (i) out << ',';
      out << labels.labels[u][i];
    }
    out << '\n';
  }
}

}  // namespace elaine
