#include "elaine/proximity.hpp"

#include <cstdio>
#include <fstream>

#include "elaine/errors.hpp"
#include "elaine/parallel.hpp"

namespace elaine {

void WalkConfig::validate() const {
  if (walks_per_node < 1) throw ValidationError("walks per node must be >= 1");
  if (walk_length < 1) throw ValidationError("walk length must be >= 1");
}

std::vector<NodeId> random_walk(const Graph& g, NodeId start, std::size_t length, Rng& rng) {
  std::vector<NodeId> walk;
  if (g.degree(start) == 0) return walk;
  walk.reserve(length);
  NodeId current = start;
  for (std::size_t step = 0; step < length; ++step) {
    const auto nbrs = g.neighbors(current);
    std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
    current = nbrs[pick(rng)];
    walk.push_back(current);
  }
  return walk;
}

Eigen::MatrixXd build_similarity(const Graph& g, const WalkConfig& cfg, std::size_t jobs) {
  cfg.validate();
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  const double scale = 1.0 / static_cast<double>(cfg.walks_per_node * cfg.walk_length);

  // Each row is owned by one work item, so no merge step is needed.
  parallel_for(g.num_nodes(), jobs, [&](std::size_t i) {
    const auto node = static_cast<NodeId>(i);
    if (g.degree(node) == 0) return;
    Rng rng = make_rng(cfg.seed, i);
    std::vector<std::size_t> counts(g.num_nodes(), 0);
    for (std::size_t w = 0; w < cfg.walks_per_node; ++w) {
      for (NodeId v : random_walk(g, node, cfg.walk_length, rng)) ++counts[static_cast<std::size_t>(v)];
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      s(static_cast<Eigen::Index>(i), j) = static_cast<double>(counts[static_cast<std::size_t>(j)]) * scale;
    }
  });
  return s;
}

std::string similarity_cache_key(const Graph& g, const WalkConfig& cfg) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "sim-%016llx-k%zu-l%zu-s%llu.bin",
                static_cast<unsigned long long>(g.fingerprint()), cfg.walks_per_node,
                cfg.walk_length, static_cast<unsigned long long>(cfg.seed));
  return buf;
}

Eigen::MatrixXd build_similarity_cached(const Graph& g, const WalkConfig& cfg,
                                        const std::filesystem::path& cache_dir,
                                        std::size_t jobs) {
  const auto path = cache_dir / similarity_cache_key(g, cfg);
  if (std::filesystem::exists(path)) {
    auto s = load_matrix(path);
    if (s.rows() == static_cast<Eigen::Index>(g.num_nodes()) && s.cols() == s.rows()) return s;
  }
  auto s = build_similarity(g, cfg, jobs);
  std::filesystem::create_directories(cache_dir);
  save_matrix(path, s);
  return s;
}

Eigen::MatrixXd katz_index(const Graph& g, double beta) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  if (n == 0) return Eigen::MatrixXd(0, 0);
  if (!(beta > 0.0)) throw ValidationError("Katz decay must be positive");
  const Eigen::MatrixXd a = (g.adjacency().array() > 0.0).cast<double>();
  if (g.num_edges() == 0) return Eigen::MatrixXd::Zero(n, n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  const double radius = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (beta * radius >= 1.0 - 1e-12) {
    throw ValidationError("Katz series diverges: beta * spectral radius = " +
                          std::to_string(beta * radius) + " >= 1");
  }
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd k = (identity - beta * a).partialPivLu().inverse() - identity;
  return 0.5 * (k + k.transpose());
}

Eigen::MatrixXd common_neighbors(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd cn = Eigen::MatrixXd::Zero(n, n);
  // Every pair of neighbors of a node gains that node as a common neighbor.
  for (Eigen::Index w = 0; w < n; ++w) {
    const auto nbrs = g.neighbors(static_cast<NodeId>(w));
    for (std::size_t a = 0; a < nbrs.size(); ++a) {
      for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
        cn(nbrs[a], nbrs[b]) += 1.0;
        cn(nbrs[b], nbrs[a]) += 1.0;
      }
    }
  }
  return cn;
}

namespace {
constexpr char kMatrixMagic[8] = {'E', 'L', 'M', 'A', 'T', 'R', 'X', '1'};
}

void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const std::uint64_t dims[2] = {static_cast<std::uint64_t>(m.rows()),
                                 static_cast<std::uint64_t>(m.cols())};
  out.write(kMatrixMagic, sizeof(kMatrixMagic));
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  out.write(reinterpret_cast<const char*>(rm.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(rm.size())));
  if (!out) throw Error("short write to " + path.string());
}

Eigen::MatrixXd load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[8];
  std::uint64_t dims[2];
  in.read(magic, sizeof(magic));
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in || !std::equal(magic, magic + 8, kMatrixMagic)) {
    throw ValidationError(path.string() + " is not a matrix file");
  }
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(
      static_cast<Eigen::Index>(dims[0]), static_cast<Eigen::Index>(dims[1]));
  in.read(reinterpret_cast<char*>(rm.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(rm.size())));
  if (!in) throw ValidationError(path.string() + " is truncated");
  return rm;
}

}  // namespace elaine
