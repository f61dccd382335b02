#pragma once

// Higher-order proximity from truncated random walks, and the closed-form
// Katz / common-neighbor indices used to validate it.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "elaine/graph.hpp"
#include "elaine/random.hpp"

namespace elaine {

struct WalkConfig {
  std::size_t walks_per_node = 10;  // k
  std::size_t walk_length = 5;      // l
  std::uint64_t seed = 0;

  void validate() const;
};

/// Uniform (unweighted) random walk of `length` steps from `start`. The
/// start node is not part of the returned sequence. An isolated start yields
/// an empty sequence.
std::vector<NodeId> random_walk(const Graph& g, NodeId start, std::size_t length, Rng& rng);

/// S_ij = visits of j over the k walks from i, divided by k * l. Rows of
/// non-isolated nodes sum to 1; isolated rows are zero. Node i draws from
/// its own stream derived from (cfg.seed, i), so the result does not depend
/// on `jobs`.
Eigen::MatrixXd build_similarity(const Graph& g, const WalkConfig& cfg, std::size_t jobs = 1);

/// Like build_similarity, but persists S under `cache_dir` keyed by
/// (graph fingerprint, k, l, seed) and reuses it on later calls.
Eigen::MatrixXd build_similarity_cached(const Graph& g, const WalkConfig& cfg,
                                        const std::filesystem::path& cache_dir,
                                        std::size_t jobs = 1);
std::string similarity_cache_key(const Graph& g, const WalkConfig& cfg);

/// Sum_{t>=1} beta^t A^t = (I - beta A)^{-1} - I on the binary adjacency.
/// Throws ValidationError unless beta * spectral_radius(A) < 1.
Eigen::MatrixXd katz_index(const Graph& g, double beta);

/// CN_ij = |N(i) & N(j)|, zero diagonal.
Eigen::MatrixXd common_neighbors(const Graph& g);

/// Dense binary matrix file: magic, rows, cols, row-major doubles.
void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd load_matrix(const std::filesystem::path& path);

}  // namespace elaine
