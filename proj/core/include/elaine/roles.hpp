#pragma once

// Social-role statistics per node.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string_view>

#include <Eigen/Dense>

#include "elaine/graph.hpp"

namespace elaine {

/// Column order of RoleMatrix.
enum class RoleFeature : std::size_t {
  kDegree = 0,
  kWeightedDegree = 1,
  kClustering = 2,
  kEccentricity = 3,
  kStructuralHole = 4,   // Burt's constraint
  kLocalGatekeeper = 5,  // components of the induced neighborhood
};

inline constexpr std::size_t kRoleFeatureCount = 6;

inline constexpr std::array<std::string_view, kRoleFeatureCount> kRoleFeatureNames = {
    "degree", "weighted_degree", "clustering", "eccentricity", "constraint", "gatekeeper"};

struct RoleMatrix {
  Eigen::MatrixXd raw;     // n x 6, unscaled
  Eigen::MatrixXd scaled;  // n x 6, min-max scaled per column

  double raw_value(NodeId u, RoleFeature f) const {
    return raw(u, static_cast<Eigen::Index>(f));
  }
};

RoleMatrix role_features(const Graph& g, std::size_t jobs = 1);

/// Closed-triple fraction on the binary graph; 0 for degree < 2.
double clustering_coefficient(const Graph& g, NodeId u);
/// Largest hop distance to any node reachable from u; 0 when isolated.
std::size_t eccentricity(const Graph& g, NodeId u);
/// c_u = sum_{j in N(u)} (p_uj + sum_{q in N(u) & N(j)} p_uq p_qj)^2 with
/// p_xy = A_xy / sum_k A_xk.
double burt_constraint(const Graph& g, NodeId u);
/// Connected components of the subgraph induced by N(u); 0 when isolated.
std::size_t neighborhood_components(const Graph& g, NodeId u);

/// Per-column min-max scaling to [0, 1]; constant columns become 0.
Eigen::MatrixXd min_max_scale(const Eigen::MatrixXd& m);

/// Row u = mean attribute vector over u's incident edges (zero if isolated).
Eigen::MatrixXd aggregate_edge_attributes(const Graph& g, const EdgeAttributes& attrs);

/// CSV with header node,<raw columns>,<scaled columns>.
void write_role_csv(std::ostream& out, const RoleMatrix& roles);

}  // namespace elaine
