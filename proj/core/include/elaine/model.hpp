#pragma once

// Edge-label-aware coupled variational autoencoder.
//
// Each node u has an input row F_u = [S_u, R_u (, aggregated attributes)].
// One encoder (hidden ReLU stack + Gaussian head) maps F_u to a latent z_u;
// a sigmoid feature decoder reconstructs F_u from z_u; for edges (i, j) an
// optional edge decoder reconstructs the edge attribute vector from
// [z_i; z_j]. Both endpoints of an edge go through the same encoder and
// feature decoder objects.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "elaine/errors.hpp"
#include "elaine/graph.hpp"
#include "elaine/neural.hpp"
#include "elaine/proximity.hpp"
#include "elaine/random.hpp"

namespace elaine {

enum class EdgeAttrMode : std::uint8_t { kNone = 0, kNodeAggregated = 1, kCoupled = 2 };

std::string_view to_string(EdgeAttrMode mode);
EdgeAttrMode parse_edge_attr_mode(std::string_view text);

struct ElaineConfig {
  std::size_t dim = 128;
  std::vector<std::size_t> encoder_hidden{500, 300};
  std::vector<std::size_t> edge_decoder_hidden{};
  double alpha_1 = 1.0;   // edge attribute reconstruction
  double alpha_v = 1e-2;  // KL
  double alpha_l = 1e-5;  // L1 on weights
  double alpha_r = 1e-4;  // squared L2 on weights
  double beta_penalty = 5.0;
  WalkConfig walk{};
  bool use_vae = true;
  bool use_higher_order = true;
  bool use_roles = true;
  EdgeAttrMode edge_attr_mode = EdgeAttrMode::kCoupled;
  std::size_t epochs = 200;
  std::size_t minibatch_size = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;

  /// Throws ValidationError on any violated invariant.
  void validate() const;

  /// "key = value" lines; from_text(to_text()) reproduces the config.
  std::string to_text() const;
  static ElaineConfig from_text(std::string_view text);
  std::string fingerprint() const;
};

/// Sets one field from its text form (the keys used by to_text). Returns
/// false for an unknown key; throws ValidationError for a malformed value.
bool apply_config_field(ElaineConfig& cfg, std::string_view key, std::string_view value);

struct FeatureBlock {
  std::size_t offset = 0;
  std::size_t width = 0;
};

struct FeatureMatrix {
  Eigen::MatrixXd values;    // n x width
  FeatureBlock neighborhood; // S, or the degree-normalized adjacency
  FeatureBlock roles;        // width 0 when disabled
  FeatureBlock attributes;   // width 0 unless node-aggregated

  std::size_t width() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

/// Degree-normalized binary adjacency rows (a_i / deg(i)); zero rows for
/// isolated nodes.
Eigen::MatrixXd normalized_adjacency(const Graph& g);

FeatureMatrix assemble_features(const Graph& g, const EdgeAttributes& attrs,
                                const ElaineConfig& cfg, std::size_t jobs = 1);

struct Encoder {
  nn::LayerStack hidden;  // ReLU layers; may be empty
  nn::GaussianHead head;
};

class ElaineModel {
 public:
  /// Glorot-initialized model for the given feature layout and attribute
  /// dimension (ignored unless the edge decoder is enabled).
  ElaineModel(const ElaineConfig& cfg, std::size_t feature_width, FeatureBlock neighborhood,
              std::size_t attr_dim);

  const ElaineConfig& config() const noexcept { return config_; }
  std::size_t feature_width() const noexcept { return feature_width_; }
  std::size_t attr_dim() const noexcept { return attr_dim_; }
  FeatureBlock neighborhood() const noexcept { return neighborhood_; }
  bool has_edge_decoder() const noexcept { return !edge_decoder_.empty(); }

  /// Encoder used for the left (0) or right (1) endpoint of an edge. Both
  /// return the same object.
  const Encoder& branch_encoder(int side) const;
  const nn::LayerStack& branch_decoder(int side) const;
  const Encoder& encoder() const noexcept { return encoder_; }
  const nn::LayerStack& feature_decoder() const noexcept { return feature_decoder_; }
  const nn::LayerStack& edge_decoder() const noexcept { return edge_decoder_; }

  /// Every trainable layer in a fixed order: encoder hidden, head mean,
  /// head log-variance (VAE only), feature decoder, edge decoder.
  std::vector<nn::DenseLayer*> layers();
  std::vector<const nn::DenseLayer*> layers() const;

  nn::AdamState& adam() noexcept { return adam_; }
  const nn::AdamState& adam() const noexcept { return adam_; }

  /// Posterior means for the given feature rows.
  Eigen::MatrixXd encode_mean(const Eigen::MatrixXd& features) const;

 private:
  ElaineConfig config_;
  std::size_t feature_width_;
  FeatureBlock neighborhood_;
  std::size_t attr_dim_;
  Encoder encoder_;
  nn::LayerStack feature_decoder_;
  nn::LayerStack edge_decoder_;
  nn::AdamState adam_;
};

// ---------------------------------------------------------------------------
// Loss

struct EdgeBatch {
  std::vector<NodeId> left;
  std::vector<NodeId> right;
  Eigen::MatrixXd attributes;  // batch x p (may have 0 columns)

  std::size_t size() const noexcept { return left.size(); }
};

/// Batch of the listed edge indices of g.
EdgeBatch make_batch(const Graph& g, const EdgeAttributes& attrs,
                     std::span<const std::size_t> edge_indices);

struct LossTerms {
  double neighborhood = 0.0;  // L_n
  double edge = 0.0;          // L_e
  double variational = 0.0;   // L_v
  double lasso = 0.0;         // L_l
  double ridge = 0.0;         // L_r
  double total = 0.0;         // L_n + a1 L_e + av L_v + al L_l + ar L_r

  bool finite() const noexcept;
};

struct LossEvaluation {
  LossTerms terms;
  std::vector<nn::LayerGrad> grads;  // aligned with ElaineModel::layers(); empty if not requested
};

/// Mask B: beta where F > 0, else 1.
Eigen::MatrixXd penalty_mask(const Eigen::MatrixXd& f, double beta);

/// Loss and (optionally) its gradient on one edge batch. `eps` holds
/// 2*batch x dim standard-normal draws: rows [0, B) for the left endpoints,
/// [B, 2B) for the right ones. It is ignored when the VAE is disabled.
LossEvaluation evaluate_loss(const ElaineModel& model, const FeatureMatrix& features,
                             const EdgeBatch& batch, const Eigen::MatrixXd& eps,
                             bool with_gradient);

// ---------------------------------------------------------------------------
// Training

struct TrainResult {
  ElaineModel model;
  std::vector<LossTerms> history;  // per-epoch mean over steps
};

/// Carries the history up to the failing step.
class DivergenceError : public TrainingFault {
 public:
  DivergenceError(const std::string& what, std::vector<LossTerms> history)
      : TrainingFault(what), history_(std::move(history)) {}
  const std::vector<LossTerms>& history() const noexcept { return history_; }

 private:
  std::vector<LossTerms> history_;
};

TrainResult train(const Graph& g, const EdgeAttributes& attrs, const ElaineConfig& cfg,
                  std::size_t jobs = 1);
TrainResult train(const FeatureMatrix& features, const Graph& g, const EdgeAttributes& attrs,
                  const ElaineConfig& cfg);

// ---------------------------------------------------------------------------
// Inference

struct Embedding {
  Eigen::MatrixXd values;  // n x d posterior means
  std::string config_fingerprint;
  std::uint64_t graph_hash = 0;
};

Embedding embed(const ElaineModel& model, const FeatureMatrix& features,
                std::uint64_t graph_hash = 0);

/// Feature-decoder reconstruction of the neighborhood block, n x n.
Eigen::MatrixXd reconstruct_neighborhood(const ElaineModel& model, const Eigen::MatrixXd& y);

/// 0.5 * (Fhat_u[v] + Fhat_v[u]) on the neighborhood block.
double score_edge(const ElaineModel& model, const Eigen::MatrixXd& y, NodeId u, NodeId v);
/// All pairwise scores at once; symmetric.
Eigen::MatrixXd score_matrix(const ElaineModel& model, const Eigen::MatrixXd& y);

/// Edge-decoder output for [y_u; y_v]; requires a coupled model.
Eigen::VectorXd predict_edge_attributes(const ElaineModel& model, const Eigen::MatrixXd& y,
                                        NodeId u, NodeId v);

// ---------------------------------------------------------------------------
// Files

/// "n d" header, then "node y_1 ... y_d" with 17 significant digits.
void write_embedding(std::ostream& out, const Embedding& emb);
void save_embedding(const std::filesystem::path& path, const Embedding& emb);
Embedding load_embedding(const std::filesystem::path& path);

void write_model(std::ostream& out, const ElaineModel& model);
ElaineModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const ElaineModel& model);
ElaineModel load_model(const std::filesystem::path& path);

}  // namespace elaine
