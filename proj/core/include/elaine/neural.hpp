#pragma once

// Dense feed-forward layers with hand-written backpropagation, a
// diagonal-Gaussian latent head, Adam, and a central-difference checker.
// Rows of every activation matrix are batch items.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "elaine/random.hpp"

namespace elaine::nn {

enum class Activation : std::uint8_t { kSigmoid = 0, kRelu = 1, kIdentity = 2 };

Eigen::MatrixXd activate(Activation act, const Eigen::MatrixXd& pre);
/// Elementwise derivative expressed through the activation output.
Eigen::MatrixXd activation_derivative(Activation act, const Eigen::MatrixXd& out);

struct DenseLayer {
  Eigen::MatrixXd weights;  // in x out
  Eigen::VectorXd bias;     // out
  Activation activation = Activation::kIdentity;

  DenseLayer() = default;
  DenseLayer(std::size_t in, std::size_t out, Activation act);

  std::size_t in_dim() const noexcept { return static_cast<std::size_t>(weights.rows()); }
  std::size_t out_dim() const noexcept { return static_cast<std::size_t>(weights.cols()); }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

struct LayerGrad {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;

  static LayerGrad zeros_like(const DenseLayer& layer);
  LayerGrad& operator+=(const LayerGrad& other);
};

using LayerStack = std::vector<DenseLayer>;

/// Stack in -> hidden... -> out; hidden layers use `hidden_act`.
LayerStack make_stack(std::size_t in, std::span<const std::size_t> hidden, std::size_t out,
                      Activation hidden_act, Activation out_act);

/// Glorot-uniform weights, zero biases.
void glorot_init(DenseLayer& layer, Rng& rng);
void glorot_init(LayerStack& stack, Rng& rng);

/// inputs[k] feeds layer k; outputs[k] is its activation.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> outputs;
};

/// An empty stack is the identity map.
Eigen::MatrixXd forward(const LayerStack& stack, const Eigen::MatrixXd& x,
                        ForwardCache* cache = nullptr);

struct BackwardResult {
  Eigen::MatrixXd input_grad;
  std::vector<LayerGrad> grads;  // one per layer
};

BackwardResult backward(const LayerStack& stack, const Eigen::MatrixXd& upstream,
                        const ForwardCache& cache);

// ---------------------------------------------------------------------------
// Diagonal-Gaussian latent head

inline constexpr double kLogVarMin = -10.0;
inline constexpr double kLogVarMax = 10.0;

struct GaussianHead {
  DenseLayer mean;          // identity activation
  DenseLayer log_variance;  // identity activation

  GaussianHead() = default;
  GaussianHead(std::size_t in, std::size_t latent);
};

struct LatentSample {
  Eigen::MatrixXd z;
  Eigen::MatrixXd mean;
  Eigen::MatrixXd log_variance;      // clamped to [kLogVarMin, kLogVarMax]
  Eigen::MatrixXd raw_log_variance;  // before clamping
};

/// z = mean + exp(log_variance / 2) * eps, with eps drawn by the caller.
LatentSample sample_latent(const GaussianHead& head, const Eigen::MatrixXd& h,
                           const Eigen::MatrixXd& eps);

struct LatentGrad {
  Eigen::MatrixXd input_grad;
  LayerGrad mean;
  LayerGrad log_variance;
};

/// Backpropagates through the head. `grad_mean` and `grad_log_variance` are
/// direct loss gradients (e.g. from the KL term); `grad_z` flows through the
/// reparameterization. Clamped log-variances receive zero gradient.
LatentGrad backward_latent(const GaussianHead& head, const Eigen::MatrixXd& h,
                           const LatentSample& sample, const Eigen::MatrixXd& eps,
                           const Eigen::MatrixXd& grad_z, Eigen::MatrixXd grad_mean,
                           Eigen::MatrixXd grad_log_variance);

/// Batch mean of sum_d 0.5 (exp(lv) + mu^2 - 1 - lv).
double kl_unit_gaussian(const Eigen::MatrixXd& mean, const Eigen::MatrixXd& log_variance);

struct KlGrad {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd log_variance;
};
KlGrad kl_unit_gaussian_grad(const Eigen::MatrixXd& mean, const Eigen::MatrixXd& log_variance);

// ---------------------------------------------------------------------------
// Adam

struct AdamHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One parameter tensor and its gradient, viewed as flat contiguous storage.
struct ParamView {
  std::span<double> value;
  std::span<const double> grad;
};

class AdamState {
 public:
  explicit AdamState(AdamHyper hyper = {}) : hyper_(hyper) {}

  /// Bias-corrected Adam update. Moments are sized on the first call; later
  /// calls must present the same tensor shapes.
  void step(std::span<const ParamView> params);

  const AdamHyper& hyper() const noexcept { return hyper_; }
  std::int64_t steps() const noexcept { return steps_; }
  const std::vector<std::vector<double>>& first_moments() const noexcept { return m_; }
  const std::vector<std::vector<double>>& second_moments() const noexcept { return v_; }

  void restore(AdamHyper hyper, std::int64_t steps, std::vector<std::vector<double>> m,
               std::vector<std::vector<double>> v);

 private:
  AdamHyper hyper_;
  std::int64_t steps_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

// ---------------------------------------------------------------------------
// Finite-difference checking

/// Central differences of `loss` with respect to each entry of `params`,
/// which `loss` must read through. Entries are restored afterwards.
std::vector<double> central_difference(const std::function<double()>& loss,
                                       std::span<double> params, double h = 1e-5);

/// max_i |a_i - n_i| / max(|a_i|, |n_i|, floor).
double max_relative_error(std::span<const double> analytic, std::span<const double> numeric,
                          double floor = 1e-6);

// ---------------------------------------------------------------------------
// Checkpoint blob
//
// "ELNN" u32 version, u64 layer count, per layer (u64 in, u64 out, u8 act,
// row-major weights, bias), then Adam hyper-parameters, step count and
// moments. Little-endian host layout.

void write_parameters(std::ostream& out, std::span<const DenseLayer* const> layers,
                      const AdamState& adam);
/// Loads into existing layers; throws ValidationError when any shape or
/// activation differs from the blob.
void read_parameters(std::istream& in, std::span<DenseLayer* const> layers, AdamState& adam);

}  // namespace elaine::nn
