#include "elaine/neural.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "elaine/errors.hpp"

namespace elaine::nn {

Eigen::MatrixXd activate(Activation act, const Eigen::MatrixXd& pre) {
  switch (act) {
    case Activation::kSigmoid:
      return (1.0 / (1.0 + (-pre.array()).exp())).matrix();
    case Activation::kRelu:
      return pre.cwiseMax(0.0);
    case Activation::kIdentity:
      return pre;
  }
  return pre;
}

Eigen::MatrixXd activation_derivative(Activation act, const Eigen::MatrixXd& out) {
  switch (act) {
    case Activation::kSigmoid:
      return (out.array() * (1.0 - out.array())).matrix();
    case Activation::kRelu:
      // Subgradient 0 at the kink.
      return (out.array() > 0.0).cast<double>().matrix();
    case Activation::kIdentity:
      return Eigen::MatrixXd::Ones(out.rows(), out.cols());
  }
  return Eigen::MatrixXd::Ones(out.rows(), out.cols());
}

DenseLayer::DenseLayer(std::size_t in, std::size_t out, Activation act)
    : weights(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out))),
      bias(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out))),
      activation(act) {}

Eigen::MatrixXd DenseLayer::apply(const Eigen::MatrixXd& x) const {
  ELAINE_EXPECTS(x.cols() == weights.rows(),
                 "layer expects " + std::to_string(weights.rows()) + " inputs, got " +
                     std::to_string(x.cols()));
  Eigen::MatrixXd pre = x * weights;
  pre.rowwise() += bias.transpose();
  return activate(activation, pre);
}

LayerGrad LayerGrad::zeros_like(const DenseLayer& layer) {
  return {Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()),
          Eigen::VectorXd::Zero(layer.bias.size())};
}

LayerGrad& LayerGrad::operator+=(const LayerGrad& other) {
  weights += other.weights;
  bias += other.bias;
  return *this;
}

LayerStack make_stack(std::size_t in, std::span<const std::size_t> hidden, std::size_t out,
                      Activation hidden_act, Activation out_act) {
  LayerStack stack;
  std::size_t width = in;
  for (std::size_t h : hidden) {
    stack.emplace_back(width, h, hidden_act);
    width = h;
  }
  stack.emplace_back(width, out, out_act);
  return stack;
}

void glorot_init(DenseLayer& layer, Rng& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(layer.in_dim() + layer.out_dim()));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) layer.weights(r, c) = dist(rng);
  }
  layer.bias.setZero();
}

void glorot_init(LayerStack& stack, Rng& rng) {
  for (auto& layer : stack) glorot_init(layer, rng);
}

Eigen::MatrixXd forward(const LayerStack& stack, const Eigen::MatrixXd& x, ForwardCache* cache) {
  if (cache) {
    cache->inputs.clear();
    cache->outputs.clear();
  }
  Eigen::MatrixXd current = x;
  for (const auto& layer : stack) {
    Eigen::MatrixXd next = layer.apply(current);
    if (cache) {
      cache->inputs.push_back(std::move(current));
      cache->outputs.push_back(next);
    }
    current = std::move(next);
  }
  return current;
}

BackwardResult backward(const LayerStack& stack, const Eigen::MatrixXd& upstream,
                        const ForwardCache& cache) {
  ELAINE_EXPECTS(cache.inputs.size() == stack.size() && cache.outputs.size() == stack.size(),
                 "forward cache does not match layer stack");
  BackwardResult result;
  result.grads.resize(stack.size());
  Eigen::MatrixXd grad = upstream;
  for (std::size_t k = stack.size(); k-- > 0;) {
    const auto& layer = stack[k];
    ELAINE_EXPECTS(grad.rows() == cache.outputs[k].rows() && grad.cols() == cache.outputs[k].cols(),
                   "upstream gradient shape mismatch");
    const Eigen::MatrixXd delta =
        (grad.array() * activation_derivative(layer.activation, cache.outputs[k]).array()).matrix();
    result.grads[k].weights = cache.inputs[k].transpose() * delta;
    result.grads[k].bias = delta.colwise().sum().transpose();
    grad = delta * layer.weights.transpose();
  }
  result.input_grad = std::move(grad);
  return result;
}

// ---------------------------------------------------------------------------

GaussianHead::GaussianHead(std::size_t in, std::size_t latent)
    : mean(in, latent, Activation::kIdentity), log_variance(in, latent, Activation::kIdentity) {}

LatentSample sample_latent(const GaussianHead& head, const Eigen::MatrixXd& h,
                           const Eigen::MatrixXd& eps) {
  LatentSample s;
  s.mean = head.mean.apply(h);
  s.raw_log_variance = head.log_variance.apply(h);
  ELAINE_EXPECTS(eps.rows() == s.mean.rows() && eps.cols() == s.mean.cols(),
                 "noise shape must match the latent batch");
  s.log_variance = s.raw_log_variance.cwiseMax(kLogVarMin).cwiseMin(kLogVarMax);
  s.z = (s.mean.array() + (0.5 * s.log_variance.array()).exp() * eps.array()).matrix();
  return s;
}

LatentGrad backward_latent(const GaussianHead& head, const Eigen::MatrixXd& h,
                           const LatentSample& sample, const Eigen::MatrixXd& eps,
                           const Eigen::MatrixXd& grad_z, Eigen::MatrixXd grad_mean,
                           Eigen::MatrixXd grad_log_variance) {
  grad_mean += grad_z;
  grad_log_variance.array() +=
      grad_z.array() * 0.5 * (0.5 * sample.log_variance.array()).exp() * eps.array();
  const auto inside = (sample.raw_log_variance.array() >= kLogVarMin &&
                       sample.raw_log_variance.array() <= kLogVarMax)
                          .cast<double>();
  grad_log_variance.array() *= inside;

  LatentGrad g;
  g.mean.weights = h.transpose() * grad_mean;
  g.mean.bias = grad_mean.colwise().sum().transpose();
  g.log_variance.weights = h.transpose() * grad_log_variance;
  g.log_variance.bias = grad_log_variance.colwise().sum().transpose();
  g.input_grad = grad_mean * head.mean.weights.transpose() +
                 grad_log_variance * head.log_variance.weights.transpose();
  return g;
}

double kl_unit_gaussian(const Eigen::MatrixXd& mean, const Eigen::MatrixXd& log_variance) {
  if (mean.rows() == 0) return 0.0;
  const double total = 0.5 * (log_variance.array().exp() + mean.array().square() - 1.0 -
                              log_variance.array())
                                 .sum();
  return total / static_cast<double>(mean.rows());
}

KlGrad kl_unit_gaussian_grad(const Eigen::MatrixXd& mean, const Eigen::MatrixXd& log_variance) {
  const double inv = mean.rows() > 0 ? 1.0 / static_cast<double>(mean.rows()) : 0.0;
  return {mean * inv, (0.5 * inv * (log_variance.array().exp() - 1.0)).matrix()};
}

// ---------------------------------------------------------------------------

void AdamState::step(std::span<const ParamView> params) {
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i].assign(params[i].value.size(), 0.0);
      v_[i].assign(params[i].value.size(), 0.0);
    }
  }
  ELAINE_EXPECTS(m_.size() == params.size(), "Adam parameter list changed between steps");
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double correction1 = 1.0 - std::pow(hyper_.beta1, t);
  const double correction2 = 1.0 - std::pow(hyper_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto value = params[i].value;
    const auto grad = params[i].grad;
    ELAINE_EXPECTS(value.size() == grad.size() && value.size() == m_[i].size(),
                   "Adam parameter shape changed between steps");
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < value.size(); ++j) {
      m[j] = hyper_.beta1 * m[j] + (1.0 - hyper_.beta1) * grad[j];
      v[j] = hyper_.beta2 * v[j] + (1.0 - hyper_.beta2) * grad[j] * grad[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      value[j] -= hyper_.learning_rate * m_hat / (std::sqrt(v_hat) + hyper_.epsilon);
    }
  }
}

void AdamState::restore(AdamHyper hyper, std::int64_t steps, std::vector<std::vector<double>> m,
                        std::vector<std::vector<double>> v) {
  ELAINE_EXPECTS(m.size() == v.size(), "Adam moment lists differ in length");
  hyper_ = hyper;
  steps_ = steps;
  m_ = std::move(m);
  v_ = std::move(v);
}

// ---------------------------------------------------------------------------

std::vector<double> central_difference(const std::function<double()>& loss,
                                       std::span<double> params, double h) {
  std::vector<double> grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = loss();
    params[i] = saved - h;
    const double down = loss();
    params[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double max_relative_error(std::span<const double> analytic, std::span<const double> numeric,
                          double floor) {
  ELAINE_EXPECTS(analytic.size() == numeric.size(), "gradient lengths differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
  }
  return worst;
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kBlobMagic[4] = {'E', 'L', 'N', 'N'};
constexpr std::uint32_t kBlobVersion = 1;

template <typename T>
void put(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T take(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ValidationError("parameter blob is truncated");
  return value;
}

void put_doubles(std::ostream& out, const double* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
}

void take_doubles(std::istream& in, double* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw ValidationError("parameter blob is truncated");
}

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

void write_parameters(std::ostream& out, std::span<const DenseLayer* const> layers,
                      const AdamState& adam) {
  out.write(kBlobMagic, sizeof(kBlobMagic));
  put(out, kBlobVersion);
  put<std::uint64_t>(out, layers.size());
  for (const DenseLayer* layer : layers) {
    put<std::uint64_t>(out, layer->in_dim());
    put<std::uint64_t>(out, layer->out_dim());
    put<std::uint8_t>(out, static_cast<std::uint8_t>(layer->activation));
    const RowMajor w = layer->weights;
    put_doubles(out, w.data(), static_cast<std::size_t>(w.size()));
    put_doubles(out, layer->bias.data(), static_cast<std::size_t>(layer->bias.size()));
  }
  const auto& hyper = adam.hyper();
  put(out, hyper.learning_rate);
  put(out, hyper.beta1);
  put(out, hyper.beta2);
  put(out, hyper.epsilon);
  put<std::int64_t>(out, adam.steps());
  put<std::uint64_t>(out, adam.first_moments().size());
  for (std::size_t i = 0; i < adam.first_moments().size(); ++i) {
    const auto& m = adam.first_moments()[i];
    const auto& v = adam.second_moments()[i];
    put<std::uint64_t>(out, m.size());
    put_doubles(out, m.data(), m.size());
    put_doubles(out, v.data(), v.size());
  }
  if (!out) throw Error("failed to write parameter blob");
}

void read_parameters(std::istream& in, std::span<DenseLayer* const> layers, AdamState& adam) {
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(magic, magic + 4, kBlobMagic)) {
    throw ValidationError("not a parameter blob");
  }
  const auto version = take<std::uint32_t>(in);
  if (version != kBlobVersion) {
    throw ValidationError("unsupported parameter blob version " + std::to_string(version));
  }
  const auto count = take<std::uint64_t>(in);
  if (count != layers.size()) {
    throw ValidationError("blob holds " + std::to_string(count) + " layers, model has " +
                          std::to_string(layers.size()));
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    DenseLayer& layer = *layers[k];
    const auto in_dim = take<std::uint64_t>(in);
    const auto out_dim = take<std::uint64_t>(in);
    const auto act = take<std::uint8_t>(in);
    if (in_dim != layer.in_dim() || out_dim != layer.out_dim() ||
        act != static_cast<std::uint8_t>(layer.activation)) {
      throw ValidationError("layer " + std::to_string(k) + " shape mismatch: blob " +
                            std::to_string(in_dim) + "x" + std::to_string(out_dim) + ", model " +
                            std::to_string(layer.in_dim()) + "x" + std::to_string(layer.out_dim()));
    }
    RowMajor w(layer.weights.rows(), layer.weights.cols());
    take_doubles(in, w.data(), static_cast<std::size_t>(w.size()));
    layer.weights = w;
    take_doubles(in, layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
  }
  AdamHyper hyper;
  hyper.learning_rate = take<double>(in);
  hyper.beta1 = take<double>(in);
  hyper.beta2 = take<double>(in);
  hyper.epsilon = take<double>(in);
  const auto steps = take<std::int64_t>(in);
  const auto tensors = take<std::uint64_t>(in);
  std::vector<std::vector<double>> m(tensors), v(tensors);
  for (std::size_t i = 0; i < tensors; ++i) {
    const auto size = take<std::uint64_t>(in);
    m[i].resize(size);
    v[i].resize(size);
    take_doubles(in, m[i].data(), size);
    take_doubles(in, v[i].data(), size);
  }
  adam.restore(hyper, steps, std::move(m), std::move(v));
}

}  // namespace elaine::nn
