#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "elaine/errors.hpp"
#include "elaine/neural.hpp"
#include "support/oracles.hpp"

using namespace elaine;
using namespace elaine::nn;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

std::span<double> flat(Eigen::MatrixXd& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> flat(Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<const double> cflat(const Eigen::MatrixXd& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
std::span<const double> cflat(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

TEST(Forward, IdentityLayerPassesInputThrough) {
  DenseLayer layer(3, 3, Activation::kIdentity);
  layer.weights.setIdentity();
  layer.bias.setZero();
  const auto x = random_matrix(4, 3, 1);
  EXPECT_EQ(forward({layer}, x), x);
}

TEST(Forward, ZeroSigmoidLayerGivesHalf) {
  DenseLayer layer(1, 1, Activation::kSigmoid);
  layer.weights.setZero();
  layer.bias.setZero();
  Eigen::MatrixXd x(3, 1);
  x << -100, 0, 42;
  EXPECT_EQ(forward({layer}, x), Eigen::MatrixXd::Constant(3, 1, 0.5));
}

TEST(Forward, MatchesNaiveEvaluation) {
  Rng rng(5);
  const std::vector<std::size_t> hidden{7, 4};
  auto stack = make_stack(6, hidden, 3, Activation::kRelu, Activation::kSigmoid);
  glorot_init(stack, rng);
  for (auto& l : stack) l.bias = random_matrix(l.bias.size(), 1, 9, 0.1).col(0);
  const auto x = random_matrix(5, 6, 2);
  EXPECT_LT((forward(stack, x) - oracle::naive_forward(stack, x)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Forward, EmptyStackIsIdentityAndShapeMismatchThrows) {
  const auto x = random_matrix(2, 3, 1);
  EXPECT_EQ(forward({}, x), x);
  DenseLayer layer(4, 2, Activation::kRelu);
  EXPECT_THROW(forward({layer}, x), ContractViolation);
}

TEST(Backward, LinearLayerHalfSquaredNorm) {
  DenseLayer layer(3, 2, Activation::kIdentity);
  layer.weights = random_matrix(3, 2, 3);
  layer.bias = random_matrix(2, 1, 4).col(0);
  const auto x = random_matrix(4, 3, 5);
  ForwardCache cache;
  const auto y = forward({layer}, x, &cache);
  const auto back = backward({layer}, y, cache);
  EXPECT_LT((back.grads[0].weights - x.transpose() * y).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((back.grads[0].bias - y.colwise().sum().transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Backward, TwoLayerSigmoidNetMatchesFiniteDifferences) {
  Rng rng(11);
  const std::vector<std::size_t> hidden{5};
  auto stack = make_stack(4, hidden, 3, Activation::kSigmoid, Activation::kSigmoid);
  glorot_init(stack, rng);
  const auto x = random_matrix(6, 4, 12);
  const auto target = random_matrix(6, 3, 13, 0.3);
  auto loss = [&] { return 0.5 * (forward(stack, x) - target).squaredNorm(); };

  ForwardCache cache;
  const auto y = forward(stack, x, &cache);
  const auto back = backward(stack, y - target, cache);
  for (std::size_t k = 0; k < stack.size(); ++k) {
    const auto nw = central_difference(loss, flat(stack[k].weights));
    const auto nb = central_difference(loss, flat(stack[k].bias));
    EXPECT_LT(max_relative_error(cflat(back.grads[k].weights), nw), 1e-5);
    EXPECT_LT(max_relative_error(cflat(back.grads[k].bias), nb), 1e-5);
  }
  // input gradient too
  Eigen::MatrixXd xin = x;
  auto loss_x = [&] { return 0.5 * (forward(stack, xin) - target).squaredNorm(); };
  EXPECT_LT(max_relative_error(cflat(back.input_grad), central_difference(loss_x, flat(xin))), 1e-5);
}

TEST(Backward, ZeroUpstreamGivesZeroGradients) {
  Rng rng(1);
  const std::vector<std::size_t> hidden{4};
  auto stack = make_stack(3, hidden, 2, Activation::kRelu, Activation::kSigmoid);
  glorot_init(stack, rng);
  ForwardCache cache;
  forward(stack, random_matrix(5, 3, 2), &cache);
  const auto back = backward(stack, Eigen::MatrixXd::Zero(5, 2), cache);
  for (const auto& g : back.grads) {
    EXPECT_EQ(g.weights.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(g.bias.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Glorot, WeightsWithinLimitAndBiasesZero) {
  Rng rng(3);
  DenseLayer layer(30, 20, Activation::kRelu);
  glorot_init(layer, rng);
  const double limit = std::sqrt(6.0 / 50.0);
  EXPECT_LE(layer.weights.cwiseAbs().maxCoeff(), limit);
  EXPECT_GT(layer.weights.cwiseAbs().maxCoeff(), 0.8 * limit);
  EXPECT_EQ(layer.bias.cwiseAbs().maxCoeff(), 0.0);
}

// ---------------------------------------------------------------------------

namespace {

GaussianHead random_head(std::size_t in, std::size_t d, std::uint64_t seed) {
  GaussianHead head(in, d);
  head.mean.weights = random_matrix(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(d), seed);
  head.log_variance.weights =
      random_matrix(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(d), seed + 1, 0.3);
  return head;
}

}  // namespace

TEST(SampleLatent, ZeroNoiseReturnsMean) {
  const auto head = random_head(3, 2, 1);
  const auto h = random_matrix(4, 3, 2);
  const auto s = sample_latent(head, h, Eigen::MatrixXd::Zero(4, 2));
  EXPECT_EQ(s.z, s.mean);
}

TEST(SampleLatent, UnitVarianceShiftsByNoise) {
  GaussianHead head(3, 2);
  head.mean.weights = random_matrix(3, 2, 4);
  head.log_variance.weights.setZero();
  head.log_variance.bias.setZero();
  const auto h = random_matrix(4, 3, 2);
  const auto s = sample_latent(head, h, Eigen::MatrixXd::Ones(4, 2));
  EXPECT_LT((s.z - (s.mean.array() + 1.0).matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SampleLatent, EmpiricalMomentsMatchGaussian) {
  GaussianHead head(1, 1);
  head.mean.weights.setZero();
  head.mean.bias << 0.7;
  head.log_variance.weights.setZero();
  head.log_variance.bias << std::log(2.5);
  const std::size_t n = 100000;
  const Eigen::MatrixXd h = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n), 1);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd eps(static_cast<Eigen::Index>(n), 1);
  for (Eigen::Index i = 0; i < eps.rows(); ++i) eps(i, 0) = normal(rng);
  const Eigen::VectorXd z = sample_latent(head, h, eps).z.col(0);
  const double mean = z.mean();
  const double var = (z.array() - mean).square().sum() / static_cast<double>(n - 1);
  const double sigma2 = 2.5;
  EXPECT_LT(std::abs(mean - 0.7), 3.0 * std::sqrt(sigma2 / n));
  EXPECT_LT(std::abs(var - sigma2), 3.0 * sigma2 * std::sqrt(2.0 / (n - 1)));
}

TEST(SampleLatent, LogVarianceIsClampedAndClampedEntriesGetNoGradient) {
  GaussianHead head(1, 2);
  head.mean.weights.setZero();
  head.log_variance.weights.setZero();
  head.log_variance.bias << 25.0, -1.0;
  const Eigen::MatrixXd h = Eigen::MatrixXd::Ones(1, 1);
  const Eigen::MatrixXd eps = Eigen::MatrixXd::Ones(1, 2);
  const auto s = sample_latent(head, h, eps);
  EXPECT_EQ(s.log_variance(0, 0), kLogVarMax);
  EXPECT_EQ(s.raw_log_variance(0, 0), 25.0);
  const auto g = backward_latent(head, h, s, eps, Eigen::MatrixXd::Ones(1, 2),
                                 Eigen::MatrixXd::Zero(1, 2), Eigen::MatrixXd::Ones(1, 2));
  EXPECT_EQ(g.log_variance.bias[0], 0.0);
  EXPECT_NE(g.log_variance.bias[1], 0.0);
}

TEST(BackwardLatent, MatchesFiniteDifferences) {
  auto head = random_head(4, 3, 21);
  Eigen::MatrixXd h = random_matrix(5, 4, 22);
  const auto eps = random_matrix(5, 3, 23);
  const auto target = random_matrix(5, 3, 24);
  auto loss = [&] {
    const auto s = sample_latent(head, h, eps);
    return 0.5 * (s.z - target).squaredNorm() + kl_unit_gaussian(s.mean, s.log_variance);
  };
  const auto s = sample_latent(head, h, eps);
  const auto kl = kl_unit_gaussian_grad(s.mean, s.log_variance);
  const auto g = backward_latent(head, h, s, eps, s.z - target, kl.mean, kl.log_variance);
  EXPECT_LT(max_relative_error(cflat(g.mean.weights), central_difference(loss, flat(head.mean.weights))), 1e-5);
  EXPECT_LT(max_relative_error(cflat(g.log_variance.weights),
                               central_difference(loss, flat(head.log_variance.weights))), 1e-5);
  EXPECT_LT(max_relative_error(cflat(g.log_variance.bias),
                               central_difference(loss, flat(head.log_variance.bias))), 1e-5);
  EXPECT_LT(max_relative_error(cflat(g.input_grad), central_difference(loss, flat(h))), 1e-5);
}

TEST(Kl, IdenticalDistributionsGiveZero) {
  EXPECT_EQ(kl_unit_gaussian(Eigen::MatrixXd::Zero(3, 4), Eigen::MatrixXd::Zero(3, 4)), 0.0);
}

TEST(Kl, UnitShiftGivesHalf) {
  EXPECT_DOUBLE_EQ(kl_unit_gaussian(Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Zero(1, 1)), 0.5);
}

TEST(Kl, AveragesOverBatchRows) {
  Eigen::MatrixXd mu(2, 1);
  mu << 1, 0;
  EXPECT_DOUBLE_EQ(kl_unit_gaussian(mu, Eigen::MatrixXd::Zero(2, 1)), 0.25);
}

TEST(Kl, MatchesMonteCarloEstimate) {
  const auto mu = random_matrix(2, 3, 31, 0.8);
  const auto lv = random_matrix(2, 3, 32, 0.5);
  const double exact = kl_unit_gaussian(mu, lv);
  const double mc = oracle::monte_carlo_kl(mu, lv, 1000000, 33);
  EXPECT_LT(std::abs(mc - exact) / exact, 0.01);
}

TEST(KlProperty, NonNegativeOnRandomInputs) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto mu = random_matrix(3, 4, seed, 2.0);
    const auto lv = random_matrix(3, 4, seed + 1000, 3.0);
    EXPECT_GE(kl_unit_gaussian(mu, lv), 0.0);
  }
}

// ---------------------------------------------------------------------------

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  std::vector<double> x{1.0, -2.0, 3.0};
  const std::vector<double> g(3, 0.0);
  AdamState adam;
  const std::vector<ParamView> views{{x, g}};
  adam.step(views);
  EXPECT_EQ(x, (std::vector<double>{1.0, -2.0, 3.0}));
  EXPECT_EQ(adam.steps(), 1);
}

TEST(Adam, FirstStepMovesByLearningRateTimesSign) {
  for (double grad : {0.3, -7.0}) {
    std::vector<double> x{0.0};
    const std::vector<double> g{grad};
    AdamState adam({0.01, 0.9, 0.999, 1e-8});
    const std::vector<ParamView> views{{x, g}};
    adam.step(views);
    const double expected = -0.01 * grad / (std::abs(grad) + 1e-8);
    EXPECT_NEAR(x[0], expected, 1e-15);
  }
}

TEST(Adam, MinimizesQuadratic) {
  std::vector<double> x{5.0};
  std::vector<double> g{0.0};
  AdamState adam({0.1, 0.9, 0.999, 1e-8});
  for (int t = 0; t < 500; ++t) {
    g[0] = 2.0 * x[0];
    const std::vector<ParamView> views{{x, g}};
    adam.step(views);
  }
  EXPECT_LT(std::abs(x[0]), 0.1);
}

TEST(Adam, ShapeChangeIsRejected) {
  std::vector<double> x{1.0, 2.0};
  std::vector<double> g{0.1, 0.1};
  AdamState adam;
  adam.step(std::vector<ParamView>{{x, g}});
  std::vector<double> y{1.0};
  std::vector<double> gy{0.1};
  EXPECT_THROW(adam.step(std::vector<ParamView>{{y, gy}}), ContractViolation);
}

// ---------------------------------------------------------------------------

TEST(Checkpoint, RoundTripRestoresParametersAndMoments) {
  Rng rng(4);
  const std::vector<std::size_t> hidden{3};
  auto stack = make_stack(2, hidden, 2, Activation::kRelu, Activation::kSigmoid);
  glorot_init(stack, rng);
  AdamState adam;
  std::vector<LayerGrad> grads;
  std::vector<ParamView> views;
  for (auto& l : stack) {
    auto g = LayerGrad::zeros_like(l);
    g.weights.setConstant(0.5);
    grads.push_back(g);
  }
  for (std::size_t k = 0; k < stack.size(); ++k) {
    views.push_back({flat(stack[k].weights), cflat(grads[k].weights)});
  }
  adam.step(views);

  std::vector<const DenseLayer*> cl;
  for (auto& l : stack) cl.push_back(&l);
  std::stringstream blob;
  write_parameters(blob, cl, adam);

  auto copy = make_stack(2, hidden, 2, Activation::kRelu, Activation::kSigmoid);
  std::vector<DenseLayer*> ml;
  for (auto& l : copy) ml.push_back(&l);
  AdamState restored;
  read_parameters(blob, ml, restored);
  for (std::size_t k = 0; k < stack.size(); ++k) {
    EXPECT_EQ(copy[k].weights, stack[k].weights);
    EXPECT_EQ(copy[k].bias, stack[k].bias);
  }
  EXPECT_EQ(restored.steps(), 1);
  EXPECT_EQ(restored.first_moments(), adam.first_moments());
  EXPECT_EQ(restored.second_moments(), adam.second_moments());
}

TEST(Checkpoint, ShapeMismatchIsRejected) {
  Rng rng(4);
  const std::vector<std::size_t> hidden{3};
  auto stack = make_stack(2, hidden, 2, Activation::kRelu, Activation::kSigmoid);
  glorot_init(stack, rng);
  std::vector<const DenseLayer*> cl;
  for (auto& l : stack) cl.push_back(&l);
  std::stringstream blob;
  write_parameters(blob, cl, AdamState{});

  const std::vector<std::size_t> other_hidden{4};
  auto other = make_stack(2, other_hidden, 2, Activation::kRelu, Activation::kSigmoid);
  std::vector<DenseLayer*> ml;
  for (auto& l : other) ml.push_back(&l);
  AdamState adam;
  EXPECT_THROW(read_parameters(blob, ml, adam), ValidationError);
}

TEST(FiniteDifference, RestoresParameters) {
  std::vector<double> p{1.0, 2.0};
  auto loss = [&] { return p[0] * p[0] + 3.0 * p[1]; };
  const auto g = central_difference(loss, p);
  EXPECT_NEAR(g[0], 2.0, 1e-8);
  EXPECT_NEAR(g[1], 3.0, 1e-8);
  EXPECT_EQ(p, (std::vector<double>{1.0, 2.0}));
}
