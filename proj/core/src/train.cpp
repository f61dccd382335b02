#include <algorithm>
#include <numeric>
#include <sstream>

#include "elaine/errors.hpp"
#include "elaine/model.hpp"

namespace elaine {

namespace {

std::vector<nn::ParamView> param_views(const std::vector<nn::DenseLayer*>& layers,
                                       const std::vector<nn::LayerGrad>& grads) {
  std::vector<nn::ParamView> views;
  views.reserve(2 * layers.size());
  for (std::size_t k = 0; k < layers.size(); ++k) {
    auto& w = layers[k]->weights;
    auto& b = layers[k]->bias;
    views.push_back({{w.data(), static_cast<std::size_t>(w.size())},
                     {grads[k].weights.data(), static_cast<std::size_t>(grads[k].weights.size())}});
    views.push_back({{b.data(), static_cast<std::size_t>(b.size())},
                     {grads[k].bias.data(), static_cast<std::size_t>(grads[k].bias.size())}});
  }
  return views;
}

void accumulate(LossTerms& sum, const LossTerms& t) {
  sum.neighborhood += t.neighborhood;
  sum.edge += t.edge;
  sum.variational += t.variational;
  sum.lasso += t.lasso;
  sum.ridge += t.ridge;
  sum.total += t.total;
}

LossTerms scaled(LossTerms t, double s) {
  t.neighborhood *= s;
  t.edge *= s;
  t.variational *= s;
  t.lasso *= s;
  t.ridge *= s;
  t.total *= s;
  return t;
}

}  // namespace

TrainResult train(const FeatureMatrix& features, const Graph& g, const EdgeAttributes& attrs,
                  const ElaineConfig& cfg) {
  cfg.validate();
  const std::size_t m = g.num_edges();
  if (m == 0) throw ValidationError("training needs at least one edge");
  if (static_cast<std::size_t>(features.values.rows()) != g.num_nodes()) {
    throw ValidationError("feature rows do not match the graph");
  }
  if (cfg.edge_attr_mode == EdgeAttrMode::kCoupled &&
      (attrs.size() != m || attrs.dim() == 0)) {
    throw ValidationError("coupled mode needs an attribute vector for every edge");
  }

  TrainResult result{ElaineModel(cfg, features.width(), features.neighborhood, attrs.dim()), {}};
  ElaineModel& model = result.model;
  Rng rng = make_rng(cfg.seed, 1);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch_size = std::min(cfg.minibatch_size, m);
  const std::size_t steps = (m + batch_size - 1) / batch_size;
  const auto d = static_cast<Eigen::Index>(cfg.dim);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    LossTerms sum;
    for (std::size_t step = 0; step < steps; ++step) {
      const std::size_t begin = step * batch_size;
      const std::size_t end = std::min(begin + batch_size, m);
      const auto batch = make_batch(g, attrs, std::span(order).subspan(begin, end - begin));
      Eigen::MatrixXd eps(2 * static_cast<Eigen::Index>(batch.size()), cfg.use_vae ? d : 0);
      for (Eigen::Index c = 0; c < eps.cols(); ++c) {
        for (Eigen::Index r = 0; r < eps.rows(); ++r) eps(r, c) = normal(rng);
      }
      auto eval = evaluate_loss(model, features, batch, eps, true);
      if (!eval.terms.finite()) {
        std::ostringstream msg;
        msg << "non-finite loss at epoch " << epoch << " step " << step << " (L_n="
            << eval.terms.neighborhood << ", L_e=" << eval.terms.edge
            << ", L_v=" << eval.terms.variational << ", L=" << eval.terms.total << ")";
        throw DivergenceError(msg.str(), result.history);
      }
      accumulate(sum, eval.terms);
      const auto layers = model.layers();
      const auto views = param_views(layers, eval.grads);
      model.adam().step(views);
    }
    result.history.push_back(scaled(sum, 1.0 / static_cast<double>(steps)));
  }
  return result;
}

TrainResult train(const Graph& g, const EdgeAttributes& attrs, const ElaineConfig& cfg,
                  std::size_t jobs) {
  cfg.validate();
  const auto features = assemble_features(g, attrs, cfg, jobs);
  return train(features, g, attrs, cfg);
}

}  // namespace elaine
