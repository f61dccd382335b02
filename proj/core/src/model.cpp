#include "elaine/model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "elaine/errors.hpp"
#include "elaine/roles.hpp"
#include "text_util.hpp"

namespace elaine {

std::string_view to_string(EdgeAttrMode mode) {
  switch (mode) {
    case EdgeAttrMode::kNone:
      return "none";
    case EdgeAttrMode::kNodeAggregated:
      return "node_aggregated";
    case EdgeAttrMode::kCoupled:
      return "coupled";
  }
  return "none";
}

EdgeAttrMode parse_edge_attr_mode(std::string_view text) {
  if (text == "none") return EdgeAttrMode::kNone;
  if (text == "node_aggregated") return EdgeAttrMode::kNodeAggregated;
  if (text == "coupled") return EdgeAttrMode::kCoupled;
  throw ValidationError("unknown edge attribute mode '" + std::string(text) +
                        "' (expected none, node_aggregated or coupled)");
}

// ---------------------------------------------------------------------------
// Config

void ElaineConfig::validate() const {
  if (dim < 1) throw ValidationError("embedding dimension must be >= 1");
  for (auto h : encoder_hidden) {
    if (h < 1) throw ValidationError("encoder hidden layer sizes must be >= 1");
  }
  for (auto h : edge_decoder_hidden) {
    if (h < 1) throw ValidationError("edge decoder hidden layer sizes must be >= 1");
  }
  const std::pair<const char*, double> coefficients[] = {
      {"alpha_1", alpha_1}, {"alpha_v", alpha_v}, {"alpha_l", alpha_l}, {"alpha_r", alpha_r}};
  for (const auto& [name, value] : coefficients) {
    if (!std::isfinite(value) || value < 0.0) {
      throw ValidationError(std::string(name) + " must be a finite nonnegative number");
    }
  }
  if (!std::isfinite(beta_penalty) || beta_penalty < 1.0) {
    throw ValidationError("beta_penalty must be >= 1");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning_rate must be positive");
  }
  if (minibatch_size < 1) throw ValidationError("minibatch_size must be >= 1");
  walk.validate();
}

namespace {

std::string join_sizes(const std::vector<std::size_t>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(sizes[i]);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  value = trim(value);
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ValidationError("invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  value = trim(value);
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ValidationError("invalid boolean '" + std::string(value) + "' for " + std::string(key));
}

std::vector<std::size_t> parse_sizes(std::string_view key, std::string_view value) {
  std::vector<std::size_t> out;
  value = trim(value);
  if (value.empty() || value == "none" || value == "[]") return out;
  if (value.front() == '[' && value.back() == ']') value = value.substr(1, value.size() - 2);
  while (!value.empty()) {
    const auto comma = value.find(',');
    out.push_back(parse_number<std::size_t>(key, trim(value.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

bool apply_config_field(ElaineConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "dim") cfg.dim = parse_number<std::size_t>(key, value);
  else if (key == "encoder_hidden") cfg.encoder_hidden = parse_sizes(key, value);
  else if (key == "edge_decoder_hidden") cfg.edge_decoder_hidden = parse_sizes(key, value);
  else if (key == "alpha_1") cfg.alpha_1 = parse_number<double>(key, value);
  else if (key == "alpha_v") cfg.alpha_v = parse_number<double>(key, value);
  else if (key == "alpha_l") cfg.alpha_l = parse_number<double>(key, value);
  else if (key == "alpha_r") cfg.alpha_r = parse_number<double>(key, value);
  else if (key == "beta_penalty") cfg.beta_penalty = parse_number<double>(key, value);
  else if (key == "walks_per_node") cfg.walk.walks_per_node = parse_number<std::size_t>(key, value);
  else if (key == "walk_length") cfg.walk.walk_length = parse_number<std::size_t>(key, value);
  else if (key == "walk_seed") cfg.walk.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "use_vae") cfg.use_vae = parse_bool(key, value);
  else if (key == "use_higher_order") cfg.use_higher_order = parse_bool(key, value);
  else if (key == "use_roles") cfg.use_roles = parse_bool(key, value);
  else if (key == "edge_attr_mode") cfg.edge_attr_mode = parse_edge_attr_mode(trim(value));
  else if (key == "epochs") cfg.epochs = parse_number<std::size_t>(key, value);
  else if (key == "minibatch_size") cfg.minibatch_size = parse_number<std::size_t>(key, value);
  else if (key == "learning_rate") cfg.learning_rate = parse_number<double>(key, value);
  else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
  else return false;
  return true;
}

std::string ElaineConfig::to_text() const {
  std::ostringstream out;
  auto num = [](double x) { return detail::format_double(x); };
  out << "dim = " << dim << '\n'
      << "encoder_hidden = " << join_sizes(encoder_hidden) << '\n'
      << "edge_decoder_hidden = " << join_sizes(edge_decoder_hidden) << '\n'
      << "alpha_1 = " << num(alpha_1) << '\n'
      << "alpha_v = " << num(alpha_v) << '\n'
      << "alpha_l = " << num(alpha_l) << '\n'
      << "alpha_r = " << num(alpha_r) << '\n'
      << "beta_penalty = " << num(beta_penalty) << '\n'
      << "walks_per_node = " << walk.walks_per_node << '\n'
      << "walk_length = " << walk.walk_length << '\n'
      << "walk_seed = " << walk.seed << '\n'
      << "use_vae = " << (use_vae ? "true" : "false") << '\n'
      << "use_higher_order = " << (use_higher_order ? "true" : "false") << '\n'
      << "use_roles = " << (use_roles ? "true" : "false") << '\n'
      << "edge_attr_mode = " << to_string(edge_attr_mode) << '\n'
      << "epochs = " << epochs << '\n'
      << "minibatch_size = " << minibatch_size << '\n'
      << "learning_rate = " << num(learning_rate) << '\n'
      << "seed = " << seed << '\n';
  return out.str();
}

ElaineConfig ElaineConfig::from_text(std::string_view text) {
  ElaineConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = trim(detail::strip_comment(text.substr(0, nl)));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("<config>", line_no, "expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (!apply_config_field(cfg, key, line.substr(eq + 1))) {
      throw ValidationError("unknown config key '" + std::string(key) + "'");
    }
  }
  return cfg;
}

std::string ElaineConfig::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : to_text()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Features

Eigen::MatrixXd normalized_adjacency(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index u = 0; u < n; ++u) {
    const auto nbrs = g.neighbors(static_cast<NodeId>(u));
    if (nbrs.empty()) continue;
    const double share = 1.0 / static_cast<double>(nbrs.size());
    for (NodeId v : nbrs) a(u, v) = share;
  }
  return a;
}

FeatureMatrix assemble_features(const Graph& g, const EdgeAttributes& attrs,
                                const ElaineConfig& cfg, std::size_t jobs) {
  if (g.num_nodes() == 0 || g.num_edges() == 0) {
    throw ValidationError("cannot build features for a graph without edges");
  }
  const auto n = static_cast<Eigen::Index>(g.num_nodes());

  Eigen::MatrixXd neighborhood =
      cfg.use_higher_order ? build_similarity(g, cfg.walk, jobs) : normalized_adjacency(g);
  Eigen::MatrixXd roles;
  if (cfg.use_roles) roles = role_features(g, jobs).scaled;
  Eigen::MatrixXd aggregated;
  if (cfg.edge_attr_mode == EdgeAttrMode::kNodeAggregated) {
    aggregated = aggregate_edge_attributes(g, attrs);
  }

  FeatureMatrix f;
  f.neighborhood = {0, static_cast<std::size_t>(neighborhood.cols())};
  f.roles = {f.neighborhood.width, static_cast<std::size_t>(roles.cols())};
  f.attributes = {f.roles.offset + f.roles.width, static_cast<std::size_t>(aggregated.cols())};
  f.values.resize(n, static_cast<Eigen::Index>(f.attributes.offset + f.attributes.width));
  f.values.leftCols(neighborhood.cols()) = neighborhood;
  if (roles.cols() > 0) {
    f.values.middleCols(static_cast<Eigen::Index>(f.roles.offset), roles.cols()) = roles;
  }
  if (aggregated.cols() > 0) {
    f.values.rightCols(aggregated.cols()) = aggregated;
  }
  return f;
}

// ---------------------------------------------------------------------------
// Model

ElaineModel::ElaineModel(const ElaineConfig& cfg, std::size_t feature_width,
                         FeatureBlock neighborhood, std::size_t attr_dim)
    : config_(cfg),
      feature_width_(feature_width),
      neighborhood_(neighborhood),
      attr_dim_(cfg.edge_attr_mode == EdgeAttrMode::kCoupled ? attr_dim : 0),
      adam_(nn::AdamHyper{cfg.learning_rate}) {
  cfg.validate();
  ELAINE_EXPECTS(feature_width > 0, "feature width must be positive");
  ELAINE_EXPECTS(neighborhood.offset + neighborhood.width <= feature_width,
                 "neighborhood block outside the feature row");

  using nn::Activation;
  std::size_t width = feature_width;
  for (std::size_t h : cfg.encoder_hidden) {
    encoder_.hidden.emplace_back(width, h, Activation::kRelu);
    width = h;
  }
  encoder_.head = nn::GaussianHead(width, cfg.dim);

  std::vector<std::size_t> decoder_hidden(cfg.encoder_hidden.rbegin(), cfg.encoder_hidden.rend());
  feature_decoder_ = nn::make_stack(cfg.dim, decoder_hidden, feature_width, Activation::kRelu,
                                    Activation::kSigmoid);
  if (cfg.edge_attr_mode == EdgeAttrMode::kCoupled) {
    ELAINE_EXPECTS(attr_dim > 0, "coupled mode needs edge attributes of positive dimension");
    edge_decoder_ = nn::make_stack(2 * cfg.dim, cfg.edge_decoder_hidden, attr_dim,
                                   Activation::kRelu, Activation::kSigmoid);
  }

  Rng rng = make_rng(cfg.seed, 0);
  nn::glorot_init(encoder_.hidden, rng);
  nn::glorot_init(encoder_.head.mean, rng);
  nn::glorot_init(encoder_.head.log_variance, rng);
  nn::glorot_init(feature_decoder_, rng);
  nn::glorot_init(edge_decoder_, rng);
}

const Encoder& ElaineModel::branch_encoder(int side) const {
  ELAINE_EXPECTS(side == 0 || side == 1, "branch side must be 0 or 1");
  return encoder_;
}

const nn::LayerStack& ElaineModel::branch_decoder(int side) const {
  ELAINE_EXPECTS(side == 0 || side == 1, "branch side must be 0 or 1");
  return feature_decoder_;
}

std::vector<nn::DenseLayer*> ElaineModel::layers() {
  std::vector<nn::DenseLayer*> out;
  for (auto& l : encoder_.hidden) out.push_back(&l);
  out.push_back(&encoder_.head.mean);
  if (config_.use_vae) out.push_back(&encoder_.head.log_variance);
  for (auto& l : feature_decoder_) out.push_back(&l);
  for (auto& l : edge_decoder_) out.push_back(&l);
  return out;
}

std::vector<const nn::DenseLayer*> ElaineModel::layers() const {
  auto mutable_layers = const_cast<ElaineModel*>(this)->layers();
  return {mutable_layers.begin(), mutable_layers.end()};
}

Eigen::MatrixXd ElaineModel::encode_mean(const Eigen::MatrixXd& features) const {
  ELAINE_EXPECTS(static_cast<std::size_t>(features.cols()) == feature_width_,
                 "feature width does not match the model");
  return encoder_.head.mean.apply(nn::forward(encoder_.hidden, features));
}

// ---------------------------------------------------------------------------
// Loss

bool LossTerms::finite() const noexcept {
  return std::isfinite(neighborhood) && std::isfinite(edge) && std::isfinite(variational) &&
         std::isfinite(lasso) && std::isfinite(ridge) && std::isfinite(total);
}

EdgeBatch make_batch(const Graph& g, const EdgeAttributes& attrs,
                     std::span<const std::size_t> edge_indices) {
  EdgeBatch batch;
  const auto edges = g.edges();
  const bool with_attrs = attrs.size() == g.num_edges() && attrs.dim() > 0;
  batch.left.reserve(edge_indices.size());
  batch.right.reserve(edge_indices.size());
  batch.attributes.resize(static_cast<Eigen::Index>(edge_indices.size()),
                          with_attrs ? static_cast<Eigen::Index>(attrs.dim()) : 0);
  for (std::size_t b = 0; b < edge_indices.size(); ++b) {
    const auto idx = edge_indices[b];
    ELAINE_EXPECTS(idx < edges.size(), "edge index out of range");
    batch.left.push_back(edges[idx].u);
    batch.right.push_back(edges[idx].v);
    if (with_attrs) batch.attributes.row(static_cast<Eigen::Index>(b)) = attrs.row(idx);
  }
  return batch;
}

Eigen::MatrixXd penalty_mask(const Eigen::MatrixXd& f, double beta) {
  return (f.array() > 0.0).select(Eigen::MatrixXd::Constant(f.rows(), f.cols(), beta), 1.0);
}

LossEvaluation evaluate_loss(const ElaineModel& model, const FeatureMatrix& features,
                             const EdgeBatch& batch, const Eigen::MatrixXd& eps,
                             bool with_gradient) {
  const ElaineConfig& cfg = model.config();
  const auto b = static_cast<Eigen::Index>(batch.size());
  const auto d = static_cast<Eigen::Index>(cfg.dim);
  ELAINE_EXPECTS(b > 0, "empty batch");
  ELAINE_EXPECTS(batch.right.size() == batch.left.size(), "ragged batch");
  ELAINE_EXPECTS(features.width() == model.feature_width(), "feature width does not match model");

  Eigen::MatrixXd x(2 * b, features.values.cols());
  for (Eigen::Index r = 0; r < b; ++r) {
    x.row(r) = features.values.row(batch.left[static_cast<std::size_t>(r)]);
    x.row(b + r) = features.values.row(batch.right[static_cast<std::size_t>(r)]);
  }

  const Encoder& enc = model.encoder();
  nn::ForwardCache enc_cache;
  const Eigen::MatrixXd h = nn::forward(enc.hidden, x, &enc_cache);

  nn::LatentSample latent;
  Eigen::MatrixXd z;
  if (cfg.use_vae) {
    ELAINE_EXPECTS(eps.rows() == 2 * b && eps.cols() == d, "noise must be 2*batch x dim");
    latent = nn::sample_latent(enc.head, h, eps);
    z = latent.z;
  } else {
    z = enc.head.mean.apply(h);
  }

  nn::ForwardCache dec_cache;
  const Eigen::MatrixXd f_hat = nn::forward(model.feature_decoder(), z, &dec_cache);
  const Eigen::MatrixXd mask = penalty_mask(x, cfg.beta_penalty);
  const Eigen::MatrixXd residual = ((f_hat - x).array() * mask.array()).matrix();

  LossEvaluation eval;
  LossTerms& t = eval.terms;
  t.neighborhood = residual.squaredNorm();

  const bool coupled = model.has_edge_decoder();
  Eigen::MatrixXd z_pair;
  nn::ForwardCache edge_cache;
  Eigen::MatrixXd edge_diff;
  if (coupled) {
    ELAINE_EXPECTS(static_cast<std::size_t>(batch.attributes.cols()) == model.attr_dim(),
                   "batch attributes do not match the edge decoder");
    z_pair.resize(b, 2 * d);
    z_pair.leftCols(d) = z.topRows(b);
    z_pair.rightCols(d) = z.bottomRows(b);
    edge_diff = nn::forward(model.edge_decoder(), z_pair, &edge_cache) - batch.attributes;
    t.edge = edge_diff.squaredNorm();
  }
  if (cfg.use_vae) t.variational = nn::kl_unit_gaussian(latent.mean, latent.log_variance);

  const auto layers = model.layers();
  for (const nn::DenseLayer* layer : layers) {
    t.lasso += layer->weights.cwiseAbs().sum();
    t.ridge += layer->weights.squaredNorm();
  }
  t.total = t.neighborhood + cfg.alpha_1 * t.edge + cfg.alpha_v * t.variational +
            cfg.alpha_l * t.lasso + cfg.alpha_r * t.ridge;

  if (!with_gradient) return eval;

  const Eigen::MatrixXd grad_f_hat = (2.0 * residual.array() * mask.array()).matrix();
  auto dec_back = nn::backward(model.feature_decoder(), grad_f_hat, dec_cache);
  Eigen::MatrixXd grad_z = std::move(dec_back.input_grad);

  nn::BackwardResult edge_back;
  if (coupled) {
    edge_back = nn::backward(model.edge_decoder(), 2.0 * cfg.alpha_1 * edge_diff, edge_cache);
    grad_z.topRows(b) += edge_back.input_grad.leftCols(d);
    grad_z.bottomRows(b) += edge_back.input_grad.rightCols(d);
  }

  Eigen::MatrixXd grad_h;
  nn::LayerGrad grad_mean;
  nn::LayerGrad grad_log_variance;
  if (cfg.use_vae) {
    const auto kl = nn::kl_unit_gaussian_grad(latent.mean, latent.log_variance);
    auto lat = nn::backward_latent(enc.head, h, latent, eps, grad_z, cfg.alpha_v * kl.mean,
                                   cfg.alpha_v * kl.log_variance);
    grad_h = std::move(lat.input_grad);
    grad_mean = std::move(lat.mean);
    grad_log_variance = std::move(lat.log_variance);
  } else {
    grad_mean.weights = h.transpose() * grad_z;
    grad_mean.bias = grad_z.colwise().sum().transpose();
    grad_h = grad_z * enc.head.mean.weights.transpose();
  }
  auto enc_back = nn::backward(enc.hidden, grad_h, enc_cache);

  auto& grads = eval.grads;
  grads.reserve(layers.size());
  for (auto& g : enc_back.grads) grads.push_back(std::move(g));
  grads.push_back(std::move(grad_mean));
  if (cfg.use_vae) grads.push_back(std::move(grad_log_variance));
  for (auto& g : dec_back.grads) grads.push_back(std::move(g));
  for (auto& g : edge_back.grads) grads.push_back(std::move(g));
  ELAINE_EXPECTS(grads.size() == layers.size(), "gradient list does not match layers");

  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& w = layers[k]->weights;
    if (cfg.alpha_l > 0.0) grads[k].weights += cfg.alpha_l * w.cwiseSign();
    if (cfg.alpha_r > 0.0) grads[k].weights += 2.0 * cfg.alpha_r * w;
  }
  return eval;
}

// ---------------------------------------------------------------------------
// Inference

Embedding embed(const ElaineModel& model, const FeatureMatrix& features, std::uint64_t graph_hash) {
  return {model.encode_mean(features.values), model.config().fingerprint(), graph_hash};
}

Eigen::MatrixXd reconstruct_neighborhood(const ElaineModel& model, const Eigen::MatrixXd& y) {
  ELAINE_EXPECTS(static_cast<std::size_t>(y.cols()) == model.config().dim,
                 "embedding dimension does not match the model");
  const Eigen::MatrixXd f_hat = nn::forward(model.feature_decoder(), y);
  const auto block = model.neighborhood();
  return f_hat.middleCols(static_cast<Eigen::Index>(block.offset),
                          static_cast<Eigen::Index>(block.width));
}

double score_edge(const ElaineModel& model, const Eigen::MatrixXd& y, NodeId u, NodeId v) {
  ELAINE_EXPECTS(u != v, "score_edge needs two distinct nodes");
  const auto n = y.rows();
  ELAINE_EXPECTS(u >= 0 && v >= 0 && u < n && v < n, "node outside the embedding");
  ELAINE_EXPECTS(model.neighborhood().width == static_cast<std::size_t>(n),
                 "neighborhood block does not cover the embedded nodes");
  Eigen::MatrixXd pair(2, y.cols());
  pair.row(0) = y.row(u);
  pair.row(1) = y.row(v);
  const Eigen::MatrixXd rec = reconstruct_neighborhood(model, pair);
  return 0.5 * (rec(0, v) + rec(1, u));
}

Eigen::MatrixXd score_matrix(const ElaineModel& model, const Eigen::MatrixXd& y) {
  ELAINE_EXPECTS(model.neighborhood().width == static_cast<std::size_t>(y.rows()),
                 "neighborhood block does not cover the embedded nodes");
  const Eigen::MatrixXd rec = reconstruct_neighborhood(model, y);
  return 0.5 * (rec + rec.transpose());
}

Eigen::VectorXd predict_edge_attributes(const ElaineModel& model, const Eigen::MatrixXd& y,
                                        NodeId u, NodeId v) {
  ELAINE_EXPECTS(model.has_edge_decoder(), "model was trained without an edge decoder");
  ELAINE_EXPECTS(u >= 0 && v >= 0 && u < y.rows() && v < y.rows(), "node outside the embedding");
  const auto d = y.cols();
  Eigen::MatrixXd pair(1, 2 * d);
  pair.leftCols(d) = y.row(u);
  pair.rightCols(d) = y.row(v);
  return nn::forward(model.edge_decoder(), pair).row(0).transpose();
}

// ---------------------------------------------------------------------------
// Files

void write_embedding(std::ostream& out, const Embedding& emb) {
  out << emb.values.rows() << ' ' << emb.values.cols() << '\n';
  for (Eigen::Index u = 0; u < emb.values.rows(); ++u) {
    out << u;
    for (Eigen::Index c = 0; c < emb.values.cols(); ++c) {
      out << ' ' << detail::format_double17(emb.values(u, c));
    }
    out << '\n';
  }
}

void save_embedding(const std::filesystem::path& path, const Embedding& emb) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_embedding(out, emb);
}

Embedding load_embedding(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(path.string(), 1, "missing header");
  auto header = detail::tokenize(line);
  if (header.size() != 2) throw ParseError(path.string(), 1, "expected \"n d\"");
  const auto n = detail::parse_node(header[0], path.string(), 1);
  const auto d = detail::parse_node(header[1], path.string(), 1);
  Embedding emb;
  emb.values = Eigen::MatrixXd::Zero(n, d);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = detail::tokenize(line);
    if (tokens.empty()) continue;
    if (static_cast<Eigen::Index>(tokens.size()) != d + 1) {
      throw ParseError(path.string(), line_no, "expected node id and " + std::to_string(d) + " values");
    }
    const auto u = detail::parse_node(tokens[0], path.string(), line_no);
    if (u >= n) throw ParseError(path.string(), line_no, "node id outside header range");
    for (Eigen::Index c = 0; c < d; ++c) {
      emb.values(u, c) = detail::parse_double(tokens[static_cast<std::size_t>(c) + 1], path.string(), line_no);
    }
    seen[static_cast<std::size_t>(u)] = true;
  }
  for (std::size_t u = 0; u < seen.size(); ++u) {
    if (!seen[u]) throw ValidationError(path.string() + ": missing row for node " + std::to_string(u));
  }
  return emb;
}

namespace {
constexpr char kModelMagic[8] = {'E', 'L', 'A', 'I', 'N', 'E', 'M', '1'};

void put_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }
std::uint64_t take_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  if (!in) throw ValidationError("model file is truncated");
  return v;
}
}  // namespace

void write_model(std::ostream& out, const ElaineModel& model) {
  const std::string text = model.config().to_text();
  out.write(kModelMagic, sizeof(kModelMagic));
  put_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  put_u64(out, model.feature_width());
  put_u64(out, model.neighborhood().offset);
  put_u64(out, model.neighborhood().width);
  put_u64(out, model.attr_dim());
  const auto layers = model.layers();
  nn::write_parameters(out, layers, model.adam());
}

ElaineModel read_model(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(magic, magic + 8, kModelMagic)) throw ValidationError("not a model file");
  const auto text_size = take_u64(in);
  std::string text(text_size, '\0');
  in.read(text.data(), static_cast<std::streamsize>(text_size));
  if (!in) throw ValidationError("model file is truncated");
  const auto cfg = ElaineConfig::from_text(text);
  const auto width = take_u64(in);
  FeatureBlock block;
  block.offset = take_u64(in);
  block.width = take_u64(in);
  const auto attr_dim = take_u64(in);
  ElaineModel model(cfg, width, block, attr_dim);
  auto layers = model.layers();
  nn::read_parameters(in, layers, model.adam());
  const auto& moments = model.adam().first_moments();
  if (!moments.empty()) {
    if (moments.size() != 2 * layers.size()) throw ValidationError("optimizer state does not match model");
    for (std::size_t k = 0; k < layers.size(); ++k) {
      if (moments[2 * k].size() != static_cast<std::size_t>(layers[k]->weights.size()) ||
          moments[2 * k + 1].size() != static_cast<std::size_t>(layers[k]->bias.size())) {
        throw ValidationError("optimizer state does not match model");
      }
    }
  }
  return model;
}

void save_model(const std::filesystem::path& path, const ElaineModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_model(out, model);
}

ElaineModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_model(in);
}

}  // namespace elaine
