#include "elaine_cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "elaine/errors.hpp"
#include "elaine/eval.hpp"
#include "elaine/parallel.hpp"

namespace elaine::cli {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_value(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError("bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(parse_value<double>(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string join(const std::vector<double>& values) {
  std::ostringstream s;
  for (std::size_t i = 0; i < values.size(); ++i) s << (i ? "," : "") << values[i];
  return s.str();
}

class Log {
 public:
  Log(std::ostream& err, int level) : err_(err), level_(level) {}
  void info(const std::string& msg) const {
    if (level_ >= 1) err_ << "[elaine] " << msg << '\n';
  }
  void debug(const std::string& msg) const {
    if (level_ >= 2) err_ << "[elaine] " << msg << '\n';
  }
  void warn(const std::string& msg) const { err_ << "[elaine] warning: " << msg << '\n'; }

 private:
  std::ostream& err_;
  int level_;
};

// ---------------------------------------------------------------------------
// Pipelines

struct Inputs {
  Graph graph;
  EdgeAttributes attrs;
};

bool needs_attributes(const ElaineConfig& cfg) {
  return cfg.edge_attr_mode != EdgeAttrMode::kNone;
}

void require_path(const fs::path& path, std::string_view flag) {
  if (path.empty()) throw UsageError(std::string(flag) + " is required");
  if (!fs::exists(path)) {
    throw UsageError(std::string(flag) + ": no such file '" + path.string() + "'");
  }
}

Inputs load_inputs(const RunConfig& cfg, bool attrs_required, const Log& log) {
  require_path(cfg.graph, "--graph");
  if (attrs_required) {
    if (cfg.edge_attrs.empty()) {
      throw UsageError("edge_attr_mode " + std::string(to_string(cfg.model.edge_attr_mode)) +
                       " needs --edge-attrs");
    }
  }
  if (!cfg.edge_attrs.empty()) require_path(cfg.edge_attrs, "--edge-attrs");

  Inputs in;
  in.graph = load_graph(cfg.graph);
  log.info("graph " + cfg.graph.string() + ": n=" + std::to_string(in.graph.num_nodes()) +
           " m=" + std::to_string(in.graph.num_edges()));
  if (!cfg.edge_attrs.empty()) {
    in.attrs = load_edge_attributes(cfg.edge_attrs, in.graph);
    log.info("edge attributes: p=" + std::to_string(in.attrs.dim()));
    if (in.attrs.missing_count() > 0) {
      log.warn(std::to_string(in.attrs.missing_count()) +
               " edges have no attribute line; using zero vectors");
    }
  } else {
    in.attrs = EdgeAttributes::zeros(in.graph, 0);
  }
  return in;
}

eval::LinkPredOptions linkpred_options(const RunConfig& cfg) {
  eval::LinkPredOptions o;
  o.holdout_frac = cfg.holdout;
  o.max_eval_nodes = cfg.max_eval_nodes;
  o.repeats = cfg.repeats;
  o.seed = cfg.eval_seed;
  o.jobs = cfg.jobs;
  return o;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  return f;
}

void report_failures(const std::vector<eval::TableRow>& rows, const Log& log) {
  for (const auto& row : rows) {
    for (const auto& f : row.report.failures) log.warn(row.label + " " + f);
  }
}

Embedding train_and_embed(const RunConfig& cfg, const Inputs& in, const Log& log) {
  const auto features = assemble_features(in.graph, in.attrs, cfg.model, cfg.jobs);
  log.debug("feature width " + std::to_string(features.width()));
  const auto trained = train(features, in.graph, in.attrs, cfg.model);
  if (!trained.history.empty()) {
    const auto& last = trained.history.back();
    std::ostringstream msg;
    msg << "trained " << trained.history.size() << " epochs, final L=" << last.total
        << " (L_n=" << last.neighborhood << ", L_e=" << last.edge << ", L_v=" << last.variational
        << ")";
    log.info(msg.str());
  }
  return embed(trained.model, features, in.graph.fingerprint());
}

int cmd_embed(const RunConfig& cfg, std::ostream&, const Log& log) {
  const auto in = load_inputs(cfg, needs_attributes(cfg.model), log);
  const auto emb = train_and_embed(cfg, in, log);
  fs::path path = cfg.out;
  if (fs::is_directory(path)) path /= "embedding.txt";
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_embedding(path, emb);
  log.info("wrote " + path.string());
  return 0;
}

int cmd_linkpred(const RunConfig& cfg, std::ostream& out, const Log& log) {
  const auto in = load_inputs(cfg, needs_attributes(cfg.model), log);
  const auto report =
      eval::run_link_prediction(in.graph, in.attrs, cfg.model, linkpred_options(cfg));
  const std::vector<eval::TableRow> rows{{"ELAINE", report}};
  report_failures(rows, log);
  fs::create_directories(cfg.out);
  auto f = open_output(cfg.out / "linkpred.csv");
  eval::write_report_csv(f, "method", rows);
  eval::print_table(out, "method", rows);
  return 0;
}

int cmd_nodeclass(const RunConfig& cfg, std::ostream& out, const Log& log) {
  const auto in = load_inputs(cfg, needs_attributes(cfg.model), log);
  require_path(cfg.labels, "--labels");
  const auto labels = load_node_labels(cfg.labels, in.graph.num_nodes());
  const auto emb = train_and_embed(cfg, in, log);
  const auto rows = eval::run_node_classification(emb.values, labels, cfg.train_ratios,
                                                  cfg.repeats, cfg.eval_seed);
  fs::create_directories(cfg.out);
  auto f = open_output(cfg.out / "nodeclass.csv");
  eval::write_classification_csv(f, rows);
  out << "train_ratio  micro_f1            macro_f1\n";
  for (const auto& r : rows) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-11.2f  %.4f +/- %.4f  %.4f +/- %.4f\n", r.train_ratio,
                  r.micro_f1.mean, r.micro_f1.stddev, r.macro_f1.mean, r.macro_f1.stddev);
    out << line;
  }
  return 0;
}

int cmd_ablate(const RunConfig& cfg, std::ostream& out, const Log& log) {
  const auto in = load_inputs(cfg, true, log);
  const auto rows = eval::run_ablation(in.graph, in.attrs, cfg.model, linkpred_options(cfg));
  report_failures(rows, log);
  fs::create_directories(cfg.out);
  {
    auto f = open_output(cfg.out / "ablation.csv");
    eval::write_map_csv(f, "variant", rows);
  }
  {
    auto f = open_output(cfg.out / "ablation_metrics.csv");
    eval::write_report_csv(f, "variant", rows);
  }
  eval::print_table(out, "variant", rows);
  return 0;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, const Log& log) {
  const auto param = eval::parse_sweep_param(cfg.sweep_param);
  const auto values =
      cfg.sweep_values.empty() ? default_sweep_values(to_string(param)) : cfg.sweep_values;
  const auto in = load_inputs(cfg, needs_attributes(cfg.model), log);
  const auto rows =
      eval::run_sweep(in.graph, in.attrs, cfg.model, param, values, linkpred_options(cfg));
  report_failures(rows, log);
  fs::create_directories(cfg.out);
  const std::string label(to_string(param));
  {
    auto f = open_output(cfg.out / "sweep.csv");
    eval::write_map_csv(f, label, rows);
  }
  {
    auto f = open_output(cfg.out / "sweep_metrics.csv");
    eval::write_report_csv(f, label, rows);
  }
  eval::print_table(out, label, rows);
  return 0;
}

int cmd_gen_synthetic(const RunConfig& cfg, std::ostream&, const Log& log) {
  SyntheticGraph s;
  try {
    s = generate_sbm_with_edge_topics(cfg.synthetic);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  fs::create_directories(cfg.out);
  save_graph(s.graph, cfg.out / "graph.tsv");
  save_edge_attributes(s.graph, s.attributes, cfg.out / "edge_attrs.tsv");
  save_node_labels(s.labels, cfg.out / "labels.tsv");
  log.info("wrote SBM n=" + std::to_string(s.graph.num_nodes()) +
           " m=" + std::to_string(s.graph.num_edges()) + " to " + cfg.out.string());
  return 0;
}

// ---------------------------------------------------------------------------
// Flags

struct FlagSpec {
  const char* name;
  const char* key;
  const char* help;
};

using Assignments = std::vector<std::pair<std::string, std::string>>;

std::string num(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

std::string sizes(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s.empty() ? "none" : s;
}

void add_value_flag(CLI::App* app, Assignments& assigned, const FlagSpec& spec,
                    const std::string& default_text) {
  app->add_option_function<std::string>(
         spec.name, [&assigned, key = spec.key](const std::string& v) { assigned.emplace_back(key, v); },
         spec.help)
      ->default_str(default_text)
      ->type_name("VALUE");
}

void add_model_flags(CLI::App* app, Assignments& a) {
  const ElaineConfig d;
  add_value_flag(app, a, {"--dim", "dim", "embedding dimension"}, std::to_string(d.dim));
  add_value_flag(app, a, {"--encoder-hidden", "encoder_hidden", "encoder hidden sizes, comma separated"},
                 sizes(d.encoder_hidden));
  add_value_flag(app, a,
                 {"--edge-decoder-hidden", "edge_decoder_hidden",
                  "edge decoder hidden sizes, comma separated or none"},
                 sizes(d.edge_decoder_hidden));
  add_value_flag(app, a, {"--alpha-1", "alpha_1", "edge attribute reconstruction weight"},
                 num(d.alpha_1));
  add_value_flag(app, a, {"--alpha-v", "alpha_v", "KL weight"}, num(d.alpha_v));
  add_value_flag(app, a, {"--alpha-l", "alpha_l", "L1 weight penalty"}, num(d.alpha_l));
  add_value_flag(app, a, {"--alpha-r", "alpha_r", "squared L2 weight penalty"}, num(d.alpha_r));
  add_value_flag(app, a, {"--beta", "beta_penalty", "reconstruction weight on nonzero inputs"},
                 num(d.beta_penalty));
  add_value_flag(app, a, {"--walks-per-node", "walks_per_node", "random walks per node"},
                 std::to_string(d.walk.walks_per_node));
  add_value_flag(app, a, {"--walk-length", "walk_length", "steps per random walk"},
                 std::to_string(d.walk.walk_length));
  add_value_flag(app, a, {"--walk-seed", "walk_seed", "random walk seed"}, std::to_string(d.walk.seed));
  add_value_flag(app, a, {"--epochs", "epochs", "training epochs"}, std::to_string(d.epochs));
  add_value_flag(app, a, {"--minibatch-size", "minibatch_size", "edges per minibatch"},
                 std::to_string(d.minibatch_size));
  add_value_flag(app, a, {"--learning-rate", "learning_rate", "Adam step size"},
                 num(d.learning_rate));
  add_value_flag(app, a,
                 {"--edge-attr-mode", "edge_attr_mode", "none, node_aggregated or coupled"},
                 std::string(to_string(d.edge_attr_mode)));
  app->add_flag_callback("--no-vae", [&a] { a.emplace_back("use_vae", "false"); },
                         "plain autoencoder instead of the VAE (default: VAE on)");
  app->add_flag_callback("--no-higher-order", [&a] { a.emplace_back("use_higher_order", "false"); },
                         "use the normalized adjacency instead of walk similarity (default: walks on)");
  app->add_flag_callback("--no-roles", [&a] { a.emplace_back("use_roles", "false"); },
                         "drop the role features (default: roles on)");
}

void add_eval_flags(CLI::App* app, Assignments& a) {
  const RunConfig d;
  add_value_flag(app, a, {"--repeats", "repeats", "independent splits"}, std::to_string(d.repeats));
  add_value_flag(app, a, {"--holdout", "holdout", "fraction of edges held out"}, num(d.holdout));
  add_value_flag(app, a, {"--max-eval-nodes", "max_eval_nodes", "nodes sampled for ranking"},
                 std::to_string(d.max_eval_nodes));
}

void add_data_flags(CLI::App* app, Assignments& a) {
  add_value_flag(app, a, {"--graph", "graph", "edge list file (u v [w])"}, "none");
  add_value_flag(app, a, {"--edge-attrs", "edge_attrs", "edge attribute file (u v a1 .. ap)"},
                 "none");
}

struct Common {
  std::string config;
  int verbose = 0;
  bool quiet = false;
};

void add_common_flags(CLI::App* app, Assignments& a, Common& c, const std::string& out_help) {
  app->add_option("--config", c.config, "config file (key = value); flags override it")
      ->type_name("FILE");
  add_value_flag(app, a, {"--out", "out", out_help.c_str()}, ".");
  add_value_flag(app, a, {"--seed", "seed", "seed for every random stream"}, "0");
  add_value_flag(app, a, {"--jobs", "jobs", "worker threads"},
                 "machine parallelism (" + std::to_string(default_jobs()) + ")");
  app->add_flag_function(
      "-v,--verbose", [&c](std::int64_t count) { c.verbose += static_cast<int>(count); },
      "more log output on stderr (repeat for debug)");
  app->add_flag("-q,--quiet", c.quiet, "only warnings and errors on stderr");
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

void RunConfig::validate() const {
  model.validate();
  if (repeats < 1) throw ValidationError("repeats must be >= 1");
  if (!(holdout > 0.0 && holdout < 1.0)) throw ValidationError("holdout must lie in (0, 1)");
  if (max_eval_nodes < 1) throw ValidationError("max_eval_nodes must be >= 1");
  if (train_ratios.empty()) throw ValidationError("train_ratios must not be empty");
  for (double r : train_ratios) {
    if (!(r > 0.0 && r < 1.0)) throw ValidationError("train ratios must lie in (0, 1)");
  }
  const auto param = eval::parse_sweep_param(sweep_param);
  for (double v : sweep_values) eval::with_param(model, param, v);
}

std::vector<double> default_sweep_values(std::string_view param) {
  if (eval::parse_sweep_param(param) == eval::SweepParam::kDim) {
    return {2, 4, 8, 16, 32, 64, 128, 256};
  }
  return {0.01, 0.1, 1, 10, 100};
}

bool apply_run_field(RunConfig& cfg, std::string_view key, std::string_view value) {
  const auto v = trim(value);
  if (key == "seed") {
    const auto s = parse_value<std::uint64_t>(key, v);
    cfg.model.seed = s;
    cfg.model.walk.seed = s;
    cfg.eval_seed = s;
    cfg.synthetic.seed = s;
  } else if (key == "graph") cfg.graph = std::string(v);
  else if (key == "edge_attrs") cfg.edge_attrs = std::string(v);
  else if (key == "labels") cfg.labels = std::string(v);
  else if (key == "out") cfg.out = std::string(v);
  else if (key == "repeats") cfg.repeats = parse_value<std::size_t>(key, v);
  else if (key == "holdout") cfg.holdout = parse_value<double>(key, v);
  else if (key == "max_eval_nodes") cfg.max_eval_nodes = parse_value<std::size_t>(key, v);
  else if (key == "eval_seed") cfg.eval_seed = parse_value<std::uint64_t>(key, v);
  else if (key == "train_ratios") cfg.train_ratios = parse_list(key, v);
  else if (key == "sweep_param") cfg.sweep_param = std::string(v);
  else if (key == "sweep_values") cfg.sweep_values = parse_list(key, v);
  else if (key == "blocks") cfg.synthetic.blocks = parse_value<std::size_t>(key, v);
  else if (key == "nodes_per_block") cfg.synthetic.nodes_per_block = parse_value<std::size_t>(key, v);
  else if (key == "p_in") cfg.synthetic.p_in = parse_value<double>(key, v);
  else if (key == "p_out") cfg.synthetic.p_out = parse_value<double>(key, v);
  else if (key == "topics") cfg.synthetic.topics = parse_value<std::size_t>(key, v);
  else if (key == "noise") cfg.synthetic.noise = parse_value<double>(key, v);
  else if (key == "synthetic_seed") cfg.synthetic.seed = parse_value<std::uint64_t>(key, v);
  else if (key == "jobs") cfg.jobs = parse_value<std::size_t>(key, v);
  else if (key == "verbosity") cfg.verbosity = parse_value<int>(key, v);
  else return apply_config_field(cfg.model, key, v);
  return true;
}

void read_config(std::istream& in, RunConfig& cfg, const std::string& source) {
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(source + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (!apply_run_field(cfg, key, line.substr(eq + 1))) {
      throw UsageError(source + ":" + std::to_string(line_no) + ": unknown config key '" +
                       std::string(key) + "'");
    }
  }
}

RunConfig load_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file '" + path.string() + "'");
  RunConfig cfg;
  read_config(f, cfg, path.string());
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Entry point

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Edge-label-aware graph embedding with a coupled variational autoencoder."};
  app.name("elaine");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  Assignments assigned;
  Common common;
  using Pipeline = int (*)(const RunConfig&, std::ostream&, const Log&);
  std::vector<std::pair<CLI::App*, Pipeline>> commands;

  auto* embed_cmd = app.add_subcommand("embed", "train on a graph and write node embeddings");
  add_common_flags(embed_cmd, assigned, common,
                   "embedding file, or a directory to receive embedding.txt");
  add_data_flags(embed_cmd, assigned);
  add_model_flags(embed_cmd, assigned);
  commands.emplace_back(embed_cmd, &cmd_embed);

  auto* linkpred_cmd = app.add_subcommand("linkpred", "held-out edge link prediction");
  add_common_flags(linkpred_cmd, assigned, common, "output directory (linkpred.csv)");
  add_data_flags(linkpred_cmd, assigned);
  add_model_flags(linkpred_cmd, assigned);
  add_eval_flags(linkpred_cmd, assigned);
  commands.emplace_back(linkpred_cmd, &cmd_linkpred);

  auto* nodeclass_cmd = app.add_subcommand("nodeclass", "multi-label node classification");
  add_common_flags(nodeclass_cmd, assigned, common, "output directory (nodeclass.csv)");
  add_data_flags(nodeclass_cmd, assigned);
  add_value_flag(nodeclass_cmd, assigned, {"--labels", "labels", "node label file (u l1,l2,..)"},
                 "none");
  add_model_flags(nodeclass_cmd, assigned);
  add_value_flag(nodeclass_cmd, assigned, {"--repeats", "repeats", "splits per train ratio"},
                 std::to_string(RunConfig{}.repeats));
  add_value_flag(nodeclass_cmd, assigned,
                 {"--train-ratios", "train_ratios", "comma separated training fractions"},
                 join(RunConfig{}.train_ratios));
  commands.emplace_back(nodeclass_cmd, &cmd_nodeclass);

  auto* ablate_cmd = app.add_subcommand("ablate", "link prediction for the six model variants");
  add_common_flags(ablate_cmd, assigned, common,
                   "output directory (ablation.csv, ablation_metrics.csv)");
  add_data_flags(ablate_cmd, assigned);
  add_model_flags(ablate_cmd, assigned);
  add_eval_flags(ablate_cmd, assigned);
  commands.emplace_back(ablate_cmd, &cmd_ablate);

  auto* sweep_cmd = app.add_subcommand("sweep", "link prediction over a parameter grid");
  add_common_flags(sweep_cmd, assigned, common, "output directory (sweep.csv, sweep_metrics.csv)");
  add_data_flags(sweep_cmd, assigned);
  add_model_flags(sweep_cmd, assigned);
  add_eval_flags(sweep_cmd, assigned);
  add_value_flag(sweep_cmd, assigned, {"--param", "sweep_param", "dim or alpha_1"}, "dim");
  add_value_flag(sweep_cmd, assigned,
                 {"--values", "sweep_values", "comma separated grid"},
                 "dim: " + join(default_sweep_values("dim")) +
                     "; alpha_1: " + join(default_sweep_values("alpha_1")));
  commands.emplace_back(sweep_cmd, &cmd_sweep);

  auto* gen_cmd = app.add_subcommand("gen-synthetic", "write an SBM with planted edge topics");
  {
    const SbmParams d;
    add_common_flags(gen_cmd, assigned, common,
                     "output directory (graph.tsv, edge_attrs.tsv, labels.tsv)");
    add_value_flag(gen_cmd, assigned, {"--blocks", "blocks", "number of blocks"},
                   std::to_string(d.blocks));
    add_value_flag(gen_cmd, assigned, {"--nodes-per-block", "nodes_per_block", "block size"},
                   std::to_string(d.nodes_per_block));
    add_value_flag(gen_cmd, assigned, {"--p-in", "p_in", "intra-block edge probability"},
                   num(d.p_in));
    add_value_flag(gen_cmd, assigned, {"--p-out", "p_out", "inter-block edge probability"},
                   num(d.p_out));
    add_value_flag(gen_cmd, assigned, {"--topics", "topics", "edge attribute dimension"},
                   std::to_string(d.topics));
    add_value_flag(gen_cmd, assigned, {"--noise", "noise", "uniform blend into intra-block topics"},
                   num(d.noise));
  }
  commands.emplace_back(gen_cmd, &cmd_gen_synthetic);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  RunConfig cfg;
  try {
    if (!common.config.empty()) cfg = load_config(common.config);
    for (const auto& [key, value] : assigned) {
      if (!apply_run_field(cfg, key, value)) throw UsageError("unknown setting '" + key + "'");
    }
    if (common.quiet) cfg.verbosity = 0;
    cfg.verbosity += common.verbose;
    if (cfg.jobs == 0) cfg.jobs = default_jobs();
    cfg.validate();
  } catch (const UsageError& e) {
    err << "elaine: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "elaine: " << e.what() << '\n';
    return 2;
  }

  const Log log(err, cfg.verbosity);
  try {
    for (const auto& [sub, pipeline] : commands) {
      if (sub->parsed()) {
        log.debug("config:\n" + cfg.model.to_text());
        return pipeline(cfg, out, log);
      }
    }
    throw UsageError("no subcommand given");
  } catch (const UsageError& e) {
    err << "elaine: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "elaine: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace elaine::cli
