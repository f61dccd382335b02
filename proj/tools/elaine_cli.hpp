#pragma once

// Command-line front end: subcommand parsing, config files and the
// pipelines behind each subcommand.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "elaine/graph.hpp"
#include "elaine/model.hpp"

namespace elaine::cli {

/// Bad flag, bad config file or missing required input; exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  ElaineConfig model{};
  std::filesystem::path graph;
  std::filesystem::path edge_attrs;
  std::filesystem::path labels;
  std::filesystem::path out = ".";
  std::size_t repeats = 5;
  double holdout = 0.2;
  std::size_t max_eval_nodes = 1024;
  std::uint64_t eval_seed = 0;
  std::vector<double> train_ratios{0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::string sweep_param = "dim";
  std::vector<double> sweep_values;  // empty: the parameter's default grid
  SbmParams synthetic{};
  int verbosity = 1;  // 0 quiet, 1 info, 2 debug
  std::size_t jobs = 0;  // 0: machine parallelism

  /// Throws ValidationError for out-of-range values.
  void validate() const;
};

/// Default sweep grid for "dim" or "alpha_1".
std::vector<double> default_sweep_values(std::string_view param);

/// Sets one key. "seed" sets every seed (model, walks, splits, generator).
/// Returns false for an unknown key; ValidationError on a malformed value.
bool apply_run_field(RunConfig& cfg, std::string_view key, std::string_view value);

/// INI-style "key = value" lines; "[section]" headers and '#' comments are
/// ignored. Unknown keys raise UsageError naming the key.
void read_config(std::istream& in, RunConfig& cfg, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace elaine::cli
