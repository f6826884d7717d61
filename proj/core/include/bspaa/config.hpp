#pragma once

// Run configuration (sectioned key = value text) and dataset files for the
// command-line front end.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bspaa/model.hpp"
#include "bspaa/optimizer.hpp"
#include "bspaa/priors_loss.hpp"
#include "bspaa/risk.hpp"

namespace bspaa {

struct SweepAxis {
  std::string key;  // a [prior] or [cost] key, e.g. "Ca"
  std::vector<double> values;
};

struct RunConfig {
  PriorSpec prior{3.0, 1.0, 10.0};
  CostModel cost{0.5, 0.2, 0.1, 5.0, 30.0, 2.0, 3.0, 2.0};
  std::optional<SamplingPlan> plan;
  std::vector<SweepAxis> sweep;

  std::uint64_t seed = 12345;
  long long replicates = 1000000;
  std::optional<int> n_cap;
  int threads = 1;
  OptimizerOptions optimizer;   // includes the risk options
  std::string dataset;          // `decide` input, relative to the config file
  std::string reference;        // reference table for `sweep` deviation flags
  int simulate_count = 7;       // datasets written by `simulate`
  std::optional<ModelParams> simulate_params;  // fixed (lambda, phi); prior draws otherwise

  void validate() const;
};

/// Parses the config text. Sections: [prior] alpha beta l; [cost] Cs vs Ca
/// Ct Cr a0 a1 a2; [plan] n t1 t2 m; [sweep] <prior/cost key> = v1, v2, ...;
/// [run] seed replicates n_cap threads ed_coefficient dataset reference
/// region_order phi_order patience simulate_count hazard accel_factor.
/// `#` starts a comment. Unknown sections or keys throw std::invalid_argument.
RunConfig parse_config(std::istream& in, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);

/// Applies one override by key (the names used in [prior] and [cost]).
void apply_override(RunConfig& config, const std::string& key, double value);

struct Scenario {
  std::string id;
  RunConfig config;
};
/// Cartesian product of the sweep axes, first axis varying slowest. An empty
/// sweep yields one scenario with id "base".
std::vector<Scenario> expand_sweep(const RunConfig& config);

struct Dataset {
  SamplingPlan plan;
  std::vector<double> failure_times;
};
/// Header line `n=<int> t1=<real> t2=<real> m=<int>` followed by one failure
/// time per line; a new header starts a new dataset. Times outside (0, t2]
/// are rejected.
std::vector<Dataset> parse_datasets(std::istream& in);
std::vector<Dataset> load_datasets(const std::string& path);
void write_dataset(std::ostream& out, const Dataset& dataset);

}  // namespace bspaa
