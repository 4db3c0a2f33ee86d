#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Experiment orchestration: config parsing, seeded replica fan-out, N-sweeps
// with p-schedules, and CSV/JSON emission.  Every run writes a manifest that
// echoes the fully resolved configuration, a summary JSON with pass/fail
// against declared tolerances, and per-experiment CSV tables.  Given the same
// config (master seed included), all CSV outputs are byte-identical across
// runs and thread counts; only the manifest timestamp field varies.

namespace dcw {

enum class ExperimentKind {
  VerifyLemma32,
  VerifyCounts,
  Tails,
  RnConcentration,
  SweepLln,
  SweepClt,
  LevySweep,
  ExactSmall,
  BoundedIntegral,
};

// Maps hyphenated CLI names ("verify-lemma32", ...) to kinds; throws
// std::invalid_argument on unknown names.
ExperimentKind experiment_kind_from_name(const std::string& name);
const char* experiment_name(ExperimentKind kind);
const std::vector<std::string>& experiment_names();

// p as a function of N along a sweep: constant c, or power c * N^-gamma.
// Powers require gamma in [0, 1) so that N*p -> infinity along the sweep,
// matching the standing assumptions of the model.
struct PSchedule {
  enum class Kind { Constant, Power };
  Kind kind = Kind::Constant;
  double c = 1.0;
  double gamma = 0.5;

  double value(int n) const;
  std::string describe() const;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::ExactSmall;

  // Model block.
  double beta = 0.5;
  double m = 0.2;
  std::vector<int> n_list;
  PSchedule p_schedule;

  // Two-group partition fractions (contiguous blocks of size round(alpha*N)).
  double alpha1 = 0.5;
  double alpha2 = 0.5;

  // Replica plan.
  int replicas = 8;
  std::uint64_t master_seed = 20260823ULL;

  // Chain shape.  chain_burn_in < 0 selects the default (10*N sweeps from
  // the versioned defaults).  chain_recorded counts kept samples after
  // thinning.  chain_init: "all-up" | "all-down" | "uniform-random".
  long long chain_recorded = 3000;
  long long chain_burn_in = -1;
  long long chain_thinning = 1;
  std::string chain_init = "uniform-random";
  // Which sweep points get a chain-samples CSV: "none" | "final" | "all".
  std::string samples_csv = "final";

  // rn-concentration: threshold for |R - 1| exceedances, optional N*p grid
  // at fixed n (np_list), and an optional extra final point.
  double delta = 0.25;
  std::vector<double> np_list;
  int final_n = -1;
  double final_p = -1.0;

  // tails: threshold exponent delta, the sweep point the final-value check
  // reads, and the (beta, N) grids for the partition-function margin block.
  double tail_delta = 0.5;
  int tail_check_n = 1024;
  std::vector<double> z_beta_list{0.5, 0.9};
  std::vector<int> z_n_list{1000, 10000};

  // sweep-clt: "bg-mcmc" (default) or "cw-exact".
  std::string side = "bg-mcmc";

  // verify-lemma32: size of the exhaustive-enumeration block (<= 4); the
  // residual sweep uses n_list.
  int exact_n = 3;

  // bounded-integral / exact-small.
  std::string test_function = "cos";
  int rt_n = -1;      // exact-small R/T identity size; default min(n, 14)
  double rt_p = 0.3;  // edge density for the R/T identity graph
  long long dml_n = 10000;

  // caps.
  int enum_cap = 24;
  int brute_n_max = 8;

  std::string out_dir = ".";
  int threads = 1;
};

// Parses a flat key-value JSON object.  Unknown keys are rejected with a
// diagnostic naming the key.  cli_experiment, if nonempty, supplies the
// experiment name from the command line; a conflicting "experiment" key in
// the config is an error.  Throws std::invalid_argument on any config
// problem, including theorem-mode violations (beta >= 1, power gamma >= 1).
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& cli_experiment = "");
ExperimentConfig parse_experiment_config_file(const std::string& path,
                                              const std::string& cli_experiment = "");

// One declared pass/fail check.  comparison is the operator applied as
// "value comparison threshold", e.g. value < threshold.
struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string comparison = "<";
  bool pass = false;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;  // file names written under out_dir

  bool pass() const;
};

// Runs the experiment, writing manifest.json, summary.json, and the
// experiment's CSV artifacts into config.out_dir (created if missing).
// Throws on config/runtime errors; check failures are reported in the
// result, not thrown.
ExperimentResult run_experiment(const ExperimentConfig& config);

// JSON text of the summary written by run_experiment (exposed for tests).
std::string summary_json_text(const ExperimentResult& result);

}  // namespace dcw
