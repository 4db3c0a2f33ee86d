// Acceptance gate: runs the canonical verification workloads end to end and
// prints one PASS/FAIL line per criterion.  Exit status 0 iff all pass.
//
// Each criterion also carries a wall-clock budget; exceeding it fails the
// criterion.  All artifacts land under acceptance_out/ in the working
// directory so a failed criterion can be inspected from its CSV/JSON outputs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "dcw/defaults.hpp"
#include "dcw/experiment.hpp"
#include "dcw/graph.hpp"
#include "dcw/logspace.hpp"
#include "dcw/mcmc.hpp"
#include "dcw/model.hpp"
#include "dcw/params.hpp"

namespace {

using dcw::CheckResult;
using dcw::ExperimentResult;

int g_failed = 0;
int g_total = 0;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void record(int number, bool pass, const std::string& description,
            const std::string& detail) {
  ++g_total;
  if (!pass) ++g_failed;
  std::printf("criterion %2d: %s - %s (%s)\n", number, pass ? "PASS" : "FAIL",
              description.c_str(), detail.c_str());
  std::fflush(stdout);
}

const CheckResult* find_check(const ExperimentResult& result, const std::string& name) {
  for (const CheckResult& c : result.checks)
    if (c.name == name) return &c;
  return nullptr;
}

// Conjunction of named checks from one experiment result, with a readable
// value/threshold trail; a missing check is a hard failure.
struct CheckGroup {
  bool pass = true;
  std::string detail;

  void fold(const ExperimentResult& result, const std::string& name) {
    const CheckResult* c = find_check(result, name);
    if (!detail.empty()) detail += "; ";
    if (c == nullptr) {
      pass = false;
      detail += name + " missing";
      return;
    }
    pass = pass && c->pass;
    detail += name + " = " + fmt(c->value) + " " + c->comparison + " " + fmt(c->threshold);
  }

  void fold_runtime(double seconds, double limit) {
    if (!detail.empty()) detail += "; ";
    pass = pass && seconds < limit;
    detail += "runtime " + fmt(seconds) + "s < " + fmt(limit) + "s";
  }

  void fail(const std::string& why) {
    pass = false;
    detail = why;
  }
};

// Runs one experiment configuration; on an exception the affected criteria
// are failed with the message.
bool run_workload(const std::string& label, const std::string& config_json,
                  ExperimentResult& out, double& seconds) {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  try {
    dcw::ExperimentConfig cfg = dcw::parse_experiment_config(config_json);
    cfg.out_dir = "acceptance_out/" + label;
    out = dcw::run_experiment(cfg);
  } catch (const std::exception& e) {
    std::printf("# workload %s failed to run: %s\n", label.c_str(), e.what());
    ok = false;
  }
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("# workload %s finished in %.1fs\n", label.c_str(), seconds);
  std::fflush(stdout);
  return ok;
}

// Explicit Markov-kernel diagnostics: fixed point and reversibility of the
// one-update matrix against the exact law at N=4, then the long-run state
// occupation of a driven chain at N=5 in total variation.
void run_kernel_criterion() {
  auto t0 = std::chrono::steady_clock::now();
  CheckGroup g;
  try {
    {
      dcw::ModelParams params(4, 0.5, 0.6);
      dcw::GraphSample graph = dcw::sample_graph(params, 2026);
      std::vector<double> kernel = dcw::build_random_scan_kernel(params, graph);
      const std::size_t states = 16;
      std::vector<double> logs(states);
      for (std::size_t x = 0; x < states; ++x)
        logs[x] = dcw::bg_log_weight(params, graph,
                                     dcw::SpinConfig::from_mask(4, x));
      double z = dcw::log_sum_exp(logs);
      std::vector<double> pi(states);
      for (std::size_t x = 0; x < states; ++x) pi[x] = std::exp(logs[x] - z);

      double stat_err = 0.0, db_err = 0.0;
      for (std::size_t y = 0; y < states; ++y) {
        double acc = 0.0;
        for (std::size_t x = 0; x < states; ++x) acc += pi[x] * kernel[x * states + y];
        stat_err = std::max(stat_err, std::fabs(acc - pi[y]));
      }
      for (std::size_t x = 0; x < states; ++x)
        for (std::size_t y = 0; y < states; ++y)
          db_err = std::max(db_err, std::fabs(pi[x] * kernel[x * states + y] -
                                              pi[y] * kernel[y * states + x]));
      double stat_tol = dcw::default_tolerance("stationarity_residual");
      double db_tol = dcw::default_tolerance("detailed_balance_residual");
      g.pass = stat_err < stat_tol && db_err < db_tol;
      g.detail = "stationarity = " + fmt(stat_err) + " < " + fmt(stat_tol) +
                 "; reversibility = " + fmt(db_err) + " < " + fmt(db_tol);
    }
    {
      dcw::ModelParams params(5, 0.5, 0.6);
      dcw::GraphSample graph = dcw::sample_graph(params, 7);
      const std::size_t states = 32;
      std::vector<double> logs(states);
      for (std::size_t x = 0; x < states; ++x)
        logs[x] = dcw::bg_log_weight(params, graph,
                                     dcw::SpinConfig::from_mask(5, x));
      double z = dcw::log_sum_exp(logs);

      dcw::GlauberChain chain(params, graph, 123, dcw::ChainConfig::Init::UniformRandom);
      const long long sweeps = 10000000;
      std::vector<long long> visits(states, 0);
      for (long long t = 0; t < sweeps; ++t) {
        chain.sweep();
        ++visits[chain.state().word(0)];
      }
      double tv = 0.0;
      for (std::size_t x = 0; x < states; ++x)
        tv += std::fabs(static_cast<double>(visits[x]) / static_cast<double>(sweeps) -
                        std::exp(logs[x] - z));
      tv *= 0.5;
      double tv_tol = dcw::default_tolerance("tv_distance_final");
      g.pass = g.pass && tv < tv_tol;
      g.detail += "; occupation TV = " + fmt(tv) + " < " + fmt(tv_tol);
    }
  } catch (const std::exception& e) {
    g.fail(std::string("exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("# workload kernel finished in %.1fs\n", secs);
  g.fold_runtime(secs, 60.0);
  record(11, g.pass, "single-site kernel: fixed point, reversibility, long-run occupation",
         g.detail);
}

}  // namespace

int main() {
  std::printf("acceptance run (defaults v%d, sha1 %s)\n", dcw::defaults_version(),
              dcw::defaults_sha1().c_str());
  std::fflush(stdout);

  // Criteria 1-2: closed-form quenched moments vs the exhaustive 512-graph
  // oracle at N=3, and the residual sweep toward its dense-limit value.
  {
    ExperimentResult res;
    double secs = 0.0;
    bool ran = run_workload("lemma32",
                            R"({"experiment":"verify-lemma32","exact_n":3,)"
                            R"("n_list":[100,1000,10000],"p_schedule_kind":"power",)"
                            R"("p_schedule_c":1.0,"p_schedule_gamma":0.5})",
                            res, secs);
    CheckGroup c1, c2;
    if (ran) {
      c1.fold(res, "lemma32-max-abs-log-err");
      c1.fold_runtime(secs, 1.0);
      c2.fold(res, "residual-c1-decreasing");
      c2.fold(res, "residual-c1-final");
      c2.fold_runtime(secs, 1.0);
    } else {
      c1.fail("workload failed");
      c2.fail("workload failed");
    }
    record(1, c1.pass, "closed-form moments match exhaustive graph averages at N=3",
           c1.detail);
    record(2, c2.pass, "first-moment residual decreases along the sweep, < 0.01 at N=1e4",
           c2.detail);
  }

  // Criterion 3: counting identities (brute force N<=8, marginal and total
  // sums N<=20, exact big-integer arithmetic).
  {
    ExperimentResult res;
    double secs = 0.0;
    bool ran = run_workload("counts", R"({"experiment":"verify-counts"})", res, secs);
    CheckGroup c;
    if (ran) {
      c.fold(res, "counts-brute-max-abs-diff");
      c.fold(res, "counts-marginal-violations");
      c.fold(res, "counts-total-violations");
      c.fold_runtime(secs, 30.0);
    } else {
      c.fail("workload failed");
    }
    record(3, c.pass, "pair-overlap counts: brute force and exact sum identities", c.detail);
  }

  // Criteria 4-5: partition-function floor margins and the atypical tail
  // ratios along the scaled sweep.
  {
    ExperimentResult res;
    double secs = 0.0;
    bool ran = run_workload("tails",
                            R"({"experiment":"tails","p_schedule_kind":"power",)"
                            R"("p_schedule_c":1.0,"p_schedule_gamma":0.5})",
                            res, secs);
    CheckGroup c4, c5;
    if (ran) {
      c4.fold(res, "z-margin-min");
      c4.fold_runtime(secs, 1.0);
      c5.fold(res, "tail-decreasing");
      c5.fold(res, "tail-final");
      c5.fold_runtime(secs, 5.0);
    } else {
      c4.fail("workload failed");
      c5.fail("workload failed");
    }
    record(4, c4.pass, "partition function clears the 2^N floor for beta in {0.5, 0.9}",
           c4.detail);
    record(5, c5.pass, "atypical tail ratio decreases and meets the final threshold",
           c5.detail);
  }

  // Criterion 6: exact two-group covariance at N=2000.
  {
    ExperimentResult res;
    double secs = 0.0;
    bool ran = run_workload(
        "clt_exact", R"({"experiment":"sweep-clt","side":"cw-exact","n_list":[2000]})", res,
        secs);
    CheckGroup c;
    if (ran) {
      c.fold(res, "clt-cov-max-rel-err");
      c.fold_runtime(secs, 30.0);
    } else {
      c.fail("workload failed");
    }
    record(6, c.pass, "exact two-group covariance within 2% of the limit at N=2000",
           c.detail);
  }

  // Criteria 7-8: sampled covariance and group means on diluted graphs.
  {
    ExperimentResult res;
    double secs = 0.0;
    bool ran = run_workload("clt_mcmc",
                            R"({"experiment":"sweep-clt","side":"bg-mcmc",)"
                            R"("n_list":[4000],"p":0.05,"replicas":20,)"
                            R"("chain_recorded":3000,"chain_burn_in":2000})",
                            res, secs);
    CheckGroup c7, c8;
    if (ran) {
      c7.fold(res, "clt-cov-max-rel-err");
      c7.fold(res, "ess-min");
      c7.fold_runtime(secs, 600.0);
      c8.fold(res, "lln-mean-abs-final");
      c8.fold_runtime(secs, 600.0);
    } else {
      c7.fail("workload failed");
      c8.fail("workload failed");
    }
    record(7, c7.pass, "sampled two-group covariance within 10% on diluted graphs", c7.detail);
    record(8, c8.pass, "group magnetization means concentrate at zero", c8.detail);
  }

  // Criterion 9: Levy distance of the scaled magnetization to its limit.
  {
    ExperimentResult res;
    double secs = 0.0;
    bool ran = run_workload("levy",
                            R"({"experiment":"levy-sweep","n_list":[500,1000,2000,4000],)"
                            R"("p_schedule_kind":"power","p_schedule_c":1.0,)"
                            R"("p_schedule_gamma":0.5,"replicas":10,)"
                            R"("chain_recorded":6000,"chain_burn_in":1500})",
                            res, secs);
    CheckGroup c;
    if (ran) {
      c.fold(res, "levy-bg-decreasing");
      c.fold(res, "levy-bg-final");
      c.fold(res, "levy-cw-final");
      c.fold_runtime(secs, 600.0);
    } else {
      c.fail("workload failed");
    }
    record(9, c.pass, "Levy distance to the Gaussian limit decreases and meets thresholds",
           c.detail);
  }

  // Criterion 10: concentration of the R functional over graph replicas.
  {
    ExperimentResult res;
    double secs = 0.0;
    bool ran = run_workload("rn",
                            R"({"experiment":"rn-concentration","n_list":[10,14,18,22],)"
                            R"("p":0.5,"delta":0.25,"replicas":400,)"
                            R"("final_n":22,"final_p":0.9})",
                            res, secs);
    CheckGroup c;
    if (ran) {
      c.fold(res, "rn-non-increasing");
      c.fold(res, "rn-final");
      c.fold_runtime(secs, 900.0);
    } else {
      c.fail("workload failed");
    }
    record(10, c.pass, "exceedance fraction of |R-1| is non-increasing and small", c.detail);
  }

  // Criterion 11: explicit kernel diagnostics (computed inline).
  run_kernel_criterion();

  // Criterion 12: identity suite on exactly enumerable systems.
  {
    ExperimentResult res;
    double secs = 0.0;
    bool ran = run_workload(
        "exact_small",
        R"({"experiment":"exact-small","n":16,"p":1.0,"rt_n":14,"rt_p":0.3})", res, secs);
    CheckGroup c;
    if (ran) {
      c.fold(res, "bg-vs-cw-pushforward-identity");
      c.fold(res, "rt-identity");
      c.fold(res, "dml-ratio-abs-err");
      c.fold_runtime(secs, 60.0);
    } else {
      c.fail("workload failed");
    }
    record(12, c.pass, "identity suite: p=1 reduction, R/T identity, local-limit ratio",
           c.detail);
  }

  std::printf("acceptance: %d/%d criteria passed\n", g_total - g_failed, g_total);
  return g_failed == 0 ? 0 : 1;
}
