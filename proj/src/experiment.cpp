#include "dcw/experiment.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <locale>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dcw/counting.hpp"
#include "dcw/defaults.hpp"
#include "dcw/distance.hpp"
#include "dcw/graph.hpp"
#include "dcw/law.hpp"
#include "dcw/limits.hpp"
#include "dcw/mcmc.hpp"
#include "dcw/model.hpp"
#include "dcw/parallel.hpp"
#include "dcw/quenched.hpp"
#include "dcw/spin.hpp"
#include "dcw/stats.hpp"

namespace dcw {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const std::array<std::pair<const char*, ExperimentKind>, 9> kExperimentNames = {{
    {"verify-lemma32", ExperimentKind::VerifyLemma32},
    {"verify-counts", ExperimentKind::VerifyCounts},
    {"tails", ExperimentKind::Tails},
    {"rn-concentration", ExperimentKind::RnConcentration},
    {"sweep-lln", ExperimentKind::SweepLln},
    {"sweep-clt", ExperimentKind::SweepClt},
    {"levy-sweep", ExperimentKind::LevySweep},
    {"exact-small", ExperimentKind::ExactSmall},
    {"bounded-integral", ExperimentKind::BoundedIntegral},
}};

[[noreturn]] void config_error(const std::string& msg) {
  throw std::invalid_argument("config error: " + msg);
}

std::string fmt17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Collects artifact file names and hands out streams under the run directory.
class Emitter {
 public:
  explicit Emitter(fs::path dir) : dir_(std::move(dir)) {}

  std::ofstream open(const std::string& name) {
    std::ofstream os(dir_ / name);
    if (!os) throw std::runtime_error("cannot open output file: " + (dir_ / name).string());
    os.imbue(std::locale::classic());
    artifacts_.push_back(name);
    return os;
  }

  const std::vector<std::string>& artifacts() const { return artifacts_; }

 private:
  fs::path dir_;
  std::vector<std::string> artifacts_;
};

CheckResult check_lt(const std::string& name, double value, double threshold) {
  return {name, value, threshold, "<", value < threshold};
}

CheckResult check_le(const std::string& name, double value, double threshold) {
  return {name, value, threshold, "<=", value <= threshold};
}

CheckResult check_ge(const std::string& name, double value, double threshold) {
  return {name, value, threshold, ">", value > threshold};
}

CheckResult check_geq(const std::string& name, double value, double threshold) {
  return {name, value, threshold, ">=", value >= threshold};
}

// Largest consecutive increment v[k+1] - v[k]; negative iff strictly decreasing.
double max_consecutive_increment(const std::vector<double>& v) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < v.size(); ++k) worst = std::max(worst, v[k + 1] - v[k]);
  return worst;
}

struct SweepPoint {
  int n;
  double p;
};

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
  if (cfg.n_list.empty()) config_error("n or n_list is required for this experiment");
  std::vector<SweepPoint> pts;
  for (int n : cfg.n_list) {
    if (n < 1) config_error("n must be >= 1");
    double p = cfg.p_schedule.value(n);
    if (!(p > 0.0) || p > 1.0)
      config_error("p-schedule yields p = " + fmt17(p) + " outside (0, 1] at N = " +
                   std::to_string(n));
    pts.push_back({n, p});
  }
  return pts;
}

TwoGroupPartition partition_for(const ExperimentConfig& cfg, int n) {
  int n1 = static_cast<int>(std::llround(cfg.alpha1 * n));
  int n2 = static_cast<int>(std::llround(cfg.alpha2 * n));
  if (n1 < 1 || n2 < 1 || n1 + n2 > n)
    config_error("partition fractions alpha1 = " + fmt17(cfg.alpha1) + ", alpha2 = " +
                 fmt17(cfg.alpha2) + " give invalid group sizes at N = " + std::to_string(n));
  return TwoGroupPartition::contiguous(n, n1, n2);
}

ChainConfig::Init parse_chain_init(const std::string& s) {
  if (s == "all-up") return ChainConfig::Init::AllUp;
  if (s == "all-down") return ChainConfig::Init::AllDown;
  if (s == "uniform-random") return ChainConfig::Init::UniformRandom;
  config_error("chain_init must be one of all-up, all-down, uniform-random (got \"" + s + "\")");
}

ChainConfig chain_config_for(const ExperimentConfig& cfg, int n, std::uint64_t seed) {
  ChainConfig cc;
  cc.burn_in_sweeps = cfg.chain_burn_in >= 0
                          ? cfg.chain_burn_in
                          : static_cast<long long>(chain_default("burn_in_sweeps_per_n")) * n;
  cc.thinning = static_cast<int>(cfg.chain_thinning);
  cc.sweeps = cc.burn_in_sweeps + cfg.chain_recorded * cfg.chain_thinning;
  cc.seed = seed;
  cc.init = parse_chain_init(cfg.chain_init);
  return cc;
}

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

// Standard error of the mean across replicate-level values.
double between_replica_se(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mu = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mu) * (x - mu);
  double var = acc / static_cast<double>(v.size() - 1);
  return std::sqrt(var / static_cast<double>(v.size()));
}

// ---------------------------------------------------------------------------
// Shared MCMC fan-out
// ---------------------------------------------------------------------------

struct TwoGroupRun {
  std::vector<std::vector<std::array<double, 2>>> samples;  // per replica
  std::vector<long long> edge_counts;
  std::vector<std::uint64_t> graph_seeds;
};

TwoGroupRun run_two_group_point(const ExperimentConfig& cfg, const ModelParams& params,
                                const TwoGroupPartition& part) {
  ReplicaPlan plan{cfg.master_seed, cfg.replicas};
  TwoGroupRun run;
  run.samples.resize(static_cast<std::size_t>(cfg.replicas));
  run.edge_counts.resize(static_cast<std::size_t>(cfg.replicas));
  run.graph_seeds.resize(static_cast<std::size_t>(cfg.replicas));
  parallel_for_index(cfg.replicas, cfg.threads, [&](int r) {
    auto ri = static_cast<std::size_t>(r);
    run.graph_seeds[ri] = plan.stream(r, 0);
    GraphSample graph = sample_graph(params, run.graph_seeds[ri]);
    run.edge_counts[ri] = graph.edge_count();
    ChainConfig cc = chain_config_for(cfg, params.n, plan.stream(r, 1));
    run.samples[ri] = run_chain(params, graph, part, cc);
  });
  return run;
}

struct MagnetizationRun {
  std::vector<std::vector<double>> samples;  // per replica, scaled s
  std::vector<long long> edge_counts;
};

MagnetizationRun run_magnetization_point(const ExperimentConfig& cfg, const ModelParams& params,
                                         double scale) {
  ReplicaPlan plan{cfg.master_seed, cfg.replicas};
  MagnetizationRun run;
  run.samples.resize(static_cast<std::size_t>(cfg.replicas));
  run.edge_counts.resize(static_cast<std::size_t>(cfg.replicas));
  parallel_for_index(cfg.replicas, cfg.threads, [&](int r) {
    auto ri = static_cast<std::size_t>(r);
    GraphSample graph = sample_graph(params, plan.stream(r, 0));
    run.edge_counts[ri] = graph.edge_count();
    ChainConfig cc = chain_config_for(cfg, params.n, plan.stream(r, 1));
    run.samples[ri] = run_chain_magnetization(params, graph, cc, scale);
  });
  return run;
}

void write_samples_csv(Emitter& em, const std::string& name,
                       const std::vector<std::vector<std::array<double, 2>>>& per_replica) {
  std::ofstream os = em.open(name);
  os << "replica,sample_index,s1_std,s2_std\n";
  for (std::size_t r = 0; r < per_replica.size(); ++r)
    for (std::size_t i = 0; i < per_replica[r].size(); ++i)
      os << r << "," << i << "," << fmt17(per_replica[r][i][0]) << ","
         << fmt17(per_replica[r][i][1]) << "\n";
}

bool want_samples_csv(const ExperimentConfig& cfg, std::size_t point_index,
                      std::size_t point_count) {
  if (cfg.samples_csv == "all") return true;
  if (cfg.samples_csv == "final") return point_index + 1 == point_count;
  return false;
}

// ---------------------------------------------------------------------------
// verify-lemma32
// ---------------------------------------------------------------------------

std::vector<CheckResult> run_verify_lemma32(const ExperimentConfig& cfg, Emitter& em) {
  if (cfg.exact_n < 1 || cfg.exact_n > 4)
    config_error("verify-lemma32 needs exact_n in [1, 4] (full graph enumeration)");
  const int n = cfg.exact_n;
  ModelParams params(n, cfg.beta, cfg.p_schedule.value(n), cfg.m);

  double max_err = 0.0;
  {
    std::ofstream os = em.open("lemma32_first.csv");
    os << "s,closed_log,enumerated_log,abs_err\n";
    for (int s = -n; s <= n; s += 2) {
      double closed = exact_first_moment_log(params, s).log_value;
      double brute = enumerated_first_moment_log(params, s);
      double err = std::fabs(closed - brute);
      max_err = std::max(max_err, err);
      os << s << "," << fmt17(closed) << "," << fmt17(brute) << "," << fmt17(err) << "\n";
    }
  }
  {
    std::ofstream os = em.open("lemma32_second.csv");
    os << "s1,s2,r,closed_log,enumerated_log,abs_err\n";
    for (int s1 = -n; s1 <= n; s1 += 2)
      for (int s2 = -n; s2 <= n; s2 += 2)
        for (int r = -n; r <= n; r += 2) {
          if (nu_triple(n, s1, s2, r) == 0) continue;
          double closed = exact_second_moment_log(params, s1, s2, r).log_value;
          double brute = enumerated_second_moment_log(params, s1, s2, r);
          double err = std::fabs(closed - brute);
          max_err = std::max(max_err, err);
          os << s1 << "," << s2 << "," << r << "," << fmt17(closed) << "," << fmt17(brute)
             << "," << fmt17(err) << "\n";
        }
  }

  // Residual sweep toward the principal term.
  std::vector<double> residuals;
  {
    std::ofstream os = em.open("lemma32_residual.csv");
    os << "N,p,residual_c1\n";
    for (const SweepPoint& pt : sweep_points(cfg)) {
      ModelParams sweep_params(pt.n, cfg.beta, pt.p, cfg.m);
      double r = std::fabs(residual_c1(sweep_params, 0));
      residuals.push_back(r);
      os << pt.n << "," << fmt17(pt.p) << "," << fmt17(r) << "\n";
    }
  }

  std::vector<CheckResult> checks;
  checks.push_back(
      check_lt("lemma32-max-abs-log-err", max_err, default_tolerance("lemma32_max_abs_log_err")));
  if (residuals.size() >= 2)
    checks.push_back(check_lt("residual-c1-decreasing", max_consecutive_increment(residuals), 0.0));
  if (!residuals.empty())
    checks.push_back(check_lt("residual-c1-final", residuals.back(),
                              default_tolerance("residual_c1_final")));
  return checks;
}

// ---------------------------------------------------------------------------
// verify-counts
// ---------------------------------------------------------------------------

std::vector<CheckResult> run_verify_counts(const ExperimentConfig& cfg, Emitter& em) {
  if (cfg.brute_n_max < 1 || cfg.brute_n_max > 10)
    config_error("verify-counts needs brute_n_max in [1, 10]");

  // Brute force over all 4^N ordered pairs of configurations.
  double brute_max_diff = 0.0;
  for (int n = 1; n <= cfg.brute_n_max; ++n) {
    const int side = n + 1;
    std::vector<long long> table(static_cast<std::size_t>(side * side * side), 0);
    const std::uint64_t lim = 1ULL << n;
    const std::uint64_t low = lim - 1;
    for (std::uint64_t mx = 0; mx < lim; ++mx)
      for (std::uint64_t my = 0; my < lim; ++my) {
        int s = 2 * __builtin_popcountll(mx) - n;
        int t = 2 * __builtin_popcountll(my) - n;
        int u = n - 2 * __builtin_popcountll((mx ^ my) & low);
        std::size_t idx = static_cast<std::size_t>(((s + n) / 2 * side + (t + n) / 2) * side +
                                                   (u + n) / 2);
        ++table[idx];
      }
    for (int s = -n; s <= n; s += 2)
      for (int t = -n; t <= n; t += 2)
        for (int u = -n; u <= n; u += 2) {
          std::size_t idx = static_cast<std::size_t>(((s + n) / 2 * side + (t + n) / 2) * side +
                                                     (u + n) / 2);
          double diff = std::fabs(static_cast<double>(table[idx]) -
                                  static_cast<double>(nu_triple(n, s, t, u)));
          brute_max_diff = std::max(brute_max_diff, diff);
        }
  }

  // Exact marginal and total identities up to N = 20.
  long long marginal_violations = 0;
  long long total_violations = 0;
  for (int n = 1; n <= 20; ++n) {
    BigCount total = 0;
    for (int s = -n; s <= n; s += 2)
      for (int t = -n; t <= n; t += 2) {
        BigCount sum_u = 0;
        for (int u = -n; u <= n; u += 2) sum_u += nu_triple(n, s, t, u);
        total += sum_u;
        if (sum_u != nu_count(n, s) * nu_count(n, t)) ++marginal_violations;
      }
    BigCount four_n = BigCount(1) << (2 * n);
    if (total != four_n) ++total_violations;
  }

  // Local-limit ratio at the center sector.
  double dml_err =
      std::fabs(std::exp(log_nu_count(static_cast<int>(cfg.dml_n), 0) -
                         de_moivre_laplace_log(static_cast<int>(cfg.dml_n), 0)) -
                1.0);

  // Uniform upper-bound margins for the triple counts.
  const double c = default_tolerance("triple_bound_constant");
  double min_margin = std::numeric_limits<double>::infinity();
  {
    std::ofstream os = em.open("counts_margins.csv");
    os << "N,min_margin\n";
    for (int n = 4; n <= 14; ++n) {
      double m_n = std::numeric_limits<double>::infinity();
      for (int s = -n; s <= n; s += 2)
        for (int t = -n; t <= n; t += 2)
          for (int u = -n; u <= n; u += 2) {
            if (nu_triple(n, s, t, u) == 0) continue;
            m_n = std::min(m_n, triple_bound_margin(n, s, t, u, c));
          }
      min_margin = std::min(min_margin, m_n);
      os << n << "," << fmt17(m_n) << "\n";
    }
  }

  {
    std::ofstream os = em.open("counts_summary.csv");
    os << "check,value\n";
    os << "brute_max_abs_diff," << fmt17(brute_max_diff) << "\n";
    os << "marginal_violations," << marginal_violations << "\n";
    os << "total_violations," << total_violations << "\n";
    os << "dml_ratio_abs_err," << fmt17(dml_err) << "\n";
    os << "triple_bound_min_margin," << fmt17(min_margin) << "\n";
  }

  std::vector<CheckResult> checks;
  checks.push_back(check_lt("counts-brute-max-abs-diff", brute_max_diff, 0.5));
  checks.push_back(check_lt("counts-marginal-violations",
                            static_cast<double>(marginal_violations), 0.5));
  checks.push_back(check_lt("counts-total-violations", static_cast<double>(total_violations), 0.5));
  checks.push_back(check_lt("dml-ratio-abs-err", dml_err,
                            default_tolerance("counts_dml_ratio_err")));
  checks.push_back(check_ge("triple-bound-min-margin", min_margin, 0.0));
  return checks;
}

// ---------------------------------------------------------------------------
// tails
// ---------------------------------------------------------------------------

std::vector<CheckResult> run_tails(const ExperimentConfig& cfg, Emitter& em) {
  if (!(cfg.tail_delta > 0.0 && cfg.tail_delta < 1.0))
    config_error("tail_delta must lie in (0, 1)");

  std::vector<double> ratios;
  double final_ratio = std::numeric_limits<double>::quiet_NaN();
  {
    std::ofstream os = em.open("tails.csv");
    os << "N,p,ratio\n";
    for (const SweepPoint& pt : sweep_points(cfg)) {
      ModelParams params(pt.n, cfg.beta, pt.p, cfg.m);
      double r = atypical_tail_ratio(params, cfg.tail_delta);
      ratios.push_back(r);
      if (pt.n == cfg.tail_check_n) final_ratio = r;
      os << pt.n << "," << fmt17(pt.p) << "," << fmt17(r) << "\n";
    }
  }
  if (std::isnan(final_ratio))
    config_error("tail_check_n = " + std::to_string(cfg.tail_check_n) + " is not in n_list");

  std::vector<double> margins;
  {
    std::ofstream os = em.open("z_margin.csv");
    os << "beta,N,margin\n";
    for (double beta : cfg.z_beta_list)
      for (int n : cfg.z_n_list) {
        ModelParams params(n, beta, 1.0, cfg.m);
        double margin = z_cw_lower_bound_margin(params);
        margins.push_back(margin);
        os << fmt17(beta) << "," << n << "," << fmt17(margin) << "\n";
      }
  }

  std::vector<CheckResult> checks;
  if (ratios.size() >= 2)
    checks.push_back(check_lt("tail-decreasing", max_consecutive_increment(ratios), 0.0));
  checks.push_back(check_lt("tail-final", final_ratio, default_tolerance("tail_final_ratio")));
  if (!margins.empty())
    checks.push_back(check_ge("z-margin-min", *std::min_element(margins.begin(), margins.end()),
                              default_tolerance("z_margin_floor")));
  return checks;
}

// ---------------------------------------------------------------------------
// rn-concentration
// ---------------------------------------------------------------------------

std::vector<CheckResult> run_rn_concentration(const ExperimentConfig& cfg, Emitter& em) {
  if (!(cfg.delta > 0.0)) config_error("delta must be > 0");

  std::vector<SweepPoint> pts;
  if (!cfg.np_list.empty()) {
    if (cfg.n_list.size() != 1)
      config_error("np_list requires a single fixed n (use the n key)");
    int n = cfg.n_list[0];
    for (double np : cfg.np_list) {
      double p = np / n;
      if (!(p > 0.0) || p > 1.0)
        config_error("np_list entry " + fmt17(np) + " gives p outside (0, 1] at N = " +
                     std::to_string(n));
      pts.push_back({n, p});
    }
  } else {
    pts = sweep_points(cfg);
  }
  for (const SweepPoint& pt : pts)
    if (pt.n > cfg.enum_cap)
      config_error("rn-concentration runs at enumeration scale; N = " + std::to_string(pt.n) +
                   " exceeds enum_cap = " + std::to_string(cfg.enum_cap));

  SectorObservable one = [](int) { return 1.0; };

  // The same replica plan is reused across the main sweep points, so the
  // underlying uniform draws are shared and the sampled graphs are nested as
  // p grows (common random numbers): monotonicity of the estimated exceedance
  // fractions is then read off coupled replicas rather than independent noise.
  ReplicaPlan plan{cfg.master_seed, cfg.replicas};

  std::ofstream summary = em.open("rn_fractions.csv");
  summary << "N,p,fraction,wilson_low,wilson_high\n";

  std::vector<double> fractions;
  auto run_point = [&](const SweepPoint& pt, const ReplicaPlan& point_plan, int index) {
    ModelParams params(pt.n, cfg.beta, pt.p, cfg.m);
    ConcentrationResult res =
        concentration_experiment(params, one, point_plan, cfg.delta, cfg.enum_cap, cfg.threads);
    char name[64];
    std::snprintf(name, sizeof name, "rn_replicas_pt%d_N%d.csv", index, pt.n);
    std::ofstream os = em.open(name);
    os << "replica,seed,R,T,edge_count\n";
    for (const ReplicaRT& rep : res.replicas)
      os << rep.replica << "," << rep.seed << "," << fmt17(rep.r) << "," << fmt17(rep.t) << ","
         << rep.edge_count << "\n";
    summary << pt.n << "," << fmt17(pt.p) << "," << fmt17(res.fraction) << ","
            << fmt17(res.wilson95.low) << "," << fmt17(res.wilson95.high) << "\n";
    return res.fraction;
  };

  int index = 0;
  for (const SweepPoint& pt : pts) fractions.push_back(run_point(pt, plan, index++));

  std::vector<CheckResult> checks;
  if (fractions.size() >= 2)
    checks.push_back(check_le("rn-non-increasing", max_consecutive_increment(fractions), 0.0));

  if (cfg.final_n > 0) {
    if (!(cfg.final_p > 0.0) || cfg.final_p > 1.0) config_error("final_p must lie in (0, 1]");
    if (cfg.final_n > cfg.enum_cap)
      config_error("final_n exceeds enum_cap for rn-concentration");
    ReplicaPlan final_plan{derive_replica_seed(cfg.master_seed, 1000003), cfg.replicas};
    double final_fraction = run_point({cfg.final_n, cfg.final_p}, final_plan, index++);
    checks.push_back(check_lt("rn-final", final_fraction,
                              default_tolerance("rn_final_fraction")));
  }
  return checks;
}

// ---------------------------------------------------------------------------
// sweep-lln
// ---------------------------------------------------------------------------

std::vector<CheckResult> run_sweep_lln(const ExperimentConfig& cfg, Emitter& em) {
  std::vector<SweepPoint> pts = sweep_points(cfg);
  std::ofstream os = em.open("lln.csv");
  os << "N,p,beta,metric,value,stderr\n";

  double final_mean_abs = 0.0;
  double min_ess = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const SweepPoint& pt = pts[k];
    ModelParams params(pt.n, cfg.beta, pt.p, cfg.m);
    TwoGroupPartition part = partition_for(cfg, pt.n);
    TwoGroupRun run = run_two_group_point(cfg, params, part);

    const double inv_sqrt1 = 1.0 / std::sqrt(static_cast<double>(part.n1()));
    const double inv_sqrt2 = 1.0 / std::sqrt(static_cast<double>(part.n2()));
    std::vector<double> rep_mean1, rep_mean2;
    double point_min_ess = std::numeric_limits<double>::infinity();
    for (const auto& samples : run.samples) {
      double m1 = 0.0, m2 = 0.0;
      for (const auto& y : samples) {
        m1 += y[0];
        m2 += y[1];
      }
      double count = static_cast<double>(samples.size());
      // Replica-level means of s_k / n_k.
      rep_mean1.push_back(m1 / count * inv_sqrt1);
      rep_mean2.push_back(m2 / count * inv_sqrt2);
      auto ess = batch_means_ess2(samples);
      point_min_ess = std::min(point_min_ess, std::min(ess[0], ess[1]));
    }
    double mean1 = mean_of(rep_mean1);
    double mean2 = mean_of(rep_mean2);
    os << pt.n << "," << fmt17(pt.p) << "," << fmt17(cfg.beta) << ",mean1," << fmt17(mean1)
       << "," << fmt17(between_replica_se(rep_mean1)) << "\n";
    os << pt.n << "," << fmt17(pt.p) << "," << fmt17(cfg.beta) << ",mean2," << fmt17(mean2)
       << "," << fmt17(between_replica_se(rep_mean2)) << "\n";
    os << pt.n << "," << fmt17(pt.p) << "," << fmt17(cfg.beta) << ",ess_min,"
       << fmt17(point_min_ess) << ",\n";

    if (want_samples_csv(cfg, k, pts.size())) {
      char name[64];
      std::snprintf(name, sizeof name, "samples_N%d.csv", pt.n);
      write_samples_csv(em, name, run.samples);
    }
    if (k + 1 == pts.size()) {
      final_mean_abs = std::max(std::fabs(mean1), std::fabs(mean2));
      min_ess = point_min_ess;
    }
  }

  std::vector<CheckResult> checks;
  checks.push_back(
      check_lt("lln-mean-abs-final", final_mean_abs, default_tolerance("bg_mean_abs")));
  checks.push_back(check_geq("ess-min", min_ess, chain_default("ess_floor")));
  return checks;
}

// ---------------------------------------------------------------------------
// sweep-clt
// ---------------------------------------------------------------------------

double max_rel_err(const Matrix2& have, const Matrix2& want) {
  double worst = 0.0;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      worst = std::max(worst, std::fabs(have[j][k] - want[j][k]) / std::fabs(want[j][k]));
  return worst;
}

std::vector<CheckResult> run_sweep_clt(const ExperimentConfig& cfg, Emitter& em) {
  std::vector<SweepPoint> pts = sweep_points(cfg);
  const Matrix2 target = clt_covariance(cfg.alpha1, cfg.alpha2, cfg.beta);

  std::ofstream os = em.open("clt_cov.csv");
  os << "N,p,c11,c12,c22,target11,target12,target22,max_rel_err,se11,se12,se22\n";

  std::vector<CheckResult> checks;

  if (cfg.side == "cw-exact") {
    double final_err = 0.0;
    for (const SweepPoint& pt : pts) {
      ModelParams params(pt.n, cfg.beta, pt.p, cfg.m);
      TwoGroupPartition part = partition_for(cfg, pt.n);
      WeightedLaw law = cw_exact_two_group_law(params, part);
      law = law.scaled({1.0 / std::sqrt(static_cast<double>(part.n1())),
                        1.0 / std::sqrt(static_cast<double>(part.n2()))});
      Matrix2 cov;
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          cov[j][k] = law.second_moment(j, k) - law.mean(j) * law.mean(k);
      double err = max_rel_err(cov, target);
      final_err = err;
      os << pt.n << "," << fmt17(pt.p) << "," << fmt17(cov[0][0]) << "," << fmt17(cov[0][1])
         << "," << fmt17(cov[1][1]) << "," << fmt17(target[0][0]) << "," << fmt17(target[0][1])
         << "," << fmt17(target[1][1]) << "," << fmt17(err) << ",,,\n";
    }
    checks.push_back(
        check_lt("clt-cov-max-rel-err", final_err, default_tolerance("cw_cov_rel")));
    return checks;
  }
  if (cfg.side != "bg-mcmc") config_error("side must be cw-exact or bg-mcmc");

  std::ofstream diag = em.open("clt_diagnostics.csv");
  diag << "N,replica,graph_seed,edge_count,ess1,ess2\n";
  std::ofstream means_os = em.open("clt_means.csv");
  means_os << "N,p,beta,metric,value,stderr\n";

  double final_err = 0.0;
  double final_mean_abs = 0.0;
  double min_ess = std::numeric_limits<double>::infinity();
  for (std::size_t kpt = 0; kpt < pts.size(); ++kpt) {
    const SweepPoint& pt = pts[kpt];
    ModelParams params(pt.n, cfg.beta, pt.p, cfg.m);
    TwoGroupPartition part = partition_for(cfg, pt.n);
    TwoGroupRun run = run_two_group_point(cfg, params, part);

    std::vector<std::array<double, 2>> pooled;
    std::vector<int> replicate_ids;
    double point_min_ess = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < run.samples.size(); ++r) {
      auto ess = batch_means_ess2(run.samples[r]);
      point_min_ess = std::min(point_min_ess, std::min(ess[0], ess[1]));
      diag << pt.n << "," << r << "," << run.graph_seeds[r] << "," << run.edge_counts[r] << ","
           << fmt17(ess[0]) << "," << fmt17(ess[1]) << "\n";
      for (const auto& y : run.samples[r]) {
        pooled.push_back(y);
        replicate_ids.push_back(static_cast<int>(r));
      }
    }
    CovarianceEstimate est = empirical_covariance(pooled, replicate_ids);
    double err = max_rel_err(est.cov, target);
    os << pt.n << "," << fmt17(pt.p) << "," << fmt17(est.cov[0][0]) << ","
       << fmt17(est.cov[0][1]) << "," << fmt17(est.cov[1][1]) << "," << fmt17(target[0][0])
       << "," << fmt17(target[0][1]) << "," << fmt17(target[1][1]) << "," << fmt17(err) << ","
       << fmt17(est.se[0][0]) << "," << fmt17(est.se[0][1]) << "," << fmt17(est.se[1][1])
       << "\n";

    const double inv_sqrt1 = 1.0 / std::sqrt(static_cast<double>(part.n1()));
    const double inv_sqrt2 = 1.0 / std::sqrt(static_cast<double>(part.n2()));
    std::vector<double> rep_mean1, rep_mean2;
    for (const auto& samples : run.samples) {
      double m1 = 0.0, m2 = 0.0;
      for (const auto& y : samples) {
        m1 += y[0];
        m2 += y[1];
      }
      double count = static_cast<double>(samples.size());
      rep_mean1.push_back(m1 / count * inv_sqrt1);
      rep_mean2.push_back(m2 / count * inv_sqrt2);
    }
    double mean1 = mean_of(rep_mean1);
    double mean2 = mean_of(rep_mean2);
    means_os << pt.n << "," << fmt17(pt.p) << "," << fmt17(cfg.beta) << ",mean1,"
             << fmt17(mean1) << "," << fmt17(between_replica_se(rep_mean1)) << "\n";
    means_os << pt.n << "," << fmt17(pt.p) << "," << fmt17(cfg.beta) << ",mean2,"
             << fmt17(mean2) << "," << fmt17(between_replica_se(rep_mean2)) << "\n";

    if (want_samples_csv(cfg, kpt, pts.size())) {
      char name[64];
      std::snprintf(name, sizeof name, "samples_N%d.csv", pt.n);
      write_samples_csv(em, name, run.samples);
    }
    if (kpt + 1 == pts.size()) {
      final_err = err;
      final_mean_abs = std::max(std::fabs(mean1), std::fabs(mean2));
      min_ess = point_min_ess;
    }
  }

  checks.push_back(check_lt("clt-cov-max-rel-err", final_err, default_tolerance("bg_cov_rel")));
  checks.push_back(
      check_lt("lln-mean-abs-final", final_mean_abs, default_tolerance("bg_mean_abs")));
  checks.push_back(check_geq("ess-min", min_ess, chain_default("ess_floor")));
  return checks;
}

// ---------------------------------------------------------------------------
// levy-sweep
// ---------------------------------------------------------------------------

std::vector<CheckResult> run_levy_sweep(const ExperimentConfig& cfg, Emitter& em) {
  std::vector<SweepPoint> pts = sweep_points(cfg);
  const double limit_var = 1.0 / (1.0 - cfg.beta);
  const Cdf1D limit = Cdf1D::gaussian(0.0, limit_var);

  std::ofstream os = em.open("levy.csv");
  os << "N,p,beta,metric,value,stderr\n";

  std::vector<double> bg_values, cw_values;
  for (const SweepPoint& pt : pts) {
    ModelParams params(pt.n, cfg.beta, pt.p, cfg.m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(pt.n));

    MagnetizationRun run = run_magnetization_point(cfg, params, scale);
    std::vector<double> pooled;
    std::vector<double> per_replica;
    for (const auto& samples : run.samples) {
      pooled.insert(pooled.end(), samples.begin(), samples.end());
      per_replica.push_back(levy_distance_1d(Cdf1D::from_samples(samples), limit));
    }
    double d_bg = levy_distance_1d(Cdf1D::from_samples(pooled), limit);
    bg_values.push_back(d_bg);
    os << pt.n << "," << fmt17(pt.p) << "," << fmt17(cfg.beta) << ",levy_bg," << fmt17(d_bg)
       << "," << fmt17(between_replica_se(per_replica)) << "\n";

    WeightedLaw cw = cw_exact_magnetization_law(params).scaled({scale});
    double d_cw = levy_distance_1d(Cdf1D::from_law(cw), limit);
    cw_values.push_back(d_cw);
    os << pt.n << "," << fmt17(pt.p) << "," << fmt17(cfg.beta) << ",levy_cw," << fmt17(d_cw)
       << ",\n";
  }

  std::vector<CheckResult> checks;
  if (bg_values.size() >= 2)
    checks.push_back(check_lt("levy-bg-decreasing", max_consecutive_increment(bg_values), 0.0));
  checks.push_back(
      check_lt("levy-bg-final", bg_values.back(), default_tolerance("levy_bg_final")));
  checks.push_back(
      check_lt("levy-cw-final", cw_values.back(), default_tolerance("levy_cw_final")));
  return checks;
}

// ---------------------------------------------------------------------------
// exact-small
// ---------------------------------------------------------------------------

double max_law_prob_diff(const WeightedLaw& a, const WeightedLaw& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.outcome(i)[0] != b.outcome(i)[0]) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::fabs(a.probability(i) - b.probability(i)));
  }
  return worst;
}

std::vector<CheckResult> run_exact_small(const ExperimentConfig& cfg, Emitter& em) {
  if (cfg.n_list.size() != 1) config_error("exact-small needs a single n");
  const int n = cfg.n_list[0];
  if (n > cfg.enum_cap)
    config_error("exact-small needs n <= enum_cap (full enumeration)");
  const double p = cfg.p_schedule.value(n);
  ModelParams params(n, cfg.beta, p, cfg.m);
  ReplicaPlan plan{cfg.master_seed, cfg.replicas};

  GraphSample graph = p == 1.0 ? GraphSample::complete_with_self_loops(n)
                               : sample_graph(params, plan.stream(0, 0));
  {
    std::ofstream os = em.open("graph.txt");
    graph.write_text(os);
  }

  WeightedLaw cw_law = cw_exact_magnetization_law(params);
  {
    std::ofstream os = em.open("law_cw_s.csv");
    cw_law.write_csv(os);
  }
  WeightedLaw bg_law = bg_exact_magnetization_law(params, graph, cfg.enum_cap);
  {
    std::ofstream os = em.open("law_bg_s.csv");
    bg_law.write_csv(os);
  }

  std::vector<CheckResult> checks;
  if (n <= 16) {
    WeightedLaw enumerated =
        enumerate_pushforward_cw(params, scaled_magnetization_observable(1.0), cfg.enum_cap);
    checks.push_back(check_lt("cw-sector-vs-enumeration",
                              max_law_prob_diff(cw_law, enumerated),
                              default_tolerance("sector_vs_enumeration")));
  }
  if (p == 1.0) {
    checks.push_back(check_lt("bg-vs-cw-pushforward-identity",
                              max_law_prob_diff(bg_law, cw_law),
                              default_tolerance("pushforward_identity")));
  }

  // T = R * E^{P,CW}(f) on an independent sparse graph.
  const int rt_n = cfg.rt_n > 0 ? cfg.rt_n : std::min(n, 14);
  if (rt_n > cfg.enum_cap) config_error("rt_n exceeds enum_cap");
  if (!(cfg.rt_p > 0.0) || cfg.rt_p > 1.0) config_error("rt_p must lie in (0, 1]");
  ModelParams rt_params(rt_n, cfg.beta, cfg.rt_p, cfg.m);
  GraphSample rt_graph = sample_graph(rt_params, plan.stream(0, 1));
  const double rt_scale = 1.0 / std::sqrt(static_cast<double>(rt_n));
  SectorObservable f = [rt_scale](int s) { return 1.0 + 0.5 * std::cos(rt_scale * s); };
  RTValue rt = rt_functionals(rt_params, rt_graph, f, cfg.enum_cap);
  double cw_mean = cw_sector_expectation(rt_params, f);
  checks.push_back(check_lt("rt-identity", std::fabs(rt.t - rt.r * cw_mean),
                            default_tolerance("rt_identity")));

  double dml_err =
      std::fabs(std::exp(log_nu_count(static_cast<int>(cfg.dml_n), 0) -
                         de_moivre_laplace_log(static_cast<int>(cfg.dml_n), 0)) -
                1.0);
  checks.push_back(
      check_lt("dml-ratio-abs-err", dml_err, default_tolerance("counts_dml_ratio_err")));

  {
    std::ofstream os = em.open("exact_small_summary.csv");
    os << "quantity,value\n";
    os << "n," << n << "\n";
    os << "p," << fmt17(p) << "\n";
    os << "edge_count," << graph.edge_count() << "\n";
    os << "rt_n," << rt_n << "\n";
    os << "rt_R," << fmt17(rt.r) << "\n";
    os << "rt_T," << fmt17(rt.t) << "\n";
    os << "rt_cw_mean," << fmt17(cw_mean) << "\n";
  }
  return checks;
}

// ---------------------------------------------------------------------------
// bounded-integral
// ---------------------------------------------------------------------------

struct TestFunctionSpec {
  bool two_group;
  std::function<double(double)> h1;
  std::function<double(double, double)> h2;
};

TestFunctionSpec resolve_test_function(const std::string& id) {
  TestFunctionSpec spec;
  if (id == "one") {
    spec.two_group = false;
    spec.h1 = [](double) { return 1.0; };
    return spec;
  }
  if (id == "cos") {
    spec.two_group = false;
    spec.h1 = [](double y) { return std::cos(y); };
    return spec;
  }
  for (const TestFunction2D& member : bl_family_v1())
    if (member.id == id) {
      spec.two_group = true;
      spec.h2 = member.eval;
      return spec;
    }
  throw std::invalid_argument(
      "unknown test function id \"" + id +
      "\": expected one, cos, or a bounded-family id such as cc:1:1 or box:0:0");
}

std::vector<CheckResult> run_bounded_integral(const ExperimentConfig& cfg, Emitter& em) {
  TestFunctionSpec spec = resolve_test_function(cfg.test_function);
  std::vector<SweepPoint> pts = sweep_points(cfg);

  std::ofstream os = em.open("bounded_integral.csv");
  os << "N,p,cw,bg,se,abs_diff\n";

  double final_diff = 0.0, final_se = 0.0;
  for (const SweepPoint& pt : pts) {
    ModelParams params(pt.n, cfg.beta, pt.p, cfg.m);
    double cw_value = 0.0;
    std::vector<double> replica_means;

    if (!spec.two_group) {
      const double scale = 1.0 / std::sqrt(static_cast<double>(pt.n));
      WeightedLaw cw_law = cw_exact_magnetization_law(params);
      for (std::size_t i = 0; i < cw_law.size(); ++i)
        cw_value += cw_law.probability(i) * spec.h1(scale * cw_law.outcome(i)[0]);

      if (pt.n <= cfg.enum_cap) {
        ReplicaPlan plan{cfg.master_seed, cfg.replicas};
        replica_means.resize(static_cast<std::size_t>(cfg.replicas));
        parallel_for_index(cfg.replicas, cfg.threads, [&](int r) {
          GraphSample graph = sample_graph(params, plan.stream(r, 0));
          WeightedLaw law = bg_exact_magnetization_law(params, graph, cfg.enum_cap);
          double acc = 0.0;
          for (std::size_t i = 0; i < law.size(); ++i)
            acc += law.probability(i) * spec.h1(scale * law.outcome(i)[0]);
          replica_means[static_cast<std::size_t>(r)] = acc;
        });
      } else {
        MagnetizationRun run = run_magnetization_point(cfg, params, scale);
        for (const auto& samples : run.samples) {
          double acc = 0.0;
          for (double y : samples) acc += spec.h1(y);
          replica_means.push_back(acc / static_cast<double>(samples.size()));
        }
      }
    } else {
      TwoGroupPartition part = partition_for(cfg, pt.n);
      WeightedLaw law = cw_exact_two_group_law(params, part);
      law = law.scaled({1.0 / std::sqrt(static_cast<double>(part.n1())),
                        1.0 / std::sqrt(static_cast<double>(part.n2()))});
      for (std::size_t i = 0; i < law.size(); ++i)
        cw_value += law.probability(i) * spec.h2(law.outcome(i)[0], law.outcome(i)[1]);

      TwoGroupRun run = run_two_group_point(cfg, params, part);
      for (const auto& samples : run.samples) {
        double acc = 0.0;
        for (const auto& y : samples) acc += spec.h2(y[0], y[1]);
        replica_means.push_back(acc / static_cast<double>(samples.size()));
      }
    }

    double bg_value = mean_of(replica_means);
    double se = between_replica_se(replica_means);
    double diff = std::fabs(bg_value - cw_value);
    os << pt.n << "," << fmt17(pt.p) << "," << fmt17(cw_value) << "," << fmt17(bg_value) << ","
       << fmt17(se) << "," << fmt17(diff) << "\n";
    final_diff = diff;
    final_se = se;
  }

  std::vector<CheckResult> checks;
  // A replicate SE at rounding scale means the replica means agree exactly
  // (constant test function, or p = 1); a sigma ratio against such an SE
  // would amplify rounding residue, so compare absolutely instead.
  if (final_se > default_tolerance("exact_bg_vs_cw_abs")) {
    checks.push_back(check_le("bounded-integral-final-sigmas", final_diff / final_se,
                              default_tolerance("bounded_integral_sigma")));
  } else {
    checks.push_back(check_lt("bounded-integral-final-abs", final_diff,
                              default_tolerance("exact_bg_vs_cw_abs")));
  }
  return checks;
}

// ---------------------------------------------------------------------------
// config plumbing
// ---------------------------------------------------------------------------

long long as_integer(const json& v, const std::string& key) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_unsigned()) return static_cast<long long>(v.get<unsigned long long>());
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (d == std::floor(d) && std::fabs(d) < 9.0e15) return static_cast<long long>(d);
  }
  config_error("key \"" + key + "\" must be an integer");
}

double as_number(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  config_error("key \"" + key + "\" must be a number");
}

std::string as_string(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  config_error("key \"" + key + "\" must be a string");
}

std::vector<double> as_number_list(const json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& item : v) out.push_back(as_number(item, key));
    return out;
  }
  if (v.is_number()) return {v.get<double>()};
  if (v.is_string()) {
    // comma-separated shorthand: "500,1000,2000"
    std::stringstream ss(v.get<std::string>());
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      char* end = nullptr;
      double d = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0')
        config_error("key \"" + key + "\": cannot parse list entry \"" + tok + "\"");
      out.push_back(d);
    }
    if (out.empty()) config_error("key \"" + key + "\": empty list");
    return out;
  }
  config_error("key \"" + key + "\" must be a number, array, or comma-separated string");
}

std::vector<int> as_int_list(const json& v, const std::string& key) {
  std::vector<int> out;
  for (double d : as_number_list(v, key)) {
    if (d != std::floor(d) || std::fabs(d) > 2.0e9)
      config_error("key \"" + key + "\" must contain integers");
    out.push_back(static_cast<int>(d));
  }
  return out;
}

std::uint64_t as_seed(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    long long s = v.get<long long>();
    if (s < 0) config_error("key \"" + key + "\" must be a non-negative seed");
    return static_cast<std::uint64_t>(s);
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    char* end = nullptr;
    errno = 0;
    unsigned long long parsed = std::strtoull(s.c_str(), &end, 10);
    if (errno != 0 || end == s.c_str() || *end != '\0')
      config_error("key \"" + key + "\" is not a decimal 64-bit seed: \"" + s + "\"");
    return parsed;
  }
  config_error("key \"" + key + "\" must be a decimal 64-bit seed (number or string)");
}

void apply_experiment_defaults(ExperimentConfig& cfg) {
  if (cfg.n_list.empty()) {
    switch (cfg.experiment) {
      case ExperimentKind::VerifyLemma32:
        cfg.n_list = {100, 1000, 10000};
        break;
      case ExperimentKind::VerifyCounts:
        cfg.n_list = {8};
        break;
      case ExperimentKind::Tails:
        cfg.n_list = {64, 256, 1024, 4096};
        break;
      case ExperimentKind::RnConcentration:
        cfg.n_list = {10, 14, 18, 22};
        break;
      case ExperimentKind::SweepLln:
      case ExperimentKind::SweepClt:
      case ExperimentKind::LevySweep:
        cfg.n_list = {500, 1000, 2000, 4000};
        break;
      case ExperimentKind::ExactSmall:
        cfg.n_list = {12};
        break;
      case ExperimentKind::BoundedIntegral:
        cfg.n_list = {500, 1000, 2000};
        break;
    }
  }
}

void validate_config(const ExperimentConfig& cfg) {
  if (!(cfg.beta > 0.0) || !std::isfinite(cfg.beta)) config_error("beta must be a positive number");
  if (cfg.beta >= 1.0)
    config_error("beta = " + fmt17(cfg.beta) +
                 " rejected: the standing assumptions require beta < 1 (theorem mode)");
  if (!(cfg.m > 0.0 && cfg.m < 1.0)) config_error("m must lie in (0, 1)");
  if (cfg.p_schedule.kind == PSchedule::Kind::Power &&
      !(cfg.p_schedule.gamma >= 0.0 && cfg.p_schedule.gamma < 1.0))
    config_error("p-schedule gamma = " + fmt17(cfg.p_schedule.gamma) +
                 " rejected: the standing assumptions require Np -> infinity along sweeps, so "
                 "gamma must lie in [0, 1)");
  if (cfg.p_schedule.kind == PSchedule::Kind::Constant &&
      (!(cfg.p_schedule.c > 0.0) || cfg.p_schedule.c > 1.0))
    config_error("constant p must lie in (0, 1]");
  if (cfg.p_schedule.kind == PSchedule::Kind::Power && !(cfg.p_schedule.c > 0.0))
    config_error("p-schedule coefficient c must be > 0");
  if (cfg.replicas < 1) config_error("replicas must be >= 1");
  if (cfg.threads < 1) config_error("threads must be >= 1");
  if (cfg.chain_recorded < 1) config_error("chain_recorded must be >= 1");
  if (cfg.chain_thinning < 1) config_error("chain_thinning must be >= 1");
  if (!(cfg.alpha1 > 0.0) || !(cfg.alpha2 > 0.0) || cfg.alpha1 + cfg.alpha2 > 1.0 + 1e-12)
    config_error("alpha1, alpha2 must be positive with alpha1 + alpha2 <= 1");
  if (cfg.enum_cap < 1 || cfg.enum_cap > 30) config_error("enum_cap must lie in [1, 30]");
  if (cfg.dml_n < 2) config_error("dml_n must be >= 2");
  if (cfg.samples_csv != "none" && cfg.samples_csv != "final" && cfg.samples_csv != "all")
    config_error("samples_csv must be one of none, final, all");
  parse_chain_init(cfg.chain_init);
  for (double beta : cfg.z_beta_list)
    if (!(beta > 0.0) || beta >= 1.0)
      config_error("z_beta_list entries must lie in (0, 1) (theorem mode)");
  for (int n : cfg.z_n_list)
    if (n < 1) config_error("z_n_list entries must be >= 1");
  if (cfg.experiment == ExperimentKind::Tails &&
      std::find(cfg.n_list.begin(), cfg.n_list.end(), cfg.tail_check_n) == cfg.n_list.end())
    config_error("tail_check_n = " + std::to_string(cfg.tail_check_n) + " is not in n_list");
}

ordered_json config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["experiment"] = experiment_name(cfg.experiment);
  j["beta"] = cfg.beta;
  j["m"] = cfg.m;
  j["n_list"] = cfg.n_list;
  j["p_schedule_kind"] = cfg.p_schedule.kind == PSchedule::Kind::Constant ? "constant" : "power";
  j["p_schedule_c"] = cfg.p_schedule.c;
  j["p_schedule_gamma"] = cfg.p_schedule.gamma;
  j["alpha1"] = cfg.alpha1;
  j["alpha2"] = cfg.alpha2;
  j["replicas"] = cfg.replicas;
  j["master_seed"] = cfg.master_seed;
  j["chain_recorded"] = cfg.chain_recorded;
  j["chain_burn_in"] = cfg.chain_burn_in;
  j["chain_thinning"] = cfg.chain_thinning;
  j["chain_init"] = cfg.chain_init;
  j["samples_csv"] = cfg.samples_csv;
  j["delta"] = cfg.delta;
  j["np_list"] = cfg.np_list;
  j["final_n"] = cfg.final_n;
  j["final_p"] = cfg.final_p;
  j["tail_delta"] = cfg.tail_delta;
  j["tail_check_n"] = cfg.tail_check_n;
  j["z_beta_list"] = cfg.z_beta_list;
  j["z_n_list"] = cfg.z_n_list;
  j["side"] = cfg.side;
  j["test_function"] = cfg.test_function;
  j["exact_n"] = cfg.exact_n;
  j["rt_n"] = cfg.rt_n;
  j["rt_p"] = cfg.rt_p;
  j["dml_n"] = cfg.dml_n;
  j["enum_cap"] = cfg.enum_cap;
  j["brute_n_max"] = cfg.brute_n_max;
  j["out_dir"] = cfg.out_dir;
  j["threads"] = cfg.threads;
  return j;
}

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace

double PSchedule::value(int n) const {
  if (kind == Kind::Constant) return c;
  return c * std::pow(static_cast<double>(n), -gamma);
}

std::string PSchedule::describe() const {
  if (kind == Kind::Constant) return "p = " + fmt17(c);
  return "p = " + fmt17(c) + " * N^-" + fmt17(gamma);
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
  for (const auto& [text, kind] : kExperimentNames)
    if (name == text) return kind;
  throw std::invalid_argument("unknown experiment \"" + name + "\"");
}

const char* experiment_name(ExperimentKind kind) {
  for (const auto& [text, k] : kExperimentNames)
    if (k == kind) return text;
  throw std::logic_error("unmapped experiment kind");
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [text, kind] : kExperimentNames) out.emplace_back(text);
    return out;
  }();
  return names;
}

bool ExperimentResult::pass() const {
  for (const CheckResult& c : checks)
    if (!c.pass) return false;
  return true;
}

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& cli_experiment) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) config_error("config must be a flat JSON object");

  ExperimentConfig cfg;
  bool saw_experiment = false, saw_p = false, saw_schedule = false;
  std::string experiment_value;

  for (const auto& [key, value] : doc.items()) {
    if (key == "experiment") {
      experiment_value = as_string(value, key);
      saw_experiment = true;
    } else if (key == "beta") {
      cfg.beta = as_number(value, key);
    } else if (key == "m") {
      cfg.m = as_number(value, key);
    } else if (key == "n") {
      cfg.n_list = {static_cast<int>(as_integer(value, key))};
    } else if (key == "n_list") {
      cfg.n_list = as_int_list(value, key);
    } else if (key == "p") {
      cfg.p_schedule.kind = PSchedule::Kind::Constant;
      cfg.p_schedule.c = as_number(value, key);
      saw_p = true;
    } else if (key == "p_schedule_kind") {
      const std::string kind = as_string(value, key);
      if (kind == "constant") {
        cfg.p_schedule.kind = PSchedule::Kind::Constant;
      } else if (kind == "power") {
        cfg.p_schedule.kind = PSchedule::Kind::Power;
      } else {
        config_error("p_schedule_kind must be constant or power");
      }
      saw_schedule = true;
    } else if (key == "p_schedule_c") {
      cfg.p_schedule.c = as_number(value, key);
      saw_schedule = true;
    } else if (key == "p_schedule_gamma") {
      cfg.p_schedule.gamma = as_number(value, key);
      saw_schedule = true;
    } else if (key == "alpha1") {
      cfg.alpha1 = as_number(value, key);
    } else if (key == "alpha2") {
      cfg.alpha2 = as_number(value, key);
    } else if (key == "replicas") {
      cfg.replicas = static_cast<int>(as_integer(value, key));
    } else if (key == "master_seed") {
      cfg.master_seed = as_seed(value, key);
    } else if (key == "chain_recorded") {
      cfg.chain_recorded = as_integer(value, key);
    } else if (key == "chain_burn_in") {
      cfg.chain_burn_in = as_integer(value, key);
    } else if (key == "chain_thinning") {
      cfg.chain_thinning = as_integer(value, key);
    } else if (key == "chain_init") {
      cfg.chain_init = as_string(value, key);
    } else if (key == "samples_csv") {
      cfg.samples_csv = as_string(value, key);
    } else if (key == "delta") {
      cfg.delta = as_number(value, key);
    } else if (key == "np_list") {
      cfg.np_list = as_number_list(value, key);
    } else if (key == "final_n") {
      cfg.final_n = static_cast<int>(as_integer(value, key));
    } else if (key == "final_p") {
      cfg.final_p = as_number(value, key);
    } else if (key == "tail_delta") {
      cfg.tail_delta = as_number(value, key);
    } else if (key == "tail_check_n") {
      cfg.tail_check_n = static_cast<int>(as_integer(value, key));
    } else if (key == "z_beta_list") {
      cfg.z_beta_list = as_number_list(value, key);
    } else if (key == "z_n_list") {
      cfg.z_n_list = as_int_list(value, key);
    } else if (key == "side") {
      cfg.side = as_string(value, key);
    } else if (key == "test_function") {
      cfg.test_function = as_string(value, key);
    } else if (key == "exact_n") {
      cfg.exact_n = static_cast<int>(as_integer(value, key));
    } else if (key == "rt_n") {
      cfg.rt_n = static_cast<int>(as_integer(value, key));
    } else if (key == "rt_p") {
      cfg.rt_p = as_number(value, key);
    } else if (key == "dml_n") {
      cfg.dml_n = as_integer(value, key);
    } else if (key == "enum_cap") {
      cfg.enum_cap = static_cast<int>(as_integer(value, key));
    } else if (key == "brute_n_max") {
      cfg.brute_n_max = static_cast<int>(as_integer(value, key));
    } else if (key == "out_dir") {
      cfg.out_dir = as_string(value, key);
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(as_integer(value, key));
    } else {
      config_error("unknown config key \"" + key + "\"");
    }
  }

  if (saw_p && saw_schedule)
    config_error("give either p or the p_schedule_* keys, not both");

  if (!cli_experiment.empty()) {
    if (saw_experiment && experiment_value != cli_experiment)
      config_error("experiment \"" + experiment_value +
                   "\" in the config conflicts with the command line (\"" + cli_experiment +
                   "\")");
    cfg.experiment = experiment_kind_from_name(cli_experiment);
  } else if (saw_experiment) {
    cfg.experiment = experiment_kind_from_name(experiment_value);
  } else {
    config_error("no experiment named (config key \"experiment\" or command line)");
  }

  apply_experiment_defaults(cfg);
  validate_config(cfg);
  return cfg;
}

ExperimentConfig parse_experiment_config_file(const std::string& path,
                                              const std::string& cli_experiment) {
  std::ifstream is(path);
  if (!is) config_error("cannot read config file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_experiment_config(ss.str(), cli_experiment);
}

std::string summary_json_text(const ExperimentResult& result) {
  ordered_json j;
  j["schema_version"] = 1;
  j["experiment"] = result.experiment;
  j["pass"] = result.pass();
  j["defaults_version"] = defaults_version();
  j["defaults_sha1"] = defaults_sha1();
  j["checks"] = ordered_json::array();
  for (const CheckResult& c : result.checks) {
    ordered_json jc;
    jc["name"] = c.name;
    jc["value"] = c.value;
    jc["comparison"] = c.comparison;
    jc["threshold"] = c.threshold;
    jc["pass"] = c.pass;
    j["checks"].push_back(jc);
  }
  j["artifacts"] = result.artifacts;
  return j.dump(2) + "\n";
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  fs::path dir(config.out_dir);
  fs::create_directories(dir);
  Emitter em(dir);

  // Manifest first, so even an aborted run records what was asked.
  {
    ordered_json manifest;
    manifest["schema_version"] = 1;
    manifest["experiment"] = experiment_name(config.experiment);
    manifest["config"] = config_to_json(config);
    manifest["defaults_version"] = defaults_version();
    manifest["defaults_sha1"] = defaults_sha1();
    manifest["generated_at"] = utc_timestamp();
    std::ofstream os = em.open("manifest.json");
    os << manifest.dump(2) << "\n";
  }

  ExperimentResult result;
  result.experiment = experiment_name(config.experiment);
  switch (config.experiment) {
    case ExperimentKind::VerifyLemma32:
      result.checks = run_verify_lemma32(config, em);
      break;
    case ExperimentKind::VerifyCounts:
      result.checks = run_verify_counts(config, em);
      break;
    case ExperimentKind::Tails:
      result.checks = run_tails(config, em);
      break;
    case ExperimentKind::RnConcentration:
      result.checks = run_rn_concentration(config, em);
      break;
    case ExperimentKind::SweepLln:
      result.checks = run_sweep_lln(config, em);
      break;
    case ExperimentKind::SweepClt:
      result.checks = run_sweep_clt(config, em);
      break;
    case ExperimentKind::LevySweep:
      result.checks = run_levy_sweep(config, em);
      break;
    case ExperimentKind::ExactSmall:
      result.checks = run_exact_small(config, em);
      break;
    case ExperimentKind::BoundedIntegral:
      result.checks = run_bounded_integral(config, em);
      break;
  }

  {
    std::ofstream os = em.open("summary.json");
    result.artifacts = em.artifacts();
    os << summary_json_text(result);
  }
  return result;
}

}  // namespace dcw
