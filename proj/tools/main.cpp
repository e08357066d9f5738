#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>
#include <utility>
#include <vector>

#include "invasion/coalescing.hpp"
#include "invasion/errors.hpp"
#include "invasion/estimators.hpp"
#include "invasion/induced.hpp"
#include "invasion/io.hpp"
#include "invasion/limit.hpp"
#include "invasion/spectral.hpp"

using nlohmann::json;

namespace {

using namespace invasion;

struct RunConfig {
  int m = 2;
  int n = 3;
  std::uint64_t seed = 1;
  std::uint64_t steps = 10'000'000;  // restart estimator budget
  std::uint64_t burn_in = 0;         // 0: steps / 100
  std::uint64_t replicas = 100'000;
  std::uint64_t horizon = 0;  // 0: about six mean lifetimes
  std::uint64_t t_star = 0;   // 0: about one mean lifetime
  double trim = 1e-3;
  double tol = 1e-13;
  std::uint64_t state_cap = 2000;
  int k0 = -1;  // -1: 1
  int l0 = -1;  // -1: ceil(n/2)
  std::string method = "exact";
  std::string start = "split";
  int threads = 1;
  std::string out;
  std::string config_path;
};

// the JSON config wins over anything given on the command line
void apply_config(RunConfig& rc) {
  if (rc.config_path.empty()) return;
  std::ifstream in(rc.config_path);
  if (!in) throw std::invalid_argument("config: cannot open " + rc.config_path);
  const json j = json::parse(in);
  if (j.contains("m")) rc.m = j.at("m").get<int>();
  if (j.contains("n")) rc.n = j.at("n").get<int>();
  if (j.contains("seed")) rc.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("steps")) rc.steps = j.at("steps").get<std::uint64_t>();
  if (j.contains("burn_in")) rc.burn_in = j.at("burn_in").get<std::uint64_t>();
  if (j.contains("replicas")) rc.replicas = j.at("replicas").get<std::uint64_t>();
  if (j.contains("horizon")) rc.horizon = j.at("horizon").get<std::uint64_t>();
  if (j.contains("t_star")) rc.t_star = j.at("t_star").get<std::uint64_t>();
  if (j.contains("trim")) rc.trim = j.at("trim").get<double>();
  if (j.contains("tol")) rc.tol = j.at("tol").get<double>();
  if (j.contains("state_cap")) rc.state_cap = j.at("state_cap").get<std::uint64_t>();
  if (j.contains("k0")) rc.k0 = j.at("k0").get<int>();
  if (j.contains("l0")) rc.l0 = j.at("l0").get<int>();
  if (j.contains("method")) rc.method = j.at("method").get<std::string>();
  if (j.contains("start")) rc.start = j.at("start").get<std::string>();
  if (j.contains("threads")) rc.threads = j.at("threads").get<int>();
  if (j.contains("out")) rc.out = j.at("out").get<std::string>();
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty())
    std::cout << content;
  else
    write_file_atomic(path, content);
}

std::vector<std::pair<std::string, std::string>> base_meta(const RunConfig& rc,
                                                           const std::string& command) {
  return {{"command", command},
          {"m", std::to_string(rc.m)},
          {"n", std::to_string(rc.n)},
          {"seed", std::to_string(rc.seed)},
          {"threads", std::to_string(rc.threads)},
          {"version", version_string()}};
}

json meta_json(const std::vector<std::pair<std::string, std::string>>& kv) {
  json j = json::object();
  for (const auto& [k, v] : kv) j[k] = v;
  return j;
}

InducedState initial_state(const InducedKernel& kernel, const RunConfig& rc) {
  const InducedState s{rc.k0 < 0 ? 1 : rc.k0, rc.l0 < 0 ? (kernel.n() + 1) / 2 : rc.l0};
  if (kernel.classify(s) != StateClass::transient)
    throw std::invalid_argument("initial state (" + std::to_string(s.k) + "," +
                                std::to_string(s.l) + ") is not transient");
  return s;
}

// both the absorption time of the aggregated chain and the pair coalescence
// time decay at the common rate lambda, so one mean lifetime 1/(1-lambda)
// calibrates every default budget
std::uint64_t default_horizon(const RunConfig& rc) {
  const double mean = 1.0 / (1.0 - lambda_cmc_numeric(rc.m, rc.n));
  return static_cast<std::uint64_t>(std::ceil(6.0 * mean));
}

std::uint64_t default_t_star(const RunConfig& rc) {
  const double mean = 1.0 / (1.0 - lambda_cmc_numeric(rc.m, rc.n));
  return static_cast<std::uint64_t>(std::ceil(mean));
}

std::string tail_csv(const RunConfig& rc, const std::string& command,
                     const std::vector<std::pair<std::string, std::string>>& extra,
                     const TailEstimate& tail) {
  auto meta = base_meta(rc, command);
  meta.insert(meta.end(), extra.begin(), extra.end());
  std::string csv = metadata_block(meta) + "t,survivors,p_hat\n";
  const std::vector<double> p = tail.probabilities();
  for (std::size_t t = 0; t < tail.survivors.size(); ++t)
    csv += std::to_string(t) + "," + std::to_string(tail.survivors[t]) + "," +
           format_g17(p[t]) + "\n";
  return csv;
}

int run_lambda(const RunConfig& rc) {
  const InducedKernel kernel(rc.m, rc.n);  // validates m, n
  json estimates = json::object();
  estimates["pair_numeric"] = lambda_cmc_numeric(rc.m, rc.n);
  estimates["asymptotic"] = lambda_asymptotic(rc.m, rc.n);
  if (rc.m == 1) estimates["closed_m1"] = lambda_closed_m1(rc.n);

  json report;
  report["meta"] = meta_json(base_meta(rc, "lambda"));
  report["meta"]["tol"] = format_g17(rc.tol);
  const std::size_t dim = transient_states(rc.m, rc.n).size();
  report["transient_states"] = dim;
  if (dim <= rc.state_cap) {
    const SubstochasticMatrix s = build_S(rc.m, rc.n, rc.state_cap);
    const PerronResult pr = perron_left(s.entries, rc.tol);
    estimates["spectral"] = pr.lambda;
    report["spectral_residual"] = pr.residual;
    report["spectral_iterations"] = pr.iterations;
  } else {
    report["spectral_note"] =
        "transient dimension " + std::to_string(dim) + " exceeds state cap " +
        std::to_string(rc.state_cap) + "; spectral estimate omitted";
  }
  report["lambda"] = estimates;

  json gaps = json::object();
  for (auto a = estimates.begin(); a != estimates.end(); ++a)
    for (auto b = std::next(a); b != estimates.end(); ++b)
      gaps[a.key() + "_vs_" + b.key()] =
          std::abs(a.value().get<double>() - b.value().get<double>());
  report["gaps"] = gaps;

  emit(rc.out, report.dump(2) + "\n");
  return 0;
}

int run_qsd(const RunConfig& rc) {
  const InducedKernel kernel(rc.m, rc.n);
  const std::vector<InducedState> states = transient_states(rc.m, rc.n);
  std::vector<double> probs;
  std::vector<std::pair<std::string, std::string>> extra{{"method", rc.method}};

  if (rc.method == "exact") {
    const SubstochasticMatrix s = build_S(rc.m, rc.n, rc.state_cap);
    const PerronResult pr = perron_left(s.entries, rc.tol);
    probs = pr.left_vector;
    extra.emplace_back("lambda", format_g17(pr.lambda));
    extra.emplace_back("tol", format_g17(rc.tol));
  } else if (rc.method == "restart") {
    const std::uint64_t burn = rc.burn_in == 0 ? rc.steps / 100 : rc.burn_in;
    const EmpiricalMeasure measure =
        estimate_qsd_restart(kernel, initial_state(kernel, rc), rc.steps, burn, rc.seed);
    probs = measure.probabilities(states);
    extra.emplace_back("steps", std::to_string(rc.steps));
    extra.emplace_back("burn_in", std::to_string(burn));
  } else if (rc.method == "conditional") {
    const std::uint64_t t_star = rc.t_star == 0 ? default_t_star(rc) : rc.t_star;
    const EmpiricalMeasure measure = estimate_qsd_conditional(
        kernel, initial_state(kernel, rc), t_star, rc.replicas, rc.seed, rc.threads);
    probs = measure.probabilities(states);
    extra.emplace_back("t_star", std::to_string(t_star));
    extra.emplace_back("replicas", std::to_string(rc.replicas));
    extra.emplace_back("survivors", std::to_string(measure.total()));
  } else {
    throw std::invalid_argument("qsd: unknown method '" + rc.method +
                                "' (exact|restart|conditional)");
  }

  auto meta = base_meta(rc, "qsd");
  meta.insert(meta.end(), extra.begin(), extra.end());
  std::string csv = metadata_block(meta) + "k,l,prob\n";
  for (std::size_t i = 0; i < states.size(); ++i)
    csv += std::to_string(states[i].k) + "," + std::to_string(states[i].l) + "," +
           format_g17(probs[i]) + "\n";
  emit(rc.out, csv);
  return 0;
}

int run_tail(const RunConfig& rc) {
  const InducedKernel kernel(rc.m, rc.n);
  const InducedState initial = initial_state(kernel, rc);
  const std::uint64_t horizon = rc.horizon == 0 ? default_horizon(rc) : rc.horizon;
  const TailEstimate tail =
      survival_tail_chain(kernel, initial, horizon, rc.replicas, rc.seed, rc.threads);
  const std::vector<double> p = tail.probabilities();
  const RegressionReport reg = regress_lambda(p, rc.trim);

  const std::vector<std::pair<std::string, std::string>> extra{
      {"k0", std::to_string(initial.k)},
      {"l0", std::to_string(initial.l)},
      {"replicas", std::to_string(rc.replicas)},
      {"horizon", std::to_string(horizon)},
      {"trim", format_g17(rc.trim)}};
  const std::string csv = tail_csv(rc, "tail", extra, tail);

  json report;
  report["meta"] = meta_json(base_meta(rc, "tail"));
  for (const auto& [k, v] : extra) report["meta"][k] = v;
  report["slope"] = reg.slope;
  report["intercept"] = reg.intercept;
  report["lambda_hat"] = reg.lambda_hat;
  report["t_first"] = reg.t_first;
  report["t_last"] = reg.t_last;
  report["points_kept"] = reg.points_kept;
  const double lambda_pair = lambda_cmc_numeric(rc.m, rc.n);
  report["lambda_pair_numeric"] = lambda_pair;
  report["escape_rate_relative_gap"] =
      std::abs((1.0 - reg.lambda_hat) / (1.0 - lambda_pair) - 1.0);

  if (rc.out.empty()) {
    emit("", csv);
    emit("", report.dump(2) + "\n");
  } else {
    emit(rc.out, csv);
    emit(rc.out + ".json", report.dump(2) + "\n");
  }
  return 0;
}

int run_spectrum(const RunConfig& rc) {
  const SubstochasticMatrix s = build_S(rc.m, rc.n, rc.state_cap);
  const std::vector<std::complex<double>> eigs = full_spectrum(s.entries);

  double min_re = eigs.empty() ? 0.0 : eigs.front().real();
  double max_re = min_re;
  double max_im = 0.0;
  for (const auto& e : eigs) {
    min_re = std::min(min_re, e.real());
    max_re = std::max(max_re, e.real());
    max_im = std::max(max_im, std::abs(e.imag()));
  }
  const double mid2 = min_re + max_re;  // reflection: re -> (min+max) - re

  auto meta = base_meta(rc, "spectrum");
  meta.emplace_back("count", std::to_string(eigs.size()));
  meta.emplace_back("lambda_top", format_g17(eigs.empty() ? 0.0 : eigs.front().real()));
  meta.emplace_back("max_abs_imag", format_g17(max_im));
  meta.emplace_back("reflection_defect", format_g17(spectrum_reflection_defect(eigs)));
  std::string csv = metadata_block(meta) + "re,im,source\n";
  for (const auto& e : eigs)
    csv += format_g17(e.real()) + "," + format_g17(e.imag()) + ",spectrum\n";
  for (const auto& e : eigs)
    csv += format_g17(mid2 - e.real()) + "," + format_g17(e.imag()) + ",reflected\n";
  emit(rc.out, csv);
  return 0;
}

int run_limit_check(const RunConfig& rc) {
  const SubstochasticMatrix s = build_S(rc.m, rc.n, rc.state_cap);
  const PerronResult pr = perron_left(s.entries, rc.tol);
  const LimitDiagnostics diag = compare_to_limit(pr.left_vector, rc.m, rc.n);
  const SLDecomposition sl = sl_decompose(pr.left_vector, pr.lambda, rc.m, rc.n);
  // the identity is exact through quadratics, so a cubic probes the genuine
  // third-order remainder; gap * n^3 stays bounded as n grows
  const auto cubic = [](double x) { return x * x * x; };
  const auto cubic_p = [](double x) { return 3.0 * x * x; };
  const auto cubic_pp = [](double x) { return 6.0 * x; };
  const double taylor_gap =
      taylor_identity_gap(pr.left_vector, pr.lambda, rc.m, rc.n, cubic, cubic_p, cubic_pp);

  json report;
  report["meta"] = meta_json(base_meta(rc, "limit-check"));
  report["meta"]["tol"] = format_g17(rc.tol);
  report["lambda"] = pr.lambda;
  report["ks_marginal"] = diag.ks_marginal;
  report["ks_beta"] = diag.ks_beta;
  report["tv_binomial"] = diag.tv_binomial;
  report["max_ks_beta"] = diag.max_ks_beta;
  report["max_tv_binomial"] = diag.max_tv_binomial;
  report["sl_residual"] = sl.max_residual;
  report["sl_col_sum_max"] = sl.max_col_sum_S;
  report["sl_row_sum_max"] = sl.max_row_sum_L;
  report["sl_corner_gap_s"] = sl.corner_gap_S;
  report["sl_corner_gap_l"] = sl.corner_gap_L;
  report["taylor_gap"] = taylor_gap;
  report["taylor_gap_times_n3"] =
      taylor_gap * static_cast<double>(rc.n) * rc.n * rc.n;
  emit(rc.out, report.dump(2) + "\n");
  return 0;
}

int run_sigma(const RunConfig& rc) {
  PairState start;
  if (rc.start == "both_large")
    start = PairState::both_large;
  else if (rc.start == "both_small")
    start = PairState::both_small;
  else if (rc.start == "split")
    start = PairState::split;
  else
    throw std::invalid_argument("sigma: unknown start '" + rc.start +
                                "' (both_large|both_small|split)");
  if (start == PairState::both_small && rc.m < 2)
    throw std::invalid_argument("sigma: both_small needs m >= 2");

  const PairMatrix pm = pair_matrix(rc.m, rc.n);
  const std::uint64_t horizon = rc.horizon == 0 ? default_horizon(rc) : rc.horizon;
  const TailEstimate tail = detail::tail_from_replicas(
      [&](std::uint64_t replica_seed) {
        Rng rng(replica_seed);
        return sample_sigma(pm, start, rng);
      },
      horizon, rc.replicas, rc.seed, rc.threads);

  const std::vector<std::pair<std::string, std::string>> extra{
      {"start", rc.start},
      {"replicas", std::to_string(rc.replicas)},
      {"horizon", std::to_string(horizon)}};
  const std::string csv = tail_csv(rc, "sigma", extra, tail);

  json report;
  report["meta"] = meta_json(base_meta(rc, "sigma"));
  for (const auto& [k, v] : extra) report["meta"][k] = v;
  double truncated_mean = 0.0;  // sum of P(sigma > t) = E[min(sigma, horizon+1)]
  for (const double p : tail.probabilities()) truncated_mean += p;
  report["mean_sigma_truncated"] = truncated_mean;
  report["censored_replicas"] = tail.survivors.back();
  if (rc.m >= 2) {
    const AbsorptionTimes f = expected_absorption_times(rc.m, rc.n);
    const double scale = static_cast<double>(rc.m + rc.n) * rc.n * rc.m;
    const double fval = start == PairState::both_large  ? f.f1
                        : start == PairState::both_small ? f.f2
                                                          : f.f3;
    report["expected_mean"] = fval * scale;
  } else {
    report["expected_mean"] = nullptr;  // closed form needs m >= 2
  }

  if (rc.out.empty()) {
    emit("", csv);
    emit("", report.dump(2) + "\n");
  } else {
    emit(rc.out, csv);
    emit(rc.out + ".json", report.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasistationary behaviour of invasion dynamics on complete bipartite graphs"};
  app.require_subcommand(1);
  RunConfig rc;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-m,--small-side", rc.m, "small side size m");
    cmd->add_option("-n,--large-side", rc.n, "large side size n (m <= n)");
    cmd->add_option("--seed", rc.seed, "base seed; replica r uses seed+r");
    cmd->add_option("--threads", rc.threads, "worker threads (results identical for any count)");
    cmd->add_option("--out", rc.out, "output file (stdout when omitted)");
    cmd->add_option("--config", rc.config_path, "JSON config; overrides command-line flags");
  };

  CLI::App* lambda = app.add_subcommand(
      "lambda", "survival rate by pair chain, asymptote, closed form and spectrum");
  add_common(lambda);
  lambda->add_option("--tol", rc.tol, "power-iteration residual tolerance");
  lambda->add_option("--state-cap", rc.state_cap, "max transient dimension for the spectral route");

  CLI::App* qsd = app.add_subcommand("qsd", "quasistationary distribution over (k,l)");
  add_common(qsd);
  qsd->add_option("--method", rc.method, "exact|restart|conditional");
  qsd->add_option("--steps", rc.steps, "restart: total chain steps");
  qsd->add_option("--burn-in", rc.burn_in, "restart: steps discarded from the front (0: steps/100)");
  qsd->add_option("--t-star", rc.t_star, "conditional: survival time (0: one mean lifetime)");
  qsd->add_option("--replicas", rc.replicas, "conditional: replica count");
  qsd->add_option("--k0", rc.k0, "initial k (-1: 1)");
  qsd->add_option("--l0", rc.l0, "initial l (-1: ceil(n/2))");
  qsd->add_option("--tol", rc.tol, "exact: power-iteration tolerance");
  qsd->add_option("--state-cap", rc.state_cap, "exact: max transient dimension");

  CLI::App* tail = app.add_subcommand("tail", "survival curve and log-linear rate fit");
  add_common(tail);
  tail->add_option("--replicas", rc.replicas, "independent paths");
  tail->add_option("--horizon", rc.horizon, "max tracked time (0: six mean lifetimes)");
  tail->add_option("--trim", rc.trim, "fraction trimmed from both tails of the fit band");
  tail->add_option("--k0", rc.k0, "initial k (-1: 1)");
  tail->add_option("--l0", rc.l0, "initial l (-1: ceil(n/2))");

  CLI::App* spectrum = app.add_subcommand("spectrum", "all eigenvalues of the transient kernel");
  add_common(spectrum);
  spectrum->add_option("--state-cap", rc.state_cap, "max transient dimension");

  CLI::App* limit_check =
      app.add_subcommand("limit-check", "distance diagnostics against the large-n limit");
  add_common(limit_check);
  limit_check->add_option("--tol", rc.tol, "power-iteration tolerance");
  limit_check->add_option("--state-cap", rc.state_cap, "max transient dimension");

  CLI::App* sigma = app.add_subcommand("sigma", "pair-chain coalescence time tail");
  add_common(sigma);
  sigma->add_option("--replicas", rc.replicas, "independent pair-chain runs");
  sigma->add_option("--horizon", rc.horizon, "max tracked time (0: six mean lifetimes)");
  sigma->add_option("--start", rc.start, "both_large|both_small|split");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    apply_config(rc);
    if (lambda->parsed()) return run_lambda(rc);
    if (qsd->parsed()) return run_qsd(rc);
    if (tail->parsed()) return run_tail(rc);
    if (spectrum->parsed()) return run_spectrum(rc);
    if (limit_check->parsed()) return run_limit_check(rc);
    if (sigma->parsed()) return run_sigma(rc);
    std::cerr << "no subcommand\n";
    return 2;
  } catch (const SizeCapError& e) {
    std::cerr << "size cap: " << e.what() << "\n";
    return 4;
  } catch (const NonConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
