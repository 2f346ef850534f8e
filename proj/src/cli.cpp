#include "wlvm/cli.hpp"

#include "wlvm/asymptotics.hpp"
#include "wlvm/em.hpp"
#include "wlvm/io.hpp"
#include "wlvm/marginal.hpp"
#include "wlvm/model.hpp"
#include "wlvm/numeric.hpp"
#include "wlvm/rng.hpp"
#include "wlvm/sim.hpp"
#include "wlvm/weights.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace wlvm {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNoConvergence = 3;

// Restart jitter draws on this substream channel of the run seed.
constexpr std::uint64_t kRestartChannel = 1000;

Vector parse_vector(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      values.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DataError("flag " + flag + " has a non-numeric entry: '" + item + "'");
    }
  }
  if (values.empty()) throw DataError("flag " + flag + " is empty");
  Vector v(static_cast<Index>(values.size()));
  for (size_t i = 0; i < values.size(); ++i) v[static_cast<Index>(i)] = values[i];
  return v;
}

// Stored at 12 significant digits so a pipeline mean of 0.99 serializes as
// the exact JSON number 0.99.
double rounded_for_manifest(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return std::stod(buf);
}

struct FitOptions {
  std::string input;
  std::string out_dir;
  std::string weight_mode = "mean1x099";
  int max_iter = 0;  // 0 = fitter default
  double tol = 0.0;  // 0 = fitter default
  double sigma2_floor = 1e-8;
  std::uint64_t seed = 1;
  int restarts = 0;
  std::string format = "csv";
};

WeightMatrix apply_weight_mode(const std::string& mode,
                               const IndicatorPanel& panel,
                               const WeightMatrix& raw) {
  if (mode == "raw") return zero_missing(panel, raw);
  if (mode == "mean1") {
    return zero_missing(panel, normalize_by_indicator_mean(raw));
  }
  if (mode == "mean1x099") {
    return zero_missing(
        panel, scale_weights(normalize_by_indicator_mean(raw), 0.99));
  }
  if (mode == "logvolume") {
    return zero_missing(panel, log_transform_volumes(raw.weights));
  }
  throw DataError("unknown weight mode: " + mode);
}

Vector observed_weight_means(const IndicatorPanel& panel,
                             const WeightMatrix& weights) {
  const Index m = panel.num_indicators();
  Vector means(m);
  for (Index j = 0; j < m; ++j) {
    long double sum = 0.0L;
    Index n = 0;
    for (Index h = 0; h < panel.num_subjects(); ++h) {
      if (!panel.observed(j, h)) continue;
      sum += weights.weights(j, h);
      ++n;
    }
    means[j] = n > 0 ? static_cast<double>(sum / n) : 0.0;
  }
  return means;
}

ModelParams jitter_init(const ModelParams& base, Rng& rng, double floor) {
  ModelParams init = base;
  for (Index j = 0; j < base.size(); ++j) {
    init.mu[j] += 0.3 * rng.normal();
    init.gamma[j] *= 0.4 + 1.2 * rng.uniform01();
    init.sigma2[j] = std::max(init.sigma2[j] * (0.4 + 1.2 * rng.uniform01()), floor);
  }
  return init;
}

void write_params_csv(const std::string& path, const IndicatorPanel& panel,
                      const FitResult& fit) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path);
  out << "indicator,mu,gamma,sigma2,boundary\n";
  for (Index j = 0; j < panel.num_indicators(); ++j) {
    out << panel.indicator_names[static_cast<size_t>(j)] << ','
        << format_double(fit.params.mu[j]) << ','
        << format_double(fit.params.gamma[j]) << ','
        << format_double(fit.params.sigma2[j]) << ','
        << (fit.boundary_flags[static_cast<size_t>(j)] ? 1 : 0) << '\n';
  }
}

void write_scores_csv(const std::string& path, const IndicatorPanel& panel,
                      const FitResult& fit) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path);
  out << "subject,alpha,alpha_var\n";
  for (Index h = 0; h < panel.num_subjects(); ++h) {
    out << panel.subject_ids[static_cast<size_t>(h)] << ','
        << format_double(fit.alpha[h]) << ','
        << format_double(fit.alpha_var[h]) << '\n';
  }
}

void write_results_json(const std::string& path, const IndicatorPanel& panel,
                        const FitResult& fit) {
  ordered_json doc;
  doc["params"] = ordered_json::array();
  for (Index j = 0; j < panel.num_indicators(); ++j) {
    doc["params"].push_back(
        {{"indicator", panel.indicator_names[static_cast<size_t>(j)]},
         {"mu", fit.params.mu[j]},
         {"gamma", fit.params.gamma[j]},
         {"sigma2", fit.params.sigma2[j]},
         {"boundary", static_cast<bool>(fit.boundary_flags[static_cast<size_t>(j)])}});
  }
  doc["scores"] = ordered_json::array();
  for (Index h = 0; h < panel.num_subjects(); ++h) {
    doc["scores"].push_back(
        {{"subject", panel.subject_ids[static_cast<size_t>(h)]},
         {"alpha", fit.alpha[h]},
         {"alpha_var", fit.alpha_var[h]}});
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path);
  out << doc.dump(2) << '\n';
}

int run_fit(const std::string& command, const FitOptions& opt) {
  const LoadedPanel loaded = load_long_csv(opt.input);
  auto [panel, transform] = standardize_indicators(loaded.panel);
  const WeightMatrix weights =
      apply_weight_mode(opt.weight_mode, panel, loaded.weights);

  const bool use_em = command == "fit-em";
  EmConfig em_config;
  OptConfig opt_config;
  em_config.sigma2_floor = opt.sigma2_floor;
  opt_config.sigma2_floor = opt.sigma2_floor;
  if (opt.max_iter > 0) {
    em_config.max_iters = opt.max_iter;
    opt_config.max_iters = opt.max_iter;
  }
  if (opt.tol > 0.0) {
    em_config.tol = opt.tol;
    opt_config.grad_tol = opt.tol;
  }

  const auto fit_once = [&](const ModelParams& init) {
    return use_em ? fit_em(panel, weights, init, em_config)
                  : fit_marginal(panel, weights, init, opt_config);
  };

  const ModelParams base_init = default_init(panel, weights);
  FitResult best = fit_once(base_init);
  for (int k = 1; k <= opt.restarts; ++k) {
    Rng rng = Rng::substream(opt.seed, static_cast<std::uint64_t>(k),
                             kRestartChannel);
    const FitResult candidate =
        fit_once(jitter_init(base_init, rng, opt.sigma2_floor));
    if (candidate.final_objective() < best.final_objective()) {
      best = candidate;
    }
  }

  std::filesystem::create_directories(opt.out_dir);
  const auto in_dir = [&](const std::string& name) {
    return (std::filesystem::path(opt.out_dir) / name).string();
  };
  if (opt.format == "json") {
    write_results_json(in_dir("results.json"), panel, best);
  } else if (opt.format == "csv") {
    write_params_csv(in_dir("params.csv"), panel, best);
    write_scores_csv(in_dir("scores.csv"), panel, best);
  } else {
    throw DataError("unknown format: " + opt.format);
  }

  const Vector weight_means = observed_weight_means(panel, weights);
  ordered_json manifest;
  manifest["command"] = command;
  manifest["flags"] = {{"input", opt.input},
                       {"out", opt.out_dir},
                       {"weight_mode", opt.weight_mode},
                       {"max_iter", use_em ? em_config.max_iters : opt_config.max_iters},
                       {"tol", use_em ? em_config.tol : opt_config.grad_tol},
                       {"sigma2_floor", opt.sigma2_floor},
                       {"restarts", opt.restarts},
                       {"format", opt.format}};
  manifest["seed"] = opt.seed;
  manifest["m"] = panel.num_indicators();
  manifest["H"] = panel.num_subjects();
  manifest["converged"] = best.converged;
  manifest["iterations"] = best.iterations;
  manifest["final_objective"] = best.final_objective();
  manifest["weight_means"] = ordered_json::array();
  for (Index j = 0; j < weight_means.size(); ++j) {
    manifest["weight_means"].push_back(rounded_for_manifest(weight_means[j]));
  }
  manifest["boundary_flags"] = best.boundary_flags;
  if (!best.diagnostics.empty()) manifest["diagnostics"] = best.diagnostics;

  std::ofstream mf(in_dir("manifest.json"));
  if (!mf) throw DataError("cannot open manifest.json");
  mf << manifest.dump(2) << '\n';

  if (!best.converged) {
    std::cerr << "warning: fit did not converge ("
              << (best.diagnostics.empty() ? "see manifest" : best.diagnostics)
              << ")\n";
    return kExitNoConvergence;
  }
  return kExitOk;
}

struct SimulateOptions {
  std::string scenario_path;
  std::string out_dir;
  std::string fitter = "em";
  int threads = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

Fitter make_fitter_by_name(const std::string& name) {
  if (name == "em") return make_em_fitter();
  if (name == "marginal") return make_marginal_fitter();
  throw DataError("unknown fitter: " + name);
}

SimScenario regular_defaults() {
  SimScenario s;
  s.m = 3;
  s.H = 1000;
  s.rho = 0.5;
  s.gamma_shapes = (Vector(3) << 1.5, 3.0, 3.0).finished();
  s.gamma_scales = (Vector(3) << 0.5, 1.0 / 3.0, 1.0 / 3.0).finished();
  s.weight_coeff = 1.0;
  s.reps = 100;
  s.seed = 1;
  return s;
}

SimScenario extreme_defaults() {
  SimScenario s;
  s.m = 3;
  s.H = 5000;
  s.rho = 0.5;
  s.gamma_shapes = (Vector(3) << 0.5, 1.0, 1.0).finished();
  s.gamma_scales = (Vector(3) << 2.0, 2.0, 2.0).finished();
  s.weight_coeff = 1.0;
  s.reps = 100;
  s.seed = 1;
  return s;
}

int run_simulate_regular(const SimulateOptions& opt) {
  ScenarioFile file;
  file.scenario = regular_defaults();
  if (!opt.scenario_path.empty()) file = load_scenario_file(opt.scenario_path);
  if (opt.seed_set) file.scenario.seed = opt.seed;

  const SimSummary summary = run_regular_study(
      file.scenario, make_fitter_by_name(opt.fitter), opt.threads);

  std::filesystem::create_directories(opt.out_dir);
  const std::filesystem::path dir(opt.out_dir);

  std::ofstream reps(dir / "reps.csv");
  if (!reps) throw DataError("cannot open reps.csv");
  reps << "rep,ok,converged";
  for (int j = 1; j <= file.scenario.m; ++j) reps << ",gamma" << j;
  for (int j = 1; j <= file.scenario.m; ++j) reps << ",sigma" << j;
  reps << ",alpha_sd\n";
  for (const RepRecord& r : summary.per_rep) {
    reps << r.rep << ',' << (r.ok ? 1 : 0) << ',' << (r.converged ? 1 : 0);
    for (int j = 0; j < file.scenario.m; ++j) {
      reps << ',' << (r.ok ? format_double(r.abs_gamma[j]) : "");
    }
    for (int j = 0; j < file.scenario.m; ++j) {
      reps << ',' << (r.ok ? format_double(r.sigma[j]) : "");
    }
    reps << ',' << (r.ok ? format_double(r.alpha_sd) : "") << '\n';
  }

  ordered_json doc;
  doc["command"] = "simulate-regular";
  doc["fitter"] = opt.fitter;
  doc["seed"] = file.scenario.seed;
  doc["m"] = file.scenario.m;
  doc["H"] = file.scenario.H;
  doc["rho"] = file.scenario.rho;
  doc["reps"] = file.scenario.reps;
  doc["weight_coeff"] = file.scenario.weight_coeff;
  doc["weight_kind"] =
      file.scenario.weight_kind == WeightKind::kUniform ? "uniform" : "gamma";
  doc["failed"] = summary.failed;
  doc["mean_abs_gamma"] = std::vector<double>(
      summary.mean_gamma.data(), summary.mean_gamma.data() + summary.mean_gamma.size());
  doc["mean_sigma"] = std::vector<double>(
      summary.mean_sigma.data(), summary.mean_sigma.data() + summary.mean_sigma.size());
  doc["mean_alpha_sd"] = summary.mean_alpha_sd;
  std::ofstream sj(dir / "summary.json");
  if (!sj) throw DataError("cannot open summary.json");
  sj << doc.dump(2) << '\n';

  std::cout << "mean |gamma|:";
  for (Index j = 0; j < summary.mean_gamma.size(); ++j) {
    std::cout << ' ' << summary.mean_gamma[j];
  }
  std::cout << "\nmean sigma:  ";
  for (Index j = 0; j < summary.mean_sigma.size(); ++j) {
    std::cout << ' ' << summary.mean_sigma[j];
  }
  std::cout << "\nfailed replications: " << summary.failed << '\n';
  return kExitOk;
}

int run_simulate_extreme(const SimulateOptions& opt) {
  ScenarioFile file;
  file.scenario = extreme_defaults();
  file.weight_coeffs = {1.0, 0.99, 0.9, 0.8, 0.7};
  file.H_list = {300, 1000, 2000, 3000, 4000, 5000};
  if (!opt.scenario_path.empty()) {
    ScenarioFile loaded = load_scenario_file(opt.scenario_path);
    if (loaded.weight_coeffs.empty()) loaded.weight_coeffs = file.weight_coeffs;
    if (loaded.H_list.empty()) loaded.H_list = file.H_list;
    file = std::move(loaded);
  }
  if (opt.seed_set) file.scenario.seed = opt.seed;

  const auto table =
      run_extreme_study(file.scenario, file.weight_coeffs, file.H_list,
                        make_fitter_by_name(opt.fitter), opt.threads);

  std::filesystem::create_directories(opt.out_dir);
  const std::filesystem::path dir(opt.out_dir);
  std::ofstream tf(dir / "table.csv");
  if (!tf) throw DataError("cannot open table.csv");
  tf << "coeff,H,mean_sigma1,ok_reps\n";
  for (const ExtremeCell& cell : table) {
    tf << format_double(cell.coeff) << ',' << cell.H << ','
       << format_double(cell.mean_sigma1) << ',' << cell.ok_reps << '\n';
  }

  ordered_json doc;
  doc["command"] = "simulate-extreme";
  doc["fitter"] = opt.fitter;
  doc["seed"] = file.scenario.seed;
  doc["reps"] = file.scenario.reps;
  doc["weight_coeffs"] = file.weight_coeffs;
  doc["H_list"] = file.H_list;
  doc["cells"] = ordered_json::array();
  for (const ExtremeCell& cell : table) {
    doc["cells"].push_back({{"coeff", cell.coeff},
                            {"H", cell.H},
                            {"mean_sigma1", cell.mean_sigma1},
                            {"ok_reps", cell.ok_reps}});
  }
  std::ofstream sj(dir / "summary.json");
  if (!sj) throw DataError("cannot open summary.json");
  sj << doc.dump(2) << '\n';

  for (const ExtremeCell& cell : table) {
    std::cout << "coeff " << cell.coeff << "  H " << cell.H
              << "  mean sigma1 " << cell.mean_sigma1 << '\n';
  }
  return kExitOk;
}

struct LimitsOptions {
  std::string mu, gamma, sigma2, weights;
  std::string format = "text";
};

int run_limits(const LimitsOptions& opt) {
  ModelParams params;
  params.mu = parse_vector(opt.mu, "--mu");
  params.gamma = parse_vector(opt.gamma, "--gamma");
  params.sigma2 = parse_vector(opt.sigma2, "--sigma2");
  params.validate();

  ordered_json doc;
  doc["limit_unweighted"] = enmll_limit(params);
  if (!opt.weights.empty()) {
    const Vector w = parse_vector(opt.weights, "--weights");
    doc["limit_weighted"] =
        enwmll_limit(params, w, Log2PiConstant::kFullWeight);
    doc["limit_weighted_alt"] =
        enwmll_limit(params, w, Log2PiConstant::kWeightMinusOne);
  }

  if (opt.format == "json") {
    std::cout << doc.dump(2) << '\n';
  } else {
    for (const auto& [key, value] : doc.items()) {
      std::cout << key << " = " << format_double(value.get<double>()) << '\n';
    }
  }
  return kExitOk;
}

// Oracle equivalence sweep on random cases: the dense multivariate-normal
// route against the marginal formula at unit weights, the weighted-limit
// reduction, and the constant-weight rescaling identity.
int run_check(std::uint64_t seed, int cases) {
  bool all_ok = true;

  double worst_mvn = 0.0;
  const std::vector<int> widths = {2, 3, 4, 7};
  for (size_t wi = 0; wi < widths.size(); ++wi) {
    const int m = widths[wi];
    for (int c = 0; c < cases; ++c) {
      Rng rng = Rng::substream(seed, wi, static_cast<std::uint64_t>(c));
      ModelParams params;
      params.mu.resize(m);
      params.gamma.resize(m);
      params.sigma2.resize(m);
      for (int j = 0; j < m; ++j) {
        params.mu[j] = 2.0 * rng.uniform01() - 1.0;
        params.gamma[j] = 2.0 * rng.uniform01() - 1.0;
        params.sigma2[j] = 0.3 + 1.7 * rng.uniform01();
      }
      const int H = 5 + static_cast<int>(rng.uniform01() * 40.0);
      IndicatorPanel panel;
      panel.scores.resize(m, H);
      panel.observed = BoolMask::Constant(m, H, true);
      for (int j = 0; j < m; ++j) {
        panel.indicator_names.push_back("y" + std::to_string(j + 1));
      }
      for (int h = 0; h < H; ++h) {
        panel.subject_ids.push_back("s" + std::to_string(h + 1));
        const double a = rng.normal();
        for (int j = 0; j < m; ++j) {
          panel.scores(j, h) = params.mu[j] + params.gamma[j] * a +
                               std::sqrt(params.sigma2[j]) * rng.normal();
        }
      }
      const WeightMatrix ones = WeightMatrix::ones(m, H);
      const double diff = std::abs(2.0 * mvn_nll_oracle(panel, params) -
                                   marginal_neg2_pll(panel, ones, params));
      worst_mvn = std::max(worst_mvn, diff / H);
      if (diff >= 1e-10 * H) all_ok = false;

      // Rescaling identity: constant weights against the rescaled model.
      Vector w(m);
      for (int j = 0; j < m; ++j) w[j] = 0.2 + 2.8 * rng.uniform01();
      WeightMatrix constw{w * Eigen::RowVectorXd::Ones(H)};
      ModelParams rescaled = params;
      rescaled.sigma2 = params.sigma2.cwiseQuotient(w);
      double constant = 0.0;
      for (int j = 0; j < m; ++j) {
        constant += std::log(w[j]) + (w[j] - 1.0) * std::log(params.sigma2[j]) +
                    (w[j] - 1.0) * kLog2Pi;
      }
      const double lhs = marginal_neg2_pll(panel, constw, params);
      const double rhs = marginal_neg2_pll(panel, ones, rescaled) +
                         H * constant;
      if (std::abs(lhs - rhs) >= 1e-10 * H * std::max(1.0, std::abs(lhs) / H)) {
        all_ok = false;
      }

      // Weighted limit reduces to the unweighted one at w = 1, bit-exactly.
      if (enwmll_limit(params, Vector::Ones(m),
                       Log2PiConstant::kFullWeight) != enmll_limit(params)) {
        all_ok = false;
      }
    }
  }

  std::cout << (all_ok ? "PASS" : "FAIL")
            << " oracle equivalence sweep (max |diff|/H = " << worst_mvn
            << ", " << cases << " cases per width)\n";
  return all_ok ? kExitOk : kExitData;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Single-factor latent variable model with measure-specific sample weights"};
  app.require_subcommand(1);

  FitOptions fit_opt;
  const auto add_fit_flags = [&](CLI::App* cmd) {
    cmd->add_option("--input", fit_opt.input, "long-format CSV input")->required();
    cmd->add_option("--out", fit_opt.out_dir, "output directory")->required();
    cmd->add_option("--weight-mode", fit_opt.weight_mode,
                    "raw|mean1|mean1x099|logvolume (default mean1x099)");
    cmd->add_option("--max-iter", fit_opt.max_iter, "iteration cap");
    cmd->add_option("--tol", fit_opt.tol,
                    "convergence tolerance (EM objective / marginal gradient)");
    cmd->add_option("--sigma2-floor", fit_opt.sigma2_floor, "variance floor");
    cmd->add_option("--seed", fit_opt.seed, "seed for restart jitter");
    cmd->add_option("--restarts", fit_opt.restarts, "extra jittered starts");
    cmd->add_option("--format", fit_opt.format, "csv|json (default csv)");
  };
  CLI::App* fit_em_cmd =
      app.add_subcommand("fit-em", "fit by the EM algorithm");
  CLI::App* fit_marginal_cmd = app.add_subcommand(
      "fit-marginal", "fit by direct quasi-Newton minimization");
  add_fit_flags(fit_em_cmd);
  add_fit_flags(fit_marginal_cmd);

  SimulateOptions regular_opt;
  regular_opt.fitter = "em";
  SimulateOptions extreme_opt;
  extreme_opt.fitter = "marginal";
  const auto add_sim_flags = [](CLI::App* cmd, SimulateOptions& opt) {
    cmd->add_option("--scenario", opt.scenario_path,
                    "key = value scenario file (defaults otherwise)");
    cmd->add_option("--out", opt.out_dir, "output directory")->required();
    cmd->add_option("--fitter", opt.fitter, "em|marginal");
    cmd->add_option("--threads", opt.threads, "worker threads (0 = all)");
    return cmd->add_option("--seed", opt.seed, "scenario seed override");
  };
  CLI::App* sim_regular_cmd = app.add_subcommand(
      "simulate-regular", "replication study with mound-shaped weights");
  CLI::Option* regular_seed = add_sim_flags(sim_regular_cmd, regular_opt);
  CLI::App* sim_extreme_cmd = app.add_subcommand(
      "simulate-extreme",
      "replication study over weight coefficients and sample sizes");
  CLI::Option* extreme_seed = add_sim_flags(sim_extreme_cmd, extreme_opt);

  LimitsOptions limits_opt;
  CLI::App* limits_cmd = app.add_subcommand(
      "limits", "closed-form large-H objective limits for given parameters");
  limits_cmd->add_option("--mu", limits_opt.mu, "comma list")->required();
  limits_cmd->add_option("--gamma", limits_opt.gamma, "comma list")->required();
  limits_cmd->add_option("--sigma2", limits_opt.sigma2, "comma list")->required();
  limits_cmd->add_option("--weights", limits_opt.weights,
                         "constant per-indicator weights (optional)");
  limits_cmd->add_option("--format", limits_opt.format, "text|json");

  std::uint64_t check_seed = 1;
  int check_cases = 200;
  CLI::App* check_cmd = app.add_subcommand(
      "check", "run the oracle equivalence suite on random cases");
  check_cmd->add_option("--seed", check_seed, "seed");
  check_cmd->add_option("--cases", check_cases, "cases per indicator width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (fit_em_cmd->parsed()) return run_fit("fit-em", fit_opt);
    if (fit_marginal_cmd->parsed()) return run_fit("fit-marginal", fit_opt);
    if (sim_regular_cmd->parsed()) {
      regular_opt.seed_set = regular_seed->count() > 0;
      return run_simulate_regular(regular_opt);
    }
    if (sim_extreme_cmd->parsed()) {
      extreme_opt.seed_set = extreme_seed->count() > 0;
      return run_simulate_extreme(extreme_opt);
    }
    if (limits_cmd->parsed()) return run_limits(limits_opt);
    if (check_cmd->parsed()) return run_check(check_seed, check_cases);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace wlvm
