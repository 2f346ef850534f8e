#include "wlvm/sim.hpp"

#include "wlvm/em.hpp"
#include "wlvm/marginal.hpp"
#include "wlvm/numeric.hpp"
#include "wlvm/weights.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <fstream>
#include <sstream>

namespace wlvm {

namespace {

// Substream channels: panel draws on channel 0, weight row j on channel 1+j.
constexpr std::uint64_t kPanelChannel = 0;
constexpr std::uint64_t kWeightChannelBase = 1;

std::vector<std::string> numbered(const std::string& prefix, Index n) {
  std::vector<std::string> out(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    out[static_cast<size_t>(i)] = prefix + std::to_string(i + 1);
  }
  return out;
}

IndicatorPanel panel_from_scores(Matrix scores) {
  IndicatorPanel panel;
  panel.observed = BoolMask::Constant(scores.rows(), scores.cols(), true);
  panel.indicator_names = numbered("y", scores.rows());
  panel.subject_ids = numbered("s", scores.cols());
  panel.scores = std::move(scores);
  return panel;
}

double sample_sd(const Vector& v) {
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() /
                   static_cast<double>(v.size() - 1));
}

}  // namespace

void SimScenario::validate() const {
  if (m < 1 || H < 2) throw InvalidInput("scenario needs m >= 1 and H >= 2");
  if (!(rho >= 0.0) || !(rho < 1.0)) throw InvalidInput("rho must lie in [0, 1)");
  if (reps < 1) throw InvalidInput("reps must be positive");
  if (weight_kind == WeightKind::kGamma) {
    if (gamma_shapes.size() != m || gamma_scales.size() != m) {
      throw InvalidInput("gamma shape/scale vectors must have m entries");
    }
    for (Index j = 0; j < m; ++j) {
      if (!(gamma_shapes[j] > 0.0) || !(gamma_scales[j] > 0.0)) {
        throw InvalidInput("gamma shape/scale must be positive");
      }
    }
  }
  if (!(weight_coeff > 0.0)) throw InvalidInput("weight_coeff must be positive");
}

Fitter make_em_fitter(int max_iters, double tol, double sigma2_floor) {
  EmConfig config;
  config.max_iters = max_iters;
  config.tol = tol;
  config.sigma2_floor = sigma2_floor;
  return [config](const IndicatorPanel& panel, const WeightMatrix& weights) {
    return fit_em(panel, weights, default_init(panel, weights), config);
  };
}

Fitter make_marginal_fitter(int max_iters, double grad_tol,
                            double sigma2_floor) {
  OptConfig config;
  config.max_iters = max_iters;
  config.grad_tol = grad_tol;
  config.sigma2_floor = sigma2_floor;
  return [config](const IndicatorPanel& panel, const WeightMatrix& weights) {
    return fit_marginal(panel, weights, default_init(panel, weights), config);
  };
}

IndicatorPanel gen_equicorrelated_panel(int m, int H, double rho, Rng& rng) {
  if (m < 1 || H < 1) throw InvalidInput("panel dimensions must be positive");
  if (!(rho >= 0.0) || !(rho < 1.0)) throw InvalidInput("rho must lie in [0, 1)");
  const double load = std::sqrt(rho);
  const double noise = std::sqrt(1.0 - rho);
  Matrix scores(m, H);
  for (int h = 0; h < H; ++h) {
    const double a = rng.normal();
    for (int j = 0; j < m; ++j) {
      scores(j, h) = load * a + noise * rng.normal();
    }
  }
  return panel_from_scores(std::move(scores));
}

Vector gen_gamma_weights(double shape, double scale, int H, Rng& rng) {
  if (H < 1) throw InvalidInput("H must be positive");
  Vector w(H);
  for (int h = 0; h < H; ++h) w[h] = rng.gamma(shape, scale);
  return w;
}

IndicatorPanel gen_degenerate_panel(DegenerateKind kind, int H, Rng& rng,
                                    double r12, double r13, double r23) {
  if (H < 2) throw InvalidInput("H must be at least 2");
  if (kind == DegenerateKind::kIdenticalPair) {
    IndicatorPanel panel = gen_equicorrelated_panel(3, H, 0.5, rng);
    panel.scores.row(1) = panel.scores.row(0);
    return panel;
  }
  Matrix corr(3, 3);
  corr << 1.0, r12, r13,
          r12, 1.0, r23,
          r13, r23, 1.0;
  const Eigen::LLT<Matrix> llt(corr);
  if (llt.info() != Eigen::Success) {
    throw InvalidInput("requested correlation matrix is not positive definite");
  }
  const Matrix L = llt.matrixL();
  Matrix scores(3, H);
  Vector z(3);
  for (int h = 0; h < H; ++h) {
    for (int j = 0; j < 3; ++j) z[j] = rng.normal();
    scores.col(h) = L * z;
  }
  return panel_from_scores(std::move(scores));
}

namespace {

struct RepInputs {
  IndicatorPanel panel;
  WeightMatrix weights;  // mean-1 normalized, before the study coefficient
};

RepInputs generate_replication(const SimScenario& scenario, int rep, int H) {
  Rng panel_rng = Rng::substream(scenario.seed, static_cast<std::uint64_t>(rep),
                                 kPanelChannel);
  RepInputs inputs;
  inputs.panel = gen_equicorrelated_panel(scenario.m, H, scenario.rho, panel_rng);
  Matrix w(scenario.m, H);
  for (int j = 0; j < scenario.m; ++j) {
    if (scenario.weight_kind == WeightKind::kUniform) {
      w.row(j).setOnes();
    } else {
      Rng wrng = Rng::substream(scenario.seed, static_cast<std::uint64_t>(rep),
                                kWeightChannelBase + static_cast<std::uint64_t>(j));
      w.row(j) =
          gen_gamma_weights(scenario.gamma_shapes[j], scenario.gamma_scales[j],
                            H, wrng)
              .transpose();
    }
  }
  inputs.weights = normalize_by_indicator_mean(WeightMatrix{std::move(w)});
  return inputs;
}

RepRecord record_fit(int rep, const IndicatorPanel& panel,
                     const WeightMatrix& weights, const Fitter& fitter) {
  RepRecord record;
  record.rep = rep;
  try {
    const FitResult fit = fitter(panel, weights);
    record.ok = true;
    record.converged = fit.converged;
    record.abs_gamma = fit.params.gamma.cwiseAbs();
    record.sigma = fit.params.sigma2.cwiseSqrt();
    record.alpha_sd = sample_sd(fit.alpha);
  } catch (const std::exception&) {
    record.ok = false;
  }
  return record;
}

}  // namespace

SimSummary run_regular_study(const SimScenario& scenario, const Fitter& fitter,
                             int threads) {
  scenario.validate();
  SimSummary summary;
  summary.per_rep.resize(static_cast<size_t>(scenario.reps));

  parallel_for(scenario.reps, threads, [&](int rep) {
    RepInputs inputs = generate_replication(scenario, rep, scenario.H);
    const WeightMatrix scaled =
        scenario.weight_coeff == 1.0
            ? std::move(inputs.weights)
            : scale_weights(inputs.weights, scenario.weight_coeff);
    summary.per_rep[static_cast<size_t>(rep)] =
        record_fit(rep, inputs.panel, scaled, fitter);
  });

  summary.mean_gamma = Vector::Zero(scenario.m);
  summary.mean_sigma = Vector::Zero(scenario.m);
  int ok = 0;
  for (const RepRecord& r : summary.per_rep) {
    if (!r.ok) {
      ++summary.failed;
      continue;
    }
    ++ok;
    summary.mean_gamma += r.abs_gamma;
    summary.mean_sigma += r.sigma;
    summary.mean_alpha_sd += r.alpha_sd;
  }
  if (ok > 0) {
    summary.mean_gamma /= ok;
    summary.mean_sigma /= ok;
    summary.mean_alpha_sd /= ok;
  }
  return summary;
}

std::vector<ExtremeCell> run_extreme_study(const SimScenario& base,
                                           const std::vector<double>& coeffs,
                                           const std::vector<int>& H_list,
                                           const Fitter& fitter, int threads) {
  SimScenario scenario = base;
  scenario.validate();
  if (coeffs.empty() || H_list.empty()) {
    throw InvalidInput("extreme study needs at least one coefficient and one H");
  }

  std::vector<ExtremeCell> table;
  for (size_t hi = 0; hi < H_list.size(); ++hi) {
    const int H = H_list[hi];
    // Per-H replication results for every coefficient, paired on the same
    // generated data.
    std::vector<std::vector<RepRecord>> records(
        coeffs.size(), std::vector<RepRecord>(static_cast<size_t>(base.reps)));

    parallel_for(base.reps, threads, [&](int rep) {
      // Distinct substream block per (H, rep) so H values stay independent.
      SimScenario local = scenario;
      local.seed = Rng::derive_seed(base.seed, 0x5AFEull + hi, 0);
      const RepInputs inputs = generate_replication(local, rep, H);
      for (size_t ci = 0; ci < coeffs.size(); ++ci) {
        const WeightMatrix scaled = scale_weights(inputs.weights, coeffs[ci]);
        records[ci][static_cast<size_t>(rep)] =
            record_fit(rep, inputs.panel, scaled, fitter);
      }
    });

    for (size_t ci = 0; ci < coeffs.size(); ++ci) {
      ExtremeCell cell;
      cell.coeff = coeffs[ci];
      cell.H = H;
      long double acc = 0.0L;
      for (const RepRecord& r : records[ci]) {
        if (!r.ok) continue;
        acc += r.sigma[0];
        ++cell.ok_reps;
      }
      cell.mean_sigma1 =
          cell.ok_reps > 0 ? static_cast<double>(acc / cell.ok_reps) : 0.0;
      table.push_back(cell);
    }
  }
  return table;
}

namespace {

std::vector<std::string> split_csv_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    const auto begin = item.find_first_not_of(" \t");
    const auto end = item.find_last_not_of(" \t");
    if (begin == std::string::npos) continue;
    parts.push_back(item.substr(begin, end - begin + 1));
  }
  return parts;
}

double parse_double(const std::string& text, const std::string& key) {
  try {
    size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw DataError("scenario key '" + key + "' has a non-numeric value: " + text);
  }
}

}  // namespace

ScenarioFile load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scenario file: " + path);

  ScenarioFile file;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw DataError("scenario line " + std::to_string(line_no) +
                        " is not 'key = value'");
      }
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw DataError("scenario line " + std::to_string(line_no) +
                      " is missing a key or value");
    }

    if (key == "m") {
      file.scenario.m = static_cast<int>(parse_double(value, key));
    } else if (key == "H") {
      file.scenario.H = static_cast<int>(parse_double(value, key));
    } else if (key == "rho") {
      file.scenario.rho = parse_double(value, key);
    } else if (key == "weight_coeff") {
      file.scenario.weight_coeff = parse_double(value, key);
    } else if (key == "reps") {
      file.scenario.reps = static_cast<int>(parse_double(value, key));
    } else if (key == "seed") {
      file.scenario.seed = static_cast<std::uint64_t>(parse_double(value, key));
    } else if (key == "weight_kind") {
      if (value == "gamma") {
        file.scenario.weight_kind = WeightKind::kGamma;
      } else if (value == "uniform") {
        file.scenario.weight_kind = WeightKind::kUniform;
      } else {
        throw DataError("weight_kind must be 'gamma' or 'uniform'");
      }
    } else if (key == "gamma_shapes" || key == "gamma_scales") {
      const auto parts = split_csv_list(value);
      Vector v(static_cast<Index>(parts.size()));
      for (size_t i = 0; i < parts.size(); ++i) {
        v[static_cast<Index>(i)] = parse_double(parts[i], key);
      }
      if (key == "gamma_shapes") {
        file.scenario.gamma_shapes = v;
      } else {
        file.scenario.gamma_scales = v;
      }
    } else if (key == "weight_coeffs") {
      for (const auto& p : split_csv_list(value)) {
        file.weight_coeffs.push_back(parse_double(p, key));
      }
    } else if (key == "H_list") {
      for (const auto& p : split_csv_list(value)) {
        file.H_list.push_back(static_cast<int>(parse_double(p, key)));
      }
    } else {
      throw DataError("unknown scenario key '" + key + "' at line " +
                      std::to_string(line_no));
    }
  }
  return file;
}

}  // namespace wlvm
