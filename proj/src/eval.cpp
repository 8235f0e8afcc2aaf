#include "cbmf/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace cbmf {

double clamp_rating(double value, double rating_min, double rating_max) {
  return std::clamp(value, rating_min, rating_max);
}

double mae(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.size() != truths.size()) throw InputError("MAE: prediction and truth lengths differ");
  if (predictions.empty()) throw InputError("MAE of an empty set is undefined");
  double total = 0.0;
  for (std::size_t t = 0; t < predictions.size(); ++t) total += std::abs(truths[t] - predictions[t]);
  return total / static_cast<double>(predictions.size());
}

Profile parse_profile(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (s == "movies") return Profile::Movies;
  if (s == "recipes") return Profile::Recipes;
  throw InputError("unknown profile '" + std::string(name) + "' (expected movies or recipes)");
}

std::string_view to_string(Profile p) { return p == Profile::Movies ? "movies" : "recipes"; }

std::optional<StepSettings> default_step_settings(Profile profile, int k) {
  const bool movies = profile == Profile::Movies;
  switch (k) {
    case 5: return movies ? StepSettings{25.0, 2.0e-3} : StepSettings{8.0, 2.0e-3};
    case 10: return movies ? StepSettings{50.0, 1.0e-3} : StepSettings{12.0, 1.5e-3};
    case 15: return movies ? StepSettings{75.0, 0.5e-3} : StepSettings{16.0, 1.0e-3};
    default: return std::nullopt;
  }
}

double validation_mae(const FactorModel& model, const RatingsDataset& validation, const AttributeMatrix* attrs) {
  Matrix Q = model.variant == Variant::RC ? Matrix(attrs->incidence * model.V) : model.V;
  std::vector<double> pred, truth;
  pred.reserve(validation.size());
  truth.reserve(validation.size());
  for (const auto& r : validation.ratings()) {
    double p = model.P.row(r.user).dot(Q.row(r.item)) + model.anova.predict(r.user, r.item);
    pred.push_back(clamp_rating(p, model.rating_min, model.rating_max));
    truth.push_back(r.value);
  }
  return mae(pred, truth);
}

double anova_mae(const AnovaModel& anova, const RatingsDataset& validation) {
  std::vector<double> pred, truth;
  for (const auto& r : validation.ratings()) {
    pred.push_back(clamp_rating(anova.predict(r.user, r.item), validation.rating_min(), validation.rating_max()));
    truth.push_back(r.value);
  }
  return mae(pred, truth);
}

StepSettings ExperimentConfig::steps_for(int k) const {
  if (auto it = step_overrides.find(k); it != step_overrides.end()) return it->second;
  if (auto s = default_step_settings(profile, k)) return *s;
  throw InputError("no lambda/eta defaults for K = " + std::to_string(k) + "; pass them explicitly");
}

void ExperimentConfig::validate() const {
  if (variants.empty()) throw InputError("no algorithms selected");
  if (ks.empty()) throw InputError("no K values selected");
  if (repeats < 1) throw InputError("repeats must be at least 1");
  if (!(holdout > 0.0 && holdout < 1.0)) throw InputError("holdout fraction must lie strictly between 0 and 1");
  if (!(sigma > 0.0)) throw InputError("sigma must be positive");
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw InputError("kappa must lie in [0, 1]");
  for (int k : ks) {
    Hyperparams h;
    h.k = k;
    auto s = steps_for(k);
    h.lambda = s.lambda;
    h.eta = s.eta;
    h.epsilon = epsilon;
    h.max_iters = max_iters;
    h.c = c;
    h.theta = theta;
    h.gamma = gamma;
    h.validate();
  }
}

namespace {

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::uint64_t variant_tag(Variant v) { return static_cast<std::uint64_t>(v) + 1; }

}  // namespace

ExperimentReport run_experiment(const RatingsDataset& ds, const AttributeMatrix* attrs, const ExperimentConfig& config) {
  config.validate();
  for (Variant v : config.variants)
    if (uses_attributes(v) && !attrs) throw InputError(std::string(to_string(v)) + " requires attributes");
  if (attrs && attrs->n_items() != ds.n_items()) throw InputError("attribute rows do not match item count");

  const std::size_t D = attrs ? attrs->n_attrs() : 0;
  std::map<Variant, WeightMatrix> weights;
  for (Variant v : config.variants)
    if (uses_weights(v) && !weights.contains(v)) weights.emplace(v, build_weights(v, *attrs, config.c, config.theta));

  const int k_max = *std::max_element(config.ks.begin(), config.ks.end());

  ExperimentReport report;
  report.config = config;

  for (int r = 0; r < config.repeats; ++r) {
    const std::uint64_t split_seed = config.base_seed + static_cast<std::uint64_t>(r);
    auto split = split_holdout(ds, config.holdout, split_seed);
    AnovaModel anova = fit_anova(split.train);
    report.anova_mae.push_back(anova_mae(anova, split.validation));
    RatingsDataset normalized = residualize(split.train, anova);

    // Leading singular triplets do not depend on the truncation rank.
    SvdFactors svd = svd_init(normalized, k_max);

    for (int k : config.ks) {
      const Matrix P_svd = svd.P.leftCols(k);
      const Matrix Q_svd = svd.Q.leftCols(k);
      std::optional<Matrix> B_svd;
      if (attrs) B_svd = map_B(*attrs, Q_svd).B;

      const StepSettings steps = config.steps_for(k);
      auto seed_for = [&](Variant v) { return derive_seed(split_seed, variant_tag(v) * 1000 + static_cast<std::uint64_t>(k)); };

      auto init_state = [&](Variant v, double kappa) {
        const std::uint64_t s = seed_for(v);
        const Matrix& V_svd = v == Variant::RC ? *B_svd : Q_svd;
        return FactorState{mixed_init(P_svd, config.sigma, kappa, derive_seed(s, 0)),
                           mixed_init(V_svd, config.sigma, kappa, derive_seed(s, 1))};
      };
      auto model_of = [&](Variant v, FactorState state) {
        FactorModel m;
        m.variant = v;
        m.P = std::move(state.P);
        m.V = std::move(state.V);
        m.anova = anova;
        m.rating_min = ds.rating_min();
        m.rating_max = ds.rating_max();
        return m;
      };
      auto init_mae = [&](Variant v, double kappa) {
        return validation_mae(model_of(v, init_state(v, kappa)), split.validation, attrs);
      };

      double kappa_q = config.kappa, kappa_b = config.kappa;
      if (config.calibrate) {
        if (attrs) {
          KappaCalibration cal = calibrate_kappa([&](double kap) { return init_mae(Variant::BL, kap); },
                                                 [&](double kap) { return init_mae(Variant::RC, kap); },
                                                 config.calibration_tolerance);
          kappa_q = cal.kappa_a;
          kappa_b = cal.kappa_b;
          report.calibrations.push_back({r, k, cal});
        } else {
          kappa_q = 1.0;
        }
      }

      for (Variant v : config.variants) {
        const double kappa = v == Variant::RC ? kappa_b : kappa_q;
        FactorState init = init_state(v, kappa);

        Problem problem;
        problem.variant = v;
        problem.train = &normalized;
        problem.attrs = attrs;
        problem.weights = uses_weights(v) ? &weights.at(v) : nullptr;
        problem.lambda = steps.lambda;
        problem.gamma = resolve_gamma(v, ds.n_users(), ds.n_items(), D, config.gamma);

        ExperimentCell cell;
        cell.variant = v;
        cell.k = k;
        cell.repeat = r;
        cell.split_seed = split_seed;
        cell.init_seed = seed_for(v);
        cell.kappa = kappa;
        cell.lambda = steps.lambda;
        cell.eta = steps.eta;
        cell.gamma = problem.gamma;
        cell.mae_initial = validation_mae(model_of(v, init), split.validation, attrs);

        TrainResult result = train(problem, std::move(init), {steps.eta, config.epsilon, config.max_iters});
        cell.iterations = result.trace.iterations();
        cell.diverged = result.trace.diverged;
        cell.mae_final = validation_mae(model_of(v, std::move(result.state)), split.validation, attrs);
        report.cells.push_back(cell);
      }
    }
  }
  return report;
}

std::vector<CellSummary> ExperimentReport::summary() const {
  std::vector<CellSummary> out;
  for (int k : config.ks) {
    for (Variant v : config.variants) {
      std::vector<double> finals;
      CellSummary s;
      s.variant = v;
      s.k = k;
      int wins = 0;
      bool has_bl = false;
      for (const auto& c : cells) {
        if (c.k != k || c.variant != v) continue;
        finals.push_back(c.mae_final);
        s.mean_initial += c.mae_initial;
        for (const auto& b : cells) {
          if (b.k == k && b.repeat == c.repeat && b.variant == Variant::BL) {
            has_bl = true;
            if (c.mae_final < b.mae_final) ++wins;
          }
        }
      }
      s.count = static_cast<int>(finals.size());
      if (s.count == 0) continue;
      for (double f : finals) s.mean_final += f;
      s.mean_final /= s.count;
      s.mean_initial /= s.count;
      s.sd_final = sample_sd(finals);
      s.wins_vs_bl = (has_bl && v != Variant::BL) ? wins : -1;
      out.push_back(s);
    }
  }
  return out;
}

double ExperimentReport::mean_anova_mae() const {
  if (anova_mae.empty()) return 0.0;
  double s = 0.0;
  for (double x : anova_mae) s += x;
  return s / static_cast<double>(anova_mae.size());
}

void write_detail_csv(std::ostream& out, const ExperimentReport& report) {
  out << "dataset,variant,K,repeat,seed,mae_initial,mae_final,iterations,diverged\n";
  out << std::setprecision(17);
  for (const auto& c : report.cells) {
    out << report.config.dataset_id << ',' << to_string(c.variant) << ',' << c.k << ',' << c.repeat << ','
        << c.split_seed << ',' << c.mae_initial << ',' << c.mae_final << ',' << c.iterations << ','
        << (c.diverged ? 1 : 0) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const ExperimentReport& report) {
  out << "dataset,variant,K,repeats,mean_mae,sd_mae,mean_mae_initial,wins_vs_bl\n";
  out << std::setprecision(17);
  for (const auto& s : report.summary()) {
    out << report.config.dataset_id << ',' << to_string(s.variant) << ',' << s.k << ',' << s.count << ','
        << s.mean_final << ',' << s.sd_final << ',' << s.mean_initial << ',';
    if (s.wins_vs_bl >= 0) out << s.wins_vs_bl;
    out << '\n';
  }
  out << report.config.dataset_id << ",ANOVA,0," << report.anova_mae.size() << ',' << report.mean_anova_mae() << ','
      << sample_sd(report.anova_mae) << ",,\n";
}

std::string compare_table(const ExperimentReport& report) {
  const auto rows = report.summary();
  if (rows.empty()) throw InputError("empty experiment report");
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << std::left << std::setw(8) << "variant" << std::right << std::setw(4) << "K" << std::setw(22) << "MAE (mean +- sd)"
      << std::setw(14) << "initial MAE" << '\n';
  for (const auto& s : rows) {
    std::ostringstream cell;
    cell << std::fixed << std::setprecision(4) << s.mean_final << " +- " << s.sd_final;
    out << std::left << std::setw(8) << to_string(s.variant) << std::right << std::setw(4) << s.k << std::setw(22)
        << cell.str() << std::setw(14) << s.mean_initial << '\n';
  }
  out << "ANOVA-only MAE: " << report.mean_anova_mae() << '\n';
  for (const auto& s : rows) {
    if (s.wins_vs_bl < 0) continue;
    out << to_string(s.variant) << " beats BL on " << s.wins_vs_bl << '/' << s.count << " splits (K=" << s.k << ")\n";
  }
  return out.str();
}

}  // namespace cbmf
