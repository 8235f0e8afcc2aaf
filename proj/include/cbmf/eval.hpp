#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbmf/factorize.hpp"
#include "cbmf/init.hpp"

namespace cbmf {

double clamp_rating(double value, double rating_min, double rating_max);

double mae(std::span<const double> predictions, std::span<const double> truths);

// Hyperparameter profile: which column of the (lambda, eta) table applies.
enum class Profile { Movies, Recipes };

Profile parse_profile(std::string_view name);
std::string_view to_string(Profile p);

struct StepSettings {
  double lambda = 0.0;
  double eta = 0.0;
};

// Default (lambda, eta) for K in {5, 10, 15}; nullopt for other K.
std::optional<StepSettings> default_step_settings(Profile profile, int k);

// Clamped validation MAE of (P, V) on top of the ANOVA effects.
double validation_mae(const FactorModel& model, const RatingsDataset& validation, const AttributeMatrix* attrs);
double anova_mae(const AnovaModel& anova, const RatingsDataset& validation);

struct ExperimentConfig {
  std::string dataset_id = "dataset";
  Profile profile = Profile::Movies;
  std::vector<Variant> variants{kAllVariants, kAllVariants + 5};
  std::vector<int> ks{5, 10, 15};
  std::map<int, StepSettings> step_overrides;  // per-K replacements for the table
  int repeats = 15;
  double holdout = 0.5;
  std::uint64_t base_seed = 1;
  double epsilon = 0.005;
  int max_iters = 500;
  int c = 1;
  double theta = 1.0;
  std::optional<double> gamma;  // explicit gamma for every variant
  double sigma = 0.01;
  bool calibrate = true;
  double kappa = 0.5;  // used when calibrate is false
  double calibration_tolerance = 0.002;

  StepSettings steps_for(int k) const;  // throws InputError when neither table nor override covers k
  void validate() const;
};

struct ExperimentCell {
  Variant variant = Variant::BL;
  int k = 0;
  int repeat = 0;
  std::uint64_t split_seed = 0;
  std::uint64_t init_seed = 0;
  double kappa = 1.0;
  double lambda = 0.0;
  double eta = 0.0;
  double gamma = 0.0;
  double mae_initial = 0.0;
  double mae_final = 0.0;
  int iterations = 0;
  bool diverged = false;
};

struct CalibrationRecord {
  int repeat = 0;
  int k = 0;
  KappaCalibration result;
};

struct CellSummary {
  Variant variant = Variant::BL;
  int k = 0;
  int count = 0;
  double mean_final = 0.0;
  double sd_final = 0.0;
  double mean_initial = 0.0;
  int wins_vs_bl = -1;  // splits on which this variant's MAE is below BL's; -1 when not applicable
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ExperimentCell> cells;         // ordered by repeat, K, variant
  std::vector<double> anova_mae;             // per repeat
  std::vector<CalibrationRecord> calibrations;

  std::vector<CellSummary> summary() const;
  double mean_anova_mae() const;
};

// Repeated holdout: for every repeat r the split uses seed base_seed + r and
// all variants/K share it. Per repeat: ANOVA fit on the training half,
// residualization, truncated SVD, mixed initialization calibrated so both
// initialization groups (Q-based and B-based) start at matching validation
// MAE, training, and clamped validation MAE.
ExperimentReport run_experiment(const RatingsDataset& ds, const AttributeMatrix* attrs, const ExperimentConfig& config);

// dataset,variant,K,repeat,seed,mae_initial,mae_final,iterations,diverged
void write_detail_csv(std::ostream& out, const ExperimentReport& report);
// dataset,variant,K,repeats,mean_mae,sd_mae,mean_mae_initial,wins_vs_bl
void write_summary_csv(std::ostream& out, const ExperimentReport& report);
// Aligned text: mean +- sd per variant and K plus "X beats BL on k/R splits" lines.
std::string compare_table(const ExperimentReport& report);

}  // namespace cbmf
