#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cbmf/anova.hpp"
#include "cbmf/dataset.hpp"
#include "cbmf/weights.hpp"

namespace cbmf {

// BL: baseline, AB: alignment-biased, gAB: smoothed alignment-biased,
// TG: tag-style pairwise penalty, RC: regression-constrained (Q = A B).
enum class Variant { BL, AB, gAB, TG, RC };

inline constexpr Variant kAllVariants[] = {Variant::BL, Variant::AB, Variant::gAB, Variant::TG, Variant::RC};

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);  // case-insensitive; throws InputError

constexpr bool uses_weights(Variant v) { return v == Variant::AB || v == Variant::gAB || v == Variant::TG; }
constexpr bool uses_attributes(Variant v) { return v != Variant::BL; }

struct Hyperparams {
  int k = 5;
  double lambda = 25.0;
  std::optional<double> gamma;  // nullopt: resolve from N, M, D
  double eta = 0.002;
  double epsilon = 0.005;
  int max_iters = 500;
  int c = 1;
  double theta = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// N/M for BL, AB, gAB; N/(3M) for TG; N/D for RC. An explicit value wins.
double resolve_gamma(Variant v, std::size_t n_users, std::size_t n_items, std::size_t n_attrs,
                     std::optional<double> explicit_gamma = std::nullopt);

// Item-side weights each variant expects (AB: uniform over S_c(i); gAB:
// logistic; TG: cosine; all row-normalized). Throws for BL and RC.
WeightMatrix build_weights(Variant v, const AttributeMatrix& attrs, int c, double theta);

// Parameter state: user factors P (N x K) and item-side factors V, which are
// Q (M x K) for BL/AB/gAB/TG or B (D x K) for RC.
struct FactorState {
  Matrix P;
  Matrix V;
};

/// One training problem: data, side information and penalty weights.
/// Ratings are expected to be ANOVA residuals already.
struct Problem {
  Variant variant = Variant::BL;
  const RatingsDataset* train = nullptr;
  const AttributeMatrix* attrs = nullptr;  // required for RC
  const WeightMatrix* weights = nullptr;   // required for AB, gAB, TG
  double lambda = 0.0;
  double gamma = 1.0;

  // Throws InputError when the side information does not match the variant
  // or when the state has inconsistent shapes.
  void validate(const FactorState& state) const;
};

// Item factors as used in predictions: Q, or A B for RC.
Matrix effective_item_factors(const Problem& problem, const FactorState& state);

double objective(const Problem& problem, const FactorState& state);

// Descent directions with the unit-constant convention: the data term is
// sum -(r - p.q) q (no factor 2), penalties enter with coefficient lambda
// (user) and lambda*gamma (item side). For BL and RC these are exactly half
// the gradient of the objective.
Vector grad_user(const Problem& problem, const FactorState& state, Index u);
Vector grad_item(const Problem& problem, const FactorState& state, Index i);
Matrix grad_B(const Problem& problem, const FactorState& state);

// All directions at once, evaluated on the same snapshot.
FactorState gradient(const Problem& problem, const FactorState& state);

struct TraceEntry {
  int iteration = 0;
  double objective = 0.0;
  double rel_improvement = 0.0;
  double seconds = 0.0;
};

struct TraceLog {
  double initial_objective = 0.0;
  std::vector<TraceEntry> entries;
  bool diverged = false;

  int iterations() const { return static_cast<int>(entries.size()); }
  // iteration,objective,rel_improvement,seconds
  void write_csv(std::ostream& out) const;
};

struct TrainOptions {
  double eta = 0.002;
  double epsilon = 0.005;
  int max_iters = 500;
};

struct TrainResult {
  FactorState state;
  TraceLog trace;
};

// Simultaneous gradient descent: every direction is computed from iteration
// j, then all parameters move by -eta * direction. Stops when the relative
// improvement (L_j - L_{j+1}) / |L_j| drops below epsilon, or after
// max_iters. An increase of the objective stops training with the
// divergence flag set and returns the last non-increasing state. A
// non-finite objective throws NumericError.
TrainResult train(const Problem& problem, FactorState init, const TrainOptions& options);

/// Trained model: factors plus the ANOVA effects they were fit on top of.
struct FactorModel {
  Variant variant = Variant::BL;
  Matrix P;
  Matrix V;  // Q, or B for RC
  AnovaModel anova;
  double rating_min = 0.0;
  double rating_max = 0.0;

  Eigen::Index k() const { return P.cols(); }
};

// p_u . q_i (or p_u . B^T a_i) plus mu + alpha_u + beta_i; not clamped.
double predict(const FactorModel& model, Index u, Index i, const AttributeMatrix* attrs = nullptr);

}  // namespace cbmf
