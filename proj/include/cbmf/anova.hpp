#pragma once

#include "cbmf/dataset.hpp"

namespace cbmf {

/// Main-effects model r_ui ~ mu + alpha_u + beta_i.
///
/// Users (items) without training ratings carry a zero effect, so their
/// baseline prediction falls back to mu + beta_i (mu + alpha_u).
struct AnovaModel {
  double mu = 0.0;
  Vector alpha;  // length N
  Vector beta;   // length M

  double predict(Index u, Index i) const;
};

struct AnovaFitOptions {
  double tolerance = 1e-10;  // max coefficient change between sweeps
  int max_sweeps = 200;
};

// Backfitting from beta = 0: mu is the mean rating, then each sweep sets
// alpha_u to the mean of (r - mu - beta_i) over T_u. followed by beta_i to the
// mean of (r - mu - alpha_u) over T_.i.
AnovaModel fit_anova(const RatingsDataset& train, const AnovaFitOptions& options = {});

// Residual sum of squares after each backfitting sweep (sweep 0 is the
// mu-only fit). Exposed so the monotone-descent property can be checked.
std::vector<double> anova_sse_trace(const RatingsDataset& train, const AnovaFitOptions& options = {});

// r_ui - mu - alpha_u - beta_i. The rating range is widened to the interval
// every residual can attain.
RatingsDataset residualize(const RatingsDataset& ds, const AnovaModel& model);

double baseline_predict(const AnovaModel& model, Index u, Index i);

}  // namespace cbmf
