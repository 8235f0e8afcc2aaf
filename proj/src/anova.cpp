#include "cbmf/anova.hpp"

#include <cmath>

namespace cbmf {

namespace {

double sse(const RatingsDataset& ds, const AnovaModel& m) {
  double s = 0.0;
  for (const auto& r : ds.ratings()) {
    double e = r.value - m.mu - m.alpha(r.user) - m.beta(r.item);
    s += e * e;
  }
  return s;
}

// One backfitting sweep; returns the largest coefficient change.
double sweep(const RatingsDataset& ds, AnovaModel& m) {
  double change = 0.0;
  for (Index u = 0; u < ds.n_users(); ++u) {
    auto rows = ds.by_user(u);
    if (rows.empty()) continue;
    double acc = 0.0;
    for (auto t : rows) acc += ds[t].value - m.mu - m.beta(ds[t].item);
    double next = acc / static_cast<double>(rows.size());
    change = std::max(change, std::abs(next - m.alpha(u)));
    m.alpha(u) = next;
  }
  for (Index i = 0; i < ds.n_items(); ++i) {
    auto rows = ds.by_item(i);
    if (rows.empty()) continue;
    double acc = 0.0;
    for (auto t : rows) acc += ds[t].value - m.mu - m.alpha(ds[t].user);
    double next = acc / static_cast<double>(rows.size());
    change = std::max(change, std::abs(next - m.beta(i)));
    m.beta(i) = next;
  }
  return change;
}

AnovaModel initial_model(const RatingsDataset& train) {
  if (train.empty()) throw InputError("cannot fit ANOVA on an empty training set");
  AnovaModel m;
  double total = 0.0;
  for (const auto& r : train.ratings()) total += r.value;
  m.mu = total / static_cast<double>(train.size());
  m.alpha = Vector::Zero(static_cast<Eigen::Index>(train.n_users()));
  m.beta = Vector::Zero(static_cast<Eigen::Index>(train.n_items()));
  return m;
}

}  // namespace

double AnovaModel::predict(Index u, Index i) const { return baseline_predict(*this, u, i); }

AnovaModel fit_anova(const RatingsDataset& train, const AnovaFitOptions& options) {
  AnovaModel m = initial_model(train);
  for (int s = 0; s < options.max_sweeps; ++s) {
    if (sweep(train, m) < options.tolerance) break;
  }
  return m;
}

std::vector<double> anova_sse_trace(const RatingsDataset& train, const AnovaFitOptions& options) {
  AnovaModel m = initial_model(train);
  std::vector<double> trace{sse(train, m)};
  for (int s = 0; s < options.max_sweeps; ++s) {
    double change = sweep(train, m);
    trace.push_back(sse(train, m));
    if (change < options.tolerance) break;
  }
  return trace;
}

RatingsDataset residualize(const RatingsDataset& ds, const AnovaModel& model) {
  if (static_cast<std::size_t>(model.alpha.size()) != ds.n_users() ||
      static_cast<std::size_t>(model.beta.size()) != ds.n_items()) {
    throw InputError("ANOVA model dimensions do not match the dataset");
  }
  std::vector<Rating> out;
  out.reserve(ds.size());
  for (const auto& r : ds.ratings()) out.push_back({r.user, r.item, r.value - model.predict(r.user, r.item)});

  const double base_lo = model.mu + (model.alpha.size() ? model.alpha.minCoeff() : 0.0) +
                         (model.beta.size() ? model.beta.minCoeff() : 0.0);
  const double base_hi = model.mu + (model.alpha.size() ? model.alpha.maxCoeff() : 0.0) +
                         (model.beta.size() ? model.beta.maxCoeff() : 0.0);
  return ds.with_ratings(std::move(out), ds.rating_min() - base_hi, ds.rating_max() - base_lo);
}

double baseline_predict(const AnovaModel& model, Index u, Index i) {
  if (u >= model.alpha.size() || i >= model.beta.size()) throw InputError("index out of range for ANOVA model");
  return model.mu + model.alpha(u) + model.beta(i);
}

}  // namespace cbmf
