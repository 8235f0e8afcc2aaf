#include "cbmf/factorize.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace cbmf {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::BL: return "BL";
    case Variant::AB: return "AB";
    case Variant::gAB: return "gAB";
    case Variant::TG: return "TG";
    case Variant::RC: return "RC";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  for (Variant v : kAllVariants) {
    std::string cand(to_string(v));
    std::transform(cand.begin(), cand.end(), cand.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (cand == lower) return v;
  }
  throw InputError("unknown algorithm '" + std::string(name) + "' (expected bl, ab, gab, tg or rc)");
}

void Hyperparams::validate() const {
  if (k < 1) throw InputError("K must be at least 1");
  if (!(lambda > 0.0)) throw InputError("lambda must be positive");
  if (!(eta > 0.0)) throw InputError("eta must be positive");
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (max_iters < 1) throw InputError("max-iters must be at least 1");
  if (c < 1) throw InputError("c must be at least 1");
  if (!(theta > 0.0)) throw InputError("theta must be positive");
  if (gamma && !(*gamma > 0.0)) throw InputError("gamma must be positive");
}

double resolve_gamma(Variant v, std::size_t n_users, std::size_t n_items, std::size_t n_attrs,
                     std::optional<double> explicit_gamma) {
  if (explicit_gamma) return *explicit_gamma;
  if (n_users == 0) throw InputError("gamma: no users");
  const auto N = static_cast<double>(n_users);
  switch (v) {
    case Variant::BL:
    case Variant::AB:
    case Variant::gAB:
      if (n_items == 0) throw InputError("gamma: no items");
      return N / static_cast<double>(n_items);
    case Variant::TG:
      if (n_items == 0) throw InputError("gamma: no items");
      return N / (3.0 * static_cast<double>(n_items));
    case Variant::RC:
      if (n_attrs == 0) throw InputError("gamma: no attributes");
      return N / static_cast<double>(n_attrs);
  }
  return 1.0;
}

WeightMatrix build_weights(Variant v, const AttributeMatrix& attrs, int c, double theta) {
  switch (v) {
    case Variant::AB: return alignment_weights(neighbor_sets(attrs, c));
    case Variant::gAB: return logistic_weights(attrs, c, theta, true);
    case Variant::TG: return cosine_weights(attrs, true);
    default: throw InputError(std::string(to_string(v)) + " does not use item weights");
  }
}

void Problem::validate(const FactorState& state) const {
  if (!train) throw InputError("problem has no training data");
  const auto N = static_cast<Eigen::Index>(train->n_users());
  const auto M = static_cast<Eigen::Index>(train->n_items());
  if (state.P.rows() != N) throw InputError("P has the wrong number of rows");
  if (state.V.cols() != state.P.cols()) throw InputError("P and item-side factors disagree on K");
  if (uses_weights(variant)) {
    if (!weights) throw InputError(std::string(to_string(variant)) + " requires item weights");
    if (weights->weights.rows() != M || weights->weights.cols() != M) throw InputError("weight matrix is not M x M");
  }
  if (variant == Variant::RC) {
    if (!attrs) throw InputError("RC requires attributes");
    if (attrs->incidence.rows() != M) throw InputError("attribute rows do not match item count");
    if (state.V.rows() != attrs->incidence.cols()) throw InputError("B must have D rows");
  } else if (state.V.rows() != M) {
    throw InputError("Q has the wrong number of rows");
  }
}

Matrix effective_item_factors(const Problem& problem, const FactorState& state) {
  if (problem.variant == Variant::RC) return problem.attrs->incidence * state.V;
  return state.V;
}

namespace {

// sum_i sum_i' w(i,i') q_i . q_i'
double weighted_alignment(const WeightMatrix& w, const Matrix& Q) {
  Matrix WQ = w.weights * Q;
  return (Q.array() * WQ.array()).sum();
}

// sum_i sum_i' w(i,i') |q_i - q_i'|^2 expanded as
// sum_i w_i. |q_i|^2 + sum_i' (sum_i w(i,i')) |q_i'|^2 - 2 sum w q_i . q_i'
double pairwise_spread(const WeightMatrix& w, const Matrix& Q) {
  Vector sq = Q.rowwise().squaredNorm();
  Vector col_sums = w.weights.transpose() * Vector::Ones(w.weights.rows());
  return w.row_sums.dot(sq) + col_sums.dot(sq) - 2.0 * weighted_alignment(w, Q);
}

// Item-side penalty bracket added to the data term for q_i, before scaling by lambda*gamma.
void add_item_bracket(const Problem& problem, const Matrix& Q, Matrix& G) {
  const double lg = problem.lambda * problem.gamma;
  switch (problem.variant) {
    case Variant::BL:
      G += lg * Q;
      break;
    case Variant::AB:
    case Variant::gAB: {
      Matrix centroid = problem.weights->weights * Q;
      G += lg * (Q - centroid);
      break;
    }
    case Variant::TG: {
      Matrix centroid = problem.weights->weights * Q;
      Vector scale = (1.0 + 2.0 * problem.weights->row_sums.array()).matrix();
      G += lg * (scale.asDiagonal() * Q - 2.0 * centroid);
      break;
    }
    case Variant::RC:
      break;
  }
}

}  // namespace

double objective(const Problem& problem, const FactorState& state) {
  problem.validate(state);
  const Matrix Q = effective_item_factors(problem, state);
  double data = 0.0;
  for (const auto& r : problem.train->ratings()) {
    double e = r.value - state.P.row(r.user).dot(Q.row(r.item));
    data += e * e;
  }
  const double lg = problem.lambda * problem.gamma;
  double value = data + problem.lambda * state.P.squaredNorm() + lg * state.V.squaredNorm();
  switch (problem.variant) {
    case Variant::AB:
    case Variant::gAB:
      value -= lg * weighted_alignment(*problem.weights, Q);
      break;
    case Variant::TG:
      value += lg * pairwise_spread(*problem.weights, Q);
      break;
    default:
      break;
  }
  return value;
}

Vector grad_user(const Problem& problem, const FactorState& state, Index u) {
  problem.validate(state);
  const auto& ds = *problem.train;
  Vector g = Vector::Zero(state.P.cols());
  for (auto t : ds.by_user(u)) {
    const auto& r = ds[t];
    Vector q = problem.variant == Variant::RC
                   ? Vector(state.V.transpose() * problem.attrs->incidence.row(r.item).transpose())
                   : Vector(state.V.row(r.item).transpose());
    double e = r.value - state.P.row(u).dot(q);
    g -= e * q;
  }
  g += problem.lambda * state.P.row(u).transpose();
  return g;
}

Vector grad_item(const Problem& problem, const FactorState& state, Index i) {
  problem.validate(state);
  if (problem.variant == Variant::RC) throw InputError("grad_item is undefined for RC; use grad_B");
  const auto& ds = *problem.train;
  const auto& Q = state.V;
  Vector g = Vector::Zero(Q.cols());
  for (auto t : ds.by_item(i)) {
    const auto& r = ds[t];
    double e = r.value - state.P.row(r.user).dot(Q.row(i));
    g -= e * state.P.row(r.user).transpose();
  }
  const double lg = problem.lambda * problem.gamma;
  const Vector qi = Q.row(i).transpose();
  if (problem.variant == Variant::BL) {
    g += lg * qi;
    return g;
  }
  const auto& W = problem.weights->weights;
  Vector centroid = Vector::Zero(Q.cols());
  for (SparseMatrix::InnerIterator it(W, i); it; ++it) centroid += it.value() * Q.row(it.col()).transpose();
  if (problem.variant == Variant::TG) {
    g += lg * ((1.0 + 2.0 * problem.weights->row_sums(i)) * qi - 2.0 * centroid);
  } else {
    g += lg * (qi - centroid);
  }
  return g;
}

Matrix grad_B(const Problem& problem, const FactorState& state) {
  problem.validate(state);
  if (problem.variant != Variant::RC) throw InputError("grad_B applies to RC only");
  return gradient(problem, state).V;
}

FactorState gradient(const Problem& problem, const FactorState& state) {
  problem.validate(state);
  const Matrix Q = effective_item_factors(problem, state);
  FactorState g{Matrix::Zero(state.P.rows(), state.P.cols()), Matrix::Zero(Q.rows(), Q.cols())};
  for (const auto& r : problem.train->ratings()) {
    double e = r.value - state.P.row(r.user).dot(Q.row(r.item));
    g.P.row(r.user) -= e * Q.row(r.item);
    g.V.row(r.item) -= e * state.P.row(r.user);
  }
  g.P += problem.lambda * state.P;
  if (problem.variant == Variant::RC) {
    // sum -(r - p.B^T a_i) a_i p_u^T = A^T (per-item data terms)
    Matrix gb = problem.attrs->incidence.transpose() * g.V;
    gb += problem.lambda * problem.gamma * state.V;
    g.V = std::move(gb);
  } else {
    add_item_bracket(problem, Q, g.V);
  }
  return g;
}

void TraceLog::write_csv(std::ostream& out) const {
  out << "iteration,objective,rel_improvement,seconds\n";
  out << std::setprecision(17);
  out << 0 << ',' << initial_objective << ",," << 0 << '\n';
  for (const auto& e : entries) out << e.iteration << ',' << e.objective << ',' << e.rel_improvement << ',' << e.seconds << '\n';
}

TrainResult train(const Problem& problem, FactorState init, const TrainOptions& options) {
  problem.validate(init);
  if (!(options.eta > 0.0) || !(options.epsilon > 0.0) || options.max_iters < 1) {
    throw InputError("invalid training options");
  }
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();

  TrainResult result{std::move(init), {}};
  double current = objective(problem, result.state);
  if (!std::isfinite(current)) throw NumericError("initial objective is not finite");
  result.trace.initial_objective = current;

  for (int j = 1; j <= options.max_iters; ++j) {
    FactorState g = gradient(problem, result.state);
    FactorState next{result.state.P - options.eta * g.P, result.state.V - options.eta * g.V};
    double value = objective(problem, next);
    if (!std::isfinite(value)) {
      std::ostringstream msg;
      msg << "objective became non-finite at iteration " << j << " with eta = " << options.eta;
      throw NumericError(msg.str());
    }
    const double rel = (current - value) / std::abs(current);
    const double secs = std::chrono::duration<double>(clock::now() - start).count();
    result.trace.entries.push_back({j, value, rel, secs});
    if (value > current) {
      result.trace.diverged = true;
      break;
    }
    result.state = std::move(next);
    current = value;
    if (rel < options.epsilon) break;
  }
  return result;
}

double predict(const FactorModel& model, Index u, Index i, const AttributeMatrix* attrs) {
  if (u >= model.P.rows()) throw InputError("user index out of range");
  double latent = 0.0;
  if (model.variant == Variant::RC) {
    if (!attrs) throw InputError("RC prediction requires attributes");
    if (i >= attrs->incidence.rows()) throw InputError("item index out of range");
    latent = model.P.row(u).dot(model.V.transpose() * attrs->incidence.row(i).transpose());
  } else {
    if (i >= model.V.rows()) throw InputError("item index out of range");
    latent = model.P.row(u).dot(model.V.row(i));
  }
  return latent + baseline_predict(model.anova, u, i);
}

}  // namespace cbmf
