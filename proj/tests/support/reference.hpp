#pragma once

// Small random problems plus slow, loop-by-loop reference implementations
// used to cross-check the vectorized library code.

#include <cmath>
#include <random>
#include <vector>

#include "cbmf/dataset.hpp"
#include "cbmf/factorize.hpp"
#include "cbmf/weights.hpp"

namespace cbmf::testing {

struct Instance {
  RatingsDataset ratings;
  AttributeMatrix attrs;
  FactorState state;  // V is Q (M x K) unless built for RC
};

inline Matrix gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double sd) {
  std::normal_distribution<double> nd(0.0, sd);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = nd(rng);
  return m;
}

inline AttributeMatrix random_attributes(std::mt19937_64& rng, std::size_t M, std::size_t D, double p = 0.5) {
  std::bernoulli_distribution on(p);
  AttributeMatrix a;
  a.incidence = Matrix::Zero(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(D));
  for (std::size_t d = 0; d < D; ++d) a.labels.push_back("a" + std::to_string(d));
  for (Eigen::Index i = 0; i < a.incidence.rows(); ++i)
    for (Eigen::Index d = 0; d < a.incidence.cols(); ++d) a.incidence(i, d) = on(rng) ? 1.0 : 0.0;
  return a;
}

// Ratings on a random subset of cells (at least one), residual-scale values.
inline RatingsDataset random_ratings(std::mt19937_64& rng, std::size_t N, std::size_t M, double density) {
  std::bernoulli_distribution keep(density);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::vector<Rating> rs;
  for (Index u = 0; u < N; ++u)
    for (Index i = 0; i < M; ++i)
      if (keep(rng)) rs.push_back({u, i, val(rng)});
  if (rs.empty()) rs.push_back({0, 0, val(rng)});
  return RatingsDataset(N, M, std::move(rs), -2.0, 2.0);
}

inline Instance random_instance(std::mt19937_64& rng, std::size_t N, std::size_t M, std::size_t D, int K,
                                bool for_rc, double density = 0.6) {
  Instance in;
  in.ratings = random_ratings(rng, N, M, density);
  in.attrs = random_attributes(rng, M, D);
  in.state.P = gaussian(rng, static_cast<Eigen::Index>(N), K, 0.7);
  in.state.V = gaussian(rng, static_cast<Eigen::Index>(for_rc ? D : M), K, 0.7);
  return in;
}

inline Problem make_problem(Variant v, const Instance& in, const WeightMatrix* w, double lambda, double gamma) {
  Problem p;
  p.variant = v;
  p.train = &in.ratings;
  p.attrs = &in.attrs;
  p.weights = w;
  p.lambda = lambda;
  p.gamma = gamma;
  return p;
}

// Central differences of the objective with respect to every entry of P and V.
inline FactorState fd_gradient(const Problem& problem, const FactorState& state, double h = 1e-6) {
  FactorState g{Matrix::Zero(state.P.rows(), state.P.cols()), Matrix::Zero(state.V.rows(), state.V.cols())};
  FactorState x = state;
  auto sweep = [&](Matrix& target, Matrix& out) {
    for (Eigen::Index r = 0; r < target.rows(); ++r)
      for (Eigen::Index c = 0; c < target.cols(); ++c) {
        const double keep = target(r, c);
        target(r, c) = keep + h;
        const double up = objective(problem, x);
        target(r, c) = keep - h;
        const double down = objective(problem, x);
        target(r, c) = keep;
        out(r, c) = (up - down) / (2.0 * h);
      }
  };
  sweep(x.P, g.P);
  sweep(x.V, g.V);
  return g;
}

inline double rel_error(const FactorState& a, const FactorState& b) {
  const double num = std::sqrt((a.P - b.P).squaredNorm() + (a.V - b.V).squaredNorm());
  const double den = std::sqrt(b.P.squaredNorm() + b.V.squaredNorm());
  return num / std::max(den, 1e-300);
}

inline double max_abs_diff(const FactorState& a, const FactorState& b) {
  return std::max((a.P - b.P).cwiseAbs().maxCoeff(), (a.V - b.V).cwiseAbs().maxCoeff());
}

// Dense item-item weights computed straight from the definitions.
inline Matrix naive_weights(Variant v, const AttributeMatrix& attrs, int c, double theta) {
  const auto M = attrs.incidence.rows();
  const auto D = attrs.incidence.cols();
  Matrix w = Matrix::Zero(M, M);
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = 0; j < M; ++j) {
      if (i == j) continue;
      double shared = 0, ni = 0, nj = 0;
      for (Eigen::Index d = 0; d < D; ++d) {
        shared += attrs.incidence(i, d) * attrs.incidence(j, d);
        ni += attrs.incidence(i, d);
        nj += attrs.incidence(j, d);
      }
      if (v == Variant::AB) {
        w(i, j) = shared >= c ? 1.0 : 0.0;
      } else if (v == Variant::gAB) {
        w(i, j) = 1.0 / (1.0 + std::exp(-theta * (shared - c)));
      } else if (ni > 0 && nj > 0) {
        w(i, j) = shared / (std::sqrt(ni) * std::sqrt(nj));
      }
    }
    double s = 0;
    for (Eigen::Index j = 0; j < M; ++j) s += w(i, j);
    if (s > 0)
      for (Eigen::Index j = 0; j < M; ++j) w(i, j) /= s;
  }
  return w;
}

// Item-side direction for AB/gAB/TG, one rating and one neighbor at a time.
inline Matrix naive_item_direction(Variant v, const RatingsDataset& ds, const FactorState& s, const Matrix& w,
                                   double lambda, double gamma) {
  const auto M = s.V.rows();
  const auto K = s.V.cols();
  Matrix g = Matrix::Zero(M, K);
  for (const auto& r : ds.ratings()) {
    double pred = 0;
    for (Eigen::Index k = 0; k < K; ++k) pred += s.P(r.user, k) * s.V(r.item, k);
    for (Eigen::Index k = 0; k < K; ++k) g(r.item, k) -= (r.value - pred) * s.P(r.user, k);
  }
  for (Eigen::Index i = 0; i < M; ++i) {
    double wsum = 0;
    for (Eigen::Index j = 0; j < M; ++j) wsum += w(i, j);
    for (Eigen::Index k = 0; k < K; ++k) {
      double centroid = 0;
      for (Eigen::Index j = 0; j < M; ++j) centroid += w(i, j) * s.V(j, k);
      double bracket = v == Variant::TG ? (1.0 + 2.0 * wsum) * s.V(i, k) - 2.0 * centroid : s.V(i, k) - centroid;
      g(i, k) += lambda * gamma * bracket;
    }
  }
  return g;
}

}  // namespace cbmf::testing
