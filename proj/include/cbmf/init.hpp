#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "cbmf/dataset.hpp"

namespace cbmf {

enum class InitStrategy { Svd, Random, Mixed };

struct InitConfig {
  InitStrategy strategy = InitStrategy::Mixed;
  double kappa = 0.5;
  double sigma = 0.01;
  std::optional<double> delta;  // nullopt: median diagonal of A^T A when the ridge path is taken
  std::uint64_t seed = 0;

  void validate() const;
};

InitStrategy parse_init_strategy(std::string_view name);

struct SvdFactors {
  Matrix P;                 // P* D*^{1/2}, N x K
  Matrix Q;                 // Q* D*^{1/2}, M x K
  Vector singular_values;   // leading K, nonincreasing
};

// Truncated SVD of the zero-imputed N x M residual matrix. Each left singular
// vector is signed so its largest-magnitude entry is nonnegative.
SvdFactors svd_init(const RatingsDataset& train_normalized, int k);

// Dense zero-imputed matrix of the observed ratings.
Eigen::MatrixXd dense_ratings(const RatingsDataset& ds);

struct AttributeMap {
  Matrix B;
  bool ridge = false;
  double delta = 0.0;
};

// Least-squares B0 with A B0 ~ Q0. Uses (A^T A) B0 = A^T Q0 unless D > M or
// the system is ill-conditioned (reciprocal condition below 1e-12), in which
// case delta I is added. An explicit delta of 0 forces the plain solve and
// throws InputError if A^T A is singular.
AttributeMap map_B(const AttributeMatrix& attrs, const Matrix& Q0, std::optional<double> delta = std::nullopt);

// i.i.d. normal(0, sigma^2) entries from a seeded mt19937_64.
Matrix random_init(Eigen::Index rows, Eigen::Index k, double sigma, std::uint64_t seed);

// kappa * svd_part + (1 - kappa) * random_init(same shape, sigma, seed).
Matrix mixed_init(const Matrix& svd_part, double sigma, double kappa, std::uint64_t seed);

struct KappaCalibration {
  double kappa_a = 1.0;
  double kappa_b = 1.0;
  double mae_a = 0.0;
  double mae_b = 0.0;
  bool matched = true;  // false when the requested tolerance was not reached
  int steps = 0;
};

// Validation MAE of a group's mixed initialization at a given kappa.
using MaeAtKappa = std::function<double(double kappa)>;

// Evaluates both groups at kappa = 1, keeps the weaker one there and bisects
// kappa in [0, 1] for the stronger one until the two MAEs agree within
// `tolerance` or `max_steps` bisections have run.
KappaCalibration calibrate_kappa(const MaeAtKappa& group_a, const MaeAtKappa& group_b, double tolerance = 0.002,
                                 int max_steps = 30);

}  // namespace cbmf
