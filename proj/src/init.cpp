#include "cbmf/init.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

#include <Eigen/SVD>

namespace cbmf {

void InitConfig::validate() const {
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw InputError("kappa must lie in [0, 1]");
  if (!(sigma > 0.0)) throw InputError("sigma must be positive");
  if (delta && !(*delta >= 0.0)) throw InputError("delta must be nonnegative");
}

InitStrategy parse_init_strategy(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (s == "svd") return InitStrategy::Svd;
  if (s == "random") return InitStrategy::Random;
  if (s == "mixed") return InitStrategy::Mixed;
  throw InputError("unknown init strategy '" + std::string(name) + "' (expected svd, random or mixed)");
}

Eigen::MatrixXd dense_ratings(const RatingsDataset& ds) {
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ds.n_users()), static_cast<Eigen::Index>(ds.n_items()));
  for (const auto& r : ds.ratings()) R(r.user, r.item) = r.value;
  return R;
}

SvdFactors svd_init(const RatingsDataset& train_normalized, int k) {
  const auto N = static_cast<Eigen::Index>(train_normalized.n_users());
  const auto M = static_cast<Eigen::Index>(train_normalized.n_items());
  if (k < 1 || k > std::min(N, M)) throw InputError("K must lie in [1, min(N, M)] for SVD initialization");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense_ratings(train_normalized), Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd U = svd.matrixU().leftCols(k);
  Eigen::MatrixXd V = svd.matrixV().leftCols(k);
  Vector s = svd.singularValues().head(k);

  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::Index arg = 0;
    U.col(c).cwiseAbs().maxCoeff(&arg);
    if (U(arg, c) < 0.0) {
      U.col(c) *= -1.0;
      V.col(c) *= -1.0;
    }
  }
  Vector root = s.cwiseSqrt();
  return {U * root.asDiagonal(), V * root.asDiagonal(), s};
}

AttributeMap map_B(const AttributeMatrix& attrs, const Matrix& Q0, std::optional<double> delta) {
  const Eigen::MatrixXd& A = attrs.incidence;
  if (A.rows() != Q0.rows()) throw InputError("attribute rows do not match Q0 rows");
  const Eigen::Index D = A.cols();
  Eigen::MatrixXd AtA = A.transpose() * A;
  Eigen::MatrixXd AtQ = A.transpose() * Q0;

  auto ridge_solve = [&](double d) {
    Eigen::MatrixXd reg = AtA;
    reg.diagonal().array() += d;
    Eigen::LLT<Eigen::MatrixXd> llt(reg);
    if (llt.info() != Eigen::Success) throw NumericError("ridge system is not positive definite");
    return AttributeMap{llt.solve(AtQ), true, d};
  };
  auto median_diagonal = [&] {
    Eigen::VectorXd d = AtA.diagonal();
    std::vector<double> diag(d.data(), d.data() + D);
    std::sort(diag.begin(), diag.end());
    double med = D % 2 ? diag[D / 2] : 0.5 * (diag[D / 2 - 1] + diag[D / 2]);
    return med > 0.0 ? med : 1.0;
  };

  if (delta && *delta > 0.0) return ridge_solve(*delta);

  const bool forced_plain = delta.has_value();
  if (!forced_plain && D > A.rows()) return ridge_solve(median_diagonal());

  Eigen::LDLT<Eigen::MatrixXd> ldlt(AtA);
  // rcond() alone can miss an exactly rank-deficient A^T A, so also look at the pivots
  const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
  const bool singular = ldlt.info() != Eigen::Success || !(ldlt.rcond() >= 1e-12) ||
                        !(pivots.minCoeff() > 1e-12 * pivots.maxCoeff());
  if (singular) {
    if (forced_plain) throw NumericError("A^T A is singular; a positive ridge delta is required");
    return ridge_solve(median_diagonal());
  }
  return AttributeMap{ldlt.solve(AtQ), false, 0.0};
}

Matrix random_init(Eigen::Index rows, Eigen::Index k, double sigma, std::uint64_t seed) {
  if (!(sigma > 0.0)) throw InputError("sigma must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  Matrix out(rows, k);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < k; ++c) out(r, c) = normal(rng);
  return out;
}

Matrix mixed_init(const Matrix& svd_part, double sigma, double kappa, std::uint64_t seed) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw InputError("kappa must lie in [0, 1]");
  Matrix noise = random_init(svd_part.rows(), svd_part.cols(), sigma, seed);
  return kappa * svd_part + (1.0 - kappa) * noise;
}

KappaCalibration calibrate_kappa(const MaeAtKappa& group_a, const MaeAtKappa& group_b, double tolerance,
                                 int max_steps) {
  KappaCalibration out;
  out.mae_a = group_a(1.0);
  out.mae_b = group_b(1.0);
  if (std::abs(out.mae_a - out.mae_b) <= tolerance) return out;

  const bool a_stronger = out.mae_a < out.mae_b;
  const MaeAtKappa& stronger = a_stronger ? group_a : group_b;
  const double target = a_stronger ? out.mae_b : out.mae_a;

  // Lower kappa moves the stronger group toward pure noise (weaker).
  double lo = 0.0, hi = 1.0;
  double best_kappa = 1.0, best_mae = a_stronger ? out.mae_a : out.mae_b;
  for (int step = 0; step < max_steps; ++step) {
    const double mid = 0.5 * (lo + hi);
    const double mae = stronger(mid);
    out.steps = step + 1;
    if (std::abs(mae - target) < std::abs(best_mae - target)) {
      best_kappa = mid;
      best_mae = mae;
    }
    if (std::abs(mae - target) <= tolerance) break;
    if (mae < target) hi = mid;
    else lo = mid;
  }
  out.matched = std::abs(best_mae - target) <= tolerance;
  if (a_stronger) {
    out.kappa_a = best_kappa;
    out.mae_a = best_mae;
  } else {
    out.kappa_b = best_kappa;
    out.mae_b = best_mae;
  }
  return out;
}

}  // namespace cbmf
