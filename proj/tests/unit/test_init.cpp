#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "cbmf/init.hpp"
#include "../support/reference.hpp"

using namespace cbmf;
using namespace cbmf::testing;

namespace {

RatingsDataset complete(const Eigen::MatrixXd& R) {
  std::vector<Rating> rs;
  for (Index u = 0; u < R.rows(); ++u)
    for (Index i = 0; i < R.cols(); ++i) rs.push_back({u, i, R(u, i)});
  return RatingsDataset(static_cast<std::size_t>(R.rows()), static_cast<std::size_t>(R.cols()), rs, -100, 100);
}

// Squared singular values from the eigenvalues of R^T R, largest first.
Eigen::VectorXd oracle_sigma2(const Eigen::MatrixXd& R) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R.transpose() * R);
  Eigen::VectorXd ev = es.eigenvalues().reverse();
  return ev.cwiseMax(0.0);
}

}  // namespace

TEST_SUITE("init") {

TEST_CASE("rank-one matrix is reproduced") {
  Eigen::VectorXd p(4), q(3);
  p << 1, -2, 0.5, 3;
  q << 2, 1, -1;
  Eigen::MatrixXd R = p * q.transpose();
  auto f = svd_init(complete(R), 1);
  CHECK((f.P * f.Q.transpose() - R).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("full rank reconstructs exactly") {
  std::mt19937_64 rng(2);
  Eigen::MatrixXd R = gaussian(rng, 6, 4, 1.0);
  auto f = svd_init(complete(R), 4);
  CHECK((f.P * f.Q.transpose() - R).cwiseAbs().maxCoeff() < 1e-10);
  for (Eigen::Index k = 1; k < 4; ++k) CHECK(f.singular_values(k) <= f.singular_values(k - 1));
}

TEST_CASE("Eckart-Young against an eigen-decomposition oracle") {
  std::mt19937_64 rng(17);
  struct Shape { int n, m, k; };
  for (Shape s : {Shape{4, 3, 2}, Shape{12, 9, 3}, Shape{50, 40, 5}, Shape{40, 50, 10}}) {
    Eigen::MatrixXd R = gaussian(rng, s.n, s.m, 1.0);
    auto f = svd_init(complete(R), s.k);
    Eigen::VectorXd s2 = oracle_sigma2(R);
    const double tail = s2.tail(s2.size() - s.k).sum();
    CHECK(std::abs((R - f.P * f.Q.transpose()).squaredNorm() - tail) < 1e-8);
    for (int k = 0; k < s.k; ++k) CHECK(f.singular_values(k) * f.singular_values(k) == doctest::Approx(s2(k)).epsilon(1e-10));
  }
}

TEST_CASE("missing cells count as zero") {
  RatingsDataset ds(2, 2, {{0, 0, 3.0}, {1, 1, -1.0}}, -5, 5);
  Eigen::MatrixXd R = dense_ratings(ds);
  CHECK(R(0, 1) == 0.0);
  CHECK(R(1, 1) == -1.0);
  auto f = svd_init(ds, 1);
  CHECK(f.singular_values(0) == doctest::Approx(3.0));
  CHECK_THROWS_AS(svd_init(ds, 3), InputError);
}

TEST_CASE("sign convention is deterministic") {
  std::mt19937_64 rng(5);
  Eigen::MatrixXd R = gaussian(rng, 8, 5, 1.0);
  auto a = svd_init(complete(R), 3);
  auto b = svd_init(complete(R), 3);
  CHECK(a.P == b.P);
  for (Eigen::Index k = 0; k < 3; ++k) {
    Eigen::Index at;
    a.P.col(k).cwiseAbs().maxCoeff(&at);
    CHECK(a.P(at, k) >= 0.0);
  }
}

TEST_CASE("map_B: identity and projector idempotence") {
  std::mt19937_64 rng(3);
  AttributeMatrix eye;
  eye.incidence = Matrix::Identity(5, 5);
  for (int d = 0; d < 5; ++d) eye.labels.push_back(std::to_string(d));
  Matrix Q0 = gaussian(rng, 5, 2, 1.0);
  auto id = map_B(eye, Q0, 0.0);
  CHECK_FALSE(id.ridge);
  CHECK((id.B - Q0).cwiseAbs().maxCoeff() < 1e-12);

  for (int rep = 0; rep < 5; ++rep) {
    auto a = random_attributes(rng, 30, 6, 0.4);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a.incidence);
    if (lu.rank() < 6) continue;
    Matrix Q = gaussian(rng, 30, 3, 1.0);
    Matrix H1 = a.incidence * map_B(a, Q, 0.0).B;
    Matrix H2 = a.incidence * map_B(a, H1, 0.0).B;
    CHECK((H2 - H1).cwiseAbs().maxCoeff() < 1e-10);
    // residual is orthogonal to the column space
    CHECK((a.incidence.transpose() * (Q - H1)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("map_B: ridge path for wide or singular attributes") {
  std::mt19937_64 rng(4);
  auto wide = random_attributes(rng, 4, 9, 0.5);
  Matrix Q = gaussian(rng, 4, 2, 1.0);
  auto m = map_B(wide, Q);
  CHECK(m.ridge);
  CHECK(m.B.allFinite());
  std::vector<double> diag;
  Matrix AtA = wide.incidence.transpose() * wide.incidence;
  for (Eigen::Index d = 0; d < AtA.rows(); ++d) diag.push_back(AtA(d, d));
  std::sort(diag.begin(), diag.end());
  CHECK(m.delta == doctest::Approx(diag[4]));

  auto explicit_delta = map_B(wide, Q, 2.5);
  CHECK(explicit_delta.delta == 2.5);
  Matrix expect = (AtA + 2.5 * Matrix::Identity(9, 9)).ldlt().solve(wide.incidence.transpose() * Q);
  CHECK((explicit_delta.B - expect).cwiseAbs().maxCoeff() < 1e-12);

  AttributeMatrix dup;
  dup.incidence = Matrix::Zero(3, 2);
  dup.incidence.col(0).setOnes();
  dup.incidence.col(1).setOnes();
  dup.labels = {"x", "y"};
  CHECK(map_B(dup, gaussian(rng, 3, 2, 1.0)).ridge);
  CHECK_THROWS_AS(map_B(dup, gaussian(rng, 3, 2, 1.0), 0.0), NumericError);
}

TEST_CASE("random and mixed initialization") {
  Matrix a = random_init(5, 3, 0.01, 42);
  CHECK(a == random_init(5, 3, 0.01, 42));
  CHECK(a != random_init(5, 3, 0.01, 43));

  Matrix big = random_init(1000, 1000, 0.01, 7);
  const double mean = big.mean();
  const double sd = std::sqrt((big.array() - mean).square().sum() / (big.size() - 1));
  CHECK(std::abs(sd - 0.01) < 0.0002);

  std::mt19937_64 rng(1);
  Matrix svd = gaussian(rng, 5, 3, 1.0);
  CHECK(mixed_init(svd, 0.01, 1.0, 9) == svd);
  CHECK(mixed_init(svd, 0.01, 0.0, 9) == random_init(5, 3, 0.01, 9));
  Matrix half = mixed_init(svd, 0.01, 0.5, 9);
  CHECK((half - 0.5 * (svd + random_init(5, 3, 0.01, 9))).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(mixed_init(svd, 0.01, 1.5, 9), InputError);
  CHECK_THROWS_AS(random_init(2, 2, 0.0, 1), InputError);
}

TEST_CASE("kappa calibration") {
  // MAE rises linearly as the SVD share falls.
  auto group = [](double at_one) { return [at_one](double k) { return at_one + (1.0 - k) * 0.2; }; };

  auto same = calibrate_kappa(group(0.75), group(0.75));
  CHECK(same.kappa_a == 1.0);
  CHECK(same.kappa_b == 1.0);

  auto c = calibrate_kappa(group(0.74), group(0.78));
  CHECK(c.kappa_b == 1.0);
  CHECK(c.kappa_a < 1.0);
  CHECK(std::abs(c.mae_a - c.mae_b) <= 0.002);
  CHECK(c.matched);

  auto flipped = calibrate_kappa(group(0.80), group(0.76));
  CHECK(flipped.kappa_a == 1.0);
  CHECK(flipped.kappa_b < 1.0);

  auto loose = calibrate_kappa(group(0.74), group(0.78), std::numeric_limits<double>::infinity());
  CHECK(loose.kappa_a == 1.0);
  CHECK(loose.kappa_b == 1.0);

  // the stronger group cannot get weak enough
  auto flat = [](double) { return 0.70; };
  auto no = calibrate_kappa(flat, group(0.80));
  CHECK_FALSE(no.matched);
}

TEST_CASE("init strategy names") {
  CHECK(parse_init_strategy("svd") == InitStrategy::Svd);
  CHECK(parse_init_strategy("Mixed") == InitStrategy::Mixed);
  CHECK_THROWS_AS(parse_init_strategy("zeros"), InputError);
}

}  // TEST_SUITE
