#include <doctest.h>

#include <random>

#include "cbmf/anova.hpp"
#include "cbmf/dataset.hpp"

using namespace cbmf;

namespace {

RatingsDataset complete(const Eigen::MatrixXd& R, double lo, double hi) {
  std::vector<Rating> rs;
  for (Index u = 0; u < R.rows(); ++u)
    for (Index i = 0; i < R.cols(); ++i) rs.push_back({u, i, R(u, i)});
  return RatingsDataset(static_cast<std::size_t>(R.rows()), static_cast<std::size_t>(R.cols()), rs, lo, hi);
}

}  // namespace

TEST_SUITE("anova") {

TEST_CASE("complete 2x2 layout") {
  Eigen::MatrixXd R(2, 2);
  R << 1, 2, 3, 4;
  auto ds = complete(R, 1, 5);
  auto m = fit_anova(ds);
  CHECK(m.mu == doctest::Approx(2.5));
  CHECK(m.alpha(0) == doctest::Approx(-1.0));
  CHECK(m.alpha(1) == doctest::Approx(1.0));
  CHECK(m.beta(0) == doctest::Approx(-0.5));
  CHECK(m.beta(1) == doctest::Approx(0.5));
  auto res = residualize(ds, m);
  for (const auto& r : res.ratings()) CHECK(std::abs(r.value) < 1e-12);
}

TEST_CASE("constant ratings and a single rating") {
  Eigen::MatrixXd R = Eigen::MatrixXd::Constant(3, 4, 3.0);
  auto m = fit_anova(complete(R, 1, 5));
  CHECK(m.mu == 3.0);
  CHECK(m.alpha.cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.beta.cwiseAbs().maxCoeff() == 0.0);

  RatingsDataset one(1, 1, {{0, 0, 5.0}}, 1, 5);
  auto s = fit_anova(one);
  CHECK(s.mu == 5.0);
  CHECK(s.alpha(0) == 0.0);
  CHECK(s.beta(0) == 0.0);
}

TEST_CASE("unrated users and items keep zero effects") {
  RatingsDataset ds(3, 3, {{0, 0, 4}, {0, 1, 2}, {1, 0, 5}}, 1, 5);
  auto m = fit_anova(ds);
  CHECK(m.alpha(2) == 0.0);
  CHECK(m.beta(2) == 0.0);
  CHECK(baseline_predict(m, 2, 1) == doctest::Approx(m.mu + m.beta(1)));
}

TEST_CASE("exact recovery of additive 50x40 matrix") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  Eigen::VectorXd a(50), b(40);
  for (auto& x : a) x = nd(rng);
  for (auto& x : b) x = nd(rng);
  Eigen::MatrixXd R(50, 40);
  for (int u = 0; u < 50; ++u)
    for (int i = 0; i < 40; ++i) R(u, i) = 3.0 + a(u) + b(i);
  auto ds = complete(R, -10, 20);
  auto m = fit_anova(ds);
  double worst = 0;
  for (const auto& r : residualize(ds, m).ratings()) worst = std::max(worst, std::abs(r.value));
  CHECK(worst < 1e-8);
}

TEST_CASE("backfitting SSE never increases on sparse data") {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution keep(0.3);
  std::uniform_int_distribution<int> star(1, 5);
  std::vector<Rating> rs;
  for (Index u = 0; u < 60; ++u)
    for (Index i = 0; i < 45; ++i)
      if (keep(rng)) rs.push_back({u, i, double(star(rng))});
  auto trace = anova_sse_trace(RatingsDataset(60, 45, rs, 1, 5));
  REQUIRE(trace.size() > 2);
  for (std::size_t s = 1; s < trace.size(); ++s) CHECK(trace[s] <= trace[s - 1] * (1 + 1e-14));
  CHECK(trace.back() < trace.front());
}

TEST_CASE("residualize arithmetic and range widening") {
  AnovaModel m{2.5, Vector::Constant(1, 1.0), Vector::Constant(1, 0.5)};
  RatingsDataset ds(1, 1, {{0, 0, 5.0}}, 1, 5);
  auto res = residualize(ds, m);
  CHECK(res[0].value == doctest::Approx(1.0));
  CHECK(res.rating_min() == doctest::Approx(1 - 4.0));
  CHECK(res.rating_max() == doctest::Approx(5 - 4.0));

  AnovaModel zero{0.0, Vector::Zero(1), Vector::Zero(1)};
  CHECK(residualize(ds, zero)[0].value == 5.0);
}

TEST_CASE("baseline predictions") {
  AnovaModel m{2.5, Vector::Constant(1, -1.0), Vector::Constant(1, 0.5)};
  CHECK(baseline_predict(m, 0, 0) == 2.0);
  AnovaModel z{0.0, Vector::Zero(2), Vector::Zero(2)};
  CHECK(baseline_predict(z, 1, 1) == 0.0);
  CHECK_THROWS_AS(baseline_predict(m, 1, 0), InputError);
}

}  // TEST_SUITE
