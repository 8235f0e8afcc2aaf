#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "cbmf/dataset.hpp"
#include "cbmf/weights.hpp"
#include "../support/reference.hpp"

using namespace cbmf;

namespace {

AttributeMatrix rows(std::initializer_list<std::initializer_list<double>> rs) {
  AttributeMatrix a;
  const auto M = static_cast<Eigen::Index>(rs.size());
  const auto D = static_cast<Eigen::Index>(rs.begin()->size());
  a.incidence.resize(M, D);
  Eigen::Index i = 0;
  for (const auto& r : rs) {
    Eigen::Index d = 0;
    for (double v : r) a.incidence(i, d++) = v;
    ++i;
  }
  for (Eigen::Index d = 0; d < D; ++d) a.labels.push_back("d" + std::to_string(d));
  return a;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_SUITE("weights") {

TEST_CASE("shared counts") {
  auto a = rows({{1, 1, 0}, {1, 0, 1}, {0, 0, 0}});
  CHECK(shared_count(a, 0, 1) == 1);
  CHECK(shared_count(a, 0, 2) == 0);
  auto four = rows({{1, 1, 1, 1, 0}, {1, 1, 1, 1, 0}});
  CHECK(shared_count(four, 0, 1) == 4);
  auto all = shared_counts(a);
  CHECK(all(0, 1) == 1);
  CHECK(all(0, 0) == 2);
  CHECK_THROWS_AS(shared_count(a, 0, 3), InputError);
}

TEST_CASE("neighbor sets") {
  auto same = rows({{1, 0}, {1, 0}, {1, 0}, {1, 1}});
  auto s = neighbor_sets(same, 1);
  for (const auto& m : s.members) CHECK(m.size() == 3);
  CHECK(s.activation_fraction == 1.0);

  auto a = rows({{1, 1, 0}, {1, 0, 1}, {0, 0, 1}});
  auto s2 = neighbor_sets(a, 2);
  for (const auto& m : s2.members) CHECK(m.empty());
  auto s1 = neighbor_sets(a, 1);
  CHECK(s1.members[0] == std::vector<Index>{1});
  CHECK(s1.members[1] == std::vector<Index>{0, 2});
  CHECK(s1.activation_fraction == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(neighbor_sets(a, 0), InputError);

  auto w = alignment_weights(s1);
  CHECK(w.weights.coeff(1, 0) == 0.5);
  CHECK(w.weights.coeff(1, 2) == 0.5);
  CHECK(w.weights.coeff(0, 1) == 1.0);
}

TEST_CASE("ML-100K pair activation at c = 1 and c = 2") {
  const std::filesystem::path dir = CBMF_ML100K_DIR;
  if (!std::filesystem::exists(dir / "u.data")) {
    MESSAGE("ML-100K not present; skipped");
    return;
  }
  auto ml = parse_movielens(dir);
  // exact values on this data: 34.65% and 2.249%; the targets carry one decimal
  const double x1 = 100.0 * neighbor_sets(ml.attributes, 1).activation_fraction;
  const double x2 = 100.0 * neighbor_sets(ml.attributes, 2).activation_fraction;
  CHECK(x1 == doctest::Approx(34.6455).epsilon(1e-5));
  CHECK(x2 == doctest::Approx(2.24860).epsilon(1e-5));
  CHECK(std::round(x1) == 35.0);
  CHECK(std::round(x2 * 10.0) / 10.0 <= 2.2);
}

TEST_CASE("logistic weights") {
  CHECK(logistic_weight(3, 3, 1.0) == 0.5);
  CHECK(logistic_weight(1, 1, 1000.0) == 0.5);
  CHECK(logistic_weight(2, 1, 1e6) == doctest::Approx(1.0));
  CHECK(logistic_weight(0, 1, 1e6) == 0.0);
  CHECK(std::isfinite(logistic_weight(0, 1, 1e308)));

  // item 0 shares 2 with item 1 and 0 with item 2
  auto a = rows({{1, 1, 0}, {1, 1, 0}, {0, 0, 1}});
  auto w = logistic_weights(a, 1, 1.0);
  const double hi = sigmoid(1.0), lo = sigmoid(-1.0);
  CHECK(w.weights.coeff(0, 1) == doctest::Approx(hi / (hi + lo)));
  CHECK(w.weights.coeff(0, 2) == doctest::Approx(lo / (hi + lo)));
  CHECK(w.weights.coeff(0, 1) == doctest::Approx(0.7311).epsilon(1e-4));
  CHECK(w.weights.coeff(0, 0) == 0.0);
  CHECK(w.row_sums(0) == doctest::Approx(1.0));

  auto raw = logistic_weights(a, 1, 1.0, false);
  CHECK(raw.weights.coeff(0, 1) == doctest::Approx(hi));
  CHECK_THROWS_AS(logistic_weights(a, 1, 0.0), InputError);
}

TEST_CASE("cosine weights") {
  auto a = rows({{1, 1, 0}, {1, 0, 1}, {1, 1, 0}, {0, 0, 0}});
  auto raw = cosine_weights(a, false);
  CHECK(raw.weights.coeff(0, 1) == doctest::Approx(0.5));
  CHECK(raw.weights.coeff(0, 2) == doctest::Approx(1.0));
  CHECK(raw.weights.coeff(0, 3) == 0.0);
  auto w = cosine_weights(a);
  CHECK(w.row_sums(3) == 0.0);
  CHECK(w.weights.row(3).nonZeros() == 0);
  CHECK(w.row_sums(0) == doctest::Approx(1.0));
  CHECK(w.weights.coeff(0, 2) == doctest::Approx(1.0 / 1.5));
}

TEST_CASE("library weights agree with the naive definitions") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    auto a = cbmf::testing::random_attributes(rng, 7, 5, 0.4);
    Matrix ab = Matrix(alignment_weights(neighbor_sets(a, 1)).weights);
    Matrix gab = Matrix(logistic_weights(a, 1, 1.0).weights);
    Matrix tg = Matrix(cosine_weights(a).weights);
    CHECK((ab - cbmf::testing::naive_weights(Variant::AB, a, 1, 1.0)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((gab - cbmf::testing::naive_weights(Variant::gAB, a, 1, 1.0)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((tg - cbmf::testing::naive_weights(Variant::TG, a, 1, 1.0)).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("weights dump") {
  auto a = rows({{1, 0}, {1, 0}});
  std::ostringstream out;
  write_weights(out, alignment_weights(neighbor_sets(a, 1)));
  CHECK(out.str().find('\t') != std::string::npos);
}

}  // TEST_SUITE
