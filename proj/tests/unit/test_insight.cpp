#include <doctest.h>

#include <random>
#include <sstream>

#include "cbmf/insight.hpp"
#include "../support/reference.hpp"

using namespace cbmf;
using cbmf::testing::gaussian;

namespace {

std::vector<std::string> names(std::size_t n, const char* prefix) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

std::vector<Index> all(std::size_t n) {
  std::vector<Index> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = static_cast<Index>(k);
  return out;
}

}  // namespace

TEST_SUITE("insight") {

TEST_CASE("attribute cosine") {
  Matrix B(4, 2);
  B << 1, 2, 1, 2, -1, -2, 2, -1;
  CHECK(attribute_cosine(B, 0, 1) == doctest::Approx(1.0));
  CHECK(attribute_cosine(B, 0, 2) == doctest::Approx(-1.0));
  CHECK(attribute_cosine(B, 0, 3) == doctest::Approx(0.0));
  Matrix Z = Matrix::Zero(2, 2);
  Z(0, 0) = 1;
  CHECK_THROWS_AS(attribute_cosine(Z, 0, 1), InputError);
}

TEST_CASE("top pairs") {
  std::mt19937_64 rng(6);
  Matrix two = gaussian(rng, 2, 3, 1.0);
  CHECK(top_pairs(two, names(2, "a"), 10, SimilarityDirection::Similar).pairs.size() == 1);

  Matrix B = gaussian(rng, 8, 4, 1.0);
  B.row(5) = 2.5 * B.row(2);
  auto sim = top_pairs(B, names(8, "a"), 3, SimilarityDirection::Similar);
  CHECK(sim.k == 4);
  REQUIRE(sim.pairs.size() == 3);
  CHECK(sim.pairs[0].first == 2);
  CHECK(sim.pairs[0].second == 5);
  CHECK(sim.pairs[0].cosine == doctest::Approx(1.0));
  CHECK(sim.pairs[0].first_label == "a2");
  CHECK(sim.pairs[1].cosine <= sim.pairs[0].cosine);

  B.row(6) = -B.row(1);
  auto dis = top_pairs(B, names(8, "a"), 2, SimilarityDirection::Dissimilar);
  CHECK(dis.pairs[0].first == 1);
  CHECK(dis.pairs[0].second == 6);
  CHECK(dis.pairs[0].cosine == doctest::Approx(-1.0));

  CHECK_THROWS_AS(top_pairs(gaussian(rng, 1, 2, 1.0), names(1, "a"), 1, SimilarityDirection::Similar), InputError);

  std::ostringstream out;
  write_similarity_csv(out, dis);
  CHECK(out.str().rfind("label1,label2,cosine\na1,a6,", 0) == 0);
}

TEST_CASE("item map on an already principal 2-D layout") {
  Matrix Q(4, 2);
  Q << 3, 0, -3, 0, 0, 1, 0, -1;
  auto pts = item_map(Q, names(4, "i"), all(4));
  REQUIRE(pts.size() == 4);
  for (Index k = 0; k < 4; ++k) {
    CHECK(std::abs(pts[k].x) == doctest::Approx(std::abs(Q(k, 0))));
    CHECK(std::abs(pts[k].y) == doctest::Approx(std::abs(Q(k, 1))));
  }
}

TEST_CASE("item map properties") {
  std::mt19937_64 rng(8);
  Matrix Q = gaussian(rng, 30, 4, 1.0);
  Q.row(7) = Q.row(3);
  auto pts = item_map(Q, names(30, "i"), all(30));
  CHECK(pts[7].x == pts[3].x);
  CHECK(pts[7].y == pts[3].y);
  double sxy = 0, mx = 0, my = 0;
  for (const auto& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= 30;
  my /= 30;
  for (const auto& p : pts) sxy += (p.x - mx) * (p.y - my);
  CHECK(std::abs(sxy / 29) < 1e-8);

  auto again = item_map(Q, names(30, "i"), all(30));
  CHECK(again[0].x == pts[0].x);

  auto some = item_map(Q, names(30, "i"), {4, 9});
  REQUIRE(some.size() == 2);
  CHECK(some[1].label == "i9");
  CHECK(some[1].x == doctest::Approx(pts[9].x));

  CHECK_THROWS_AS(item_map(Q, names(30, "i"), {}), InputError);
  CHECK_THROWS_AS(item_map(gaussian(rng, 5, 1, 1.0), names(5, "i"), all(5)), InputError);

  std::ostringstream out;
  write_item_map_csv(out, some);
  CHECK(out.str().rfind("label,pc1,pc2\ni4,", 0) == 0);
}

TEST_CASE("labels with commas are quoted") {
  std::vector<MapPoint> pts{{"Heat, The (1995)", 1.0, 2.0}};
  std::ostringstream out;
  write_item_map_csv(out, pts);
  CHECK(out.str().find("\"Heat, The (1995)\"") != std::string::npos);
}

}  // TEST_SUITE
