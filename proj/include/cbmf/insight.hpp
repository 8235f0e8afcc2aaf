#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cbmf/common.hpp"

namespace cbmf {

// b_d . b_d' / (|b_d| |b_d'|); InputError if either row has zero norm.
double attribute_cosine(const Matrix& B, Index d, Index d2);

struct SimilarityPair {
  Index first = 0;
  Index second = 0;
  std::string first_label;
  std::string second_label;
  double cosine = 0.0;
};

struct SimilarityReport {
  int k = 0;
  std::vector<SimilarityPair> pairs;  // ordered by cosine, strongest first for the requested direction
};

enum class SimilarityDirection { Similar, Dissimilar };

// The `count` most similar (largest cosine) or most dissimilar (smallest)
// unordered attribute pairs. Rows with zero norm are skipped.
SimilarityReport top_pairs(const Matrix& B, const std::vector<std::string>& labels, std::size_t count,
                           SimilarityDirection direction);

struct MapPoint {
  std::string label;
  double x = 0.0;
  double y = 0.0;
};

// Principal axes of all item factors (rows of Q, centered at their mean);
// the selected rows are centered the same way and projected on the two
// leading axes. Each axis is signed so its largest-magnitude loading is
// nonnegative.
std::vector<MapPoint> item_map(const Matrix& Q, const std::vector<std::string>& item_labels,
                               const std::vector<Index>& selection);

void write_similarity_csv(std::ostream& out, const SimilarityReport& report);
void write_item_map_csv(std::ostream& out, const std::vector<MapPoint>& points);

}  // namespace cbmf
