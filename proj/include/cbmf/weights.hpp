#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "cbmf/dataset.hpp"

namespace cbmf {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Symmetric content neighborhoods S_c(i) = { i' != i : a_i . a_i' >= c }.
struct NeighborSets {
  int threshold = 1;
  std::vector<std::vector<Index>> members;  // sorted ascending
  // Fraction of unordered item pairs with shared count >= c (x% / 100).
  double activation_fraction = 0.0;

  std::size_t n_items() const { return members.size(); }
};

/// Sparse M x M item-item weights with zero diagonal.
///
/// When row_normalized is set, every row with any positive weight sums to
/// one; rows without content overlap stay entirely zero so that the
/// content-boosted updates reduce to the baseline for isolated items.
struct WeightMatrix {
  SparseMatrix weights;
  bool row_normalized = false;
  Vector row_sums;  // w_i. of the stored weights

  std::size_t n_items() const { return static_cast<std::size_t>(weights.rows()); }
};

int shared_count(const AttributeMatrix& attrs, Index i, Index j);

// M x M matrix of shared attribute counts A A^T (diagonal included).
Eigen::MatrixXi shared_counts(const AttributeMatrix& attrs);

NeighborSets neighbor_sets(const AttributeMatrix& attrs, int c);

// 1 / |S_c(i)| on every i' in S_c(i): the alignment-penalty weights, whose
// product with Q is the neighbor centroid.
WeightMatrix alignment_weights(const NeighborSets& sets);

// Logistic weight of a shared count s: exp(theta (s - c)) / (1 + exp(theta (s - c))).
double logistic_weight(int shared, int c, double theta);

WeightMatrix logistic_weights(const AttributeMatrix& attrs, int c, double theta, bool normalize = true);

// a_i . a_i' / (|a_i| |a_i'|); zero when either row has no attributes.
WeightMatrix cosine_weights(const AttributeMatrix& attrs, bool normalize = true);

// "i \t i' \t weight" lines for every stored entry.
void write_weights(std::ostream& out, const WeightMatrix& w);

}  // namespace cbmf
