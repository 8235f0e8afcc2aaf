#include "cbmf/weights.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace cbmf {

namespace {

WeightMatrix from_dense(const Eigen::MatrixXd& raw, bool normalize) {
  const Eigen::Index M = raw.rows();
  WeightMatrix out;
  out.row_normalized = normalize;
  out.row_sums = Vector::Zero(M);
  std::vector<Eigen::Triplet<double>> entries;
  for (Eigen::Index i = 0; i < M; ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < M; ++j)
      if (j != i) sum += raw(i, j);
    for (Eigen::Index j = 0; j < M; ++j) {
      if (j == i || raw(i, j) == 0.0) continue;
      entries.emplace_back(static_cast<int>(i), static_cast<int>(j), normalize ? raw(i, j) / sum : raw(i, j));
    }
  }
  out.weights.resize(M, M);
  out.weights.setFromTriplets(entries.begin(), entries.end());
  out.weights.makeCompressed();
  for (Eigen::Index i = 0; i < M; ++i) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(out.weights, i); it; ++it) s += it.value();
    out.row_sums(i) = s;
  }
  return out;
}

}  // namespace

int shared_count(const AttributeMatrix& attrs, Index i, Index j) {
  if (i >= attrs.n_items() || j >= attrs.n_items()) throw InputError("item index out of range");
  return static_cast<int>(std::lround(attrs.incidence.row(i).dot(attrs.incidence.row(j))));
}

Eigen::MatrixXi shared_counts(const AttributeMatrix& attrs) {
  Eigen::MatrixXd prod = attrs.incidence * attrs.incidence.transpose();
  return prod.array().round().cast<int>();
}

NeighborSets neighbor_sets(const AttributeMatrix& attrs, int c) {
  if (c < 1) throw InputError("shared-attribute threshold c must be at least 1");
  const auto counts = shared_counts(attrs);
  const auto M = counts.rows();
  NeighborSets out;
  out.threshold = c;
  out.members.resize(static_cast<std::size_t>(M));
  std::size_t active = 0;
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = 0; j < M; ++j) {
      if (j == i || counts(i, j) < c) continue;
      out.members[static_cast<std::size_t>(i)].push_back(static_cast<Index>(j));
      if (j > i) ++active;
    }
  }
  const double pairs = static_cast<double>(M) * static_cast<double>(M - 1) / 2.0;
  out.activation_fraction = pairs > 0 ? static_cast<double>(active) / pairs : 0.0;
  return out;
}

WeightMatrix alignment_weights(const NeighborSets& sets) {
  const auto M = static_cast<Eigen::Index>(sets.n_items());
  std::vector<Eigen::Triplet<double>> entries;
  WeightMatrix out;
  out.row_normalized = true;
  out.row_sums = Vector::Zero(M);
  for (Eigen::Index i = 0; i < M; ++i) {
    const auto& s = sets.members[static_cast<std::size_t>(i)];
    if (s.empty()) continue;
    const double w = 1.0 / static_cast<double>(s.size());
    for (Index j : s) entries.emplace_back(static_cast<int>(i), static_cast<int>(j), w);
  }
  out.weights.resize(M, M);
  out.weights.setFromTriplets(entries.begin(), entries.end());
  out.weights.makeCompressed();
  for (Eigen::Index i = 0; i < M; ++i) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(out.weights, i); it; ++it) s += it.value();
    out.row_sums(i) = s;
  }
  return out;
}

double logistic_weight(int shared, int c, double theta) {
  const double z = theta * static_cast<double>(shared - c);
  // exp(z) / (1 + exp(z)) written to avoid overflow for large |z|.
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

WeightMatrix logistic_weights(const AttributeMatrix& attrs, int c, double theta, bool normalize) {
  if (!(theta > 0.0)) throw InputError("theta must be positive");
  const auto counts = shared_counts(attrs);
  Eigen::MatrixXd raw(counts.rows(), counts.cols());
  for (Eigen::Index i = 0; i < counts.rows(); ++i)
    for (Eigen::Index j = 0; j < counts.cols(); ++j)
      raw(i, j) = i == j ? 0.0 : logistic_weight(counts(i, j), c, theta);
  return from_dense(raw, normalize);
}

WeightMatrix cosine_weights(const AttributeMatrix& attrs, bool normalize) {
  const auto counts = shared_counts(attrs);
  const Eigen::Index M = counts.rows();
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(M, M);
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = 0; j < M; ++j) {
      if (i == j || counts(i, i) == 0 || counts(j, j) == 0) continue;
      // shared / sqrt(size_i * size_j) for binary rows
      raw(i, j) = counts(i, j) / std::sqrt(static_cast<double>(counts(i, i)) * counts(j, j));
    }
  }
  return from_dense(raw, normalize);
}

void write_weights(std::ostream& out, const WeightMatrix& w) {
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < w.weights.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(w.weights, i); it; ++it) out << it.row() << '\t' << it.col() << '\t' << it.value() << '\n';
}

}  // namespace cbmf
