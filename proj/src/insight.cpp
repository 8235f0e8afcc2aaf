#include "cbmf/insight.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include <Eigen/Eigenvalues>

namespace cbmf {

double attribute_cosine(const Matrix& B, Index d, Index d2) {
  if (d >= B.rows() || d2 >= B.rows()) throw InputError("attribute index out of range");
  const double na = B.row(d).norm();
  const double nb = B.row(d2).norm();
  if (na == 0.0 || nb == 0.0) throw InputError("similarity undefined for an attribute with a zero latent vector");
  return std::clamp(B.row(d).dot(B.row(d2)) / (na * nb), -1.0, 1.0);
}

SimilarityReport top_pairs(const Matrix& B, const std::vector<std::string>& labels, std::size_t count,
                           SimilarityDirection direction) {
  if (count < 1) throw InputError("count must be at least 1");
  if (B.rows() < 2) throw InputError("need at least two attributes");
  if (labels.size() != static_cast<std::size_t>(B.rows())) throw InputError("label count does not match B rows");

  SimilarityReport report;
  report.k = static_cast<int>(B.cols());
  for (Index a = 0; a < B.rows(); ++a) {
    if (B.row(a).norm() == 0.0) continue;
    for (Index b = a + 1; b < B.rows(); ++b) {
      if (B.row(b).norm() == 0.0) continue;
      report.pairs.push_back({a, b, labels[a], labels[b], attribute_cosine(B, a, b)});
    }
  }
  const bool similar = direction == SimilarityDirection::Similar;
  std::stable_sort(report.pairs.begin(), report.pairs.end(), [similar](const SimilarityPair& x, const SimilarityPair& y) {
    return similar ? x.cosine > y.cosine : x.cosine < y.cosine;
  });
  if (report.pairs.size() > count) report.pairs.resize(count);
  return report;
}

std::vector<MapPoint> item_map(const Matrix& Q, const std::vector<std::string>& item_labels,
                               const std::vector<Index>& selection) {
  if (Q.cols() < 2) throw InputError("item map needs K >= 2");
  if (selection.empty()) throw InputError("item selection is empty");
  if (item_labels.size() != static_cast<std::size_t>(Q.rows())) throw InputError("label count does not match Q rows");

  const Eigen::RowVectorXd mean = Q.colwise().mean();
  const Eigen::MatrixXd centered = Q.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / std::max<double>(1.0, static_cast<double>(Q.rows() - 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  // Eigenvalues come back ascending.
  Eigen::MatrixXd axes(Q.cols(), 2);
  axes.col(0) = eig.eigenvectors().col(Q.cols() - 1);
  axes.col(1) = eig.eigenvectors().col(Q.cols() - 2);
  for (int c = 0; c < 2; ++c) {
    Eigen::Index arg = 0;
    axes.col(c).cwiseAbs().maxCoeff(&arg);
    if (axes(arg, c) < 0.0) axes.col(c) *= -1.0;
  }

  std::vector<MapPoint> out;
  out.reserve(selection.size());
  for (Index i : selection) {
    if (i >= Q.rows()) throw InputError("selected item out of range");
    Eigen::RowVectorXd xy = (Q.row(i) - mean) * axes;
    out.push_back({item_labels[i], xy(0), xy(1)});
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

}  // namespace

void write_similarity_csv(std::ostream& out, const SimilarityReport& report) {
  out << "label1,label2,cosine\n" << std::setprecision(17);
  for (const auto& p : report.pairs) out << csv_field(p.first_label) << ',' << csv_field(p.second_label) << ',' << p.cosine << '\n';
}

void write_item_map_csv(std::ostream& out, const std::vector<MapPoint>& points) {
  out << "label,pc1,pc2\n" << std::setprecision(17);
  for (const auto& p : points) out << csv_field(p.label) << ',' << p.x << ',' << p.y << '\n';
}

}  // namespace cbmf
