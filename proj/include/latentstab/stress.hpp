#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace latentstab {

struct PairwiseMatrix {
  Eigen::MatrixXd values;  // K x K symmetric, zero diagonal
  std::string metric_name;
};

struct DendrogramOrder {
  std::vector<int> leaf_order;
  std::vector<double> merge_heights;
};

struct DistributionSummary {
  double p10 = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double mode = 0.0;
  int count = 0;
};

// Condensed Euclidean distances in lexicographic (p, q) order, p < q.
Eigen::VectorXd pairwise_distances(const Eigen::MatrixXd& points);

// sqrt( sum (d_i - d_j)^2 / sum d_i * d_j ) over all sample pairs.
double adjusted_stress(const Eigen::MatrixXd& zi, const Eigen::MatrixXd& zj);
double adjusted_stress_condensed(const Eigen::VectorXd& di,
                                 const Eigen::VectorXd& dj);

// All K(K-1)/2 adjusted stress pairs; condensed distances computed once per
// space and reused.
PairwiseMatrix stress_matrix(const std::vector<Eigen::MatrixXd>& latents);

// Agglomerative Ward merges via the Lance-Williams update applied to the
// given dissimilarities; leaf order from a smaller-cluster-first depth-first
// traversal of the dendrogram.
DendrogramOrder ward_order(const Eigen::MatrixXd& dissimilarity);

// Percentiles by linear interpolation; mode from a Gaussian KDE argmax
// (Scott bandwidth, 512-point grid).
DistributionSummary summarize(const std::vector<double>& values);

double percentile(std::vector<double> values, double p);
double kde_mode(const std::vector<double>& values);

// Off-diagonal upper-triangle entries of a symmetric matrix as a flat vector.
std::vector<double> upper_triangle(const Eigen::MatrixXd& m);

}  // namespace latentstab
