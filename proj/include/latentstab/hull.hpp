#pragma once

#include <Eigen/Dense>
#include <vector>

namespace latentstab {

// Convex hull anchor set of a 2-D latent space. Indices refer to row numbers
// of the input matrix (original sample order). Collinear boundary points are
// excluded; a fully collinear input degrades to the two extreme endpoints
// with the degenerate flag set.
struct AnchorSet {
  std::vector<int> indices;   // sorted ascending
  Eigen::MatrixXd vertices;   // hull points in counter-clockwise order
  bool degenerate = false;

  int size() const { return static_cast<int>(indices.size()); }
};

AnchorSet quickhull(const Eigen::MatrixXd& points);

// 1 - |A ∩ B| / |A ∪ B| on sorted index sets.
double jaccard_dissim(const std::vector<int>& a, const std::vector<int>& b);

// K x K symmetric dissimilarity matrix over an ensemble's anchor sets.
Eigen::MatrixXd jaccard_matrix(const std::vector<AnchorSet>& anchor_sets);

// eps(k) = 100 * |symmetric difference| / |union| of consecutive anchor sets.
std::vector<double> epsilon_series(const std::vector<AnchorSet>& anchor_sets);

}  // namespace latentstab
