#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace latentstab {

struct ClusterAssignment {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;  // g x 2
  double inertia = 0.0;
};

// Lloyd iterations from k-means++ seeding, best of `restarts` by inertia.
// Empty clusters are repaired by reseeding at the farthest point.
ClusterAssignment kmeans(const Eigen::MatrixXd& points, int g,
                         std::uint64_t seed, int restarts = 10,
                         int max_iterations = 300, double tol = 1e-8);

struct AlignmentMap {
  std::vector<int> mapping;  // predicted label -> truth label
  double total_cost = 0.0;
};

// Jonker-Volgenant shortest augmenting path with dual variables; exact
// optimum, no initialization phase. Rectangular inputs are padded square
// with a large sentinel.
AlignmentMap solve_lsap(const Eigen::MatrixXd& cost);

// counts(p, t) = number of samples predicted p with truth t.
Eigen::MatrixXi contingency(const std::vector<int>& predicted,
                            const std::vector<int>& truth, int g);

// Relabel predictions to maximize agreement with the truth labels
// (LSAP on negative co-occurrence counts).
std::vector<int> align_labels(const std::vector<int>& predicted,
                              const std::vector<int>& truth, int g);

// Percentage of samples whose aligned prediction disagrees with truth.
double eta(const std::vector<int>& aligned_predicted,
           const std::vector<int>& truth);

}  // namespace latentstab
