#pragma once

#include <Eigen/Dense>
#include <vector>

namespace latentstab {

// Ellipse {x : (x - center)^T shape (x - center) <= 1}.
struct Ellipse {
  Eigen::Vector2d center;
  Eigen::Matrix2d shape;
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double theta = 0.0;  // major-axis orientation, (-pi/2, pi/2]
};

struct EigenBasis {
  Eigen::Matrix2d eigenvectors;  // columns, sorted by descending eigenvalue
  Eigen::Vector2d eigenvalues;
  Eigen::Vector2d principal;
};

struct GlobalAnisotropy {
  double beta = 1.0;
  EigenBasis basis;
  double theta = 0.0;
};

struct DensityField {
  Eigen::MatrixXd grid;  // grid(ix, iy), cell-center densities
  double bandwidth_x = 0.0;
  double bandwidth_y = 0.0;
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
  double cell_area = 0.0;

  int size() const { return static_cast<int>(grid.rows()); }
  double total_mass() const { return grid.sum() * cell_area; }
};

struct LocalRegion {
  double beta = 1.0;
  int sample_count = 0;
};

struct AnisotropyEstimate {
  double beta_mvee = 1.0;
  double beta_global = 1.0;
  double beta_harmonic = 1.0;
  std::vector<LocalRegion> beta_locals;
  int n_local = 0;
};

// Khachiyan weight-update iteration for the minimum-volume enclosing
// ellipse; convergence when the u-update step norm falls below tol.
Ellipse mvee_khachiyan(const Eigen::MatrixXd& points, double tol = 1e-4,
                       int max_iterations = 10000);

// Major over minor semi-axis; >= 1 by the sorted-axis convention.
double beta_from_ellipse(const Ellipse& ellipse);

// Eigen-ellipse of the sample covariance: beta = sqrt(l_max / l_min),
// theta = atan2 of the principal eigenvector.
GlobalAnisotropy global_anisotropy(const Eigen::MatrixXd& points);

// Product-Gaussian KDE on a square grid over the 10%-padded bounding box,
// Scott bandwidth per axis.
DensityField kde2d(const Eigen::MatrixXd& points, int grid_size = 256);

// Largest level t whose super-level cells hold at least `mass` probability.
double mass_contour_threshold(const DensityField& field, double mass = 0.95);

// Per-region eigen-ellipse anisotropy inside the 95%-mass contour; regions
// are 4-connected super-threshold components, membership by cell containment.
std::vector<LocalRegion> local_anisotropy(const Eigen::MatrixXd& points,
                                          int grid_size = 256,
                                          double mass = 0.95);

double harmonic_mean(const std::vector<double>& betas);

// delta(k) = 100 * |beta_k - beta_{k-1}| / |beta_{k-1}|.
std::vector<double> delta_series(const std::vector<double>& betas);

AnisotropyEstimate compute_anisotropy(const Eigen::MatrixXd& points,
                                      double mvee_tol = 1e-4,
                                      int grid_size = 256);

}  // namespace latentstab
