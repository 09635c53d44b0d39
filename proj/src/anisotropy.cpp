#include "latentstab/anisotropy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "latentstab/errors.hpp"

namespace latentstab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Wrap an angle into (-pi/2, pi/2] (ellipse axes are unsigned).
double wrap_axis_angle(double theta) {
  while (theta <= -kPi / 2) theta += kPi;
  while (theta > kPi / 2) theta -= kPi;
  return theta;
}

void check_not_collinear(const Eigen::MatrixXd& points) {
  const Eigen::RowVector2d mean = points.colwise().mean();
  const Eigen::MatrixXd centered = points.rowwise() - mean;
  const Eigen::Matrix2d cov =
      centered.transpose() * centered / static_cast<double>(points.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(cov);
  const double lmax = solver.eigenvalues()[1];
  if (lmax <= 0.0 || solver.eigenvalues()[0] / lmax < 1e-14) {
    throw Degenerate("mvee: points are (numerically) collinear");
  }
}

}  // namespace

Ellipse mvee_khachiyan(const Eigen::MatrixXd& points, double tol,
                       int max_iterations) {
  const int n = static_cast<int>(points.rows());
  if (n < 3) throw TooFewPoints("mvee: need N >= 3");
  if (points.cols() != 2) throw InputError("mvee: points must be N x 2");
  if (tol <= 0.0) throw InputError("mvee: tol must be positive");
  check_not_collinear(points);

  constexpr int d = 2;
  // Augmented point matrix Q: each column is (x, y, 1).
  Eigen::MatrixXd q(d + 1, n);
  q.topRows(d) = points.transpose();
  q.row(d).setOnes();

  Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / n);
  bool converged = false;
  for (int iter = 0; iter < max_iterations; ++iter) {
    const Eigen::Matrix3d sigma = q * u.asDiagonal() * q.transpose();
    const Eigen::Matrix3d sigma_inv = sigma.inverse();
    // M_i = q_i^T Sigma^{-1} q_i.
    Eigen::VectorXd m(n);
    for (int i = 0; i < n; ++i) m[i] = q.col(i).dot(sigma_inv * q.col(i));
    int j;
    const double max_m = m.maxCoeff(&j);
    const double step = (max_m - d - 1.0) / ((d + 1.0) * (max_m - 1.0));
    Eigen::VectorXd updated = (1.0 - step) * u;
    updated[j] += step;
    const double change = (updated - u).norm();
    u = std::move(updated);
    if (change < tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NoConvergence("mvee: no convergence within max iterations");
  }

  const Eigen::MatrixXd p = points.transpose();  // 2 x n
  const Eigen::Vector2d center = p * u;
  const Eigen::Matrix2d scatter =
      p * u.asDiagonal() * p.transpose() - center * center.transpose();
  Ellipse e;
  e.center = center;
  e.shape = scatter.inverse() / d;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(e.shape);
  // Semi-axes are 1/sqrt(eigenvalues of B); the smaller eigenvalue of B
  // carries the major axis.
  const double l_small = solver.eigenvalues()[0];
  const double l_large = solver.eigenvalues()[1];
  if (l_small <= 0.0) throw Degenerate("mvee: shape matrix not SPD");
  e.semi_major = 1.0 / std::sqrt(l_small);
  e.semi_minor = 1.0 / std::sqrt(l_large);
  const Eigen::Vector2d major_dir = solver.eigenvectors().col(0);
  e.theta = wrap_axis_angle(std::atan2(major_dir[1], major_dir[0]));
  return e;
}

double beta_from_ellipse(const Ellipse& ellipse) {
  return ellipse.semi_major / ellipse.semi_minor;
}

GlobalAnisotropy global_anisotropy(const Eigen::MatrixXd& points) {
  if (points.rows() < 3) throw TooFewPoints("global_anisotropy: need N >= 3");
  const Eigen::RowVector2d mean = points.colwise().mean();
  const Eigen::MatrixXd centered = points.rowwise() - mean;
  const Eigen::Matrix2d cov =
      centered.transpose() * centered / static_cast<double>(points.rows());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(cov);
  const double l_min = solver.eigenvalues()[0];
  const double l_max = solver.eigenvalues()[1];
  if (l_min <= 0.0) {
    throw SingularCovariance("global_anisotropy: singular covariance");
  }

  GlobalAnisotropy out;
  out.beta = std::sqrt(l_max / l_min);
  out.basis.eigenvalues = Eigen::Vector2d(l_max, l_min);
  out.basis.eigenvectors.col(0) = solver.eigenvectors().col(1);
  out.basis.eigenvectors.col(1) = solver.eigenvectors().col(0);
  out.basis.principal = out.basis.eigenvectors.col(0);
  out.theta =
      wrap_axis_angle(std::atan2(out.basis.principal[1], out.basis.principal[0]));
  return out;
}

DensityField kde2d(const Eigen::MatrixXd& points, int grid_size) {
  const int n = static_cast<int>(points.rows());
  if (n < 3) throw TooFewPoints("kde2d: need N >= 3");
  if (grid_size < 2) throw InputError("kde2d: grid_size must be >= 2");

  const double x_lo = points.col(0).minCoeff();
  const double x_hi = points.col(0).maxCoeff();
  const double y_lo = points.col(1).minCoeff();
  const double y_hi = points.col(1).maxCoeff();
  if (x_hi <= x_lo || y_hi <= y_lo) {
    throw DegenerateAxis("kde2d: zero variance along an axis");
  }

  const Eigen::RowVector2d mean = points.colwise().mean();
  const Eigen::MatrixXd centered = points.rowwise() - mean;
  const double sx = std::sqrt(centered.col(0).squaredNorm() / n);
  const double sy = std::sqrt(centered.col(1).squaredNorm() / n);
  const double scott = std::pow(static_cast<double>(n), -1.0 / 6.0);

  DensityField field;
  field.bandwidth_x = std::max(sx * scott, 1e-12);
  field.bandwidth_y = std::max(sy * scott, 1e-12);
  const double pad_x = 0.1 * (x_hi - x_lo);
  const double pad_y = 0.1 * (y_hi - y_lo);
  field.x_min = x_lo - pad_x;
  field.x_max = x_hi + pad_x;
  field.y_min = y_lo - pad_y;
  field.y_max = y_hi + pad_y;

  const double dx = (field.x_max - field.x_min) / grid_size;
  const double dy = (field.y_max - field.y_min) / grid_size;
  field.cell_area = dx * dy;

  // Separable kernel: accumulate the outer product of per-axis responses.
  Eigen::VectorXd gx(grid_size), gy(grid_size);
  field.grid = Eigen::MatrixXd::Zero(grid_size, grid_size);
  const double norm =
      1.0 / (2.0 * kPi * field.bandwidth_x * field.bandwidth_y * n);
  for (int i = 0; i < n; ++i) {
    for (int g = 0; g < grid_size; ++g) {
      const double cx = field.x_min + (g + 0.5) * dx;
      const double tx = (cx - points(i, 0)) / field.bandwidth_x;
      gx[g] = std::exp(-0.5 * tx * tx);
      const double cy = field.y_min + (g + 0.5) * dy;
      const double ty = (cy - points(i, 1)) / field.bandwidth_y;
      gy[g] = std::exp(-0.5 * ty * ty);
    }
    field.grid.noalias() += gx * gy.transpose();
  }
  field.grid *= norm;
  return field;
}

double mass_contour_threshold(const DensityField& field, double mass) {
  std::vector<double> cells(field.grid.data(),
                            field.grid.data() + field.grid.size());
  std::sort(cells.begin(), cells.end(), std::greater<double>());
  // The padded grid truncates the density tails, so the target is a fraction
  // of the mass actually on the grid rather than of the full integral.
  const double target = mass * field.total_mass();
  double cumulative = 0.0;
  for (double density : cells) {
    cumulative += density * field.cell_area;
    if (cumulative >= target) return density;
  }
  return 0.0;  // numerically unreachable target: keep every cell
}

std::vector<LocalRegion> local_anisotropy(const Eigen::MatrixXd& points,
                                          int grid_size, double mass) {
  const DensityField field = kde2d(points, grid_size);
  const double threshold = mass_contour_threshold(field, mass);

  // 4-connected components of super-threshold cells.
  const int g = field.size();
  Eigen::MatrixXi region = Eigen::MatrixXi::Constant(g, g, -1);
  int region_count = 0;
  for (int ix = 0; ix < g; ++ix) {
    for (int iy = 0; iy < g; ++iy) {
      if (field.grid(ix, iy) < threshold || region(ix, iy) >= 0) continue;
      std::deque<std::pair<int, int>> queue{{ix, iy}};
      region(ix, iy) = region_count;
      while (!queue.empty()) {
        const auto [cx, cy] = queue.front();
        queue.pop_front();
        const int nbr[4][2] = {
            {cx - 1, cy}, {cx + 1, cy}, {cx, cy - 1}, {cx, cy + 1}};
        for (const auto& nb : nbr) {
          const int nx = nb[0], ny = nb[1];
          if (nx < 0 || ny < 0 || nx >= g || ny >= g) continue;
          if (region(nx, ny) >= 0 || field.grid(nx, ny) < threshold) continue;
          region(nx, ny) = region_count;
          queue.emplace_back(nx, ny);
        }
      }
      ++region_count;
    }
  }

  // Assign samples by cell containment; sub-threshold samples stay out.
  const double dx = (field.x_max - field.x_min) / g;
  const double dy = (field.y_max - field.y_min) / g;
  std::vector<std::vector<int>> members(region_count);
  for (int i = 0; i < points.rows(); ++i) {
    const int ix = std::clamp(
        static_cast<int>((points(i, 0) - field.x_min) / dx), 0, g - 1);
    const int iy = std::clamp(
        static_cast<int>((points(i, 1) - field.y_min) / dy), 0, g - 1);
    if (region(ix, iy) >= 0) members[region(ix, iy)].push_back(i);
  }

  std::vector<LocalRegion> out;
  for (const auto& idx : members) {
    if (idx.size() < 3) continue;
    Eigen::MatrixXd sub(idx.size(), 2);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      sub.row(static_cast<Eigen::Index>(r)) = points.row(idx[r]);
    }
    LocalRegion region_out;
    try {
      region_out.beta = global_anisotropy(sub).beta;
    } catch (const SingularCovariance&) {
      continue;  // collapsed region, skip like the < 3 sample case
    }
    region_out.sample_count = static_cast<int>(idx.size());
    out.push_back(region_out);
  }
  if (out.empty()) {
    throw NoRegions("local_anisotropy: every region was skipped");
  }
  return out;
}

double harmonic_mean(const std::vector<double>& betas) {
  if (betas.empty()) throw EmptyList("harmonic_mean: empty list");
  double inv_sum = 0.0;
  for (double b : betas) {
    if (b <= 0.0) {
      throw ZeroDenominator("harmonic_mean: betas must be positive");
    }
    inv_sum += 1.0 / b;
  }
  return static_cast<double>(betas.size()) / inv_sum;
}

std::vector<double> delta_series(const std::vector<double>& betas) {
  if (betas.size() < 2) throw InputError("delta_series: need K >= 2");
  std::vector<double> out;
  out.reserve(betas.size() - 1);
  for (std::size_t k = 1; k < betas.size(); ++k) {
    if (betas[k - 1] == 0.0) {
      throw ZeroBaseline("delta_series: zero baseline at index " +
                         std::to_string(k - 1));
    }
    out.push_back(100.0 * std::abs(betas[k] - betas[k - 1]) /
                  std::abs(betas[k - 1]));
  }
  return out;
}

AnisotropyEstimate compute_anisotropy(const Eigen::MatrixXd& points,
                                      double mvee_tol, int grid_size) {
  AnisotropyEstimate est;
  est.beta_mvee = beta_from_ellipse(mvee_khachiyan(points, mvee_tol));
  est.beta_global = global_anisotropy(points).beta;
  est.beta_locals = local_anisotropy(points, grid_size);
  est.n_local = static_cast<int>(est.beta_locals.size());
  std::vector<double> betas;
  betas.reserve(est.beta_locals.size());
  for (const auto& r : est.beta_locals) betas.push_back(r.beta);
  est.beta_harmonic = harmonic_mean(betas);
  return est;
}

}  // namespace latentstab
