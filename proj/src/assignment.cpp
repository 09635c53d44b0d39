#include "latentstab/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "latentstab/errors.hpp"
#include "latentstab/rng.hpp"

namespace latentstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> assign_points(const Eigen::MatrixXd& points,
                               const Eigen::MatrixXd& centroids) {
  const int n = static_cast<int>(points.rows());
  const int g = static_cast<int>(centroids.rows());
  std::vector<int> labels(n, 0);
  for (int i = 0; i < n; ++i) {
    double best = kInf;
    for (int c = 0; c < g; ++c) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        labels[i] = c;
      }
    }
  }
  return labels;
}

double inertia_of(const Eigen::MatrixXd& points,
                  const Eigen::MatrixXd& centroids,
                  const std::vector<int>& labels) {
  double total = 0.0;
  for (int i = 0; i < points.rows(); ++i) {
    total += (points.row(i) - centroids.row(labels[i])).squaredNorm();
  }
  return total;
}

Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& points, int g, Rng& rng) {
  const int n = static_cast<int>(points.rows());
  Eigen::MatrixXd centroids(g, points.cols());
  centroids.row(0) = points.row(static_cast<int>(rng.uniform_index(n)));
  Eigen::VectorXd dist2(n);
  for (int i = 0; i < n; ++i) {
    dist2[i] = (points.row(i) - centroids.row(0)).squaredNorm();
  }
  for (int c = 1; c < g; ++c) {
    const double total = dist2.sum();
    int chosen;
    if (total <= 0.0) {
      chosen = static_cast<int>(rng.uniform_index(n));
    } else {
      const double target = rng.uniform() * total;
      double cum = 0.0;
      chosen = n - 1;
      for (int i = 0; i < n; ++i) {
        cum += dist2[i];
        if (cum >= target) {
          chosen = i;
          break;
        }
      }
    }
    centroids.row(c) = points.row(chosen);
    for (int i = 0; i < n; ++i) {
      dist2[i] = std::min(dist2[i],
                          (points.row(i) - centroids.row(c)).squaredNorm());
    }
  }
  return centroids;
}

ClusterAssignment kmeans_once(const Eigen::MatrixXd& points, int g, Rng& rng,
                              int max_iterations, double tol) {
  const int n = static_cast<int>(points.rows());
  Eigen::MatrixXd centroids = kmeanspp_seed(points, g, rng);
  std::vector<int> labels = assign_points(points, centroids);

  for (int iter = 0; iter < max_iterations; ++iter) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(g, points.cols());
    std::vector<int> counts(g, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(labels[i]) += points.row(i);
      ++counts[labels[i]];
    }
    Eigen::MatrixXd updated(g, points.cols());
    for (int c = 0; c < g; ++c) {
      if (counts[c] == 0) {
        // Reseed an empty cluster at the point farthest from its centroid.
        int farthest = 0;
        double worst = -1.0;
        for (int i = 0; i < n; ++i) {
          const double d =
              (points.row(i) - centroids.row(labels[i])).squaredNorm();
          if (d > worst) {
            worst = d;
            farthest = i;
          }
        }
        updated.row(c) = points.row(farthest);
      } else {
        updated.row(c) = sums.row(c) / counts[c];
      }
    }
    const double shift = (updated - centroids).rowwise().norm().maxCoeff();
    centroids = std::move(updated);
    labels = assign_points(points, centroids);
    if (shift < tol) break;
  }

  ClusterAssignment out;
  out.centroids = std::move(centroids);
  out.inertia = inertia_of(points, out.centroids, labels);
  out.labels = std::move(labels);
  return out;
}

}  // namespace

ClusterAssignment kmeans(const Eigen::MatrixXd& points, int g,
                         std::uint64_t seed, int restarts, int max_iterations,
                         double tol) {
  if (g < 1) throw InputError("kmeans: g must be >= 1");
  if (points.rows() < g) throw TooFewSamples("kmeans: N < g");

  ClusterAssignment best;
  best.inertia = kInf;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
    ClusterAssignment candidate =
        kmeans_once(points, g, rng, max_iterations, tol);
    if (candidate.inertia < best.inertia) best = std::move(candidate);
  }
  return best;
}

AlignmentMap solve_lsap(const Eigen::MatrixXd& cost) {
  if (!cost.allFinite()) throw InputError("solve_lsap: non-finite costs");
  const int nr = static_cast<int>(cost.rows());
  const int nc = static_cast<int>(cost.cols());
  const int n = std::max(nr, nc);

  // Pad rectangular inputs square with a large sentinel.
  double sentinel = 0.0;
  if (cost.size() > 0) sentinel = cost.cwiseAbs().maxCoeff();
  sentinel = (sentinel + 1.0) * 1e6;
  Eigen::MatrixXd c = Eigen::MatrixXd::Constant(n, n, sentinel);
  c.topLeftCorner(nr, nc) = cost;

  for (int i = 0; i < nr; ++i) {
    if ((cost.row(i).array() >= sentinel).all()) {
      throw Infeasible("solve_lsap: row " + std::to_string(i) +
                       " has no assignable column");
    }
  }

  // Shortest augmenting path with dual variables (Crouse 2016 / scipy).
  std::vector<double> u(n, 0.0), v(n, 0.0), shortest(n);
  std::vector<int> path(n), col4row(n, -1), row4col(n, -1);
  std::vector<char> sr(n), sc(n);

  for (int cur_row = 0; cur_row < n; ++cur_row) {
    std::fill(shortest.begin(), shortest.end(), kInf);
    std::fill(sr.begin(), sr.end(), 0);
    std::fill(sc.begin(), sc.end(), 0);
    double min_val = 0.0;
    int i = cur_row;
    int sink = -1;
    while (sink == -1) {
      sr[i] = 1;
      int j_min = -1;
      double lowest = kInf;
      for (int j = 0; j < n; ++j) {
        if (sc[j]) continue;
        const double r = min_val + c(i, j) - u[i] - v[j];
        if (r < shortest[j]) {
          path[j] = i;
          shortest[j] = r;
        }
        if (shortest[j] < lowest ||
            (shortest[j] == lowest && row4col[j] == -1)) {
          lowest = shortest[j];
          j_min = j;
        }
      }
      min_val = lowest;
      if (!std::isfinite(min_val)) {
        throw Infeasible("solve_lsap: no augmenting path");
      }
      sc[j_min] = 1;
      if (row4col[j_min] == -1) {
        sink = j_min;
      } else {
        i = row4col[j_min];
      }
    }

    u[cur_row] += min_val;
    for (int k = 0; k < n; ++k) {
      if (sr[k] && k != cur_row) u[k] += min_val - shortest[col4row[k]];
    }
    for (int j = 0; j < n; ++j) {
      if (sc[j]) v[j] -= min_val - shortest[j];
    }

    int j = sink;
    for (;;) {
      const int i2 = path[j];
      row4col[j] = i2;
      std::swap(col4row[i2], j);
      if (i2 == cur_row) break;
    }
  }

  AlignmentMap out;
  out.mapping.assign(col4row.begin(), col4row.begin() + nr);
  for (int r = 0; r < nr; ++r) {
    if (out.mapping[r] >= nc || cost(r, out.mapping[r]) >= sentinel) {
      throw Infeasible("solve_lsap: row " + std::to_string(r) +
                       " assigned to a sentinel column");
    }
    out.total_cost += cost(r, out.mapping[r]);
  }
  return out;
}

Eigen::MatrixXi contingency(const std::vector<int>& predicted,
                            const std::vector<int>& truth, int g) {
  if (predicted.size() != truth.size()) {
    throw LengthMismatch("contingency: length mismatch");
  }
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(g, g);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] < 0 || predicted[i] >= g || truth[i] < 0 ||
        truth[i] >= g) {
      throw InputError("contingency: class id out of range");
    }
    ++counts(predicted[i], truth[i]);
  }
  return counts;
}

std::vector<int> align_labels(const std::vector<int>& predicted,
                              const std::vector<int>& truth, int g) {
  const Eigen::MatrixXi counts = contingency(predicted, truth, g);
  const AlignmentMap map = solve_lsap(-counts.cast<double>());
  std::vector<int> aligned(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    aligned[i] = map.mapping[predicted[i]];
  }
  return aligned;
}

double eta(const std::vector<int>& aligned_predicted,
           const std::vector<int>& truth) {
  if (aligned_predicted.size() != truth.size() || truth.empty()) {
    throw LengthMismatch("eta: length mismatch or empty input");
  }
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (aligned_predicted[i] != truth[i]) ++mismatches;
  }
  return 100.0 * static_cast<double>(mismatches) /
         static_cast<double>(truth.size());
}

}  // namespace latentstab
