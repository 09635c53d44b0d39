#include "latentstab/stress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "latentstab/errors.hpp"

namespace latentstab {

Eigen::VectorXd pairwise_distances(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  if (n < 2) throw TooFewSamples("pairwise_distances: need N >= 2");
  Eigen::VectorXd out(n * (n - 1) / 2);
  Eigen::Index idx = 0;
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = p + 1; q < n; ++q) {
      out[idx++] = (points.row(p) - points.row(q)).norm();
    }
  }
  return out;
}

double adjusted_stress_condensed(const Eigen::VectorXd& di,
                                 const Eigen::VectorXd& dj) {
  if (di.size() != dj.size()) {
    throw LengthMismatch("adjusted_stress: distance vectors differ in length");
  }
  const double numerator = (di - dj).squaredNorm();
  const double denominator = di.dot(dj);
  if (denominator <= 0.0) {
    throw ZeroDenominator("adjusted_stress: degenerate (coincident) space");
  }
  return std::sqrt(numerator / denominator);
}

double adjusted_stress(const Eigen::MatrixXd& zi, const Eigen::MatrixXd& zj) {
  if (zi.rows() != zj.rows()) {
    throw LengthMismatch("adjusted_stress: row counts differ");
  }
  return adjusted_stress_condensed(pairwise_distances(zi),
                                   pairwise_distances(zj));
}

PairwiseMatrix stress_matrix(const std::vector<Eigen::MatrixXd>& latents) {
  const int k = static_cast<int>(latents.size());
  if (k < 2) throw InputError("stress_matrix: need K >= 2");

  std::vector<Eigen::VectorXd> condensed;
  condensed.reserve(k);
  for (int i = 0; i < k; ++i) {
    try {
      condensed.push_back(pairwise_distances(latents[i]));
    } catch (const NumericalError& e) {
      throw ZeroDenominator("stress_matrix: realization " + std::to_string(i) +
                            ": " + e.what());
    }
  }

  PairwiseMatrix out;
  out.metric_name = "adjusted_stress";
  out.values = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      double s;
      try {
        s = adjusted_stress_condensed(condensed[i], condensed[j]);
      } catch (const ZeroDenominator& e) {
        throw ZeroDenominator("stress_matrix: pair (" + std::to_string(i) +
                              "," + std::to_string(j) + "): " + e.what());
      }
      out.values(i, j) = s;
      out.values(j, i) = s;
    }
  }
  return out;
}

namespace {

struct Cluster {
  int size = 0;
  int left = -1;   // child node ids, -1 for leaves
  int right = -1;
};

void leaf_walk(const std::vector<Cluster>& nodes, int node,
               std::vector<int>& out) {
  if (nodes[node].left < 0) {
    out.push_back(node);
    return;
  }
  int first = nodes[node].left;
  int second = nodes[node].right;
  if (nodes[second].size < nodes[first].size) std::swap(first, second);
  leaf_walk(nodes, first, out);
  leaf_walk(nodes, second, out);
}

}  // namespace

DendrogramOrder ward_order(const Eigen::MatrixXd& dissimilarity) {
  const int k = static_cast<int>(dissimilarity.rows());
  if (k < 2 || dissimilarity.cols() != k) {
    throw InputError("ward_order: need a square K x K matrix, K >= 2");
  }

  // active[i] holds the current node id for cluster slot i.
  Eigen::MatrixXd d = dissimilarity;
  std::vector<Cluster> nodes(k);
  for (auto& node : nodes) node.size = 1;
  std::vector<int> active(k);
  std::iota(active.begin(), active.end(), 0);
  std::vector<char> alive(k, 1);

  DendrogramOrder out;
  out.merge_heights.reserve(k - 1);
  int root = 0;
  for (int merge = 0; merge < k - 1; ++merge) {
    int bi = -1, bj = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      if (!alive[i]) continue;
      for (int j = i + 1; j < k; ++j) {
        if (!alive[j]) continue;
        if (d(i, j) < best) {
          best = d(i, j);
          bi = i;
          bj = j;
        }
      }
    }

    Cluster merged;
    merged.left = active[bi];
    merged.right = active[bj];
    merged.size = nodes[active[bi]].size + nodes[active[bj]].size;
    nodes.push_back(merged);
    root = static_cast<int>(nodes.size()) - 1;
    out.merge_heights.push_back(best);

    const double ni = nodes[merged.left].size;
    const double nj = nodes[merged.right].size;
    for (int m = 0; m < k; ++m) {
      if (!alive[m] || m == bi || m == bj) continue;
      const double nm = nodes[active[m]].size;
      const double total = ni + nj + nm;
      // Ward Lance-Williams update on the distances.
      const double sq = ((ni + nm) * d(bi, m) * d(bi, m) +
                         (nj + nm) * d(bj, m) * d(bj, m) -
                         nm * best * best) /
                        total;
      const double updated = std::sqrt(std::max(sq, 0.0));
      d(bi, m) = updated;
      d(m, bi) = updated;
    }
    active[bi] = root;
    alive[bj] = 0;
  }

  leaf_walk(nodes, root, out.leaf_order);
  return out;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw EmptyList("percentile: empty input");
  std::sort(values.begin(), values.end());
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double kde_mode(const std::vector<double>& values) {
  if (values.empty()) throw EmptyList("kde_mode: empty input");
  const auto n = static_cast<double>(values.size());
  const double lo = *std::min_element(values.begin(), values.end());
  const double hi = *std::max_element(values.begin(), values.end());
  if (hi <= lo) return lo;

  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= n;
  const double bandwidth =
      std::max(std::sqrt(var) * std::pow(n, -0.2), 1e-12);  // Scott, 1-D

  constexpr int kGrid = 512;
  double best_x = lo;
  double best_density = -1.0;
  for (int g = 0; g < kGrid; ++g) {
    const double x = lo + (hi - lo) * g / (kGrid - 1);
    double density = 0.0;
    for (double v : values) {
      const double t = (x - v) / bandwidth;
      density += std::exp(-0.5 * t * t);
    }
    if (density > best_density) {
      best_density = density;
      best_x = x;
    }
  }
  return best_x;
}

DistributionSummary summarize(const std::vector<double>& values) {
  if (values.empty()) throw EmptyList("summarize: empty input");
  DistributionSummary s;
  s.count = static_cast<int>(values.size());
  s.p10 = percentile(values, 10.0);
  s.p50 = percentile(values, 50.0);
  s.p90 = percentile(values, 90.0);
  s.mode = kde_mode(values);
  return s;
}

std::vector<double> upper_triangle(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.rows()) * (m.rows() - 1) / 2);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

}  // namespace latentstab
