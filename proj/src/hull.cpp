#include "latentstab/hull.hpp"

#include <algorithm>
#include <cmath>

#include "latentstab/errors.hpp"

namespace latentstab {

namespace {

constexpr double kOrientTol = 1e-12;

// Twice the signed area of triangle (a, b, p); > 0 when p is left of a->b.
inline double cross(const Eigen::MatrixXd& pts, int a, int b, int p) {
  return (pts(b, 0) - pts(a, 0)) * (pts(p, 1) - pts(a, 1)) -
         (pts(b, 1) - pts(a, 1)) * (pts(p, 0) - pts(a, 0));
}

// Emits hull points strictly right of a->b, walking from a toward b.
void find_hull(const Eigen::MatrixXd& pts, int a, int b,
               const std::vector<int>& side, std::vector<int>& out) {
  if (side.empty()) return;
  int farthest = side.front();
  double best = 0.0;
  for (int p : side) {
    const double d = -cross(pts, a, b, p);
    if (d > best) {
      best = d;
      farthest = p;
    }
  }
  std::vector<int> right_af, right_fb;
  for (int p : side) {
    if (p == farthest) continue;
    if (cross(pts, a, farthest, p) < -kOrientTol) {
      right_af.push_back(p);
    } else if (cross(pts, farthest, b, p) < -kOrientTol) {
      right_fb.push_back(p);
    }
  }
  find_hull(pts, a, farthest, right_af, out);
  out.push_back(farthest);
  find_hull(pts, farthest, b, right_fb, out);
}

}  // namespace

AnchorSet quickhull(const Eigen::MatrixXd& points) {
  const int n = static_cast<int>(points.rows());
  if (n < 3) throw TooFewPoints("quickhull: need N >= 3");
  if (points.cols() != 2) throw InputError("quickhull: points must be N x 2");

  auto lex_less = [&](int i, int j) {
    return points(i, 0) < points(j, 0) ||
           (points(i, 0) == points(j, 0) && points(i, 1) < points(j, 1));
  };
  int lo = 0, hi = 0;
  for (int i = 1; i < n; ++i) {
    if (lex_less(i, lo)) lo = i;
    if (lex_less(hi, i)) hi = i;
  }

  AnchorSet result;
  double max_abs_cross = 0.0;
  for (int i = 0; i < n; ++i) {
    max_abs_cross = std::max(max_abs_cross, std::abs(cross(points, lo, hi, i)));
  }
  if (max_abs_cross <= kOrientTol) {
    // All points collinear: keep the two extreme endpoints, flag degeneracy.
    result.degenerate = true;
    result.indices = {std::min(lo, hi), std::max(lo, hi)};
    result.vertices.resize(2, 2);
    result.vertices.row(0) = points.row(result.indices[0]);
    result.vertices.row(1) = points.row(result.indices[1]);
    return result;
  }

  std::vector<int> below, above;
  for (int i = 0; i < n; ++i) {
    if (i == lo || i == hi) continue;
    const double c = cross(points, lo, hi, i);
    if (c < -kOrientTol) {
      below.push_back(i);
    } else if (c > kOrientTol) {
      above.push_back(i);
    }
  }

  std::vector<int> ccw;
  ccw.push_back(lo);
  find_hull(points, lo, hi, below, ccw);
  ccw.push_back(hi);
  find_hull(points, hi, lo, above, ccw);

  result.vertices.resize(static_cast<Eigen::Index>(ccw.size()), 2);
  for (std::size_t i = 0; i < ccw.size(); ++i) {
    result.vertices.row(static_cast<Eigen::Index>(i)) = points.row(ccw[i]);
  }
  result.indices = ccw;
  std::sort(result.indices.begin(), result.indices.end());
  return result;
}

double jaccard_dissim(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty() || b.empty()) throw EmptySet("jaccard_dissim: empty set");
  std::size_t i = 0, j = 0, inter = 0, uni = 0;
  while (i < a.size() && j < b.size()) {
    ++uni;
    if (a[i] == b[j]) {
      ++inter;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  uni += (a.size() - i) + (b.size() - j);
  return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

Eigen::MatrixXd jaccard_matrix(const std::vector<AnchorSet>& anchor_sets) {
  const int k = static_cast<int>(anchor_sets.size());
  if (k < 2) throw InputError("jaccard_matrix: need K >= 2");
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const double d =
          jaccard_dissim(anchor_sets[i].indices, anchor_sets[j].indices);
      omega(i, j) = d;
      omega(j, i) = d;
    }
  }
  return omega;
}

std::vector<double> epsilon_series(const std::vector<AnchorSet>& anchor_sets) {
  const int k = static_cast<int>(anchor_sets.size());
  if (k < 2) throw InputError("epsilon_series: need K >= 2");
  std::vector<double> eps;
  eps.reserve(k - 1);
  for (int i = 1; i < k; ++i) {
    const auto& prev = anchor_sets[i - 1].indices;
    const auto& cur = anchor_sets[i].indices;
    if (prev.empty() || cur.empty()) {
      throw EmptySet("epsilon_series: empty anchor set");
    }
    std::size_t a = 0, b = 0, inter = 0, uni = 0;
    while (a < prev.size() && b < cur.size()) {
      ++uni;
      if (prev[a] == cur[b]) {
        ++inter;
        ++a;
        ++b;
      } else if (prev[a] < cur[b]) {
        ++a;
      } else {
        ++b;
      }
    }
    uni += (prev.size() - a) + (cur.size() - b);
    const std::size_t sym_diff = uni - inter;
    eps.push_back(100.0 * static_cast<double>(sym_diff) /
                  static_cast<double>(uni));
  }
  return eps;
}

}  // namespace latentstab
