#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "latentstab/errors.hpp"
#include "latentstab/rng.hpp"
#include "latentstab/stress.hpp"

using namespace latentstab;

TEST_CASE("pairwise_distances matches a naive double loop") {
  Rng rng(1);
  Eigen::MatrixXd pts(12, 2);
  for (int i = 0; i < pts.size(); ++i) pts.data()[i] = rng.normal();
  const Eigen::VectorXd condensed = pairwise_distances(pts);
  REQUIRE(condensed.size() == 12 * 11 / 2);
  int idx = 0;
  for (int p = 0; p < 12; ++p) {
    for (int q = p + 1; q < 12; ++q) {
      CHECK(condensed[idx] ==
            doctest::Approx((pts.row(p) - pts.row(q)).norm()));
      ++idx;
    }
  }
}

TEST_CASE("adjusted stress: identical spaces give zero") {
  Rng rng(4);
  Eigen::MatrixXd z(30, 2);
  for (int i = 0; i < z.size(); ++i) z.data()[i] = rng.normal();
  CHECK(adjusted_stress(z, z) == doctest::Approx(0.0));
}

TEST_CASE("adjusted stress: triangle against its doubled copy") {
  // distances d vs 2d: sum (d_i)^2 / sum 2 d_i^2 -> sqrt(1/2)
  Eigen::MatrixXd tri(3, 2);
  tri << 0, 0, 1, 0, 0, 1;
  const Eigen::MatrixXd doubled = 2.0 * tri;
  CHECK(adjusted_stress(tri, doubled) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("adjusted stress follows the closed-form scale law") {
  // stress(Z, sZ) = |1 - s| / sqrt(s)
  Rng rng(8);
  Eigen::MatrixXd z(25, 2);
  for (int i = 0; i < z.size(); ++i) z.data()[i] = rng.normal();
  for (double s : {0.5, 1.5, 3.0, 10.0}) {
    const Eigen::MatrixXd scaled = s * z;
    CHECK(adjusted_stress(z, scaled) ==
          doctest::Approx(std::abs(1.0 - s) / std::sqrt(s)).epsilon(1e-10));
  }
}

TEST_CASE("adjusted stress is invariant under rigid motion of one space") {
  Rng rng(9);
  Eigen::MatrixXd a(20, 2), b(20, 2);
  for (int i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
  for (int i = 0; i < b.size(); ++i) b.data()[i] = rng.normal();
  const double base = adjusted_stress(a, b);

  Eigen::Matrix2d rot;
  const double ang = 1.1;
  rot << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
  Eigen::MatrixXd moved =
      (b * rot.transpose()).rowwise() + Eigen::RowVector2d(7.0, -3.0);
  CHECK(adjusted_stress(a, moved) == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("adjusted stress rejects degenerate inputs") {
  Eigen::MatrixXd same = Eigen::MatrixXd::Zero(4, 2);
  CHECK_THROWS_AS((void)adjusted_stress(same, same), ZeroDenominator);

  Eigen::MatrixXd a(3, 2), b(4, 2);
  a.setRandom();
  b.setRandom();
  CHECK_THROWS_AS((void)adjusted_stress(a, b), LengthMismatch);
}

TEST_CASE("stress_matrix agrees with pairwise adjusted_stress calls") {
  Rng rng(12);
  std::vector<Eigen::MatrixXd> latents;
  for (int k = 0; k < 4; ++k) {
    Eigen::MatrixXd z(15, 2);
    for (int i = 0; i < z.size(); ++i) z.data()[i] = rng.normal();
    latents.push_back(z);
  }
  const auto pm = stress_matrix(latents);
  CHECK(pm.metric_name == "adjusted_stress");
  REQUIRE(pm.values.rows() == 4);
  CHECK(pm.values.diagonal().cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      CHECK(pm.values(i, j) ==
            doctest::Approx(adjusted_stress(latents[i], latents[j])));
      CHECK(pm.values(i, j) == doctest::Approx(pm.values(j, i)));
    }
  }
}

TEST_CASE("ward_order keeps well-separated blocks contiguous") {
  // 6 items: {0,1,2} mutually close, {3,4,5} mutually close, blocks far apart
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(6, 6, 10.0);
  d.diagonal().setZero();
  const int block_a[] = {0, 1, 2};
  const int block_b[] = {3, 4, 5};
  for (int i : block_a)
    for (int j : block_a)
      if (i != j) d(i, j) = 1.0;
  for (int i : block_b)
    for (int j : block_b)
      if (i != j) d(i, j) = 1.0;

  const auto order = ward_order(d);
  REQUIRE(order.leaf_order.size() == 6);
  std::vector<int> sorted = order.leaf_order;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5});
  // first three leaves must all come from the same block
  const bool first_in_a =
      order.leaf_order[0] <= 2;
  for (int i = 0; i < 3; ++i) {
    CHECK((order.leaf_order[i] <= 2) == first_in_a);
  }
  CHECK(order.merge_heights.size() == 5);
  CHECK(std::is_sorted(order.merge_heights.begin(),
                       order.merge_heights.end()));
}

TEST_CASE("percentile fixtures with linear interpolation") {
  const std::vector<double> v{10, 20, 30, 40, 50};
  CHECK(percentile(v, 0) == doctest::Approx(10.0));
  CHECK(percentile(v, 50) == doctest::Approx(30.0));
  CHECK(percentile(v, 100) == doctest::Approx(50.0));
  CHECK(percentile(v, 25) == doctest::Approx(20.0));
  CHECK(percentile(v, 10) == doctest::Approx(14.0));  // 10 + 0.4 * 10
  CHECK(percentile({7.0}, 90) == doctest::Approx(7.0));
  CHECK_THROWS_AS((void)percentile({}, 50), EmptyList);
}

TEST_CASE("kde_mode recovers the center of a normal sample") {
  Rng rng(123);
  std::vector<double> values(4000);
  for (auto& v : values) v = 5.0 + rng.normal();
  CHECK(kde_mode(values) == doctest::Approx(5.0).epsilon(0.05));

  // constant input returns that constant
  CHECK(kde_mode({2.5, 2.5, 2.5}) == doctest::Approx(2.5));
}

TEST_CASE("kde_mode picks the heavier component of a bimodal sample") {
  Rng rng(321);
  std::vector<double> values;
  for (int i = 0; i < 3000; ++i) values.push_back(rng.normal() * 0.5);
  for (int i = 0; i < 1000; ++i) values.push_back(8.0 + rng.normal() * 0.5);
  const double mode = kde_mode(values);
  CHECK(std::abs(mode) < 0.3);
}

TEST_CASE("summarize combines percentiles, mode, and count") {
  Rng rng(55);
  std::vector<double> values(2000);
  for (auto& v : values) v = rng.normal();
  const auto s = summarize(values);
  CHECK(s.count == 2000);
  CHECK(s.p10 == doctest::Approx(percentile(values, 10)));
  CHECK(s.p50 == doctest::Approx(percentile(values, 50)));
  CHECK(s.p90 == doctest::Approx(percentile(values, 90)));
  CHECK(s.mode == doctest::Approx(kde_mode(values)));
  CHECK(s.p10 < s.p50);
  CHECK(s.p50 < s.p90);
}

TEST_CASE("upper_triangle extracts K(K-1)/2 entries in row-major order") {
  Eigen::MatrixXd m(3, 3);
  m << 0, 1, 2, 1, 0, 3, 2, 3, 0;
  const auto flat = upper_triangle(m);
  CHECK(flat == std::vector<double>{1, 2, 3});
}
