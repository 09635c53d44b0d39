// End-to-end acceptance suite: exercises every module against independent
// oracles, closed-form fixtures, and directional benchmark comparisons, then
// prints one PASS/FAIL line per criterion. Exit code 0 only if all pass.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "latentstab/anisotropy.hpp"
#include "latentstab/assignment.hpp"
#include "latentstab/autoencoder.hpp"
#include "latentstab/dataset.hpp"
#include "latentstab/hull.hpp"
#include "latentstab/report.hpp"
#include "latentstab/rng.hpp"
#include "latentstab/stress.hpp"

using namespace latentstab;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct CheckContext {
  bool ok = true;
  std::string first_failure;

  void expect(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      first_failure = what;
    }
  }
};

// ---------------------------------------------------------------------------
// 1. Assignment solver vs exhaustive permutations
// ---------------------------------------------------------------------------

double brute_force_lsap(const Eigen::MatrixXd& cost) {
  const int g = static_cast<int>(cost.rows());
  std::vector<int> perm(g);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0;
    for (int i = 0; i < g; ++i) total += cost(i, perm[i]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

CheckContext criterion_assignment() {
  CheckContext ctx;
  const auto start = Clock::now();
  Rng rng(1001);
  for (int trial = 0; trial < 1000; ++trial) {
    const int g = 2 + static_cast<int>(rng.uniform_index(5));
    Eigen::MatrixXd cost(g, g);
    for (int i = 0; i < cost.size(); ++i) {
      cost.data()[i] = rng.uniform(-10.0, 10.0);
    }
    const double expected = brute_force_lsap(cost);
    const auto solved = solve_lsap(cost);
    double actual = 0;
    for (int i = 0; i < g; ++i) actual += cost(i, solved.mapping[i]);
    ctx.expect(std::abs(actual - expected) < 1e-9 &&
                   std::abs(solved.total_cost - expected) < 1e-9,
               "assignment cost differs from the exhaustive optimum");
  }
  ctx.expect(seconds_since(start) < 10.0, "assignment sweep exceeded 10 s");
  return ctx;
}

// ---------------------------------------------------------------------------
// 2. Hull vs O(N^3) oracle + containment
// ---------------------------------------------------------------------------

double cross(const Eigen::RowVector2d& o, const Eigen::RowVector2d& a,
             const Eigen::RowVector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// O(N^3) orientation-test oracle: (j, k) is a hull edge iff every other
// point lies strictly to its left; strict hull vertices are exactly the
// endpoints of such edges (collinear boundary points never qualify).
std::vector<int> oracle_hull(const Eigen::MatrixXd& pts) {
  const int n = static_cast<int>(pts.rows());
  std::vector<char> is_vertex(n, 0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      bool all_left = true;
      for (int m = 0; m < n; ++m) {
        if (m == j || m == k) continue;
        if (cross(pts.row(j), pts.row(k), pts.row(m)) <= 0.0) {
          all_left = false;
          break;
        }
      }
      if (all_left) is_vertex[j] = is_vertex[k] = 1;
    }
  }
  std::vector<int> verts;
  for (int i = 0; i < n; ++i) {
    if (is_vertex[i]) verts.push_back(i);
  }
  return verts;
}

CheckContext criterion_hull() {
  CheckContext ctx;
  const auto start = Clock::now();
  Rng rng(2002);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform_index(198));
    Eigen::MatrixXd pts(n, 2);
    for (int i = 0; i < pts.size(); ++i) {
      pts.data()[i] = rng.uniform(-10.0, 10.0);
    }
    const auto hull = quickhull(pts);
    ctx.expect(!hull.degenerate, "random point set flagged degenerate");
    ctx.expect(hull.indices == oracle_hull(pts),
               "hull vertex set differs from the oracle");

    const int h = static_cast<int>(hull.vertices.rows());
    for (int i = 0; i < n; ++i) {
      const Eigen::RowVector2d p = pts.row(i);
      for (int e = 0; e < h; ++e) {
        const Eigen::RowVector2d a = hull.vertices.row(e);
        const Eigen::RowVector2d b = hull.vertices.row((e + 1) % h);
        ctx.expect(cross(a, b, p) >= -1e-9,
                   "point falls outside a hull half-plane");
      }
    }
  }
  ctx.expect(seconds_since(start) < 30.0, "hull sweep exceeded 30 s");
  return ctx;
}

// ---------------------------------------------------------------------------
// 3. Minimum-volume enclosing ellipse
// ---------------------------------------------------------------------------

CheckContext criterion_mvee() {
  CheckContext ctx;
  const auto start = Clock::now();

  Eigen::MatrixXd square(4, 2);
  square << -1, -1, 1, -1, 1, 1, -1, 1;
  ctx.expect(std::abs(beta_from_ellipse(mvee_khachiyan(square, 1e-6, 3000000)) - 1.0) <
                 1e-2,
             "square corners do not give an axis ratio of 1");

  // samples on a 2:1 axis-aligned ellipse boundary
  Eigen::MatrixXd ring(64, 2);
  for (int i = 0; i < 64; ++i) {
    const double t = 2.0 * M_PI * i / 64;
    ring(i, 0) = 2.0 * std::cos(t);
    ring(i, 1) = std::sin(t);
  }
  ctx.expect(std::abs(beta_from_ellipse(mvee_khachiyan(ring, 1e-6, 3000000)) - 2.0) <
                 2e-2,
             "2:1 ellipse samples do not give an axis ratio of 2");

  Rng rng(3003);
  const double tol = 1e-4;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 5 + static_cast<int>(rng.uniform_index(96));
    Eigen::MatrixXd pts(n, 2);
    for (int i = 0; i < pts.size(); ++i) pts.data()[i] = rng.normal();
    const auto e = mvee_khachiyan(pts, tol);
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector2d d = pts.row(i).transpose() - e.center;
      ctx.expect(d.dot(e.shape * d) <= 1.0 + 10.0 * tol,
                 "MVEE fails the containment bound");
    }
  }
  ctx.expect(seconds_since(start) < 20.0, "MVEE sweep exceeded 20 s");
  return ctx;
}

// ---------------------------------------------------------------------------
// 4. Adjusted stress isometry and scale law
// ---------------------------------------------------------------------------

CheckContext criterion_stress() {
  CheckContext ctx;
  Rng rng(4004);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 10 + static_cast<int>(rng.uniform_index(30));
    Eigen::MatrixXd z(n, 2);
    for (int i = 0; i < z.size(); ++i) z.data()[i] = rng.normal();
    const double ang = rng.uniform(-M_PI, M_PI);
    Eigen::Matrix2d rot;
    rot << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
    Eigen::MatrixXd moved =
        (z * rot.transpose()).rowwise() +
        Eigen::RowVector2d(rng.uniform(-5, 5), rng.uniform(-5, 5));
    ctx.expect(adjusted_stress(z, moved) <= 1e-9,
               "stress under rigid motion exceeds 1e-9");
  }

  Eigen::MatrixXd z(20, 2);
  for (int i = 0; i < z.size(); ++i) z.data()[i] = rng.normal();
  for (double s : {0.5, 2.0, 4.0}) {
    const double expected = std::abs(1.0 - s) / std::sqrt(s);
    ctx.expect(std::abs(adjusted_stress(z, s * z) - expected) < 1e-9,
               "stress scale law violated");
  }
  return ctx;
}

// ---------------------------------------------------------------------------
// 5. Closed-form metric fixtures
// ---------------------------------------------------------------------------

CheckContext criterion_fixtures() {
  CheckContext ctx;
  ctx.expect(std::abs(jaccard_dissim({1, 2, 3}, {2, 3, 4}) - 0.5) < 1e-9,
             "set dissimilarity fixture");

  std::vector<AnchorSet> sets(2);
  sets[0].indices = {1, 2, 3};
  sets[1].indices = {3, 4};
  const auto eps = epsilon_series(sets);
  ctx.expect(eps.size() == 1 && std::abs(eps[0] - 75.0) < 1e-9,
             "anchor-change fixture");

  const auto delta = delta_series({2.0, 1.5});
  ctx.expect(delta.size() == 1 && std::abs(delta[0] - 25.0) < 1e-9,
             "relative-change fixture");

  ctx.expect(std::abs(harmonic_mean({1.70, 1.12}) - 1.3504) < 1e-4,
             "harmonic mean fixture");

  Eigen::MatrixXd tri(3, 2);
  tri << 0, 0, 1, 0, 0, 1;
  ctx.expect(std::abs(adjusted_stress(tri, 2.0 * tri) - 0.70710678) < 1e-8,
             "doubled-triangle stress fixture");
  return ctx;
}

// ---------------------------------------------------------------------------
// 6. Gradient vs central finite differences
// ---------------------------------------------------------------------------

CheckContext criterion_gradient() {
  CheckContext ctx;
  NetworkConfig config;
  config.input_dim = 3;
  config.encoder_widths = {4, 4};

  Rng data_rng(6006);
  Eigen::MatrixXd batch(8, 3);
  for (int i = 0; i < batch.size(); ++i) batch.data()[i] = data_rng.normal();

  const double h = 1e-6;
  // The loss is only differentiable where no pre-activation changes sign;
  // parameters whose perturbation straddles an activation kink are skipped.
  auto same_kink_side = [](const ForwardResult& a, const ForwardResult& b) {
    for (std::size_t l = 0; l < a.pre_activations.size(); ++l) {
      const auto& pa = a.pre_activations[l];
      const auto& pb = b.pre_activations[l];
      for (int i = 0; i < pa.size(); ++i) {
        if ((pa.data()[i] >= 0.0) != (pb.data()[i] >= 0.0)) return false;
      }
    }
    return true;
  };
  for (int draw = 0; draw < 20; ++draw) {
    Parameters params = init_weights(config, 600 + draw);
    const auto fwd = forward(params, config, batch);
    const Parameters analytic = grad(params, config, batch, fwd);

    for (std::size_t l = 0; l < params.layers.size(); ++l) {
      auto check_entry = [&](double* value, double analytic_grad) {
        const double saved = *value;
        *value = saved + h;
        const auto fwd_up = forward(params, config, batch);
        *value = saved - h;
        const auto fwd_down = forward(params, config, batch);
        *value = saved;
        if (!same_kink_side(fwd_up, fwd_down)) return;
        const double up = mse_loss(fwd_up.reconstruction, batch);
        const double down = mse_loss(fwd_down.reconstruction, batch);
        const double numeric = (up - down) / (2 * h);
        const double scale =
            std::max({std::abs(numeric), std::abs(analytic_grad), 1e-4});
        ctx.expect(std::abs(numeric - analytic_grad) / scale < 1e-4,
                   "analytic gradient disagrees with finite differences");
      };
      auto& w = params.layers[l].weights;
      for (int i = 0; i < w.size(); ++i) {
        check_entry(w.data() + i, analytic.layers[l].weights.data()[i]);
      }
      auto& b = params.layers[l].biases;
      for (int i = 0; i < b.size(); ++i) {
        check_entry(b.data() + i, analytic.layers[l].biases.data()[i]);
      }
    }
  }
  return ctx;
}

// ---------------------------------------------------------------------------
// 7 & 8. Directional benchmark comparisons at desk scale
// ---------------------------------------------------------------------------

struct BenchmarkResult {
  double stress_mode = 0.0;
  double jaccard_mode = 0.0;
  double eta_p50 = 0.0;
};

BenchmarkResult run_benchmark(const TabularDataset& raw, int realizations,
                              int epochs, std::uint64_t seed) {
  auto [dataset, params] = standardize(raw);
  NetworkConfig config;
  config.input_dim = dataset.cols();
  config.epochs = epochs;
  const LatentEnsemble ensemble =
      train_ensemble(config, dataset, realizations, seed);
  const StabilityReport report = build_report(dataset, ensemble);
  BenchmarkResult r;
  r.stress_mode = report.stress.mode;
  r.jaccard_mode = report.jaccard.mode;
  r.eta_p50 = report.eta ? report.eta->summary.p50 : -1.0;
  return r;
}

TabularDataset synthetic_benchmark(bool high_correlation) {
  SyntheticSpec spec;
  spec.sample_size = 300;
  spec.dim = 4;
  spec.class_count = 4;
  spec.seed = 7;
  spec.target_correlation = Eigen::MatrixXd::Identity(4, 4);
  if (high_correlation) {
    auto& c = spec.target_correlation;
    c(0, 1) = c(1, 0) = 0.8;
    c(0, 2) = c(2, 0) = -0.6;
    c(1, 2) = c(2, 1) = -0.7;
  }
  return generate_synthetic(spec);
}

CheckContext criterion_synthetic_trend(BenchmarkResult& low_out,
                                       BenchmarkResult& high_out) {
  CheckContext ctx;
  const int realizations = 30, epochs = 2000;
  low_out = run_benchmark(synthetic_benchmark(false), realizations, epochs, 11);
  high_out = run_benchmark(synthetic_benchmark(true), realizations, epochs, 11);
  std::cout << "    low-correlation:  stress mode " << low_out.stress_mode
            << ", jaccard mode " << low_out.jaccard_mode << ", eta P50 "
            << low_out.eta_p50 << "\n";
  std::cout << "    high-correlation: stress mode " << high_out.stress_mode
            << ", jaccard mode " << high_out.jaccard_mode << ", eta P50 "
            << high_out.eta_p50 << "\n";
  ctx.expect(high_out.stress_mode < low_out.stress_mode,
             "high-correlation stress mode is not lower");
  ctx.expect(high_out.jaccard_mode < low_out.jaccard_mode,
             "high-correlation jaccard mode is not lower");
  ctx.expect(high_out.eta_p50 < low_out.eta_p50,
             "high-correlation eta P50 is not lower");
  return ctx;
}

CheckContext criterion_wine(const std::filesystem::path& wine_path,
                            const BenchmarkResult& low,
                            const BenchmarkResult& high) {
  CheckContext ctx;
  if (!std::filesystem::exists(wine_path)) {
    ctx.expect(false, "wine dataset not found at " + wine_path.string());
    return ctx;
  }
  const BenchmarkResult wine =
      run_benchmark(load_csv(wine_path), 30, 2000, 11);
  std::cout << "    wine: stress mode " << wine.stress_mode
            << ", jaccard mode " << wine.jaccard_mode << ", eta P50 "
            << wine.eta_p50 << "\n";
  ctx.expect(wine.eta_p50 < low.eta_p50 && wine.eta_p50 < high.eta_p50,
             "wine eta P50 is not below both synthetic benchmarks");
  ctx.expect(wine.jaccard_mode >= 0.5, "wine jaccard mode is below 0.5");
  return ctx;
}

// ---------------------------------------------------------------------------
// 9. Threshold classifier
// ---------------------------------------------------------------------------

CheckContext criterion_classifier() {
  CheckContext ctx;
  ctx.expect(classify_threshold(0.27) == StabilityLabel::partial_stability,
             "0.27 is not partial stability");
  ctx.expect(
      classify_threshold(0.71) == StabilityLabel::significant_instability,
      "0.71 is not significant instability");
  ctx.expect(
      classify_threshold(0.86) == StabilityLabel::significant_instability,
      "0.86 is not significant instability");

  Rng rng(9009);
  std::vector<double> values(1000);
  for (auto& v : values) v = rng.uniform() * 1.2;
  std::sort(values.begin(), values.end());
  int prev = static_cast<int>(classify_threshold(values.front()));
  for (double v : values) {
    const int rank = static_cast<int>(classify_threshold(v));
    ctx.expect(rank >= prev, "classifier is not monotone");
    prev = rank;
  }
  return ctx;
}

// ---------------------------------------------------------------------------
// 10. End-to-end determinism
// ---------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

CheckContext criterion_determinism() {
  CheckContext ctx;
  SyntheticSpec spec;
  spec.sample_size = 120;
  spec.dim = 4;
  spec.class_count = 3;
  spec.seed = 21;
  spec.target_correlation = Eigen::MatrixXd::Identity(4, 4);
  const TabularDataset raw = generate_synthetic(spec);

  auto run_once = [&](const std::filesystem::path& dir) {
    auto [dataset, params] = standardize(raw);
    NetworkConfig config;
    config.input_dim = dataset.cols();
    config.epochs = 150;
    const LatentEnsemble ensemble = train_ensemble(config, dataset, 5, 3);
    StabilityReport report = build_report(dataset, ensemble);
    report.manifest.dataset_path = "synthetic";
    report.manifest.config = config;
    report.manifest.base_seed = 3;
    emit(report, dir);
  };

  const auto base = std::filesystem::temp_directory_path();
  const auto dir_a = base / "lsstab_acceptance_a";
  const auto dir_b = base / "lsstab_acceptance_b";
  run_once(dir_a);
  run_once(dir_b);
  ctx.expect(slurp(dir_a / "report.json") == slurp(dir_b / "report.json"),
             "repeated runs produce different report.json bytes");
  ctx.expect(!slurp(dir_a / "report.json").empty(), "report.json is empty");
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
  return ctx;
}

int report_line(int number, const std::string& name, const CheckContext& ctx) {
  std::cout << "criterion " << number << " (" << name << "): "
            << (ctx.ok ? "PASS" : "FAIL");
  if (!ctx.ok) std::cout << " — " << ctx.first_failure;
  std::cout << std::endl;
  return ctx.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::filesystem::path wine_path = "data/wine.csv";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--wine") wine_path = argv[i + 1];
  }
  std::cout.precision(6);

  int failures = 0;
  failures += report_line(1, "assignment exactness", criterion_assignment());
  failures += report_line(2, "hull oracle", criterion_hull());
  failures += report_line(3, "enclosing ellipse", criterion_mvee());
  failures += report_line(4, "stress isometry", criterion_stress());
  failures += report_line(5, "closed-form fixtures", criterion_fixtures());
  failures += report_line(6, "gradient check", criterion_gradient());

  BenchmarkResult low, high;
  failures +=
      report_line(7, "synthetic trend", criterion_synthetic_trend(low, high));
  failures += report_line(8, "wine directional",
                          criterion_wine(wine_path, low, high));
  failures += report_line(9, "threshold classifier", criterion_classifier());
  failures += report_line(10, "determinism", criterion_determinism());

  std::cout << (failures == 0 ? "ALL CRITERIA PASSED"
                              : "FAILURES: " + std::to_string(failures))
            << std::endl;
  return failures == 0 ? 0 : 1;
}
