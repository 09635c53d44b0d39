#include "latentstab/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "latentstab/anisotropy.hpp"
#include "latentstab/assignment.hpp"
#include "latentstab/errors.hpp"
#include "latentstab/hull.hpp"

namespace latentstab {

namespace {

constexpr const char* kToolkitVersion = "0.1.0";

// Regularized incomplete gamma functions (series + continued fraction).
double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_continued_fraction(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi_square_p_value(double statistic, int degrees_of_freedom) {
  if (statistic <= 0.0) return 1.0;
  const double a = degrees_of_freedom / 2.0;
  const double x = statistic / 2.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

std::string to_string(TraceClass c) {
  switch (c) {
    case TraceClass::total_instability:
      return "total_instability";
    case TraceClass::partial_instability:
      return "partial_instability";
    case TraceClass::total_stability:
      return "total_stability";
    case TraceClass::insufficient_data:
      return "insufficient_data";
  }
  return "unknown";
}

std::string to_string(StabilityLabel l) {
  switch (l) {
    case StabilityLabel::significant_stability:
      return "significant_stability";
    case StabilityLabel::partial_stability:
      return "partial_stability";
    case StabilityLabel::instability:
      return "instability";
    case StabilityLabel::significant_instability:
      return "significant_instability";
  }
  return "unknown";
}

SampleTrace trace_sample(const LatentEnsemble& ensemble, int sample_index) {
  if (ensemble.realizations.empty()) {
    throw InputError("trace_sample: empty ensemble");
  }
  const int n = static_cast<int>(ensemble.realizations[0].latent.rows());
  if (sample_index < 0 || sample_index >= n) {
    throw IndexOutOfRange("trace_sample: index " +
                          std::to_string(sample_index) + " not in [0, " +
                          std::to_string(n) + ")");
  }
  SampleTrace trace;
  trace.sample_index = sample_index;
  trace.z1_values.reserve(ensemble.size());
  for (const auto& r : ensemble.realizations) {
    const Eigen::MatrixXd normalized = normalize_latent(r.latent);
    trace.z1_values.push_back(normalized(sample_index, 0));
  }
  trace.classification = classify_trace(trace.z1_values);
  return trace;
}

TraceClass classify_trace(const std::vector<double>& z1_values) {
  const int k = static_cast<int>(z1_values.size());
  if (k < 20) return TraceClass::insufficient_data;

  const auto [lo, hi] = std::minmax_element(z1_values.begin(), z1_values.end());
  if (*hi - *lo < 0.02) return TraceClass::total_stability;

  // Chi-square goodness of fit against uniform on 10 equal bins of [0, 1].
  constexpr int kBins = 10;
  int counts[kBins] = {0};
  for (double v : z1_values) {
    int bin = static_cast<int>(v * kBins);
    bin = std::clamp(bin, 0, kBins - 1);
    ++counts[bin];
  }
  const double expected = static_cast<double>(k) / kBins;
  double statistic = 0.0;
  for (int c : counts) {
    const double diff = c - expected;
    statistic += diff * diff / expected;
  }
  const double p = chi_square_p_value(statistic, kBins - 1);
  return p > 0.05 ? TraceClass::total_instability
                  : TraceClass::partial_instability;
}

StabilityLabel classify_threshold(double value) {
  if (value < 0.0) throw NegativeValue("classify_threshold: negative value");
  if (value < 0.2) return StabilityLabel::significant_stability;
  if (value < 0.5) return StabilityLabel::partial_stability;
  if (value < 0.7) return StabilityLabel::instability;
  return StabilityLabel::significant_instability;
}

std::string dataset_fingerprint(const TabularDataset& ds) {
  // FNV-1a over the value bytes and labels.
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto absorb = [&hash](const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      hash ^= p[i];
      hash *= 0x100000001b3ULL;
    }
  };
  absorb(ds.values.data(), sizeof(double) * ds.values.size());
  if (ds.labels) {
    absorb(ds.labels->data(), sizeof(int) * ds.labels->size());
  }
  std::ostringstream out;
  out << std::hex << hash;
  return out.str();
}

namespace {

SeriesReport make_series(std::vector<double> values) {
  SeriesReport s;
  s.summary = summarize(values);
  s.values = std::move(values);
  return s;
}

MatrixReport make_matrix_report(PairwiseMatrix matrix) {
  MatrixReport m;
  m.mode = kde_mode(upper_triangle(matrix.values));
  m.ward = ward_order(matrix.values);
  m.matrix = std::move(matrix);
  return m;
}

std::vector<int> default_trace_indices(
    const std::vector<std::vector<double>>& z1_by_sample) {
  const int n = static_cast<int>(z1_by_sample.size());
  std::vector<double> variance(n);
  for (int i = 0; i < n; ++i) {
    const auto& t = z1_by_sample[i];
    const double mean =
        std::accumulate(t.begin(), t.end(), 0.0) / t.size();
    double var = 0.0;
    for (double v : t) var += (v - mean) * (v - mean);
    variance[i] = var / t.size();
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return variance[a] > variance[b];
  });
  std::vector<int> indices;
  const int take = std::min(5, n);
  for (int i = 0; i < take; ++i) indices.push_back(order[i]);
  for (int i = 0; i < take; ++i) indices.push_back(order[n - 1 - i]);
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return indices;
}

}  // namespace

StabilityReport build_report(const TabularDataset& dataset,
                             const LatentEnsemble& ensemble,
                             const ReportOptions& options) {
  const int k = ensemble.size();
  if (k < 2) throw InputError("build_report: need K >= 2");
  const int n = static_cast<int>(ensemble.realizations[0].latent.rows());

  StabilityReport report;
  report.manifest.realizations = k;
  report.manifest.base_seed =
      ensemble.realizations.empty() ? 0 : ensemble.realizations[0].seed;
  report.manifest.dataset_fingerprint = dataset_fingerprint(dataset);
  report.manifest.toolkit_version = kToolkitVersion;

  std::vector<AnchorSet> anchors;
  anchors.reserve(k);
  std::vector<double> beta_mvee, beta_global, beta_local;
  std::vector<double> eta_values;
  std::vector<Eigen::MatrixXd> latents;
  latents.reserve(k);
  std::vector<std::vector<double>> z1_by_sample(n);
  for (auto& t : z1_by_sample) t.reserve(k);

  const bool with_labels =
      options.use_labels && dataset.labels.has_value();
  for (int i = 0; i < k; ++i) {
    const auto& realization = ensemble.realizations[i];
    const Eigen::MatrixXd& z = realization.latent;
    latents.push_back(z);
    anchors.push_back(quickhull(z));
    const AnisotropyEstimate est =
        compute_anisotropy(z, options.mvee_tol, options.kde_grid);
    beta_mvee.push_back(est.beta_mvee);
    beta_global.push_back(est.beta_global);
    beta_local.push_back(est.beta_harmonic);

    const Eigen::MatrixXd normalized = normalize_latent(z);
    for (int s = 0; s < n; ++s) z1_by_sample[s].push_back(normalized(s, 0));

    if (with_labels) {
      const ClusterAssignment clusters =
          kmeans(z, dataset.class_count, realization.seed);
      const std::vector<int> aligned =
          align_labels(clusters.labels, *dataset.labels, dataset.class_count);
      eta_values.push_back(eta(aligned, *dataset.labels));
    }
  }

  if (with_labels) report.eta = make_series(std::move(eta_values));
  report.epsilon = make_series(epsilon_series(anchors));
  report.delta_mvee = make_series(delta_series(beta_mvee));
  report.delta_global = make_series(delta_series(beta_global));
  report.delta_local = make_series(delta_series(beta_local));

  report.stress = make_matrix_report(stress_matrix(latents));
  PairwiseMatrix jac;
  jac.metric_name = "jaccard";
  jac.values = jaccard_matrix(anchors);
  report.jaccard = make_matrix_report(std::move(jac));

  report.structural_class = classify_threshold(report.stress.mode);
  report.inferential_class = classify_threshold(report.jaccard.mode);
  for (const auto& [name, mode] :
       {std::pair<std::string, double>{"stress", report.stress.mode},
        std::pair<std::string, double>{"jaccard", report.jaccard.mode}}) {
    for (double edge : {0.2, 0.5, 0.7}) {
      if (std::abs(mode - edge) < 0.005) {
        std::ostringstream note;
        note << name << " mode " << mode << " lies within 0.005 of the "
             << edge << " interpretation band edge";
        report.notes.push_back(note.str());
      }
    }
  }

  std::vector<int> trace_indices = options.trace_indices;
  if (trace_indices.empty()) {
    trace_indices = default_trace_indices(z1_by_sample);
  }
  for (int idx : trace_indices) {
    if (idx < 0 || idx >= n) {
      throw IndexOutOfRange("build_report: trace index out of range");
    }
    SampleTrace trace;
    trace.sample_index = idx;
    trace.z1_values = z1_by_sample[idx];
    trace.classification = classify_trace(trace.z1_values);
    report.traces.push_back(std::move(trace));
  }
  return report;
}

namespace {

nlohmann::json series_to_json(const SeriesReport& s) {
  return {
      {"values", s.values},
      {"summary",
       {{"p10", s.summary.p10},
        {"p50", s.summary.p50},
        {"p90", s.summary.p90},
        {"mode", s.summary.mode},
        {"count", s.summary.count}}},
  };
}

nlohmann::json matrix_to_json(const MatrixReport& m) {
  const auto k = m.matrix.values.rows();
  std::vector<std::vector<double>> rows(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    rows[i].assign(m.matrix.values.row(i).begin(),
                   m.matrix.values.row(i).end());
  }
  return {
      {"metric", m.matrix.metric_name},
      {"values", rows},
      {"mode", m.mode},
      {"ward_leaf_order", m.ward.leaf_order},
      {"merge_heights", m.ward.merge_heights},
  };
}

}  // namespace

nlohmann::json report_to_json(const StabilityReport& report) {
  nlohmann::json j;
  j["manifest"] = {
      {"dataset_path", report.manifest.dataset_path},
      {"dataset_fingerprint", report.manifest.dataset_fingerprint},
      {"realizations", report.manifest.realizations},
      {"base_seed", report.manifest.base_seed},
      {"toolkit_version", report.manifest.toolkit_version},
      {"config",
       {{"input_dim", report.manifest.config.input_dim},
        {"encoder_widths", report.manifest.config.encoder_widths},
        {"latent_dim", report.manifest.config.latent_dim},
        {"leaky_slope", report.manifest.config.leaky_slope},
        {"learning_rate", report.manifest.config.learning_rate},
        {"batch_size", report.manifest.config.batch_size},
        {"epochs", report.manifest.config.epochs}}},
  };
  j["eta"] = report.eta ? series_to_json(*report.eta) : nlohmann::json();
  j["epsilon"] = series_to_json(report.epsilon);
  j["delta_mvee"] = series_to_json(report.delta_mvee);
  j["delta_global"] = series_to_json(report.delta_global);
  j["delta_local"] = series_to_json(report.delta_local);
  j["stress"] = matrix_to_json(report.stress);
  j["jaccard"] = matrix_to_json(report.jaccard);
  j["classifications"] = {
      {"structural", to_string(report.structural_class)},
      {"inferential", to_string(report.inferential_class)},
      {"notes", report.notes},
  };
  nlohmann::json traces = nlohmann::json::array();
  for (const auto& t : report.traces) {
    traces.push_back({{"sample_index", t.sample_index},
                      {"z1_values", t.z1_values},
                      {"classification", to_string(t.classification)}});
  }
  j["traces"] = traces;
  return j;
}

namespace {

void atomic_write(const std::filesystem::path& path,
                  const std::string& contents) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("emit: cannot write " + tmp);
    out << contents;
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("emit: rename failed for " + path.string());
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
  return out.str();
}

std::string series_csv(const std::vector<double>& values,
                       const std::string& name) {
  std::ostringstream out;
  out.precision(17);
  out << "k," << name << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << i << ',' << values[i] << '\n';
  }
  return out.str();
}

// Ward-sorted lower triangle in long form for plotting.
std::string sorted_lower_csv(const MatrixReport& m) {
  std::ostringstream out;
  out.precision(17);
  out << "row,col,value\n";
  const auto& order = m.ward.leaf_order;
  for (std::size_t i = 1; i < order.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      out << i << ',' << j << ',' << m.matrix.values(order[i], order[j])
          << '\n';
    }
  }
  return out.str();
}

}  // namespace

void emit(const StabilityReport& report,
          const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (!std::filesystem::is_directory(out_dir)) {
    throw IoError("emit: not a writable directory: " + out_dir.string());
  }

  atomic_write(out_dir / "report.json", report_to_json(report).dump(2) + "\n");
  atomic_write(out_dir / "stress_matrix.csv",
               matrix_csv(report.stress.matrix.values));
  atomic_write(out_dir / "jaccard_matrix.csv",
               matrix_csv(report.jaccard.matrix.values));
  atomic_write(out_dir / "stress_sorted_lower.csv",
               sorted_lower_csv(report.stress));
  atomic_write(out_dir / "jaccard_sorted_lower.csv",
               sorted_lower_csv(report.jaccard));
  if (report.eta) {
    atomic_write(out_dir / "eta.csv", series_csv(report.eta->values, "eta"));
  }
  atomic_write(out_dir / "epsilon.csv",
               series_csv(report.epsilon.values, "epsilon"));
  atomic_write(out_dir / "delta_mvee.csv",
               series_csv(report.delta_mvee.values, "delta_mvee"));
  atomic_write(out_dir / "delta_global.csv",
               series_csv(report.delta_global.values, "delta_global"));
  atomic_write(out_dir / "delta_local.csv",
               series_csv(report.delta_local.values, "delta_local"));

  std::ostringstream traces;
  traces.precision(17);
  traces << "sample_index,k,z1,classification\n";
  for (const auto& t : report.traces) {
    for (std::size_t k = 0; k < t.z1_values.size(); ++k) {
      traces << t.sample_index << ',' << k << ',' << t.z1_values[k] << ','
             << to_string(t.classification) << '\n';
    }
  }
  atomic_write(out_dir / "traces.csv", traces.str());
}

}  // namespace latentstab
