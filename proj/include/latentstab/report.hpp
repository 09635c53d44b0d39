#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "latentstab/autoencoder.hpp"
#include "latentstab/dataset.hpp"
#include "latentstab/stress.hpp"

namespace latentstab {

enum class TraceClass {
  total_instability,
  partial_instability,
  total_stability,
  insufficient_data,
};

enum class StabilityLabel {
  significant_stability,
  partial_stability,
  instability,
  significant_instability,
};

std::string to_string(TraceClass c);
std::string to_string(StabilityLabel l);

struct SampleTrace {
  int sample_index = 0;
  std::vector<double> z1_values;  // normalized first-axis positions per k
  TraceClass classification = TraceClass::insufficient_data;
};

// Normalized first-axis positions of original sample i across realizations.
SampleTrace trace_sample(const LatentEnsemble& ensemble, int sample_index);

// range < 0.02 -> total stability; else chi-square uniformity on 10 bins,
// p > 0.05 -> total instability; otherwise partial. Needs K >= 20.
TraceClass classify_trace(const std::vector<double>& z1_values);

// Table of interpretation bands, left-closed / right-open.
StabilityLabel classify_threshold(double value);

// Upper-tail p-value of a chi-square statistic.
double chi_square_p_value(double statistic, int degrees_of_freedom);

struct SeriesReport {
  std::vector<double> values;
  DistributionSummary summary;
};

struct MatrixReport {
  PairwiseMatrix matrix;
  double mode = 0.0;  // KDE mode of the off-diagonal entries
  DendrogramOrder ward;
};

struct RunManifest {
  std::string dataset_path;
  std::string dataset_fingerprint;
  int realizations = 0;
  NetworkConfig config;
  std::uint64_t base_seed = 0;
  std::string toolkit_version;
};

struct StabilityReport {
  RunManifest manifest;
  std::optional<SeriesReport> eta;  // absent without labels
  SeriesReport epsilon;
  SeriesReport delta_mvee;
  SeriesReport delta_global;
  SeriesReport delta_local;
  MatrixReport stress;
  MatrixReport jaccard;
  StabilityLabel structural_class = StabilityLabel::significant_stability;
  StabilityLabel inferential_class = StabilityLabel::significant_stability;
  std::vector<std::string> notes;  // e.g. mode near a band boundary
  std::vector<SampleTrace> traces;
};

struct ReportOptions {
  int kde_grid = 256;
  double mvee_tol = 1e-4;
  bool use_labels = true;
  std::vector<int> trace_indices;  // empty: variance-extreme defaults
};

std::string dataset_fingerprint(const TabularDataset& ds);

// Steps 4-10 of the workflow over a trained (or loaded) ensemble.
StabilityReport build_report(const TabularDataset& dataset,
                             const LatentEnsemble& ensemble,
                             const ReportOptions& options = {});

nlohmann::json report_to_json(const StabilityReport& report);

// Writes report.json plus CSV matrices/series (atomic temp + rename);
// re-emitting the same report is byte-identical.
void emit(const StabilityReport& report, const std::filesystem::path& out_dir);

}  // namespace latentstab
