#include <CLI11.hpp>
#include <Eigen/Dense>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "latentstab/anisotropy.hpp"
#include "latentstab/autoencoder.hpp"
#include "latentstab/dataset.hpp"
#include "latentstab/errors.hpp"
#include "latentstab/report.hpp"

namespace {

using namespace latentstab;

Eigen::MatrixXd preset_correlation(const std::string& preset, int dim) {
  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(dim, dim);
  if (preset == "low") return corr;
  if (preset == "high") {
    if (dim < 3) throw InputError("synth: 'high' preset needs dim >= 3");
    corr(0, 1) = corr(1, 0) = 0.8;
    corr(0, 2) = corr(2, 0) = -0.6;
    corr(1, 2) = corr(2, 1) = -0.7;
    return corr;
  }
  throw InputError("synth: unknown preset '" + preset + "'");
}

Eigen::MatrixXd correlation_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("synth: cannot open config " + path);
  nlohmann::json config;
  try {
    in >> config;
  } catch (const std::exception& e) {
    throw ParseError(std::string("synth: bad config JSON: ") + e.what());
  }
  const auto rows = config.at("target_correlation")
                        .get<std::vector<std::vector<double>>>();
  const int d = static_cast<int>(rows.size());
  Eigen::MatrixXd corr(d, d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[i].size()) != d) {
      throw ParseError("synth: target_correlation is not square");
    }
    for (int j = 0; j < d; ++j) corr(i, j) = rows[i][j];
  }
  return corr;
}

int run(int argc, char** argv) {
  CLI::App app{"Latent feature space stability toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a benchmark dataset");
  std::string synth_out, synth_preset = "low", synth_config;
  int synth_n = 1000, synth_dim = 4, synth_classes = 4;
  std::uint64_t synth_seed = 0;
  synth->add_option("--out", synth_out, "Output CSV path")->required();
  synth->add_option("--n", synth_n, "Sample size");
  synth->add_option("--dim", synth_dim, "Predictor count");
  synth->add_option("--classes", synth_classes, "Class count (0: no labels)");
  synth->add_option("--seed", synth_seed, "Random seed");
  synth->add_option("--preset", synth_preset,
                    "Correlation preset: low | high");
  synth->add_option("--config", synth_config,
                    "JSON file with a target_correlation matrix");

  // shared train/report options
  std::string data_path, out_path, ensemble_path;
  int realizations = 30, epochs = 2000, grid = 256;
  std::uint64_t base_seed = 1;
  double mvee_tol = 1e-4;
  bool use_labels = true;

  auto add_training_options = [&](CLI::App* cmd) {
    cmd->add_option("--data", data_path, "Input dataset CSV")->required();
    cmd->add_option("--realizations", realizations, "Ensemble size K");
    cmd->add_option("--epochs", epochs, "Training epochs per realization");
    cmd->add_option("--seed", base_seed, "Base seed");
  };

  auto* train = app.add_subcommand("train", "Train a latent-space ensemble");
  add_training_options(train);
  train->add_option("--out", out_path, "Ensemble output directory")
      ->required();

  auto* evaluate =
      app.add_subcommand("evaluate", "Metrics from a stored ensemble");
  evaluate->add_option("--data", data_path, "Input dataset CSV")->required();
  evaluate->add_option("--ensemble", ensemble_path, "Ensemble directory")
      ->required();
  evaluate->add_option("--out", out_path, "Report output directory")
      ->required();
  evaluate->add_option("--grid", grid, "KDE grid size");
  evaluate->add_option("--tol-mvee", mvee_tol, "MVEE tolerance");
  evaluate->add_flag("--labels,!--no-labels", use_labels,
                     "Use class labels for eta (default on)");

  auto* report = app.add_subcommand("report", "Full train + evaluate run");
  add_training_options(report);
  report->add_option("--out", out_path, "Report output directory")
      ->required();
  report->add_option("--grid", grid, "KDE grid size");
  report->add_option("--tol-mvee", mvee_tol, "MVEE tolerance");
  report->add_flag("--labels,!--no-labels", use_labels,
                   "Use class labels for eta (default on)");
  std::string save_ensemble_dir;
  report->add_option("--save-ensemble", save_ensemble_dir,
                     "Also store the trained ensemble here");

  auto* trace = app.add_subcommand("trace", "Single-sample diagnostics");
  int trace_index = 0;
  trace->add_option("--ensemble", ensemble_path, "Ensemble directory")
      ->required();
  trace->add_option("--index", trace_index, "Original sample index")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    SyntheticSpec spec;
    spec.sample_size = synth_n;
    spec.dim = synth_dim;
    spec.class_count = synth_classes;
    spec.seed = synth_seed;
    spec.target_correlation = synth_config.empty()
                                  ? preset_correlation(synth_preset, synth_dim)
                                  : correlation_from_json(synth_config);
    save_csv(generate_synthetic(spec), synth_out);
    std::cout << "wrote " << synth_out << "\n";
    return 0;
  }

  if (train->parsed() || report->parsed()) {
    auto [dataset, params] = standardize(load_csv(data_path));
    NetworkConfig config;
    config.input_dim = dataset.cols();
    config.epochs = epochs;
    const LatentEnsemble ensemble =
        train_ensemble(config, dataset, realizations, base_seed);
    if (train->parsed()) {
      save_ensemble(ensemble, config, out_path);
      std::cout << "wrote ensemble (" << ensemble.size() << " realizations) to "
                << out_path << "\n";
      return 0;
    }
    if (!save_ensemble_dir.empty()) {
      save_ensemble(ensemble, config, save_ensemble_dir);
    }
    ReportOptions options;
    options.kde_grid = grid;
    options.mvee_tol = mvee_tol;
    options.use_labels = use_labels;
    StabilityReport result = build_report(dataset, ensemble, options);
    result.manifest.dataset_path = data_path;
    result.manifest.config = config;
    result.manifest.base_seed = base_seed;
    emit(result, out_path);
    std::cout << "structural: " << to_string(result.structural_class)
              << "\ninferential: " << to_string(result.inferential_class)
              << "\nwrote report to " << out_path << "\n";
    return 0;
  }

  if (evaluate->parsed()) {
    auto [dataset, params] = standardize(load_csv(data_path));
    const LatentEnsemble ensemble = load_ensemble(ensemble_path);
    ReportOptions options;
    options.kde_grid = grid;
    options.mvee_tol = mvee_tol;
    options.use_labels = use_labels;
    StabilityReport result = build_report(dataset, ensemble, options);
    result.manifest.dataset_path = data_path;
    emit(result, out_path);
    std::cout << "structural: " << to_string(result.structural_class)
              << "\ninferential: " << to_string(result.inferential_class)
              << "\nwrote report to " << out_path << "\n";
    return 0;
  }

  if (trace->parsed()) {
    const LatentEnsemble ensemble = load_ensemble(ensemble_path);
    const SampleTrace t = trace_sample(ensemble, trace_index);
    std::cout << "sample " << t.sample_index << ": "
              << to_string(t.classification) << "\nz1:";
    for (double v : t.z1_values) std::cout << ' ' << v;
    std::cout << "\n";
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const latentstab::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const latentstab::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
