#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace latentstab {

// N x d predictor matrix plus optional categorical labels. sample_ids tracks
// the original row order through shuffles so latent spaces from different
// realizations stay comparable.
struct TabularDataset {
  Eigen::MatrixXd values;
  std::vector<std::string> feature_names;
  std::optional<std::vector<int>> labels;
  int class_count = 0;
  std::vector<int> sample_ids;

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }
};

struct StandardizationParams {
  Eigen::VectorXd means;
  Eigen::VectorXd stddevs;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& raw) const;
  Eigen::MatrixXd invert(const Eigen::MatrixXd& standardized) const;
};

struct SyntheticSpec {
  int sample_size = 1000;
  int dim = 4;
  Eigen::MatrixXd target_correlation;  // d x d, SPD, unit diagonal
  int class_count = 4;
  std::uint64_t seed = 0;
};

// Column-wise (x - mean) / std with population (1/N) standard deviation.
std::pair<Eigen::MatrixXd, StandardizationParams> standardize_matrix(
    const Eigen::MatrixXd& raw);
std::pair<TabularDataset, StandardizationParams> standardize(
    const TabularDataset& ds);

// Correlated multi-Gaussian draw through the Cholesky factor of the target
// correlation; class labels from equal-probability quantile bins of the
// first correlated component.
TabularDataset generate_synthetic(const SyntheticSpec& spec);

// CSV ingestion: header row required; the column named `label_column` (when
// present) supplies integer class ids, every other column is a predictor.
TabularDataset load_csv(const std::filesystem::path& path,
                        const std::string& label_column = "class");
void save_csv(const TabularDataset& ds, const std::filesystem::path& path);

// Shuffle rows, returning the permutation: shuffled row i came from original
// row perm[i]. restore_order places rows back by that permutation.
std::pair<TabularDataset, std::vector<int>> shuffle_tracked(
    const TabularDataset& ds, std::uint64_t seed);
Eigen::MatrixXd restore_order(const Eigen::MatrixXd& shuffled,
                              const std::vector<int>& perm);

}  // namespace latentstab
