#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "latentstab/dataset.hpp"

namespace latentstab {

// Fully connected autoencoder: encoder d -> widths... -> 2 with LeakyReLU
// after every layer including the latent projection; the decoder mirrors the
// encoder with a linear output layer.
struct NetworkConfig {
  int input_dim = 0;
  std::vector<int> encoder_widths{128, 128};
  int latent_dim = 2;
  double leaky_slope = 0.01;
  double learning_rate = 0.001;
  int batch_size = 16;
  int epochs = 10000;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

struct Layer {
  Eigen::MatrixXd weights;  // fan_in x fan_out
  Eigen::RowVectorXd biases;
};

struct Parameters {
  std::vector<Layer> layers;
  int encoder_layer_count = 0;  // layers [0, encoder_layer_count) encode
};

struct ForwardResult {
  Eigen::MatrixXd reconstruction;
  Eigen::MatrixXd latent;
  std::vector<Eigen::MatrixXd> pre_activations;   // per layer, before LeakyReLU
  std::vector<Eigen::MatrixXd> activations;       // per layer, after LeakyReLU
};

struct TrainedRealization {
  std::uint64_t seed = 0;
  Eigen::MatrixXd latent;  // N x 2, rows in original sample_ids order
  std::vector<double> loss_trace;
  double final_loss = 0.0;
};

struct LatentEnsemble {
  std::vector<TrainedRealization> realizations;
  std::vector<int> sample_ids;

  int size() const { return static_cast<int>(realizations.size()); }
};

// Glorot-uniform weights (|w| <= sqrt(6/(fan_in+fan_out))), zero biases.
Parameters init_weights(const NetworkConfig& config, std::uint64_t seed);

ForwardResult forward(const Parameters& params, const NetworkConfig& config,
                      const Eigen::MatrixXd& batch);

double mse_loss(const Eigen::MatrixXd& reconstruction,
                const Eigen::MatrixXd& target);

// Analytic gradients of the batch-mean MSE with respect to every parameter.
Parameters grad(const Parameters& params, const NetworkConfig& config,
                const Eigen::MatrixXd& batch, const ForwardResult& fwd);

TrainedRealization train_realization(const NetworkConfig& config,
                                     const TabularDataset& dataset,
                                     std::uint64_t seed);

// Seeds base_seed .. base_seed+K-1, realizations trained independently.
LatentEnsemble train_ensemble(const NetworkConfig& config,
                              const TabularDataset& dataset, int realizations,
                              std::uint64_t base_seed, int threads = 0);

// Per-axis min-max scaling to [0, 1].
Eigen::MatrixXd normalize_latent(const Eigen::MatrixXd& latent);

// On-disk ensemble: manifest.json plus realization_<k>.csv ("z1,z2" header,
// rows in original-index order). Also the ingestion contract for latent
// spaces produced by external training systems.
void save_ensemble(const LatentEnsemble& ensemble, const NetworkConfig& config,
                   const std::filesystem::path& dir);
LatentEnsemble load_ensemble(const std::filesystem::path& dir);

}  // namespace latentstab
