#include "latentstab/autoencoder.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "latentstab/errors.hpp"
#include "latentstab/rng.hpp"

namespace latentstab {

namespace {

std::vector<int> layer_dims(const NetworkConfig& config) {
  std::vector<int> dims;
  dims.push_back(config.input_dim);
  for (int w : config.encoder_widths) dims.push_back(w);
  dims.push_back(config.latent_dim);
  for (auto it = config.encoder_widths.rbegin();
       it != config.encoder_widths.rend(); ++it) {
    dims.push_back(*it);
  }
  dims.push_back(config.input_dim);
  return dims;
}

inline void leaky_relu_inplace(Eigen::MatrixXd& m, double slope) {
  m = m.unaryExpr([slope](double x) { return x >= 0.0 ? x : slope * x; });
}

inline Eigen::MatrixXd leaky_relu_grad(const Eigen::MatrixXd& pre,
                                       double slope) {
  return pre.unaryExpr([slope](double x) { return x >= 0.0 ? 1.0 : slope; });
}

}  // namespace

Parameters init_weights(const NetworkConfig& config, std::uint64_t seed) {
  if (config.input_dim < 1) throw InputError("init_weights: input_dim unset");
  const auto dims = layer_dims(config);
  Rng rng(seed);
  Parameters params;
  params.encoder_layer_count =
      static_cast<int>(config.encoder_widths.size()) + 1;
  params.layers.reserve(dims.size() - 1);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    Layer layer;
    layer.weights.resize(fan_in, fan_out);
    for (int i = 0; i < fan_in; ++i) {
      for (int j = 0; j < fan_out; ++j) {
        layer.weights(i, j) = rng.uniform(-bound, bound);
      }
    }
    layer.biases = Eigen::RowVectorXd::Zero(fan_out);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

ForwardResult forward(const Parameters& params, const NetworkConfig& config,
                      const Eigen::MatrixXd& batch) {
  if (batch.cols() != config.input_dim) {
    throw LengthMismatch("forward: batch column count != input_dim");
  }
  const int n_layers = static_cast<int>(params.layers.size());
  ForwardResult out;
  out.pre_activations.resize(n_layers);
  out.activations.resize(n_layers);

  Eigen::MatrixXd cur = batch;
  for (int l = 0; l < n_layers; ++l) {
    Eigen::MatrixXd pre =
        (cur * params.layers[l].weights).rowwise() + params.layers[l].biases;
    out.pre_activations[l] = pre;
    if (l + 1 < n_layers) {
      leaky_relu_inplace(pre, config.leaky_slope);  // output layer is linear
    }
    out.activations[l] = pre;
    cur = std::move(pre);
    if (l + 1 == params.encoder_layer_count) out.latent = cur;
  }
  out.reconstruction = cur;
  if (!out.reconstruction.allFinite()) {
    throw NonFinite("forward: non-finite activations");
  }
  return out;
}

double mse_loss(const Eigen::MatrixXd& reconstruction,
                const Eigen::MatrixXd& target) {
  return (reconstruction - target).array().square().mean();
}

Parameters grad(const Parameters& params, const NetworkConfig& config,
                const Eigen::MatrixXd& batch, const ForwardResult& fwd) {
  const int n_layers = static_cast<int>(params.layers.size());
  Parameters grads;
  grads.encoder_layer_count = params.encoder_layer_count;
  grads.layers.resize(n_layers);

  const double scale = 2.0 / static_cast<double>(batch.size());
  Eigen::MatrixXd delta = scale * (fwd.reconstruction - batch);
  for (int l = n_layers - 1; l >= 0; --l) {
    const Eigen::MatrixXd& input =
        (l == 0) ? batch : fwd.activations[l - 1];
    grads.layers[l].weights = input.transpose() * delta;
    grads.layers[l].biases = delta.colwise().sum();
    if (l > 0) {
      delta = (delta * params.layers[l].weights.transpose())
                  .cwiseProduct(leaky_relu_grad(fwd.pre_activations[l - 1],
                                                config.leaky_slope));
    }
  }
  return grads;
}

namespace {

struct AdamState {
  std::vector<Layer> m;
  std::vector<Layer> v;
  long step = 0;

  explicit AdamState(const Parameters& params) {
    m.reserve(params.layers.size());
    v.reserve(params.layers.size());
    for (const auto& layer : params.layers) {
      Layer zero;
      zero.weights = Eigen::MatrixXd::Zero(layer.weights.rows(),
                                           layer.weights.cols());
      zero.biases = Eigen::RowVectorXd::Zero(layer.biases.size());
      m.push_back(zero);
      v.push_back(std::move(zero));
    }
  }

  void update(Parameters& params, const Parameters& grads,
              const NetworkConfig& cfg) {
    ++step;
    const double b1 = cfg.adam_beta1;
    const double b2 = cfg.adam_beta2;
    const double corr1 = 1.0 - std::pow(b1, step);
    const double corr2 = 1.0 - std::pow(b2, step);
    const double lr = cfg.learning_rate;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
      auto& mw = m[l].weights;
      auto& vw = v[l].weights;
      mw = b1 * mw + (1.0 - b1) * grads.layers[l].weights;
      vw = b2 * vw.array().matrix() +
           (1.0 - b2) * grads.layers[l].weights.array().square().matrix();
      params.layers[l].weights.array() -=
          lr * (mw.array() / corr1) /
          ((vw.array() / corr2).sqrt() + cfg.adam_eps);

      auto& mb = m[l].biases;
      auto& vb = v[l].biases;
      mb = b1 * mb + (1.0 - b1) * grads.layers[l].biases;
      vb = b2 * vb.array().matrix() +
           (1.0 - b2) * grads.layers[l].biases.array().square().matrix();
      params.layers[l].biases.array() -=
          lr * (mb.array() / corr1) /
          ((vb.array() / corr2).sqrt() + cfg.adam_eps);
    }
  }
};

}  // namespace

TrainedRealization train_realization(const NetworkConfig& config,
                                     const TabularDataset& dataset,
                                     std::uint64_t seed) {
  NetworkConfig cfg = config;
  if (cfg.input_dim == 0) cfg.input_dim = dataset.cols();
  if (cfg.input_dim != dataset.cols()) {
    throw LengthMismatch("train_realization: input_dim != dataset columns");
  }
  const int n = dataset.rows();
  Parameters params = init_weights(cfg, seed);
  AdamState adam(params);

  TrainedRealization result;
  result.seed = seed;
  result.loss_trace.reserve(cfg.epochs);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(mix_seed(seed, static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int count = std::min(cfg.batch_size, n - start);
      Eigen::MatrixXd batch(count, cfg.input_dim);
      for (int i = 0; i < count; ++i) {
        batch.row(i) = dataset.values.row(order[start + i]);
      }
      const ForwardResult fwd = forward(params, cfg, batch);
      const double loss = mse_loss(fwd.reconstruction, batch);
      if (!std::isfinite(loss) || loss > 1e6) {
        throw Diverged("train_realization: loss diverged at epoch " +
                       std::to_string(epoch) + " (seed " +
                       std::to_string(seed) + ")");
      }
      epoch_loss += loss * count;
      const Parameters grads = grad(params, cfg, batch, fwd);
      adam.update(params, grads, cfg);
    }
    result.loss_trace.push_back(epoch_loss / n);
  }

  // Latent of the full dataset in dataset row order, then restored to the
  // original sample index order.
  const ForwardResult full = forward(params, cfg, dataset.values);
  result.latent = restore_order(full.latent, dataset.sample_ids);
  result.final_loss =
      result.loss_trace.empty()
          ? mse_loss(full.reconstruction, dataset.values)
          : result.loss_trace.back();
  return result;
}

LatentEnsemble train_ensemble(const NetworkConfig& config,
                              const TabularDataset& dataset, int realizations,
                              std::uint64_t base_seed, int threads) {
  if (realizations < 2) throw InputError("train_ensemble: need K >= 2");
  if (threads <= 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
  }
  threads = std::min(threads, realizations);

  LatentEnsemble ensemble;
  ensemble.realizations.resize(realizations);
  std::vector<int> original_order(dataset.rows());
  std::iota(original_order.begin(), original_order.end(), 0);
  ensemble.sample_ids = original_order;

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= realizations) return;
      try {
        ensemble.realizations[k] =
            train_realization(config, dataset, base_seed + k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return ensemble;
}

Eigen::MatrixXd normalize_latent(const Eigen::MatrixXd& latent) {
  Eigen::MatrixXd out(latent.rows(), latent.cols());
  for (Eigen::Index j = 0; j < latent.cols(); ++j) {
    const double lo = latent.col(j).minCoeff();
    const double hi = latent.col(j).maxCoeff();
    if (hi <= lo) {
      throw DegenerateAxis("normalize_latent: axis " + std::to_string(j) +
                           " has zero range");
    }
    out.col(j) = (latent.col(j).array() - lo) / (hi - lo);
  }
  return out;
}

void save_ensemble(const LatentEnsemble& ensemble, const NetworkConfig& config,
                   const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);

  nlohmann::json manifest;
  manifest["K"] = ensemble.size();
  manifest["N"] = ensemble.realizations.empty()
                      ? 0
                      : static_cast<int>(ensemble.realizations[0].latent.rows());
  manifest["config"] = {
      {"input_dim", config.input_dim},
      {"encoder_widths", config.encoder_widths},
      {"latent_dim", config.latent_dim},
      {"leaky_slope", config.leaky_slope},
      {"learning_rate", config.learning_rate},
      {"batch_size", config.batch_size},
      {"epochs", config.epochs},
  };
  std::vector<std::uint64_t> seeds;
  std::vector<double> final_losses;
  for (const auto& r : ensemble.realizations) {
    seeds.push_back(r.seed);
    final_losses.push_back(r.final_loss);
  }
  manifest["seeds"] = seeds;
  manifest["final_losses"] = final_losses;

  std::ofstream mf(dir / "manifest.json");
  if (!mf) throw IoError("save_ensemble: cannot write manifest");
  mf << manifest.dump(2) << '\n';

  for (int k = 0; k < ensemble.size(); ++k) {
    std::ofstream out(dir / ("realization_" + std::to_string(k) + ".csv"));
    if (!out) throw IoError("save_ensemble: cannot write realization");
    out.precision(17);
    out << "z1,z2\n";
    const auto& z = ensemble.realizations[k].latent;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      out << z(i, 0) << ',' << z(i, 1) << '\n';
    }
  }
}

LatentEnsemble load_ensemble(const std::filesystem::path& dir) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw IoError("load_ensemble: no manifest.json in " + dir.string());
  nlohmann::json manifest;
  try {
    mf >> manifest;
  } catch (const std::exception& e) {
    throw ParseError(std::string("load_ensemble: bad manifest: ") + e.what());
  }
  const int k_count = manifest.at("K").get<int>();
  LatentEnsemble ensemble;
  ensemble.realizations.resize(k_count);
  for (int k = 0; k < k_count; ++k) {
    const auto path = dir / ("realization_" + std::to_string(k) + ".csv");
    std::ifstream in(path);
    if (!in) throw IoError("load_ensemble: missing " + path.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::pair<double, double>> rows;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ss(line);
      double z1, z2;
      char comma;
      if (!(ss >> z1 >> comma >> z2)) {
        throw ParseError("load_ensemble: bad row in " + path.string());
      }
      rows.emplace_back(z1, z2);
    }
    auto& r = ensemble.realizations[k];
    if (manifest.contains("seeds")) {
      r.seed = manifest["seeds"].at(k).get<std::uint64_t>();
    }
    r.latent.resize(static_cast<Eigen::Index>(rows.size()), 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      r.latent(static_cast<Eigen::Index>(i), 0) = rows[i].first;
      r.latent(static_cast<Eigen::Index>(i), 1) = rows[i].second;
    }
    if (k > 0 && r.latent.rows() != ensemble.realizations[0].latent.rows()) {
      throw LengthMismatch("load_ensemble: inconsistent N across realizations");
    }
  }
  if (k_count > 0) {
    ensemble.sample_ids.resize(ensemble.realizations[0].latent.rows());
    std::iota(ensemble.sample_ids.begin(), ensemble.sample_ids.end(), 0);
  }
  return ensemble;
}

}  // namespace latentstab
