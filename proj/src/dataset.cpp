#include "latentstab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "latentstab/errors.hpp"
#include "latentstab/rng.hpp"

namespace latentstab {

Eigen::MatrixXd StandardizationParams::apply(const Eigen::MatrixXd& raw) const {
  return (raw.rowwise() - means.transpose()).array().rowwise() /
         stddevs.transpose().array();
}

Eigen::MatrixXd StandardizationParams::invert(
    const Eigen::MatrixXd& standardized) const {
  return (standardized.array().rowwise() * stddevs.transpose().array())
             .matrix()
             .rowwise() +
         means.transpose();
}

std::pair<Eigen::MatrixXd, StandardizationParams> standardize_matrix(
    const Eigen::MatrixXd& raw) {
  const auto n = raw.rows();
  if (n < 3) throw TooFewSamples("standardize: need N >= 3");
  if (!raw.allFinite()) throw NonFinite("standardize: non-finite input");

  StandardizationParams params;
  params.means = raw.colwise().mean();
  Eigen::MatrixXd centered = raw.rowwise() - params.means.transpose();
  params.stddevs =
      (centered.array().square().colwise().sum() / static_cast<double>(n))
          .sqrt();
  for (Eigen::Index j = 0; j < params.stddevs.size(); ++j) {
    if (params.stddevs[j] <= 0.0) {
      throw ConstantColumn("standardize: column " + std::to_string(j) +
                           " is constant");
    }
  }
  return {params.apply(raw), params};
}

std::pair<TabularDataset, StandardizationParams> standardize(
    const TabularDataset& ds) {
  auto [values, params] = standardize_matrix(ds.values);
  TabularDataset out = ds;
  out.values = std::move(values);
  return {std::move(out), std::move(params)};
}

namespace {

std::vector<int> quantile_bin_labels(const Eigen::VectorXd& score, int g) {
  const int n = static_cast<int>(score.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return score[a] < score[b]; });
  std::vector<int> labels(n);
  for (int rank = 0; rank < n; ++rank) {
    int cls = static_cast<int>(
        (static_cast<long long>(rank) * g) / n);
    labels[order[rank]] = std::min(cls, g - 1);
  }
  return labels;
}

}  // namespace

TabularDataset generate_synthetic(const SyntheticSpec& spec) {
  const int n = spec.sample_size;
  const int d = spec.dim;
  if (n < 3) throw TooFewSamples("generate_synthetic: need N >= 3");
  if (spec.target_correlation.rows() != d ||
      spec.target_correlation.cols() != d) {
    throw InputError("generate_synthetic: correlation matrix must be d x d");
  }
  if ((spec.target_correlation - spec.target_correlation.transpose())
          .cwiseAbs()
          .maxCoeff() > 1e-12) {
    throw InputError("generate_synthetic: correlation matrix not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(spec.target_correlation);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(
        "generate_synthetic: target correlation is not positive definite");
  }
  const Eigen::MatrixXd L = llt.matrixL();

  Rng rng(spec.seed);
  Eigen::MatrixXd iid(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) iid(i, j) = rng.normal();
  }

  TabularDataset ds;
  ds.values = iid * L.transpose();
  ds.feature_names.reserve(d);
  for (int j = 0; j < d; ++j) ds.feature_names.push_back("x" + std::to_string(j + 1));
  ds.sample_ids.resize(n);
  std::iota(ds.sample_ids.begin(), ds.sample_ids.end(), 0);
  if (spec.class_count > 0) {
    ds.labels = quantile_bin_labels(ds.values.col(0), spec.class_count);
    ds.class_count = spec.class_count;
  }
  return ds;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

TabularDataset load_csv(const std::filesystem::path& path,
                        const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw IoError("load_csv: cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ParseError("load_csv: empty file");
  const auto header = split_csv_line(line);
  const std::size_t width = header.size();

  int label_idx = -1;
  for (std::size_t j = 0; j < width; ++j) {
    if (header[j] == label_column) {
      label_idx = static_cast<int>(j);
      break;
    }
  }
  if (label_idx < 0 && label_column != "class") {
    throw UnknownLabelColumn("load_csv: no column named '" + label_column +
                             "'");
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != width) {
      throw RaggedRows("load_csv: line " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(width));
    }
    std::vector<double> row;
    row.reserve(width);
    for (std::size_t j = 0; j < width; ++j) {
      std::size_t pos = 0;
      double v;
      try {
        v = std::stod(fields[j], &pos);
      } catch (const std::exception&) {
        throw ParseError("load_csv: bad number '" + fields[j] + "' at line " +
                         std::to_string(line_no));
      }
      if (pos != fields[j].size()) {
        throw ParseError("load_csv: bad number '" + fields[j] + "' at line " +
                         std::to_string(line_no));
      }
      if (static_cast<int>(j) == label_idx) {
        labels.push_back(static_cast<int>(std::llround(v)));
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("load_csv: no data rows");

  TabularDataset ds;
  const int n = static_cast<int>(rows.size());
  const int d = static_cast<int>(rows.front().size());
  ds.values.resize(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) ds.values(i, j) = rows[i][j];
  }
  for (std::size_t j = 0; j < width; ++j) {
    if (static_cast<int>(j) != label_idx) ds.feature_names.push_back(header[j]);
  }
  ds.sample_ids.resize(n);
  std::iota(ds.sample_ids.begin(), ds.sample_ids.end(), 0);
  if (label_idx >= 0) {
    const int min_label = *std::min_element(labels.begin(), labels.end());
    // Accept 1-based class ids (the UCI wine convention) by shifting to 0.
    if (min_label == 1) {
      for (int& l : labels) --l;
    } else if (min_label < 0) {
      throw ParseError("load_csv: negative class id");
    }
    ds.class_count = *std::max_element(labels.begin(), labels.end()) + 1;
    ds.labels = std::move(labels);
  }
  return ds;
}

void save_csv(const TabularDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_csv: cannot open " + path.string());
  out.precision(17);
  for (std::size_t j = 0; j < ds.feature_names.size(); ++j) {
    if (j) out << ',';
    out << ds.feature_names[j];
  }
  if (ds.labels) out << ",class";
  out << '\n';
  for (int i = 0; i < ds.rows(); ++i) {
    for (int j = 0; j < ds.cols(); ++j) {
      if (j) out << ',';
      out << ds.values(i, j);
    }
    if (ds.labels) out << ',' << (*ds.labels)[i];
    out << '\n';
  }
}

std::pair<TabularDataset, std::vector<int>> shuffle_tracked(
    const TabularDataset& ds, std::uint64_t seed) {
  const int n = ds.rows();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.shuffle(perm);

  TabularDataset out = ds;
  for (int i = 0; i < n; ++i) {
    out.values.row(i) = ds.values.row(perm[i]);
    out.sample_ids[i] = ds.sample_ids[perm[i]];
    if (ds.labels) (*out.labels)[i] = (*ds.labels)[perm[i]];
  }
  return {std::move(out), std::move(perm)};
}

Eigen::MatrixXd restore_order(const Eigen::MatrixXd& shuffled,
                              const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != shuffled.rows()) {
    throw LengthMismatch("restore_order: permutation length mismatch");
  }
  Eigen::MatrixXd out(shuffled.rows(), shuffled.cols());
  for (int i = 0; i < shuffled.rows(); ++i) {
    out.row(perm[i]) = shuffled.row(i);
  }
  return out;
}

}  // namespace latentstab
