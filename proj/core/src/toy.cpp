#include "dapca/toy.hpp"

#include <cmath>
#include <random>

#include "dapca/error.hpp"

namespace dapca {
namespace {

struct ClassLaw {
  std::array<double, 3> mean;
  std::array<double, 3> stddev;
};

void append_class(std::mt19937_64& rng, const ClassLaw& law, std::size_t count,
                  const char* label, Eigen::MatrixXd& values, std::vector<std::string>& labels,
                  Eigen::Index& row) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i, ++row) {
    for (Eigen::Index c = 0; c < 3; ++c) {
      values(row, c) = law.mean[c] + law.stddev[c] * normal(rng);
    }
    labels.emplace_back(label);
  }
}

}  // namespace

void check_toy_config(const ToyConfig& config) {
  if (config.n_source_class1 < 2 || config.n_source_class2 < 2 || config.n_target_class1 < 2 ||
      config.n_target_class2 < 2) {
    throw InputError("toy class counts must be at least 2");
  }
  for (double v : config.shared_covariance_diagonal) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError("toy variances must be positive");
  }
  if (!(config.target_variance_scale_class2 > 0.0)) {
    throw InputError("toy variance scale must be positive");
  }
  for (const auto& mean : config.class_means) {
    for (double v : mean) {
      if (!std::isfinite(v)) throw InputError("toy class means must be finite");
    }
  }
  if (!std::isfinite(config.target_shift_class1) || !std::isfinite(config.target_shift_class2)) {
    throw InputError("toy shifts must be finite");
  }
}

ToyData generate_toy(const ToyConfig& config) {
  check_toy_config(config);
  std::mt19937_64 rng(config.seed);

  std::array<double, 3> sd{};
  std::array<double, 3> sd_scaled{};
  for (std::size_t c = 0; c < 3; ++c) {
    sd[c] = std::sqrt(config.shared_covariance_diagonal[c]);
    sd_scaled[c] = std::sqrt(config.shared_covariance_diagonal[c] * config.target_variance_scale_class2);
  }

  const ClassLaw source1{config.class_means[0], sd};
  const ClassLaw source2{config.class_means[1], sd};
  ClassLaw target1{config.class_means[0], sd};
  ClassLaw target2{config.class_means[1], sd_scaled};
  target1.mean[1] += config.target_shift_class1;
  target2.mean[1] += config.target_shift_class2;

  ToyData toy;
  const std::vector<std::string> names{"x1", "x2", "x3"};

  toy.source.feature_names = names;
  toy.source.values.resize(static_cast<Eigen::Index>(config.n_source_class1 + config.n_source_class2), 3);
  toy.source.labels.emplace();
  Eigen::Index row = 0;
  append_class(rng, source1, config.n_source_class1, kToyClass1, toy.source.values, *toy.source.labels, row);
  append_class(rng, source2, config.n_source_class2, kToyClass2, toy.source.values, *toy.source.labels, row);

  toy.target.feature_names = names;
  toy.target.values.resize(static_cast<Eigen::Index>(config.n_target_class1 + config.n_target_class2), 3);
  row = 0;
  append_class(rng, target1, config.n_target_class1, kToyClass1, toy.target.values, toy.target_labels, row);
  append_class(rng, target2, config.n_target_class2, kToyClass2, toy.target.values, toy.target_labels, row);
  return toy;
}

}  // namespace dapca
