#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dapca/config.hpp"
#include "dapca/dataset.hpp"

namespace dapca {

struct ValidationReport {
  double balanced_accuracy = 0.0;
  std::optional<double> self_consistency;
  double mixing_accuracy = 0.0;
  double mixing_baseline = 0.0;
  double mixing_accuracy_normalized = 0.0;
  std::optional<double> benefit_b;
  std::map<std::string, double> per_class_recall;
};

/// Mean per-class recall over the classes present in `truth`.
double balanced_accuracy(std::span<const std::string> truth,
                         std::span<const std::string> predicted);
std::map<std::string, double> per_class_recall(std::span<const std::string> truth,
                                               std::span<const std::string> predicted);

/// Majority vote among the k nearest training rows. A tied vote goes to the
/// tied class with the nearest member, then to the smaller class name.
std::vector<std::string> knn_classify(const Eigen::MatrixXd& train_points,
                                      std::span<const std::string> train_labels,
                                      const Eigen::MatrixXd& test_points, std::size_t k);

struct MixingScore {
  double accuracy = 0.0;
  double baseline = 0.0;
  double normalized = 0.0;
};

/// Leave-one-out kNN accuracy at telling source rows from target rows, baselined
/// against randomly permuted origin labels:
///   normalized = (accuracy - baseline) / (1 - baseline), clipped to [-1, 1].
/// Rows identical to the query are left out along with it.
MixingScore mixing_score(const Eigen::MatrixXd& projected_source,
                         const Eigen::MatrixXd& projected_target, std::size_t k,
                         std::size_t n_permutations, std::uint64_t seed);

/// (a_da - a_noda) / (a_top - a_noda).
double benefit(double a_da, double a_noda, double a_top);

struct ValidationOptions {
  std::size_t classifier_k = 5;
  std::size_t mixing_k = 20;
  std::size_t permutations = 20;
  double split_fraction = 0.5;
  std::uint64_t seed = 0;
};

/// Fits on (source, target), classifies the projected target from the projected
/// source and scores against the hidden labels.
ValidationReport direct_validate(const Dataset& source, const Dataset& target,
                                 std::span<const std::string> hidden_target_labels,
                                 const FitConfig& config, const ValidationOptions& options);

/// Forward fit on a stratified part of the source, label the target, fit back
/// with the target as source and score on the held-out source part.
double reverse_validate(const Dataset& source, const Dataset& target, const FitConfig& config,
                        double split_fraction, std::size_t classifier_k, std::uint64_t seed);

}  // namespace dapca
