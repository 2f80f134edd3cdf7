#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dapca/dataset.hpp"

namespace dapca {

/// Two-class 3D Gaussian source and a distorted target: per-class shift along
/// the second coordinate, inflated variance in class 2, altered class balance.
struct ToyConfig {
  std::uint64_t seed = 42;
  std::size_t n_source_class1 = 400;
  std::size_t n_source_class2 = 200;
  std::size_t n_target_class1 = 400;
  std::size_t n_target_class2 = 40;
  std::array<std::array<double, 3>, 2> class_means{{{0.0, 0.0, 0.0}, {4.0, 0.0, 0.0}}};
  std::array<double, 3> shared_covariance_diagonal{1.0, 1.0, 4.0};
  double target_shift_class1 = 3.0;
  double target_shift_class2 = 6.0;
  double target_variance_scale_class2 = 2.0;
};

inline constexpr const char* kToyClass1 = "class1";
inline constexpr const char* kToyClass2 = "class2";

struct ToyData {
  Dataset source;  // labelled
  Dataset target;  // unlabelled
  std::vector<std::string> target_labels;  // hidden ground truth, validation only
};

void check_toy_config(const ToyConfig& config);
ToyData generate_toy(const ToyConfig& config);

}  // namespace dapca
