#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "dapca/weights.hpp"

namespace dapca {

enum class Method { pca, spca, sspca, stca, dapca };

/// Space where the first DAPCA neighbour search runs.
enum class KnnSpace { raw, pca };

struct FitConfig {
  Method method = Method::dapca;
  std::size_t q_requested = 2;
  DeltaSpec delta{};
  double beta = 50.0;
  double gamma = 100.0;
  double phi = 0.0;
  std::size_t k = 5;
  std::size_t max_iterations = 30;
  KnnSpace knn_space_first_iteration = KnnSpace::raw;
  /// Stop once the objective grows by less than this fraction.
  double objective_tolerance = 1e-9;
  std::uint64_t seed = 0;
};

/// Throws InputError on negative parameters, k == 0, q == 0 or max_iterations == 0.
void check_fit_config(const FitConfig& config);

std::string_view to_string(Method method);
std::string_view to_string(KnnSpace space);
Method parse_method(std::string_view text);
KnnSpace parse_knn_space(std::string_view text);

}  // namespace dapca
