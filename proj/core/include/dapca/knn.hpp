#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace dapca {

/// For each target row, its k nearest source rows by ascending distance.
/// Row-major flat storage: neighbours of target i occupy [i*k, (i+1)*k).
struct KnnAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> indices;
  std::vector<double> distances;

  std::size_t n_target() const { return k == 0 ? 0 : indices.size() / k; }
  std::span<const std::size_t> neighbors(std::size_t target_row) const {
    return {indices.data() + target_row * k, k};
  }
  std::span<const double> neighbor_distances(std::size_t target_row) const {
    return {distances.data() + target_row * k, k};
  }

  /// Same neighbour sets; distances are not compared.
  bool same_pairs(const KnnAssignment& other) const {
    return k == other.k && indices == other.indices;
  }
};

/// Exact brute-force Euclidean kNN of each target row among source rows.
/// Ties go to the lower source index. Throws InputError when k > source rows.
KnnAssignment knn_match(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target,
                        std::size_t k);

/// Leave-one-out neighbours of every row within one point set.
KnnAssignment knn_self(const Eigen::MatrixXd& points, std::size_t k);

}  // namespace dapca
