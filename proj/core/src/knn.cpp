#include "dapca/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dapca/error.hpp"

namespace dapca {
namespace {

double squared_distance(const Eigen::MatrixXd& a, Eigen::Index i, const Eigen::MatrixXd& b, Eigen::Index j) {
  double sum = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    const double diff = a(i, c) - b(j, c);
    sum += diff * diff;
  }
  return sum;
}

/// Picks the k smallest entries of `dist` (ties to the lower index) into `out`.
void take_nearest(const std::vector<double>& dist, std::vector<std::size_t>& order, std::size_t k,
                  std::size_t* out_idx, double* out_dist) {
  const auto closer = [&dist](std::size_t a, std::size_t b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);
  for (std::size_t r = 0; r < k; ++r) {
    out_idx[r] = order[r];
    out_dist[r] = std::sqrt(dist[order[r]]);
  }
}

}  // namespace

KnnAssignment knn_match(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target, std::size_t k) {
  if (source.cols() != target.cols()) throw InputError("kNN: source and target dimensions differ");
  const auto n_source = static_cast<std::size_t>(source.rows());
  if (k == 0) throw InputError("kNN: k must be at least 1");
  if (k > n_source) {
    throw InputError("kNN: k = " + std::to_string(k) + " exceeds " + std::to_string(n_source) +
                     " source rows");
  }
  const auto n_target = static_cast<std::size_t>(target.rows());
  KnnAssignment out;
  out.k = k;
  out.indices.resize(n_target * k);
  out.distances.resize(n_target * k);

  std::vector<double> dist(n_source);
  std::vector<std::size_t> order(n_source);
  for (std::size_t i = 0; i < n_target; ++i) {
    for (std::size_t j = 0; j < n_source; ++j) {
      dist[j] = squared_distance(source, static_cast<Eigen::Index>(j), target, static_cast<Eigen::Index>(i));
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    take_nearest(dist, order, k, out.indices.data() + i * k, out.distances.data() + i * k);
  }
  return out;
}

KnnAssignment knn_self(const Eigen::MatrixXd& points, std::size_t k) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k == 0) throw InputError("kNN: k must be at least 1");
  if (k + 1 > n) {
    throw InputError("kNN: k = " + std::to_string(k) + " needs at least " + std::to_string(k + 1) +
                     " points for leave-one-out search");
  }
  KnnAssignment out;
  out.k = k;
  out.indices.resize(n * k);
  out.distances.resize(n * k);

  std::vector<double> dist(n);
  std::vector<std::size_t> order;
  order.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    order.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dist[j] = squared_distance(points, static_cast<Eigen::Index>(j), points, static_cast<Eigen::Index>(i));
      order.push_back(j);
    }
    take_nearest(dist, order, k, out.indices.data() + i * k, out.distances.data() + i * k);
  }
  return out;
}

}  // namespace dapca
