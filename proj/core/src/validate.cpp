#include "dapca/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "dapca/error.hpp"
#include "dapca/fit.hpp"
#include "dapca/knn.hpp"

namespace dapca {
namespace {

/// Vote over one neighbour list. `label_of(j)` maps a neighbour index to its
/// class code; codes are ordered like class names.
template <typename LabelOf>
std::size_t vote(std::span<const std::size_t> neighbors, std::span<const double> distances,
                 std::size_t n_classes, LabelOf label_of, std::vector<std::size_t>& counts,
                 std::vector<double>& nearest) {
  counts.assign(n_classes, 0);
  nearest.assign(n_classes, std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < neighbors.size(); ++r) {
    const std::size_t c = label_of(neighbors[r]);
    ++counts[c];
    nearest[c] = std::min(nearest[c], distances[r]);
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < n_classes; ++c) {
    if (counts[c] > counts[best] || (counts[c] == counts[best] && nearest[c] < nearest[best])) best = c;
  }
  return best;
}

double loo_accuracy(const KnnAssignment& nbrs, const std::vector<std::size_t>& origin) {
  std::vector<std::size_t> counts;
  std::vector<double> nearest;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < origin.size(); ++i) {
    const auto predicted = vote(nbrs.neighbors(i), nbrs.neighbor_distances(i), 2,
                                [&origin](std::size_t j) { return origin[j]; }, counts, nearest);
    correct += predicted == origin[i];
  }
  return static_cast<double>(correct) / static_cast<double>(origin.size());
}

/// Leave-one-out neighbours where rows coincident with the query are left out
/// together with it. An exact copy in the other domain is the same observation,
/// not evidence about its origin.
KnnAssignment distinct_neighbors(const Eigen::MatrixXd& points, std::size_t k) {
  const auto n = static_cast<std::size_t>(points.rows());
  KnnAssignment out;
  out.k = k;
  out.indices.reserve(n * k);
  out.distances.reserve(n * k);
  std::vector<std::pair<double, std::size_t>> cand;
  for (std::size_t i = 0; i < n; ++i) {
    cand.clear();
    for (std::size_t j = 0; j < n; ++j) {
      const double d2 = (points.row(static_cast<Eigen::Index>(j)) - points.row(static_cast<Eigen::Index>(i))).squaredNorm();
      if (j != i && d2 > 0.0) cand.emplace_back(d2, j);
    }
    if (cand.size() < k) {
      throw InputError("mixing score: fewer than k distinct neighbours for row " + std::to_string(i));
    }
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k), cand.end());
    for (std::size_t r = 0; r < k; ++r) {
      out.indices.push_back(cand[r].second);
      out.distances.push_back(std::sqrt(cand[r].first));
    }
  }
  return out;
}

Dataset unlabeled(const Dataset& d) {
  Dataset out = d;
  out.labels.reset();
  return out;
}

}  // namespace

std::map<std::string, double> per_class_recall(std::span<const std::string> truth,
                                               std::span<const std::string> predicted) {
  if (truth.size() != predicted.size()) {
    throw InputError("balanced accuracy: " + std::to_string(truth.size()) + " true labels vs " +
                     std::to_string(predicted.size()) + " predictions");
  }
  if (truth.empty()) throw InputError("balanced accuracy: no labels");
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;  // hits, total
  for (std::size_t i = 0; i < truth.size(); ++i) {
    auto& [hits, total] = tally[truth[i]];
    ++total;
    hits += truth[i] == predicted[i];
  }
  std::map<std::string, double> recall;
  for (const auto& [cls, ht] : tally) {
    recall[cls] = static_cast<double>(ht.first) / static_cast<double>(ht.second);
  }
  return recall;
}

double balanced_accuracy(std::span<const std::string> truth, std::span<const std::string> predicted) {
  const auto recall = per_class_recall(truth, predicted);
  double sum = 0.0;
  for (const auto& [cls, r] : recall) sum += r;
  return sum / static_cast<double>(recall.size());
}

std::vector<std::string> knn_classify(const Eigen::MatrixXd& train_points,
                                      std::span<const std::string> train_labels,
                                      const Eigen::MatrixXd& test_points, std::size_t k) {
  if (train_labels.size() != static_cast<std::size_t>(train_points.rows())) {
    throw InputError("knn_classify: label count differs from training rows");
  }
  const auto index = index_labels(train_labels);
  const auto nbrs = knn_match(train_points, test_points, k);

  std::vector<std::string> out;
  out.reserve(nbrs.n_target());
  std::vector<std::size_t> counts;
  std::vector<double> nearest;
  for (std::size_t i = 0; i < static_cast<std::size_t>(test_points.rows()); ++i) {
    const auto c = vote(nbrs.neighbors(i), nbrs.neighbor_distances(i), index.num_classes(),
                        [&index](std::size_t j) { return index.codes[j]; }, counts, nearest);
    out.push_back(index.classes[c]);
  }
  return out;
}

MixingScore mixing_score(const Eigen::MatrixXd& projected_source, const Eigen::MatrixXd& projected_target,
                         std::size_t k, std::size_t n_permutations, std::uint64_t seed) {
  if (projected_source.rows() == 0 || projected_target.rows() == 0) {
    throw InputError("mixing score needs non-empty source and target");
  }
  if (projected_source.cols() != projected_target.cols()) {
    throw InputError("mixing score: source and target dimensions differ");
  }
  Eigen::MatrixXd points(projected_source.rows() + projected_target.rows(), projected_source.cols());
  points << projected_source, projected_target;
  std::vector<std::size_t> origin(static_cast<std::size_t>(points.rows()), 1);
  std::fill_n(origin.begin(), projected_source.rows(), 0);

  if (k == 0) throw InputError("mixing score: k must be at least 1");
  const auto nbrs = distinct_neighbors(points, k);

  MixingScore score;
  score.accuracy = loo_accuracy(nbrs, origin);
  if (n_permutations > 0) {
    std::mt19937_64 rng(seed);
    auto shuffled = origin;
    double total = 0.0;
    for (std::size_t p = 0; p < n_permutations; ++p) {
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      total += loo_accuracy(nbrs, shuffled);
    }
    score.baseline = total / static_cast<double>(n_permutations);
  } else {
    // Majority-class rate stands in for the permutation baseline.
    const double ns = static_cast<double>(projected_source.rows());
    score.baseline = std::max(ns, static_cast<double>(projected_target.rows())) /
                     static_cast<double>(points.rows());
  }
  if (score.baseline < 1.0) {
    score.normalized = std::clamp((score.accuracy - score.baseline) / (1.0 - score.baseline), -1.0, 1.0);
  }
  return score;
}

double benefit(double a_da, double a_noda, double a_top) {
  if (a_top == a_noda) throw InputError("benefit: a_top equals a_noda");
  return (a_da - a_noda) / (a_top - a_noda);
}

ValidationReport direct_validate(const Dataset& source, const Dataset& target,
                                 std::span<const std::string> hidden_target_labels,
                                 const FitConfig& config, const ValidationOptions& options) {
  if (hidden_target_labels.size() != target.rows()) {
    throw InputError("hidden target labels do not match the target rows");
  }
  if (!source.has_labels()) throw InputError("direct validation needs source labels");
  const auto model = fit(source, target, config);
  const Eigen::MatrixXd ps = project(model, source);
  const Eigen::MatrixXd pt = project(model, target);
  const auto predicted = knn_classify(ps, *source.labels, pt, options.classifier_k);

  ValidationReport report;
  report.per_class_recall = per_class_recall(hidden_target_labels, predicted);
  report.balanced_accuracy = balanced_accuracy(hidden_target_labels, predicted);
  const auto mixing = mixing_score(ps, pt, options.mixing_k, options.permutations, options.seed);
  report.mixing_accuracy = mixing.accuracy;
  report.mixing_baseline = mixing.baseline;
  report.mixing_accuracy_normalized = mixing.normalized;
  return report;
}

double reverse_validate(const Dataset& source, const Dataset& target, const FitConfig& config,
                        double split_fraction, std::size_t classifier_k, std::uint64_t seed) {
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw InputError("split fraction must lie strictly between 0 and 1");
  }
  if (!source.has_labels()) throw InputError("reverse validation needs source labels");

  const auto index = index_labels(*source.labels);
  std::vector<std::vector<std::size_t>> members(index.num_classes());
  for (std::size_t i = 0; i < index.codes.size(); ++i) members[index.codes[i]].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  for (std::size_t c = 0; c < members.size(); ++c) {
    auto rows = members[c];
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::lround(split_fraction * static_cast<double>(rows.size())));
    if (n_train < 2 || rows.size() - n_train < 2) {
      throw InputError("degenerate split: class '" + index.classes[c] +
                       "' needs at least 2 rows on each side");
    }
    train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    test_rows.insert(test_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  const Dataset train = select_rows(source, train_rows);
  const Dataset test = select_rows(source, test_rows);

  const auto forward = fit(train, unlabeled(target), config);
  const auto predicted_target = knn_classify(project(forward, train), *train.labels,
                                             project(forward, target), classifier_k);
  if (index_labels(predicted_target).num_classes() < 2) {
    throw FitError("reverse validation: forward labels",
                   "the forward model assigned every target row to one class");
  }

  Dataset relabeled = unlabeled(target);
  relabeled.labels = predicted_target;
  ProjectionModel backward;
  try {
    backward = fit(relabeled, unlabeled(test), config);
  } catch (const std::runtime_error& e) {
    throw FitError("reverse validation: reverse fit", e.what());
  }
  const auto predicted_test = knn_classify(project(backward, relabeled), predicted_target,
                                           project(backward, test), classifier_k);
  return balanced_accuracy(*test.labels, predicted_test);
}

}  // namespace dapca
