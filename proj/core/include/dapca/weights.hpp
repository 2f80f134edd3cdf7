#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace dapca {

// Class-pair repulsion. Three equivalent ways to write delta_pr for p != r.

/// Same repulsion between every pair of classes.
struct UniformRepulsion {
  double value = 1.0;
};

/// One position per class; delta_pr = |R_p - R_r|. Suits ordinal labels.
struct ClassPositions {
  std::vector<double> positions;
};

/// Explicit symmetric n x n matrix. Only off-diagonal entries are used;
/// within-class attraction is always taken from DeltaSpec::within_class_attraction.
struct RepulsionMatrix {
  Eigen::MatrixXd values;
};

using BetweenClassSpec = std::variant<UniformRepulsion, ClassPositions, RepulsionMatrix>;

/// Attraction magnitude alpha >= 0, one scalar or one value per class.
using WithinClassSpec = std::variant<double, std::vector<double>>;

struct DeltaSpec {
  BetweenClassSpec between_class = UniformRepulsion{};
  WithinClassSpec within_class_attraction = 1.0;
};

/// Normalised block weights for the labelled source:
///   D'_pr = delta_pr / (2 N_p N_r)        p != r   (repulsion, >= 0)
///   D'_rr = -alpha_r / (N_r (N_r - 1))             (attraction, <= 0)
/// Every source pair (i, j), i != j, of classes (p, r) carries weight D'_pr.
struct EffectiveBlockConstants {
  Eigen::MatrixXd coefficients;
  std::vector<std::size_t> class_counts;

  std::size_t num_classes() const { return class_counts.size(); }
};

EffectiveBlockConstants build_delta(const DeltaSpec& spec,
                                    std::span<const std::size_t> class_counts);
EffectiveBlockConstants build_delta(const DeltaSpec& spec,
                                    std::span<const std::string> labels);

/// Row sum of the implied dense W for an observation of class p, self-pair excluded:
///   w_p = sum_{k != p} D'_pk N_k + D'_pp (N_p - 1)
Eigen::VectorXd row_sum_constants(const EffectiveBlockConstants& d_eff);

/// Uniform repulsion inside the target: beta / (N_Y (N_Y - 1)) per pair.
struct TargetBlockSpec {
  double beta = 0.0;
  std::size_t n_target = 0;

  /// Zero when beta == 0; throws InputError if beta > 0 with fewer than 2 targets.
  double per_pair_weight() const;
};

/// Attraction between each target row and its k source neighbours:
/// -gamma / (k N_Y) per (target, neighbour) pair.
struct CrossWeightSpec {
  double gamma = 0.0;
  std::size_t k = 1;
  std::size_t n_target = 0;

  double per_pair_weight() const;
};

/// Accepts "<number>", a comma list "<r1>,<r2>,..." (class positions), an inline
/// matrix "<a>,<b>;<c>,<d>" or a path to a headerless CSV matrix.
BetweenClassSpec parse_between_class(std::string_view text);
/// "<alpha>" or "<alpha_1>,<alpha_2>,...".
WithinClassSpec parse_within_class(std::string_view text);

/// Inverse of the two parsers (matrices are written inline).
std::string to_string(const BetweenClassSpec& spec);
std::string to_string(const WithinClassSpec& spec);

}  // namespace dapca
