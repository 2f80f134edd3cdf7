#pragma once

#include <Eigen/Core>

#include "dapca/dataset.hpp"
#include "dapca/knn.hpp"
#include "dapca/weights.hpp"

namespace dapca {

/// Quadratic form Q^W = Z^T (diag(W 1) - W) Z of the weighted-pairs objective
///   H_W(E) = 1/2 sum_ij W_ij |E^T (z_i - z_j)|^2 = trace(E^T Q^W E).
/// The kNN-independent part and the cross-domain part are kept apart so an
/// iterative fit only rebuilds `cross`.
struct GramMatrix {
  Eigen::MatrixXd constant;
  Eigen::MatrixXd cross;

  Eigen::MatrixXd total() const { return constant + cross; }
  Eigen::Index dim() const { return constant.rows(); }
};

/// Class-sum assembly for the labelled source; never forms the N x N weights.
GramMatrix gram_supervised(const Dataset& source, const EffectiveBlockConstants& d_eff);

/// Source blocks plus uniform target repulsion; no cross-domain weights.
GramMatrix gram_semi_supervised(const Dataset& source, const Dataset& target,
                                const EffectiveBlockConstants& d_eff,
                                const TargetBlockSpec& t_spec);

/// Semi-supervised form minus phi (mu_X - mu_Y)(mu_X - mu_Y)^T.
GramMatrix gram_stca(const Dataset& source, const Dataset& target,
                     const EffectiveBlockConstants& d_eff, const TargetBlockSpec& t_spec,
                     double phi);

/// Cross part only: sum over (target i, neighbour j) of w (x_j - y_i)(x_j - y_i)^T.
GramMatrix gram_cross_term(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target,
                           const KnnAssignment& assignment, const CrossWeightSpec& c_spec);

/// Uniform weights 1/(N(N-1)) over all rows: the unbiased sample covariance.
GramMatrix gram_uniform(const Eigen::MatrixXd& values);

/// Literal evaluation from a dense symmetric N x N weight matrix. Quadratic in N;
/// meant for verification.
GramMatrix gram_oracle(const Eigen::MatrixXd& joined, const Eigen::MatrixXd& dense_w);

}  // namespace dapca
