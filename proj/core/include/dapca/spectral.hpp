#pragma once

#include <cstddef>

#include <Eigen/Core>

namespace dapca {

/// Eigenvalues below -kZeroEigenvalueTolerance * lambda_max count as negative.
inline constexpr double kZeroEigenvalueTolerance = 1e-12;

struct Spectrum {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // column i pairs with values(i)
};

/// Full symmetric eigendecomposition. Each eigenvector is signed so that its
/// largest-magnitude entry (lowest index on ties) is positive.
Spectrum eig_sym(const Eigen::MatrixXd& q);

struct ComponentSelection {
  Eigen::MatrixXd basis;
  Eigen::VectorXd eigenvalues;
  /// Requested components dropped because their eigenvalue was negative.
  std::size_t truncated = 0;
};

/// Leading min(q_requested, #non-negative) components. Negative-eigenvalue
/// directions cannot raise the objective and are never returned. Throws FitError
/// when the spectrum has no positive eigenvalue.
ComponentSelection select_components(const Spectrum& spectrum, std::size_t q_requested);

/// trace(E^T Q E).
double objective(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& q);

}  // namespace dapca
