#include "dapca/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "dapca/error.hpp"

namespace dapca {

Spectrum eig_sym(const Eigen::MatrixXd& q) {
  if (q.rows() != q.cols()) throw InputError("eig_sym: matrix must be square");
  if (!q.allFinite()) throw InputError("eig_sym: matrix has non-finite entries");
  const auto d = q.rows();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(q, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw FitError("eigen", "symmetric eigensolver did not converge");

  // Eigen returns ascending order.
  Spectrum out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();

  for (Eigen::Index c = 0; c < d; ++c) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < d; ++r) {
      const double mag = std::abs(out.vectors(r, c));
      if (mag > best) {
        best = mag;
        pivot = r;
      }
    }
    if (out.vectors(pivot, c) < 0.0) out.vectors.col(c) *= -1.0;
  }
  return out;
}

ComponentSelection select_components(const Spectrum& spectrum, std::size_t q_requested) {
  if (q_requested == 0) throw InputError("at least one component must be requested");
  const auto d = static_cast<std::size_t>(spectrum.values.size());
  if (d == 0 || !(spectrum.values(0) > 0.0)) {
    throw FitError("select_components",
                   "the quadratic form has no positive eigenvalue; every direction is dominated "
                   "by attraction");
  }
  const double floor = -kZeroEigenvalueTolerance * spectrum.values(0);
  std::size_t usable = 0;
  while (usable < d && spectrum.values(static_cast<Eigen::Index>(usable)) >= floor) ++usable;

  const std::size_t wanted = std::min(q_requested, d);
  const std::size_t kept = std::min(wanted, usable);

  ComponentSelection out;
  out.basis = spectrum.vectors.leftCols(static_cast<Eigen::Index>(kept));
  out.eigenvalues = spectrum.values.head(static_cast<Eigen::Index>(kept));
  out.truncated = wanted - kept;
  return out;
}

double objective(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& q) {
  if (basis.rows() != q.rows()) throw InputError("objective: basis and matrix dimensions differ");
  return (basis.transpose() * q * basis).trace();
}

}  // namespace dapca
