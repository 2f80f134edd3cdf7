#include "dapca/gram.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dapca/error.hpp"

namespace dapca {
namespace {

void symmetrize(Eigen::MatrixXd& q) { q = 0.5 * (q + q.transpose()).eval(); }

void require_same_dim(const Dataset& source, const Dataset& target) {
  if (source.cols() != target.cols()) {
    throw InputError("source has " + std::to_string(source.cols()) + " features, target has " +
                     std::to_string(target.cols()));
  }
}

/// N G - s s^T for a uniform block, evaluated as N * (centered scatter).
Eigen::MatrixXd uniform_block(const Eigen::MatrixXd& rows) {
  const Eigen::RowVectorXd mean = rows.colwise().mean();
  const Eigen::MatrixXd centered = rows.rowwise() - mean;
  return static_cast<double>(rows.rows()) * (centered.transpose() * centered);
}

}  // namespace

GramMatrix gram_supervised(const Dataset& source, const EffectiveBlockConstants& d_eff) {
  if (!source.has_labels()) throw InputError("supervised Gram matrix needs source labels");
  check_dataset(source, "source");
  const auto index = index_labels(*source.labels);
  if (index.counts != d_eff.class_counts) {
    throw InputError("class counts of the source labels do not match the block constants");
  }

  const Eigen::Index d = source.values.cols();
  const std::size_t n = index.num_classes();

  // Q^W is translation invariant; shifting by the source mean only improves conditioning.
  const Eigen::RowVectorXd shift = source.values.colwise().mean();

  std::vector<std::vector<Eigen::Index>> members(n);
  for (std::size_t i = 0; i < index.codes.size(); ++i) {
    members[index.codes[i]].push_back(static_cast<Eigen::Index>(i));
  }

  std::vector<Eigen::VectorXd> sums(n);
  std::vector<Eigen::MatrixXd> second_moments(n);
  for (std::size_t p = 0; p < n; ++p) {
    Eigen::MatrixXd block(static_cast<Eigen::Index>(members[p].size()), d);
    for (std::size_t i = 0; i < members[p].size(); ++i) {
      block.row(static_cast<Eigen::Index>(i)) = source.values.row(members[p][i]) - shift;
    }
    sums[p] = block.colwise().sum().transpose();
    second_moments[p] = block.transpose() * block;
  }

  const Eigen::VectorXd w = row_sum_constants(d_eff);
  const Eigen::MatrixXd& dc = d_eff.coefficients;

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t p = 0; p < n; ++p) {
    const auto pi = static_cast<Eigen::Index>(p);
    // Row sums, plus the self-pairs that the s_p s_p^T term below would wrongly include.
    q += (w(pi) + dc(pi, pi)) * second_moments[p];
  }
  for (std::size_t p = 0; p < n; ++p) {
    const auto pi = static_cast<Eigen::Index>(p);
    q -= dc(pi, pi) * (sums[p] * sums[p].transpose());
    for (std::size_t r = p + 1; r < n; ++r) {
      const auto ri = static_cast<Eigen::Index>(r);
      const Eigen::MatrixXd outer = sums[p] * sums[r].transpose();
      q -= dc(pi, ri) * (outer + outer.transpose());
    }
  }
  symmetrize(q);
  return {q, Eigen::MatrixXd::Zero(d, d)};
}

GramMatrix gram_semi_supervised(const Dataset& source, const Dataset& target,
                                const EffectiveBlockConstants& d_eff,
                                const TargetBlockSpec& t_spec) {
  require_same_dim(source, target);
  check_dataset(target, "target");
  if (t_spec.n_target != target.rows()) {
    throw InputError("target block spec was built for a different target size");
  }
  GramMatrix g = gram_supervised(source, d_eff);
  const double b = t_spec.per_pair_weight();
  if (b != 0.0) {
    g.constant += b * uniform_block(target.values);
    symmetrize(g.constant);
  }
  return g;
}

GramMatrix gram_stca(const Dataset& source, const Dataset& target,
                     const EffectiveBlockConstants& d_eff, const TargetBlockSpec& t_spec, double phi) {
  if (!(phi >= 0.0) || !std::isfinite(phi)) throw InputError("phi must be a non-negative number");
  if (target.rows() == 0) throw InputError("STCA needs a non-empty target");
  GramMatrix g = gram_semi_supervised(source, target, d_eff, t_spec);
  const Eigen::VectorXd gap =
      (source.values.colwise().mean() - target.values.colwise().mean()).transpose();
  g.constant -= phi * (gap * gap.transpose());
  symmetrize(g.constant);
  return g;
}

GramMatrix gram_cross_term(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target,
                           const KnnAssignment& assignment, const CrossWeightSpec& c_spec) {
  if (source.cols() != target.cols()) throw InputError("source/target feature counts differ");
  const auto d = source.cols();
  const auto n_target = static_cast<std::size_t>(target.rows());
  if (assignment.k != c_spec.k) throw InputError("assignment k differs from cross-weight k");
  if (assignment.n_target() != n_target || c_spec.n_target != n_target ||
      assignment.indices.size() != n_target * assignment.k) {
    throw InputError("assignment does not cover every target row exactly once");
  }
  const double w = c_spec.per_pair_weight();

  Eigen::MatrixXd diffs(static_cast<Eigen::Index>(assignment.indices.size()), d);
  std::vector<std::size_t> seen;
  for (std::size_t i = 0; i < n_target; ++i) {
    const auto nbrs = assignment.neighbors(i);
    seen.assign(nbrs.begin(), nbrs.end());
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
      throw InputError("duplicate neighbour for target row " + std::to_string(i));
    }
    for (std::size_t r = 0; r < nbrs.size(); ++r) {
      if (nbrs[r] >= static_cast<std::size_t>(source.rows())) {
        throw InputError("neighbour index " + std::to_string(nbrs[r]) + " out of range");
      }
      diffs.row(static_cast<Eigen::Index>(i * assignment.k + r)) =
          source.row(static_cast<Eigen::Index>(nbrs[r])) - target.row(static_cast<Eigen::Index>(i));
    }
  }
  Eigen::MatrixXd cross = w * (diffs.transpose() * diffs);
  symmetrize(cross);
  return {Eigen::MatrixXd::Zero(d, d), cross};
}

GramMatrix gram_uniform(const Eigen::MatrixXd& values) {
  const auto n = values.rows();
  if (n < 2) throw InputError("uniform weights need at least 2 rows");
  Eigen::MatrixXd q = uniform_block(values) / (static_cast<double>(n) * static_cast<double>(n - 1));
  symmetrize(q);
  return {q, Eigen::MatrixXd::Zero(values.cols(), values.cols())};
}

GramMatrix gram_oracle(const Eigen::MatrixXd& joined, const Eigen::MatrixXd& dense_w) {
  const auto n = joined.rows();
  if (dense_w.rows() != n || dense_w.cols() != n) {
    throw InputError("dense weight matrix must be N x N with N = data rows");
  }
  const double scale = std::max(dense_w.cwiseAbs().maxCoeff(), 1e-300);
  if ((dense_w - dense_w.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InputError("dense weight matrix must be symmetric");
  }
  const auto d = joined.cols();
  const Eigen::VectorXd row_sums = dense_w.rowwise().sum();
  const Eigen::MatrixXd weighted = dense_w * joined;  // (W Z)_im = sum_j W_ij z_jm
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index l = 0; l < d; ++l) {
    for (Eigen::Index m = 0; m < d; ++m) {
      double first = 0.0;
      double second = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        first += row_sums(i) * joined(i, l) * joined(i, m);
        second += joined(i, l) * weighted(i, m);
      }
      q(l, m) = first - second;
    }
  }
  return {q, Eigen::MatrixXd::Zero(d, d)};
}

}  // namespace dapca
