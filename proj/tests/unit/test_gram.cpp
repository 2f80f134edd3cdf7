#include <random>

#include "doctest.h"
#include "dapca/error.hpp"
#include "dapca/gram.hpp"
#include "dapca/spectral.hpp"
#include "oracle.hpp"

using namespace dapca;
namespace t = dapca::testing;

namespace {

Eigen::MatrixXd stack(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd z(a.rows() + b.rows(), a.cols());
  z << a, b;
  return z;
}

EffectiveBlockConstants block_constants(const t::RandomInstance& inst) {
  const DeltaSpec spec{RepulsionMatrix{inst.weights.delta}, inst.weights.alpha};
  return build_delta(spec, std::span<const std::string>(*inst.source.labels));
}

KnnAssignment assignment_of(const t::PairWeights& p) {
  KnnAssignment a;
  a.k = p.k;
  for (const auto& row : p.neighbors) {
    a.indices.insert(a.indices.end(), row.begin(), row.end());
    a.distances.insert(a.distances.end(), row.size(), 0.0);
  }
  return a;
}

Dataset unlabelled(const Eigen::MatrixXd& v) {
  Dataset d;
  d.values = v;
  return d;
}

}  // namespace

TEST_CASE("gram_supervised two points one class") {
  Dataset src;
  src.values = (Eigen::MatrixXd(2, 1) << 0.0, 2.0).finished();
  src.labels = std::vector<std::string>{"a", "a"};
  const auto d_eff = build_delta(DeltaSpec{UniformRepulsion{1.0}, 1.0}, std::span<const std::string>(*src.labels));
  const auto q = gram_supervised(src, d_eff).total();
  CHECK(q(0, 0) == doctest::Approx(-2.0));
  const Eigen::MatrixXd w = (Eigen::MatrixXd(2, 2) << 0.0, -0.5, -0.5, 0.0).finished();
  CHECK(gram_oracle(src.values, w).total()(0, 0) == doctest::Approx(-2.0));
}

TEST_CASE("gram_supervised matches the oracle on 100 x 8 with 3 classes") {
  std::mt19937_64 rng(21);
  auto inst = t::random_instance(rng, 200, 8, 3);
  // Force the stated shape.
  inst.source.values = t::random_points(rng, 100, 8);
  std::vector<std::string> labels;
  inst.weights.source_codes.clear();
  for (std::size_t i = 0; i < 100; ++i) {
    labels.push_back("c" + std::to_string(i % 3));
    inst.weights.source_codes.push_back(i % 3);
  }
  inst.source.labels = labels;
  inst.weights.n_classes = 3;
  inst.weights.delta = (Eigen::MatrixXd(3, 3) << 0, 1, 2, 1, 0, 0.5, 2, 0.5, 0).finished();
  inst.weights.alpha = {1.0, 0.5, 2.0};
  inst.weights.n_target = 0;
  inst.weights.beta = 0.0;
  inst.weights.neighbors.clear();

  const auto fast = gram_supervised(inst.source, block_constants(inst)).total();
  const auto slow = gram_oracle(inst.source.values, t::dense_weights(inst.weights)).total();
  CHECK(t::rel_error(fast, slow) <= 1e-10);
}

TEST_CASE("gram_supervised with all weights zero") {
  std::mt19937_64 rng(2);
  auto inst = t::random_instance(rng);
  const auto d_eff = build_delta(DeltaSpec{UniformRepulsion{0.0}, 0.0}, std::span<const std::string>(*inst.source.labels));
  CHECK(gram_supervised(inst.source, d_eff).total().isZero());
}

TEST_CASE("gram_supervised rejects mismatched labels") {
  std::mt19937_64 rng(2);
  auto inst = t::random_instance(rng);
  auto d_eff = block_constants(inst);
  d_eff.class_counts.push_back(4);
  CHECK_THROWS_AS(gram_supervised(inst.source, d_eff), InputError);
  Dataset no_labels = unlabelled(inst.source.values);
  CHECK_THROWS_AS(gram_supervised(no_labels, block_constants(inst)), InputError);
}

TEST_CASE("gram_semi_supervised") {
  std::mt19937_64 rng(31);
  auto inst = t::random_instance(rng);
  const auto d_eff = block_constants(inst);
  const std::size_t ny = inst.target.rows();

  SUBCASE("beta zero equals supervised") {
    const auto semi = gram_semi_supervised(inst.source, inst.target, d_eff, TargetBlockSpec{0.0, ny});
    CHECK(semi.total() == gram_supervised(inst.source, d_eff).total());
  }
  SUBCASE("only target repulsion is N_Y times the target covariance") {
    const auto zero = build_delta(DeltaSpec{UniformRepulsion{0.0}, 0.0}, std::span<const std::string>(*inst.source.labels));
    const double beta = 3.0;
    const auto q = gram_semi_supervised(inst.source, inst.target, zero, TargetBlockSpec{beta, ny}).total();
    const Eigen::RowVectorXd mu = inst.target.values.colwise().mean();
    const Eigen::MatrixXd c = inst.target.values.rowwise() - mu;
    const Eigen::MatrixXd cov = c.transpose() * c / static_cast<double>(ny - 1);
    CHECK(t::rel_error(q, beta * cov) <= 1e-10);
    const auto a = eig_sym(q);
    const auto b = eig_sym(cov);
    for (Eigen::Index j = 0; j < a.values.size(); ++j) {
      if (j + 1 < a.values.size() && a.values(j) - a.values(j + 1) < 1e-6 * a.values(0)) continue;
      if (j > 0 && a.values(j - 1) - a.values(j) < 1e-6 * a.values(0)) continue;
      CHECK(t::abs_cosine(a.vectors.col(j), b.vectors.col(j)) >= 1.0 - 1e-8);
    }
  }
  SUBCASE("random instance against the oracle") {
    auto p = inst.weights;
    p.neighbors.clear();
    const auto fast = gram_semi_supervised(inst.source, inst.target, d_eff, TargetBlockSpec{p.beta, ny}).total();
    const auto slow = gram_oracle(stack(inst.source.values, inst.target.values), t::dense_weights(p)).total();
    CHECK(t::rel_error(fast, slow) <= 1e-10);
  }
  SUBCASE("dimension mismatch") {
    const Dataset wide = unlabelled(Eigen::MatrixXd::Ones(4, inst.source.cols() + 1));
    CHECK_THROWS_AS(gram_semi_supervised(inst.source, wide, d_eff, TargetBlockSpec{1.0, 4}), InputError);
  }
}

TEST_CASE("gram_stca") {
  std::mt19937_64 rng(41);
  auto inst = t::random_instance(rng);
  const auto d_eff = block_constants(inst);
  const TargetBlockSpec t_spec{inst.weights.beta, inst.target.rows()};
  const auto semi = gram_semi_supervised(inst.source, inst.target, d_eff, t_spec).total();

  SUBCASE("phi zero") { CHECK(gram_stca(inst.source, inst.target, d_eff, t_spec, 0.0).total() == semi); }
  SUBCASE("aligned means") {
    Dataset target = inst.target;
    const Eigen::RowVectorXd shift = inst.source.values.colwise().mean() - target.values.colwise().mean();
    target.values = target.values.rowwise() + shift;
    const auto semi_aligned = gram_semi_supervised(inst.source, target, d_eff, t_spec).total();
    const auto stca = gram_stca(inst.source, target, d_eff, t_spec, 25.0).total();
    CHECK(t::rel_error(stca, semi_aligned) <= 1e-12);
  }
  SUBCASE("phi 10 against oracle plus rank one") {
    auto p = inst.weights;
    p.neighbors.clear();
    Eigen::VectorXd gap = Eigen::VectorXd::Zero(inst.source.values.cols());
    for (Eigen::Index i = 0; i < inst.source.values.rows(); ++i) gap += inst.source.values.row(i).transpose();
    gap /= static_cast<double>(inst.source.values.rows());
    Eigen::VectorXd mu_y = Eigen::VectorXd::Zero(gap.size());
    for (Eigen::Index i = 0; i < inst.target.values.rows(); ++i) mu_y += inst.target.values.row(i).transpose();
    gap -= mu_y / static_cast<double>(inst.target.values.rows());
    const Eigen::MatrixXd slow = gram_oracle(stack(inst.source.values, inst.target.values), t::dense_weights(p)).total() -
                                 10.0 * gap * gap.transpose();
    const auto fast = gram_stca(inst.source, inst.target, d_eff, t_spec, 10.0).total();
    CHECK(t::rel_error(fast, slow) <= 1e-10);
  }
  SUBCASE("negative phi") { CHECK_THROWS_AS(gram_stca(inst.source, inst.target, d_eff, t_spec, -1.0), InputError); }
}

TEST_CASE("gram_cross_term") {
  SUBCASE("gamma zero") {
    std::mt19937_64 rng(51);
    const auto inst = t::random_instance(rng);
    const auto& p = inst.weights;
    const auto g = gram_cross_term(inst.source.values, inst.target.values, assignment_of(p),
                                   CrossWeightSpec{0.0, p.k, p.n_target});
    CHECK(g.total().isZero());
    CHECK(g.constant.isZero());
  }
  SUBCASE("single pair") {
    const Eigen::MatrixXd x = (Eigen::MatrixXd(1, 2) << 1, 0).finished();
    const Eigen::MatrixXd y = (Eigen::MatrixXd(1, 2) << 0, 1).finished();
    KnnAssignment a{1, {0}, {0.0}};
    const auto g = gram_cross_term(x, y, a, CrossWeightSpec{1.0, 1, 1});
    CHECK(g.cross == (Eigen::MatrixXd(2, 2) << -1, 1, 1, -1).finished());
  }
  SUBCASE("random instance against the oracle") {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 10; ++trial) {
      const auto inst = t::random_instance(rng);
      const auto& p = inst.weights;
      const auto fast = gram_cross_term(inst.source.values, inst.target.values, assignment_of(p),
                                        CrossWeightSpec{p.gamma, p.k, p.n_target}).cross;
      const auto slow = gram_oracle(stack(inst.source.values, inst.target.values), t::dense_cross_weights(p)).total();
      CHECK(t::rel_error(fast, slow) <= 1e-10);
    }
  }
  SUBCASE("bad assignments") {
    const Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 2);
    const Eigen::MatrixXd y = Eigen::MatrixXd::Random(2, 2);
    CHECK_THROWS_AS(gram_cross_term(x, y, KnnAssignment{2, {0, 1, 2, 7}, {0, 0, 0, 0}}, CrossWeightSpec{1, 2, 2}), InputError);
    CHECK_THROWS_AS(gram_cross_term(x, y, KnnAssignment{2, {0, 1, 3, 3}, {0, 0, 0, 0}}, CrossWeightSpec{1, 2, 2}), InputError);
    CHECK_THROWS_AS(gram_cross_term(x, y, KnnAssignment{2, {0, 1}, {0, 0}}, CrossWeightSpec{1, 2, 2}), InputError);
  }
}

TEST_CASE("gram_oracle") {
  std::mt19937_64 rng(61);
  const Eigen::MatrixXd z = t::random_points(rng, 30, 4);

  SUBCASE("diagonal does not matter") {
    Eigen::MatrixXd w = Eigen::MatrixXd::Random(30, 30);
    w = (w + w.transpose()).eval();
    Eigen::MatrixXd w0 = w;
    w0.diagonal().setZero();
    Eigen::MatrixXd w1 = w;
    w1.diagonal() = 10.0 * Eigen::VectorXd::Random(30);
    const auto q0 = gram_oracle(z, w0).total();
    CHECK(t::rel_error(gram_oracle(z, w1).total(), q0) <= 1e-12);
    CHECK(t::rel_error(gram_oracle(z, w).total(), q0) <= 1e-12);
  }
  SUBCASE("all ones is a scaled covariance") {
    const Eigen::MatrixXd w = Eigen::MatrixXd::Ones(30, 30);
    const Eigen::RowVectorXd mu = z.colwise().mean();
    const Eigen::MatrixXd c = z.rowwise() - mu;
    const Eigen::MatrixXd cov = c.transpose() * c / 29.0;
    const auto q = gram_oracle(z, w).total();
    CHECK(t::rel_error(q, 30.0 * 29.0 * cov) <= 1e-12);
    CHECK(t::min_abs_cosine(eig_sym(q).vectors, eig_sym(cov).vectors) >= 1.0 - 1e-8);
  }
  SUBCASE("two points") {
    const Eigen::MatrixXd two = z.topRows(2);
    const Eigen::MatrixXd w = (Eigen::MatrixXd(2, 2) << 0, 1, 1, 0).finished();
    const Eigen::VectorXd diff = (two.row(0) - two.row(1)).transpose();
    CHECK(t::rel_error(gram_oracle(two, w).total(), diff * diff.transpose()) <= 1e-14);
  }
  SUBCASE("errors") {
    Eigen::MatrixXd asym = Eigen::MatrixXd::Zero(30, 30);
    asym(0, 1) = 1.0;
    CHECK_THROWS_AS(gram_oracle(z, asym), InputError);
    CHECK_THROWS_AS(gram_oracle(z, Eigen::MatrixXd::Zero(29, 29)), InputError);
  }
}

TEST_CASE("gram_uniform is the sample covariance") {
  std::mt19937_64 rng(71);
  const Eigen::MatrixXd z = t::random_points(rng, 40, 5);
  const Eigen::MatrixXd dense = Eigen::MatrixXd::Constant(40, 40, 1.0 / (40.0 * 39.0));
  CHECK(t::rel_error(gram_uniform(z).total(), t::laplacian_form(z, dense)) <= 1e-12);
  CHECK_THROWS_AS(gram_uniform(z.topRows(1)), InputError);
}

TEST_CASE("property: every accelerated path matches the oracle") {
  std::mt19937_64 rng(81);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = t::random_instance(rng);
    auto p = inst.weights;
    const auto d_eff = block_constants(inst);
    const TargetBlockSpec t_spec{p.beta, p.n_target};
    const auto z = stack(inst.source.values, inst.target.values);
    const auto constant = gram_semi_supervised(inst.source, inst.target, d_eff, t_spec).total();
    const auto cross = gram_cross_term(inst.source.values, inst.target.values, assignment_of(p),
                                       CrossWeightSpec{p.gamma, p.k, p.n_target}).cross;
    const auto dense = t::dense_weights(p);
    CHECK(t::rel_error(constant + cross, gram_oracle(z, dense).total()) <= 1e-10);
    CHECK(t::rel_error(constant + cross, t::laplacian_form(z, dense)) <= 1e-10);
  }
}

TEST_CASE("property: non-negative weights give a positive semidefinite form") {
  std::mt19937_64 rng(91);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = t::random_instance(rng);
    auto& p = inst.weights;
    std::fill(p.alpha.begin(), p.alpha.end(), 0.0);
    const auto d_eff = block_constants(inst);
    const auto q = gram_semi_supervised(inst.source, inst.target, d_eff, TargetBlockSpec{p.beta, p.n_target}).total();
    const auto spectrum = eig_sym(q);
    CHECK(spectrum.values.minCoeff() >= -1e-10 * std::max(1.0, spectrum.values.maxCoeff()));
  }
}

TEST_CASE("property: objective identity for random orthonormal bases") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = t::random_instance(rng);
    const auto& p = inst.weights;
    const auto z = stack(inst.source.values, inst.target.values);
    const auto d_eff = block_constants(inst);
    const Eigen::MatrixXd q =
        gram_semi_supervised(inst.source, inst.target, d_eff, TargetBlockSpec{p.beta, p.n_target}).total() +
        gram_cross_term(inst.source.values, inst.target.values, assignment_of(p), CrossWeightSpec{p.gamma, p.k, p.n_target}).cross;
    const auto d = z.cols();
    const Eigen::Index cols = 1 + trial % d;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(t::random_points(rng, static_cast<std::size_t>(d), static_cast<std::size_t>(d)));
    const Eigen::MatrixXd basis = (qr.householderQ() * Eigen::MatrixXd::Identity(d, d)).leftCols(cols);
    const double direct = t::pairwise_objective(z, t::dense_weights(p), basis);
    const double fast = objective(basis, q);
    const double scale = std::max({std::abs(direct), (basis.transpose() * q.cwiseAbs() * basis).cwiseAbs().maxCoeff(), 1e-300});
    CHECK(std::abs(fast - direct) <= 1e-8 * scale);
  }
}

TEST_CASE("property: translation invariance") {
  std::mt19937_64 rng(111);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = t::random_instance(rng);
    const auto& p = inst.weights;
    const auto d_eff = block_constants(inst);
    const TargetBlockSpec t_spec{p.beta, p.n_target};
    const CrossWeightSpec c_spec{p.gamma, p.k, p.n_target};
    const Eigen::RowVectorXd shift = 50.0 * Eigen::RowVectorXd::Random(inst.source.cols());

    auto moved = inst;
    moved.source.values = inst.source.values.rowwise() + shift;
    moved.target.values = inst.target.values.rowwise() + shift;

    const Eigen::MatrixXd before = gram_stca(inst.source, inst.target, d_eff, t_spec, inst.phi).total() +
                        gram_cross_term(inst.source.values, inst.target.values, assignment_of(p), c_spec).cross;
    const Eigen::MatrixXd after = gram_stca(moved.source, moved.target, d_eff, t_spec, inst.phi).total() +
                       gram_cross_term(moved.source.values, moved.target.values, assignment_of(p), c_spec).cross;
    CHECK(t::rel_error(after, before) <= 1e-9);
  }
}

TEST_CASE("property: common scaling of all weights scales the form") {
  std::mt19937_64 rng(121);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = t::random_instance(rng);
    auto p = inst.weights;
    auto scaled = p;
    const double c = 7.5;
    scaled.delta *= c;
    for (auto& a : scaled.alpha) a *= c;
    scaled.beta *= c;
    scaled.gamma *= c;
    const auto z = stack(inst.source.values, inst.target.values);
    const auto q = gram_oracle(z, t::dense_weights(p)).total();
    const auto qs = gram_oracle(z, t::dense_weights(scaled)).total();
    CHECK(t::rel_error(qs, c * q) <= 1e-12);
    const auto a = eig_sym(q);
    const auto b = eig_sym(qs);
    CHECK((b.values - c * a.values).cwiseAbs().maxCoeff() <= 1e-9 * c * a.values.cwiseAbs().maxCoeff());
    // Signs of the eigenvalues, hence component selection, are unchanged.
    const double tol = 1e-9 * a.values.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < a.values.size(); ++j) {
      if (std::abs(a.values(j)) > tol) CHECK((a.values(j) > 0) == (b.values(j) > 0));
    }
  }
}
