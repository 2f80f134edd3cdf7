#include "dapca/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dapca/error.hpp"
#include "dapca/knn.hpp"
#include "dapca/spectral.hpp"

namespace dapca {
namespace {

bool needs_labels(Method m) { return m != Method::pca; }
bool needs_target(Method m) { return m == Method::sspca || m == Method::stca || m == Method::dapca; }

Eigen::MatrixXd stack_rows(const Eigen::MatrixXd& top, const Eigen::MatrixXd& bottom) {
  Eigen::MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

EffectiveBlockConstants source_blocks(const Dataset& source, const FitConfig& config) {
  return build_delta(config.delta, *source.labels);
}

ComponentSelection solve(const Eigen::MatrixXd& q, std::size_t q_requested, const std::string& stage) {
  try {
    return select_components(eig_sym(q), q_requested);
  } catch (const FitError& e) {
    throw FitError(stage, e.what());
  }
}

std::size_t changed_slots(const KnnAssignment& a, const KnnAssignment& b) {
  std::size_t changed = 0;
  for (std::size_t i = 0; i < a.indices.size(); ++i) changed += a.indices[i] != b.indices[i];
  return changed;
}

ProjectionModel make_model(const ComponentSelection& sel, const FitConfig& config) {
  ProjectionModel model;
  model.basis = sel.basis;
  model.eigenvalues = sel.eigenvalues;
  model.method = config.method;
  model.config = config;
  model.diagnostics.truncated_components = sel.truncated;
  return model;
}

KnnAssignment initial_assignment(const Dataset& source, const Dataset& target, const FitConfig& config) {
  if (config.knn_space_first_iteration == KnnSpace::raw) {
    return knn_match(source.values, target.values, config.k);
  }
  const auto joint = gram_uniform(stack_rows(source.values, target.values));
  const auto sel = solve(joint.total(), config.q_requested, "dapca initial pca");
  return knn_match(source.values * sel.basis, target.values * sel.basis, config.k);
}

ProjectionModel fit_dapca(const Dataset& source, const Dataset& target, const FitConfig& config) {
  if (target.rows() == 0) throw InputError("dapca needs a non-empty target");
  const GramMatrix constant = constant_gram(source, &target, config);
  const CrossWeightSpec cross_spec{config.gamma, config.k, target.rows()};

  KnnAssignment assignment = initial_assignment(source, target, config);
  std::vector<KnnAssignment> history;

  Diagnostics diag;
  ComponentSelection best;
  KnnAssignment best_assignment;
  double best_objective = -std::numeric_limits<double>::infinity();

  for (std::size_t it = 1;; ++it) {
    const auto cross = gram_cross_term(source.values, target.values, assignment, cross_spec);
    const Eigen::MatrixXd q = constant.constant + cross.cross;
    const auto sel = solve(q, config.q_requested, "dapca iteration " + std::to_string(it));
    const double value = objective(sel.basis, q);
    diag.objective_trace.push_back(value);
    diag.iterations = it;
    if (value > best_objective) {
      best_objective = value;
      best = sel;
      best_assignment = assignment;
    }

    auto next = knn_match(source.values * sel.basis, target.values * sel.basis, config.k);
    diag.assignment_changes.push_back(changed_slots(assignment, next));

    if (next.same_pairs(assignment)) {
      diag.stop_reason = StopReason::assignments_stable;
      diag.knn_stable = true;
      break;
    }
    if (it > 1) {
      const double prev = diag.objective_trace[it - 2];
      const double scale = std::max(std::abs(prev), std::numeric_limits<double>::min());
      if (value - prev < config.objective_tolerance * scale) {
        diag.stop_reason = StopReason::objective_stalled;
        break;
      }
    }
    const bool revisits = std::any_of(history.begin(), history.end(),
                                      [&next](const KnnAssignment& seen) { return seen.same_pairs(next); });
    if (revisits) {
      diag.stop_reason = StopReason::cycle;
      break;
    }
    if (it >= config.max_iterations) {
      diag.stop_reason = StopReason::max_iterations;
      break;
    }
    history.push_back(std::move(assignment));
    assignment = std::move(next);
  }

  ProjectionModel model = make_model(best, config);
  const auto truncated = model.diagnostics.truncated_components;
  model.diagnostics = std::move(diag);
  model.diagnostics.truncated_components = truncated;
  model.diagnostics.final_assignment = std::move(best_assignment);
  return model;
}

}  // namespace

GramMatrix constant_gram(const Dataset& source, const Dataset* target, const FitConfig& config) {
  switch (config.method) {
    case Method::pca:
      if (target != nullptr && target->rows() > 0) {
        if (target->cols() != source.cols()) throw InputError("source and target feature counts differ");
        return gram_uniform(stack_rows(source.values, target->values));
      }
      return gram_uniform(source.values);
    case Method::spca:
      return gram_supervised(source, source_blocks(source, config));
    case Method::sspca:
    case Method::dapca:
      return gram_semi_supervised(source, *target, source_blocks(source, config),
                                  TargetBlockSpec{config.beta, target->rows()});
    case Method::stca:
      return gram_stca(source, *target, source_blocks(source, config),
                       TargetBlockSpec{config.beta, target->rows()}, config.phi);
  }
  throw InputError("unknown method");
}

ProjectionModel fit(const Dataset& source, const Dataset& target, const FitConfig& config) {
  check_fit_config(config);
  check_dataset(source, "source");
  check_dataset(target, "target");
  if (needs_labels(config.method) && !source.has_labels()) {
    throw InputError(std::string(to_string(config.method)) + " needs source labels");
  }
  if (target.rows() > 0 && target.cols() != source.cols()) {
    throw InputError("source has " + std::to_string(source.cols()) + " features, target has " +
                     std::to_string(target.cols()));
  }
  if (config.method == Method::dapca) return fit_dapca(source, target, config);

  const GramMatrix g = constant_gram(source, &target, config);
  const Eigen::MatrixXd q = g.total();
  const auto sel = solve(q, config.q_requested, std::string(to_string(config.method)));
  ProjectionModel model = make_model(sel, config);
  model.diagnostics.objective_trace.push_back(objective(sel.basis, q));
  model.diagnostics.assignment_changes.push_back(0);
  model.diagnostics.iterations = 1;
  model.diagnostics.stop_reason = StopReason::single_shot;
  return model;
}

ProjectionModel fit(const Dataset& source, const FitConfig& config) {
  if (needs_target(config.method)) {
    throw InputError(std::string(to_string(config.method)) + " needs a target dataset");
  }
  Dataset empty;
  empty.values.resize(0, source.values.cols());
  return fit(source, empty, config);
}

}  // namespace dapca
