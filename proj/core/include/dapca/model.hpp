#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dapca/config.hpp"
#include "dapca/dataset.hpp"
#include "dapca/knn.hpp"

namespace dapca {

enum class StopReason { single_shot, assignments_stable, objective_stalled, cycle, max_iterations };

std::string_view to_string(StopReason reason);

struct Diagnostics {
  std::vector<double> objective_trace;          // one entry per eigen-solve
  std::vector<std::size_t> assignment_changes;  // changed neighbour slots after each solve
  std::size_t iterations = 0;
  StopReason stop_reason = StopReason::single_shot;
  bool knn_stable = false;
  std::size_t truncated_components = 0;
  KnnAssignment final_assignment;
};

struct ProjectionModel {
  Eigen::MatrixXd basis;        // d x q, orthonormal columns
  Eigen::VectorXd eigenvalues;  // descending, length q
  Method method = Method::pca;
  FitConfig config;
  Diagnostics diagnostics;

  std::size_t dim() const { return static_cast<std::size_t>(basis.rows()); }
  std::size_t components() const { return static_cast<std::size_t>(basis.cols()); }
};

/// data * basis. Throws InputError on a column-count mismatch.
Eigen::MatrixXd project(const ProjectionModel& model, const Eigen::MatrixXd& data);
Eigen::MatrixXd project(const ProjectionModel& model, const Dataset& data);

/// Writes `<stem>.meta` (key=value lines) and `<stem>.csv` (basis rows).
void save_model(const ProjectionModel& model, const std::filesystem::path& stem);
ProjectionModel load_model(const std::filesystem::path& stem);

/// Iteration, objective and assignment-change columns.
void save_diagnostics_csv(const Diagnostics& diagnostics, const std::filesystem::path& path);

}  // namespace dapca
