#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace dapca {

/// Observations in rows, features in columns, with optional class labels.
struct Dataset {
  Eigen::MatrixXd values;
  std::optional<std::vector<std::string>> labels;
  std::vector<std::string> feature_names;
  /// Header used for the label column when the dataset is written out.
  std::string label_name = "label";

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
  bool has_labels() const { return labels.has_value(); }
};

/// Dense integer coding of string labels. Classes are sorted lexicographically
/// so the coding is independent of row order.
struct LabelIndex {
  std::vector<std::string> classes;
  std::vector<std::size_t> codes;   // one per row
  std::vector<std::size_t> counts;  // one per class

  std::size_t num_classes() const { return classes.size(); }
};

LabelIndex index_labels(std::span<const std::string> labels);

/// Label column selector: header name or zero-based column index.
using ColumnRef = std::variant<std::string, std::size_t>;

Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<ColumnRef>& label_column = std::nullopt);
void save_csv(const Dataset& dataset, const std::filesystem::path& path);

/// Writes a bare numeric matrix with an optional header.
void save_matrix_csv(const Eigen::MatrixXd& matrix, const std::filesystem::path& path,
                     std::span<const std::string> header = {});

/// Throws InputError unless every entry is finite and labels (if any) match the row count.
void check_dataset(const Dataset& dataset, std::string_view what);

struct Centered {
  Dataset data;
  Eigen::VectorXd mean;
};

Centered center(const Dataset& dataset);

Dataset select_rows(const Dataset& dataset, std::span<const std::size_t> rows);

/// Shortest text that keeps 17 significant digits; round-trips exactly.
std::string format_real(double value);
/// Strict parse of a whole token; throws InputError on trailing garbage.
double parse_real(std::string_view token);

}  // namespace dapca
