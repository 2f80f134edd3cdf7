#include "dapca/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "dapca/error.hpp"

namespace dapca {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(unquote(line.substr(start)));
      break;
    }
    cells.push_back(unquote(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

bool is_real(std::string_view token) {
  try {
    parse_real(token);
    return true;
  } catch (const InputError&) {
    return false;
  }
}

void check_cell_text(const std::string& text) {
  if (text.find_first_of(",\n\r\"") != std::string::npos) {
    throw InputError("cannot write CSV cell containing a separator or quote: '" + text + "'");
  }
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, result.ptr);
}

double parse_real(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto result = std::from_chars(token.data(), end, value);
  if (token.empty() || result.ec != std::errc{} || result.ptr != end || !std::isfinite(value)) {
    throw InputError("not a finite number: '" + std::string(token) + "'");
  }
  return value;
}

LabelIndex index_labels(std::span<const std::string> labels) {
  std::map<std::string, std::size_t> order;
  for (const auto& l : labels) order.emplace(l, 0);
  LabelIndex index;
  index.classes.reserve(order.size());
  for (auto& [name, code] : order) {
    code = index.classes.size();
    index.classes.push_back(name);
  }
  index.counts.assign(index.classes.size(), 0);
  index.codes.reserve(labels.size());
  for (const auto& l : labels) {
    const auto code = order.at(l);
    index.codes.push_back(code);
    ++index.counts[code];
  }
  return index;
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<ColumnRef>& label_column) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open CSV file " + path.string());

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (trim(line).empty()) continue;
    rows.push_back(split_row(line));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw InputError("empty CSV table: " + path.string());

  const std::size_t width = rows.front().size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      std::ostringstream msg;
      msg << path.string() << ": line " << line_numbers[r] << " has " << rows[r].size()
          << " cells, expected " << width;
      throw InputError(msg.str());
    }
  }

  std::optional<std::size_t> label_col;
  bool has_header = false;
  if (label_column) {
    if (const auto* name = std::get_if<std::string>(&*label_column)) {
      const auto& first = rows.front();
      const auto it = std::find(first.begin(), first.end(), *name);
      if (it == first.end()) {
        throw InputError(path.string() + ": no label column named '" + *name + "'");
      }
      label_col = static_cast<std::size_t>(it - first.begin());
      has_header = true;
    } else {
      label_col = std::get<std::size_t>(*label_column);
      if (*label_col >= width) {
        throw InputError(path.string() + ": label column index " + std::to_string(*label_col) +
                         " out of range for " + std::to_string(width) + " columns");
      }
    }
  }
  if (!has_header) {
    const auto& first = rows.front();
    for (std::size_t c = 0; c < width; ++c) {
      if (c != label_col && !is_real(first[c])) {
        has_header = true;
        break;
      }
    }
  }

  const std::size_t first_data = has_header ? 1 : 0;
  const std::size_t n = rows.size() - first_data;
  const std::size_t d = width - (label_col ? 1 : 0);
  if (n == 0) throw InputError("CSV table has a header but no data rows: " + path.string());

  Dataset ds;
  ds.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  if (has_header) {
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_col) {
        ds.label_name = rows.front()[c];
      } else {
        ds.feature_names.push_back(rows.front()[c]);
      }
    }
  }
  if (label_col) ds.labels.emplace();

  for (std::size_t r = 0; r < n; ++r) {
    const auto& cells = rows[first_data + r];
    Eigen::Index out_col = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_col) {
        ds.labels->push_back(cells[c]);
        continue;
      }
      try {
        ds.values(static_cast<Eigen::Index>(r), out_col++) = parse_real(cells[c]);
      } catch (const InputError&) {
        std::ostringstream msg;
        msg << path.string() << ": line " << line_numbers[first_data + r] << ", column " << c;
        if (has_header) msg << " ('" << rows.front()[c] << "')";
        msg << ": non-numeric value '" << cells[c] << "'";
        throw InputError(msg.str());
      }
    }
  }
  return ds;
}

void save_matrix_csv(const Eigen::MatrixXd& matrix, const std::filesystem::path& path,
                     std::span<const std::string> header) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      check_cell_text(header[c]);
      out << (c ? "," : "") << header[c];
    }
    out << '\n';
  }
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      out << (c ? "," : "") << format_real(matrix(r, c));
    }
    out << '\n';
  }
  if (!out) throw InputError("failed writing " + path.string());
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path) {
  check_dataset(dataset, "dataset");
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");

  const bool header = !dataset.feature_names.empty() || dataset.has_labels();
  if (header) {
    for (std::size_t c = 0; c < dataset.cols(); ++c) {
      const std::string name = dataset.feature_names.empty() ? "x" + std::to_string(c + 1)
                                                             : dataset.feature_names[c];
      check_cell_text(name);
      out << (c ? "," : "") << name;
    }
    if (dataset.has_labels()) {
      check_cell_text(dataset.label_name);
      out << (dataset.cols() ? "," : "") << dataset.label_name;
    }
    out << '\n';
  }
  for (std::size_t r = 0; r < dataset.rows(); ++r) {
    for (std::size_t c = 0; c < dataset.cols(); ++c) {
      out << (c ? "," : "")
          << format_real(dataset.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    }
    if (dataset.has_labels()) {
      const auto& label = (*dataset.labels)[r];
      check_cell_text(label);
      out << (dataset.cols() ? "," : "") << label;
    }
    out << '\n';
  }
  if (!out) throw InputError("failed writing " + path.string());
}

void check_dataset(const Dataset& dataset, std::string_view what) {
  if (!dataset.values.allFinite()) {
    throw InputError(std::string(what) + " contains non-finite values");
  }
  if (dataset.labels && dataset.labels->size() != dataset.rows()) {
    throw InputError(std::string(what) + " has " + std::to_string(dataset.labels->size()) +
                     " labels for " + std::to_string(dataset.rows()) + " rows");
  }
  if (!dataset.feature_names.empty() && dataset.feature_names.size() != dataset.cols()) {
    throw InputError(std::string(what) + " has mismatched feature names");
  }
}

Centered center(const Dataset& dataset) {
  Centered result{dataset, Eigen::VectorXd::Zero(dataset.values.cols())};
  if (dataset.rows() == 0) return result;
  result.mean = dataset.values.colwise().mean().transpose();
  result.data.values.rowwise() -= result.mean.transpose();
  return result;
}

Dataset select_rows(const Dataset& dataset, std::span<const std::size_t> rows) {
  Dataset out;
  out.feature_names = dataset.feature_names;
  out.label_name = dataset.label_name;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), dataset.values.cols());
  if (dataset.labels) out.labels.emplace();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= dataset.rows()) throw InputError("row index out of range");
    out.values.row(static_cast<Eigen::Index>(i)) = dataset.values.row(static_cast<Eigen::Index>(rows[i]));
    if (dataset.labels) out.labels->push_back((*dataset.labels)[rows[i]]);
  }
  return out;
}

}  // namespace dapca
