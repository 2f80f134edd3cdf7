#include "dapca/weights.hpp"

#include <cmath>
#include <sstream>

#include "dapca/dataset.hpp"
#include "dapca/error.hpp"

namespace dapca {
namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  // "1," and "a;" mark one-element lists.
  if (parts.size() > 1 && parts.back().empty()) parts.pop_back();
  return parts;
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) out.push_back(parse_real(part));
  return out;
}

double alpha_for(const WithinClassSpec& spec, std::size_t cls, std::size_t n) {
  if (const auto* scalar = std::get_if<double>(&spec)) return *scalar;
  const auto& per_class = std::get<std::vector<double>>(spec);
  if (per_class.size() != n) {
    throw InputError("within-class attraction has " + std::to_string(per_class.size()) +
                     " entries for " + std::to_string(n) + " classes");
  }
  return per_class[cls];
}

Eigen::MatrixXd between_matrix(const BetweenClassSpec& spec, std::size_t n) {
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(size, size);
  if (const auto* uniform = std::get_if<UniformRepulsion>(&spec)) {
    if (!(uniform->value >= 0.0) || !std::isfinite(uniform->value)) {
      throw InputError("class repulsion must be a non-negative number");
    }
    delta.setConstant(uniform->value);
  } else if (const auto* pos = std::get_if<ClassPositions>(&spec)) {
    if (pos->positions.size() != n) {
      throw InputError("repulsion vector has " + std::to_string(pos->positions.size()) +
                       " entries for " + std::to_string(n) + " classes");
    }
    for (Eigen::Index p = 0; p < size; ++p) {
      for (Eigen::Index r = 0; r < size; ++r) {
        delta(p, r) = std::abs(pos->positions[p] - pos->positions[r]);
      }
    }
    if (!delta.allFinite()) throw InputError("repulsion vector must be finite");
  } else {
    const auto& m = std::get<RepulsionMatrix>(spec).values;
    if (m.rows() != size || m.cols() != size) {
      throw InputError("repulsion matrix is " + std::to_string(m.rows()) + "x" +
                       std::to_string(m.cols()) + " for " + std::to_string(n) + " classes");
    }
    if (!m.allFinite()) throw InputError("repulsion matrix must be finite");
    for (Eigen::Index p = 0; p < size; ++p) {
      for (Eigen::Index r = 0; r < size; ++r) {
        if (p == r) continue;
        if (m(p, r) != m(r, p)) throw InputError("repulsion matrix must be symmetric");
        if (m(p, r) < 0.0) throw InputError("repulsion matrix off-diagonal entries must be >= 0");
      }
    }
    delta = m;
  }
  return delta;
}

}  // namespace

EffectiveBlockConstants build_delta(const DeltaSpec& spec, std::span<const std::size_t> class_counts) {
  const std::size_t n = class_counts.size();
  if (n == 0) throw InputError("supervised weights need at least one class");
  for (std::size_t p = 0; p < n; ++p) {
    if (class_counts[p] < 2) {
      throw InputError("class " + std::to_string(p) + " has " + std::to_string(class_counts[p]) +
                       " member(s); supervised weights need at least 2");
    }
  }
  const Eigen::MatrixXd delta = between_matrix(spec.between_class, n);

  EffectiveBlockConstants out;
  out.class_counts.assign(class_counts.begin(), class_counts.end());
  const auto size = static_cast<Eigen::Index>(n);
  out.coefficients.resize(size, size);
  for (Eigen::Index p = 0; p < size; ++p) {
    const double np = static_cast<double>(class_counts[p]);
    for (Eigen::Index r = 0; r < size; ++r) {
      if (p == r) {
        const double alpha = alpha_for(spec.within_class_attraction, static_cast<std::size_t>(p), n);
        if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
          throw InputError("within-class attraction must be a non-negative number");
        }
        out.coefficients(p, p) = -alpha / (np * (np - 1.0));
      } else {
        const double nr = static_cast<double>(class_counts[r]);
        out.coefficients(p, r) = delta(p, r) / (2.0 * np * nr);
      }
    }
  }
  return out;
}

EffectiveBlockConstants build_delta(const DeltaSpec& spec, std::span<const std::string> labels) {
  const auto index = index_labels(labels);
  return build_delta(spec, index.counts);
}

Eigen::VectorXd row_sum_constants(const EffectiveBlockConstants& d_eff) {
  const auto n = static_cast<Eigen::Index>(d_eff.num_classes());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double count = static_cast<double>(d_eff.class_counts[k]);
      w(p) += d_eff.coefficients(p, k) * (k == p ? count - 1.0 : count);
    }
  }
  return w;
}

double TargetBlockSpec::per_pair_weight() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InputError("beta must be a non-negative number");
  if (beta == 0.0) return 0.0;
  if (n_target < 2) throw InputError("target repulsion needs at least 2 target rows");
  const double ny = static_cast<double>(n_target);
  return beta / (ny * (ny - 1.0));
}

double CrossWeightSpec::per_pair_weight() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InputError("gamma must be a non-negative number");
  if (k == 0) throw InputError("neighbour count k must be at least 1");
  if (n_target == 0) throw InputError("cross weights need a non-empty target");
  return -gamma / (static_cast<double>(k) * static_cast<double>(n_target));
}

BetweenClassSpec parse_between_class(std::string_view text) {
  if (text.empty()) throw InputError("empty class repulsion specification");
  if (text.find(';') != std::string_view::npos) {
    const auto rows = split(text, ';');
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto entries = parse_list(rows[r]);
      if (entries.size() != rows.size()) throw InputError("inline repulsion matrix must be square");
      for (std::size_t c = 0; c < entries.size(); ++c) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = entries[c];
      }
    }
    return RepulsionMatrix{m};
  }
  if (text.find(',') != std::string_view::npos) return ClassPositions{parse_list(text)};
  try {
    return UniformRepulsion{parse_real(text)};
  } catch (const InputError&) {
  }
  const auto table = load_csv(std::string(text));
  return RepulsionMatrix{table.values};
}

WithinClassSpec parse_within_class(std::string_view text) {
  if (text.find(',') != std::string_view::npos) return parse_list(text);
  return parse_real(text);
}

std::string to_string(const BetweenClassSpec& spec) {
  std::ostringstream out;
  if (const auto* uniform = std::get_if<UniformRepulsion>(&spec)) {
    out << format_real(uniform->value);
  } else if (const auto* pos = std::get_if<ClassPositions>(&spec)) {
    for (std::size_t i = 0; i < pos->positions.size(); ++i) {
      out << (i ? "," : "") << format_real(pos->positions[i]);
    }
    // A single position would read back as a scalar.
    if (pos->positions.size() == 1) out << ",";
  } else {
    const auto& m = std::get<RepulsionMatrix>(spec).values;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r) out << ";";
      for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_real(m(r, c));
    }
    if (m.rows() == 1) out << ";";
  }
  return out.str();
}

std::string to_string(const WithinClassSpec& spec) {
  if (const auto* scalar = std::get_if<double>(&spec)) return format_real(*scalar);
  std::ostringstream out;
  const auto& v = std::get<std::vector<double>>(spec);
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << format_real(v[i]);
  return out.str();
}

}  // namespace dapca
