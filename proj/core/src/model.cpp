#include "dapca/model.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "dapca/error.hpp"

namespace dapca {
namespace {

constexpr std::string_view kModelFormat = "dapca-model/1";

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  return stem.string() + suffix;
}

std::string join(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_real(v(i));
  }
  return out;
}

std::size_t parse_count(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const auto value = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(key);
    return static_cast<std::size_t>(value);
  } catch (const std::exception&) {
    throw InputError("model metadata: bad integer for '" + key + "': '" + text + "'");
  }
}

}  // namespace

void check_fit_config(const FitConfig& config) {
  if (config.q_requested == 0) throw InputError("q must be at least 1");
  if (config.k == 0) throw InputError("k must be at least 1");
  if (config.max_iterations == 0) throw InputError("max_iterations must be at least 1");
  for (const auto& [name, value] : {std::pair{"beta", config.beta}, {"gamma", config.gamma},
                                    {"phi", config.phi}, {"objective_tolerance", config.objective_tolerance}}) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw InputError(std::string(name) + " must be a non-negative number");
    }
  }
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::pca: return "pca";
    case Method::spca: return "spca";
    case Method::sspca: return "sspca";
    case Method::stca: return "stca";
    case Method::dapca: return "dapca";
  }
  return "?";
}

std::string_view to_string(KnnSpace space) { return space == KnnSpace::raw ? "raw" : "pca"; }

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::single_shot: return "single_shot";
    case StopReason::assignments_stable: return "assignments_stable";
    case StopReason::objective_stalled: return "objective_stalled";
    case StopReason::cycle: return "cycle";
    case StopReason::max_iterations: return "max_iterations";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  for (auto m : {Method::pca, Method::spca, Method::sspca, Method::stca, Method::dapca}) {
    if (to_string(m) == text) return m;
  }
  throw InputError("unknown method '" + std::string(text) + "' (pca|spca|sspca|stca|dapca)");
}

KnnSpace parse_knn_space(std::string_view text) {
  if (text == "raw") return KnnSpace::raw;
  if (text == "pca") return KnnSpace::pca;
  throw InputError("unknown kNN space '" + std::string(text) + "' (raw|pca)");
}

Eigen::MatrixXd project(const ProjectionModel& model, const Eigen::MatrixXd& data) {
  if (static_cast<std::size_t>(data.cols()) != model.dim()) {
    throw InputError("data has " + std::to_string(data.cols()) + " features, model expects " +
                     std::to_string(model.dim()));
  }
  return data * model.basis;
}

Eigen::MatrixXd project(const ProjectionModel& model, const Dataset& data) {
  return project(model, data.values);
}

void save_model(const ProjectionModel& model, const std::filesystem::path& stem) {
  const auto meta_path = with_suffix(stem, ".meta");
  std::ofstream meta(meta_path);
  if (!meta) throw InputError("cannot open " + meta_path.string() + " for writing");

  const auto& c = model.config;
  const auto& diag = model.diagnostics;
  meta << "format=" << kModelFormat << '\n'
       << "method=" << to_string(model.method) << '\n'
       << "dimension=" << model.dim() << '\n'
       << "components=" << model.components() << '\n'
       << "eigenvalues=" << join(model.eigenvalues) << '\n'
       << "q_requested=" << c.q_requested << '\n'
       << "delta=" << to_string(c.delta.between_class) << '\n'
       << "alpha=" << to_string(c.delta.within_class_attraction) << '\n'
       << "beta=" << format_real(c.beta) << '\n'
       << "gamma=" << format_real(c.gamma) << '\n'
       << "phi=" << format_real(c.phi) << '\n'
       << "k=" << c.k << '\n'
       << "max_iterations=" << c.max_iterations << '\n'
       << "knn_space=" << to_string(c.knn_space_first_iteration) << '\n'
       << "objective_tolerance=" << format_real(c.objective_tolerance) << '\n'
       << "seed=" << c.seed << '\n'
       << "iterations=" << diag.iterations << '\n'
       << "stop_reason=" << to_string(diag.stop_reason) << '\n'
       << "knn_stable=" << (diag.knn_stable ? 1 : 0) << '\n'
       << "truncated_components=" << diag.truncated_components << '\n'
       << "objective="
       << (diag.objective_trace.empty() ? std::string("nan") : format_real(diag.objective_trace.back()))
       << '\n';
  if (!meta) throw InputError("failed writing " + meta_path.string());

  std::vector<std::string> header;
  for (std::size_t j = 0; j < model.components(); ++j) header.push_back("c" + std::to_string(j + 1));
  save_matrix_csv(model.basis, with_suffix(stem, ".csv"), header);
}

ProjectionModel load_model(const std::filesystem::path& stem) {
  const auto meta_path = with_suffix(stem, ".meta");
  std::ifstream in(meta_path);
  if (!in) throw InputError("cannot open model metadata " + meta_path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("model metadata: malformed line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  const auto get = [&kv](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw InputError("model metadata: missing key '" + key + "'");
    return it->second;
  };
  if (get("format") != kModelFormat) throw InputError("model metadata: unsupported format");

  ProjectionModel model;
  model.method = parse_method(get("method"));
  const auto d = parse_count(get("dimension"), "dimension");
  const auto q = parse_count(get("components"), "components");

  auto& c = model.config;
  c.method = model.method;
  c.q_requested = parse_count(get("q_requested"), "q_requested");
  c.delta.between_class = parse_between_class(get("delta"));
  c.delta.within_class_attraction = parse_within_class(get("alpha"));
  c.beta = parse_real(get("beta"));
  c.gamma = parse_real(get("gamma"));
  c.phi = parse_real(get("phi"));
  c.k = parse_count(get("k"), "k");
  c.max_iterations = parse_count(get("max_iterations"), "max_iterations");
  c.knn_space_first_iteration = parse_knn_space(get("knn_space"));
  c.objective_tolerance = parse_real(get("objective_tolerance"));
  c.seed = parse_count(get("seed"), "seed");

  auto& diag = model.diagnostics;
  diag.iterations = parse_count(get("iterations"), "iterations");
  diag.knn_stable = get("knn_stable") == "1";
  diag.truncated_components = parse_count(get("truncated_components"), "truncated_components");
  const auto& reason = get("stop_reason");
  for (auto r : {StopReason::single_shot, StopReason::assignments_stable, StopReason::objective_stalled,
                 StopReason::cycle, StopReason::max_iterations}) {
    if (to_string(r) == reason) diag.stop_reason = r;
  }

  model.eigenvalues.resize(static_cast<Eigen::Index>(q));
  {
    std::istringstream list(get("eigenvalues"));
    std::string token;
    Eigen::Index i = 0;
    while (std::getline(list, token, ',')) {
      if (i >= model.eigenvalues.size()) throw InputError("model metadata: too many eigenvalues");
      model.eigenvalues(i++) = parse_real(token);
    }
    if (i != model.eigenvalues.size()) throw InputError("model metadata: eigenvalue count mismatch");
  }

  const auto basis = load_csv(with_suffix(stem, ".csv"));
  if (basis.rows() != d || basis.cols() != q) {
    throw InputError("model basis is " + std::to_string(basis.rows()) + "x" + std::to_string(basis.cols()) +
                     ", metadata says " + std::to_string(d) + "x" + std::to_string(q));
  }
  model.basis = basis.values;
  return model;
}

void save_diagnostics_csv(const Diagnostics& diagnostics, const std::filesystem::path& path) {
  const auto n = diagnostics.objective_trace.size();
  Eigen::MatrixXd table(static_cast<Eigen::Index>(n), 3);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    table(r, 0) = static_cast<double>(i + 1);
    table(r, 1) = diagnostics.objective_trace[i];
    table(r, 2) = i < diagnostics.assignment_changes.size()
                      ? static_cast<double>(diagnostics.assignment_changes[i])
                      : 0.0;
  }
  const std::vector<std::string> header{"iteration", "objective", "assignment_changes"};
  save_matrix_csv(table, path, header);
}

}  // namespace dapca
