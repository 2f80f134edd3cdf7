#include "cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dapca/dataset.hpp"
#include "dapca/error.hpp"
#include "dapca/fit.hpp"
#include "dapca/model.hpp"
#include "dapca/toy.hpp"
#include "dapca/validate.hpp"

namespace dapca::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kResolvedConfig = "resolved_config.ini";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------
// Flag groups

struct FitFlags {
  std::string method;
  std::size_t q;
  std::string alpha;
  std::string delta;
  double beta;
  double gamma;
  double phi;
  std::size_t k;
  std::size_t max_iter;
  std::string knn_space;
  double objective_tol;

  FitFlags() {
    const FitConfig defaults;
    method = std::string(to_string(defaults.method));
    q = defaults.q_requested;
    alpha = to_string(defaults.delta.within_class_attraction);
    delta = to_string(defaults.delta.between_class);
    beta = defaults.beta;
    gamma = defaults.gamma;
    phi = defaults.phi;
    k = defaults.k;
    max_iter = defaults.max_iterations;
    knn_space = std::string(to_string(defaults.knn_space_first_iteration));
    objective_tol = defaults.objective_tolerance;
  }

  FitConfig to_config(std::uint64_t seed) const {
    FitConfig c;
    c.method = parse_method(method);
    c.q_requested = q;
    c.delta.within_class_attraction = parse_within_class(alpha);
    c.delta.between_class = parse_between_class(delta);
    c.beta = beta;
    c.gamma = gamma;
    c.phi = phi;
    c.k = k;
    c.max_iterations = max_iter;
    c.knn_space_first_iteration = parse_knn_space(knn_space);
    c.objective_tolerance = objective_tol;
    c.seed = seed;
    check_fit_config(c);
    return c;
  }
};

void add_fit_flags(CLI::App& sub, FitFlags& f) {
  sub.add_option("--method", f.method, "pca|spca|sspca|stca|dapca")->capture_default_str();
  sub.add_option("--q", f.q, "Number of components requested")->capture_default_str();
  sub.add_option("--alpha", f.alpha, "Within-class attraction: scalar or per-class list")->capture_default_str();
  sub.add_option("--delta", f.delta, "Class repulsion: scalar, per-class positions a,b,c, inline matrix a,b;c,d or matrix CSV path")
      ->capture_default_str();
  sub.add_option("--beta", f.beta, "Target repulsion")->capture_default_str();
  sub.add_option("--gamma", f.gamma, "Source-target kNN attraction")->capture_default_str();
  sub.add_option("--phi", f.phi, "STCA mean attraction")->capture_default_str();
  sub.add_option("--k", f.k, "Neighbours per target row")->capture_default_str();
  sub.add_option("--max-iter", f.max_iter, "DAPCA iteration cap")->capture_default_str();
  sub.add_option("--knn-space", f.knn_space, "First-iteration kNN space: raw|pca")->capture_default_str();
  sub.add_option("--objective-tol", f.objective_tol, "Relative objective increase that ends DAPCA")
      ->capture_default_str();
}

struct DataFlags {
  std::string source;
  std::string target;
  std::string labels = "label";
};

// ---------------------------------------------------------------------------
// Helpers

bool header_has_column(const fs::path& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open CSV file " + path.string());
  std::string line;
  std::getline(in, line);
  std::istringstream cells(line);
  std::string cell;
  while (std::getline(cells, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    if (cell == name || cell == "\"" + name + "\"") return true;
  }
  return false;
}

/// Loads a table, treating `label_name` as the label column when present.
Dataset load_table(const std::string& path, const std::string& label_name) {
  if (!label_name.empty() && header_has_column(path, label_name)) {
    return load_csv(path, ColumnRef{label_name});
  }
  return load_csv(path);
}

std::vector<std::string> load_label_file(const std::string& path, const std::string& label_name) {
  const Dataset table = header_has_column(path, label_name) ? load_csv(path, ColumnRef{label_name})
                                                            : load_csv(path, ColumnRef{std::size_t{0}});
  return *table.labels;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << text;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InputError("cannot create output directory " + dir.string());
}

void echo_config(const CLI::App& sub, const fs::path& path) {
  write_text(path, sub.config_to_str(true, false));
}

std::string fmt(double v) { return std::isnan(v) ? std::string("nan") : format_real(v); }

fs::path model_stem(const std::string& path) {
  return fs::is_directory(path) ? fs::path(path) / "model" : fs::path(path);
}

// ---------------------------------------------------------------------------
// Config file expansion: flat key=value lines become leading flags.

std::string unquote(std::string s) {
  const auto trim = [](std::string& t) {
    const auto b = t.find_first_not_of(" \t\r");
    const auto e = t.find_last_not_of(" \t\r");
    t = b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
  };
  trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string> config_tokens(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#' || line[first] == ';' || line[first] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("config file: expected key=value, got '" + line + "'");
    const std::string key = unquote(line.substr(0, eq));
    std::string value = unquote(line.substr(eq + 1));
    std::vector<std::string> values;
    if (!value.empty() && value.front() == '[' && value.back() == ']') {
      // Split on commas outside quotes.
      std::string item;
      char quote = 0;
      for (const char ch : value.substr(1, value.size() - 2) + ",") {
        if (quote != 0) {
          if (ch == quote) quote = 0;
          item += ch;
        } else if (ch == '"' || ch == '\'') {
          quote = ch;
          item += ch;
        } else if (ch == ',') {
          item = unquote(item);
          if (!item.empty()) values.push_back(item);
          item.clear();
        } else {
          item += ch;
        }
      }
    } else if (!value.empty()) {
      values.push_back(value);
    }
    if (values.empty()) continue;
    tokens.push_back("--" + key);
    tokens.insert(tokens.end(), values.begin(), values.end());
  }
  return tokens;
}

std::vector<std::string> expand_config(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  if (args.size() < 2) return args;
  std::vector<std::string> rest;
  std::vector<std::string> from_file;
  for (std::size_t i = 2; i < args.size(); ++i) {
    std::string file;
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    const auto tokens = config_tokens(file);
    from_file.insert(from_file.end(), tokens.begin(), tokens.end());
  }
  std::vector<std::string> out{args[0], args[1]};
  out.insert(out.end(), from_file.begin(), from_file.end());
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

// ---------------------------------------------------------------------------
// Sweep grid

struct SweepAxis {
  std::string name;
  std::vector<std::string> values;
};

std::vector<SweepAxis> parse_sweep(const std::vector<std::string>& tokens) {
  static const std::vector<std::string> known{"alpha", "beta", "gamma", "phi", "k", "delta", "q"};
  std::vector<SweepAxis> axes;
  for (const auto& token : tokens) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw InputError("sweep axis must look like name=v1,v2: '" + token + "'");
    SweepAxis axis{token.substr(0, eq), {}};
    if (std::find(known.begin(), known.end(), axis.name) == known.end()) {
      throw InputError("cannot sweep over '" + axis.name + "'");
    }
    std::istringstream items(token.substr(eq + 1));
    std::string item;
    while (std::getline(items, item, ',')) {
      if (!item.empty()) axis.values.push_back(item);
    }
    if (axis.values.empty()) throw InputError("sweep axis '" + axis.name + "' has no values");
    axes.push_back(std::move(axis));
  }
  return axes;
}

void apply_axis(FitFlags& f, const std::string& name, const std::string& value) {
  if (name == "alpha") f.alpha = value;
  else if (name == "delta") f.delta = value;
  else if (name == "beta") f.beta = parse_real(value);
  else if (name == "gamma") f.gamma = parse_real(value);
  else if (name == "phi") f.phi = parse_real(value);
  else if (name == "k") f.k = static_cast<std::size_t>(parse_real(value));
  else if (name == "q") f.q = static_cast<std::size_t>(parse_real(value));
}

// ---------------------------------------------------------------------------
// Subcommands

struct ToygenFlags {
  ToyConfig toy;
  std::vector<double> mean1{0.0, 0.0, 0.0};
  std::vector<double> mean2{4.0, 0.0, 0.0};
  std::vector<double> cov{1.0, 1.0, 4.0};
  std::string out;
};

int cmd_toygen(const CLI::App& sub, ToygenFlags& f, std::ostream& out) {
  for (std::size_t i = 0; i < 3; ++i) {
    f.toy.class_means[0][i] = f.mean1[i];
    f.toy.class_means[1][i] = f.mean2[i];
    f.toy.shared_covariance_diagonal[i] = f.cov[i];
  }
  const auto toy = generate_toy(f.toy);
  const fs::path dir(f.out);
  ensure_directory(dir);
  save_csv(toy.source, dir / "source.csv");
  save_csv(toy.target, dir / "target.csv");
  Dataset labels;
  labels.values.resize(static_cast<Eigen::Index>(toy.target_labels.size()), 0);
  labels.labels = toy.target_labels;
  save_csv(labels, dir / "target_labels.csv");
  echo_config(sub, dir / kResolvedConfig);
  out << "source rows=" << toy.source.rows() << " target rows=" << toy.target.rows() << " -> "
      << dir.string() << '\n';
  return kExitOk;
}

struct FitCommandFlags {
  DataFlags data;
  FitFlags fit;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_fit(const CLI::App& sub, const FitCommandFlags& f, std::ostream& out) {
  const FitConfig config = f.fit.to_config(f.seed);
  const Dataset source = load_table(f.data.source, f.data.labels);
  Dataset target;
  if (!f.data.target.empty()) {
    target = load_table(f.data.target, f.data.labels);
    target.labels.reset();
  } else {
    target.values.resize(0, source.values.cols());
  }
  const auto model = fit(source, target, config);

  const fs::path dir(f.out);
  ensure_directory(dir);
  save_model(model, dir / "model");
  save_diagnostics_csv(model.diagnostics, dir / "diagnostics.csv");
  echo_config(sub, dir / kResolvedConfig);

  out << "method=" << to_string(model.method) << " components=" << model.components()
      << " iterations=" << model.diagnostics.iterations
      << " stop=" << to_string(model.diagnostics.stop_reason)
      << " objective=" << fmt(model.diagnostics.objective_trace.back()) << '\n';
  if (model.diagnostics.truncated_components > 0) {
    out << "warning: " << model.diagnostics.truncated_components
        << " requested component(s) dropped for negative eigenvalues\n";
  }
  return kExitOk;
}

struct TransformFlags {
  std::string model;
  std::string input;
  std::string labels = "label";
  std::string out;
};

int cmd_transform(const CLI::App& sub, const TransformFlags& f, std::ostream& out) {
  const auto model = load_model(model_stem(f.model));
  const Dataset input = load_table(f.input, f.labels);
  Dataset projected;
  projected.values = project(model, input);
  for (std::size_t j = 0; j < model.components(); ++j) projected.feature_names.push_back("c" + std::to_string(j + 1));
  projected.labels = input.labels;
  projected.label_name = input.label_name;
  save_csv(projected, f.out);
  echo_config(sub, f.out + ".config.ini");
  out << "projected " << input.rows() << " rows onto " << model.components() << " components -> " << f.out
      << '\n';
  return kExitOk;
}

struct ValidateFlags {
  DataFlags data;
  FitFlags fit;
  std::string target_labels;
  std::string mode = "direct";
  std::size_t classifier_k = 5;
  std::size_t mixing_k = 20;
  std::size_t permutations = 20;
  double split = 0.5;
  std::uint64_t seed = 0;
  std::vector<std::string> sweep;
  std::string out;
};

struct CellResult {
  double balanced_accuracy = kNaN;
  double self_consistency = kNaN;
  double mixing_accuracy = kNaN;
  double mixing_baseline = kNaN;
  double mixing_normalized = kNaN;
  std::map<std::string, double> recall;
  std::string status = "ok";
};

CellResult run_cell(const ValidateFlags& f, const FitFlags& fit_flags, const Dataset& source,
                    const Dataset& target, const std::vector<std::string>& hidden, bool sweep_cell) {
  CellResult cell;
  const FitConfig config = fit_flags.to_config(f.seed);
  const bool direct = f.mode == "direct" || f.mode == "both";
  const bool reverse = f.mode == "reverse" || f.mode == "both";
  ValidationOptions options;
  options.classifier_k = f.classifier_k;
  options.mixing_k = f.mixing_k;
  options.permutations = f.permutations;
  options.split_fraction = f.split;
  options.seed = f.seed;
  try {
    if (direct) {
      const auto report = direct_validate(source, target, hidden, config, options);
      cell.balanced_accuracy = report.balanced_accuracy;
      cell.mixing_accuracy = report.mixing_accuracy;
      cell.mixing_baseline = report.mixing_baseline;
      cell.mixing_normalized = report.mixing_accuracy_normalized;
      cell.recall = report.per_class_recall;
    }
    if (reverse) {
      cell.self_consistency = reverse_validate(source, target, config, f.split, f.classifier_k, f.seed);
    }
  } catch (const FitError& e) {
    if (!sweep_cell) throw;
    cell.status = "error: " + std::string(e.what());
  }
  return cell;
}

int cmd_validate(const CLI::App& sub, const ValidateFlags& f, std::ostream& out) {
  if (f.mode != "direct" && f.mode != "reverse" && f.mode != "both") {
    throw InputError("--mode must be direct, reverse or both");
  }
  const bool direct = f.mode != "reverse";
  if (direct && f.target_labels.empty()) throw InputError("direct validation needs --target-labels");
  if (f.data.target.empty()) throw InputError("validation needs --target");

  const Dataset source = load_table(f.data.source, f.data.labels);
  Dataset target = load_table(f.data.target, f.data.labels);
  target.labels.reset();
  std::vector<std::string> hidden;
  if (direct) hidden = load_label_file(f.target_labels, f.data.labels);

  const auto axes = parse_sweep(f.sweep);
  const fs::path dir(f.out);
  ensure_directory(dir);
  echo_config(sub, dir / kResolvedConfig);

  std::ostringstream csv;
  for (const auto& axis : axes) csv << axis.name << ",";
  csv << "balanced_accuracy,self_consistency,mixing_accuracy,mixing_baseline,mixing_normalized,status\n";
  const auto write_row = [&csv](const std::vector<std::string>& params, const CellResult& c) {
    for (const auto& p : params) csv << p << ",";
    csv << fmt(c.balanced_accuracy) << "," << fmt(c.self_consistency) << "," << fmt(c.mixing_accuracy) << ","
        << fmt(c.mixing_baseline) << "," << fmt(c.mixing_normalized) << "," << c.status << "\n";
  };

  if (axes.empty()) {
    const auto cell = run_cell(f, f.fit, source, target, hidden, false);
    write_row({}, cell);
    std::ostringstream kv;
    kv << "method=" << f.fit.method << "\nmode=" << f.mode << "\nbalanced_accuracy=" << fmt(cell.balanced_accuracy)
       << "\nself_consistency=" << fmt(cell.self_consistency) << "\nmixing_accuracy=" << fmt(cell.mixing_accuracy)
       << "\nmixing_baseline=" << fmt(cell.mixing_baseline)
       << "\nmixing_accuracy_normalized=" << fmt(cell.mixing_normalized) << "\n";
    for (const auto& [cls, r] : cell.recall) kv << "recall." << cls << "=" << fmt(r) << "\n";
    write_text(dir / "report.txt", kv.str());
    out << kv.str();
  } else {
    // Row-major over the axes in the order given; the last axis varies fastest.
    std::vector<std::size_t> pos(axes.size(), 0);
    std::size_t rows = 0;
    while (true) {
      FitFlags cell_flags = f.fit;
      std::vector<std::string> params;
      for (std::size_t a = 0; a < axes.size(); ++a) {
        apply_axis(cell_flags, axes[a].name, axes[a].values[pos[a]]);
        params.push_back(axes[a].values[pos[a]]);
      }
      write_row(params, run_cell(f, cell_flags, source, target, hidden, true));
      ++rows;
      std::size_t a = axes.size();
      while (a > 0 && ++pos[a - 1] == axes[a - 1].values.size()) pos[--a] = 0;
      if (a == 0) break;
    }
    out << "sweep: " << rows << " cells -> " << (dir / "report.csv").string() << '\n';
  }
  write_text(dir / "report.csv", csv.str());
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted-pairs PCA family with domain adaptation (pca, spca, sspca, stca, dapca)", "dapca"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_file;

  ToygenFlags toy_flags;
  auto* toygen = app.add_subcommand("toygen", "Generate the synthetic two-class 3D source/target benchmark");
  toygen->add_option("--config", config_file, "Flat key=value file; explicit flags override it");
  toygen->add_option("--seed", toy_flags.toy.seed)->capture_default_str();
  toygen->add_option("--out", toy_flags.out, "Output directory")->required();
  toygen->add_option("--n-source-class1", toy_flags.toy.n_source_class1)->capture_default_str();
  toygen->add_option("--n-source-class2", toy_flags.toy.n_source_class2)->capture_default_str();
  toygen->add_option("--n-target-class1", toy_flags.toy.n_target_class1)->capture_default_str();
  toygen->add_option("--n-target-class2", toy_flags.toy.n_target_class2)->capture_default_str();
  toygen->add_option("--mean-class1", toy_flags.mean1)->delimiter(',')->expected(3)->capture_default_str();
  toygen->add_option("--mean-class2", toy_flags.mean2)->delimiter(',')->expected(3)->capture_default_str();
  toygen->add_option("--covariance", toy_flags.cov, "Shared diagonal covariance")
      ->delimiter(',')->expected(3)->capture_default_str();
  toygen->add_option("--shift2-class1", toy_flags.toy.target_shift_class1, "Target shift of class 1 along x2")
      ->capture_default_str();
  toygen->add_option("--shift2-class2", toy_flags.toy.target_shift_class2, "Target shift of class 2 along x2")
      ->capture_default_str();
  toygen->add_option("--variance-scale-class2", toy_flags.toy.target_variance_scale_class2)->capture_default_str();

  FitCommandFlags fit_flags;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a projection model");
  fit_cmd->add_option("--config", config_file, "Flat key=value file; explicit flags override it");
  fit_cmd->add_option("--source", fit_flags.data.source, "Source CSV")->required();
  fit_cmd->add_option("--target", fit_flags.data.target, "Target CSV");
  fit_cmd->add_option("--labels", fit_flags.data.labels, "Label column name")->capture_default_str();
  add_fit_flags(*fit_cmd, fit_flags.fit);
  fit_cmd->add_option("--seed", fit_flags.seed)->capture_default_str();
  fit_cmd->add_option("--out", fit_flags.out, "Output directory")->required();

  TransformFlags tr_flags;
  auto* transform = app.add_subcommand("transform", "Project data with a fitted model");
  transform->add_option("--config", config_file, "Flat key=value file; explicit flags override it");
  transform->add_option("--model", tr_flags.model, "Model directory or file stem")->required();
  transform->add_option("--input", tr_flags.input, "CSV to project")->required();
  transform->add_option("--labels", tr_flags.labels, "Label column carried through unchanged")->capture_default_str();
  transform->add_option("--out", tr_flags.out, "Output CSV")->required();

  ValidateFlags val_flags;
  auto* validate = app.add_subcommand("validate", "Direct/reverse validation and parameter sweeps");
  validate->add_option("--config", config_file, "Flat key=value file; explicit flags override it");
  validate->add_option("--source", val_flags.data.source, "Labelled source CSV")->required();
  validate->add_option("--target", val_flags.data.target, "Target CSV");
  validate->add_option("--labels", val_flags.data.labels, "Label column name")->capture_default_str();
  validate->add_option("--target-labels", val_flags.target_labels, "Hidden target labels CSV (direct mode)");
  validate->add_option("--mode", val_flags.mode, "direct|reverse|both")->capture_default_str();
  add_fit_flags(*validate, val_flags.fit);
  validate->add_option("--classifier-k", val_flags.classifier_k)->capture_default_str();
  validate->add_option("--mixing-k", val_flags.mixing_k)->capture_default_str();
  validate->add_option("--permutations", val_flags.permutations)->capture_default_str();
  validate->add_option("--split", val_flags.split, "Reverse-validation train fraction")->capture_default_str();
  validate->add_option("--seed", val_flags.seed)->capture_default_str();
  validate->add_option("--sweep", val_flags.sweep, "Grid axes, e.g. alpha=0.1,1,10 gamma=1,10,100")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  validate->add_option("--out", val_flags.out, "Output directory")->required();

  try {
    std::vector<std::string> args;
    try {
      args = expand_config(argc, argv);
    } catch (const InputError& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
    std::vector<const char*> raw;
    raw.reserve(args.size());
    for (const auto& a : args) raw.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kExitOk : kExitUsage;
    }

    if (toygen->parsed()) return cmd_toygen(*toygen, toy_flags, out);
    if (fit_cmd->parsed()) return cmd_fit(*fit_cmd, fit_flags, out);
    if (transform->parsed()) return cmd_transform(*transform, tr_flags, out);
    if (validate->parsed()) return cmd_validate(*validate, val_flags, out);
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FitError& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitComputation;
  }
}

}  // namespace dapca::cli
