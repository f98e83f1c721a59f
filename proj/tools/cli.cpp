#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "hsvm/error.hpp"
#include "hsvm/libsvm.hpp"
#include "hsvm/loss.hpp"
#include "hsvm/model.hpp"
#include "hsvm/random.hpp"
#include "hsvm/solver.hpp"
#include "hsvm/stats.hpp"
#include "hsvm/synth.hpp"
#include "hsvm/tuning.hpp"
#include "json.hpp"

namespace hsvm::cli {

namespace {

// Thrown for bad flag combinations detected after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { csv, human };

const std::map<std::string, Format> kFormats{{"csv", Format::csv}, {"human", Format::human}};

// Shortest text that reads back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw UsageError(std::string("malformed value '") + item + "' in " + flag);
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string("empty list in ") + flag);
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  return f;
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  std::string kind = "binary";
  std::size_t n = 50;
  std::size_t p = 300;
  std::size_t s = 20;
  double rho = 0.0;
  std::uint64_t seed = 0;
  std::size_t n_test = 1000;
  std::string out;
};

SynthSpec spec_from(const GenArgs& a) {
  SynthSpec spec;
  spec.n = a.n;
  spec.p = a.p;
  spec.s = a.s;
  spec.rho = a.rho;
  spec.seed = a.seed;
  spec.kind = a.kind == "four_class" ? SynthKind::four_class : SynthKind::binary_gaussian;
  return spec;
}

void add_gen_flags(CLI::App* cmd, GenArgs& a) {
  cmd->add_option("--kind", a.kind, "binary or four_class")
      ->check(CLI::IsMember({"binary", "four_class"}));
  cmd->add_option("--n", a.n, "training samples");
  cmd->add_option("--p", a.p, "features");
  cmd->add_option("--s", a.s, "relevant features");
  cmd->add_option("--rho", a.rho, "correlation in the relevant block");
  cmd->add_option("--seed", a.seed, "random seed");
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const SynthSpec spec = spec_from(a);
  spec.validate();
  const Dataset train = generate(spec);
  const Dataset test = generate_test(spec, a.n_test);
  write_libsvm_file(train, a.out + ".train.libsvm");
  write_libsvm_file(test, a.out + ".test.libsvm");

  nlohmann::ordered_json meta;
  meta["kind"] = a.kind;
  meta["n"] = a.n;
  meta["p"] = a.p;
  meta["s"] = a.s;
  meta["rho"] = a.rho;
  meta["seed"] = a.seed;
  meta["n_test"] = a.n_test;
  meta["generator_version"] = Rng::kGeneratorVersion;
  // 1-based, like the feature indices in the data files.
  std::vector<std::size_t> support;
  for (FeatureIndex j : *train.true_support()) support.push_back(std::size_t{j} + 1);
  meta["true_support"] = support;
  auto f = open_out(a.out + ".meta.json");
  f << meta.dump(2) << '\n';
  if (!f) throw IoError("I/O failure while writing '" + a.out + ".meta.json'");
  out << "wrote " << a.out << ".train.libsvm " << a.out << ".test.libsvm " << a.out
      << ".meta.json\n";
  return kSuccess;
}

// ---- train -----------------------------------------------------------------

struct HyperArgs {
  double lambda1 = 0.0;
  double lambda2 = 1.0;
  double lambda3 = 1.0;
  double delta = 1.0;
};

void add_hyper_flags(CLI::App* cmd, HyperArgs& h) {
  cmd->add_option("--lambda1", h.lambda1, "l1 weight");
  cmd->add_option("--lambda2", h.lambda2, "l2 weight");
  cmd->add_option("--lambda3", h.lambda3, "intercept weight");
  cmd->add_option("--delta", h.delta, "huberization width");
}

Hyperparams hyper_from(const HyperArgs& h) { return {h.lambda1, h.lambda2, h.lambda3, h.delta}; }

struct TrainArgs {
  std::string data;
  std::string solver = "bpgh";
  HyperArgs hyper;
  double tol = 1e-6;
  int max_iter = 5000;
  double eta = 1.5;
  bool no_monotone = false;
  bool no_backtracking = false;
  bool no_extrapolation = false;
  std::string model;
  std::string trace;
};

SolverOptions options_from(const TrainArgs& a) {
  SolverOptions o;
  o.tol = a.tol;
  o.max_iter = a.max_iter;
  o.eta = a.eta;
  o.monotone = !a.no_monotone;
  o.backtracking = !a.no_backtracking;
  o.extrapolation = a.no_extrapolation ? Extrapolation::none : Extrapolation::fista_capped;
  return o;
}

void write_trace(std::ostream& f, const SolverTrace& trace) {
  f << "k,F,L,omega,step,restart,nnz\n";
  for (const auto& r : trace.records) {
    f << r.k << ',' << fmt(r.objective) << ',' << fmt(r.L) << ',' << fmt(r.omega) << ','
      << fmt(r.step) << ',' << (r.restarted ? 1 : 0) << ',' << r.nnz << '\n';
  }
}

int cmd_train(const TrainArgs& a, Format format, std::ostream& out) {
  const Dataset data = read_libsvm_file(a.data);
  const Hyperparams hp = hyper_from(a.hyper);
  const SolverOptions opts = options_from(a);
  AnyModel model;
  SolverTrace trace;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
  std::size_t nnz = 0;
  auto take = [&](auto&& fit) {
    trace = std::move(fit.trace);
    iterations = fit.iterations;
    converged = fit.converged;
    objective = fit.final_objective;
    nnz = fit.support.size();
    model = std::move(fit.model);
  };
  if (a.solver == "mpgh") {
    if (data.kind() != LabelKind::multiclass) throw UsageError("mpgh needs multi-class labels");
    take(fit_multi(data, hp, opts));
  } else {
    if (data.kind() != LabelKind::binary) throw UsageError(a.solver + " needs +1/-1 labels");
    take(a.solver == "bpgh2" ? fit_binary_two_stage(data, hp, opts) : fit_binary(data, hp, opts));
  }
  if (!a.model.empty()) save_model_file(a.model, model, hp);
  if (!a.trace.empty()) {
    auto f = open_out(a.trace);
    write_trace(f, trace);
    if (!f) throw IoError("I/O failure while writing '" + a.trace + "'");
  }
  if (format == Format::csv) {
    out << "solver,iterations,objective,converged,nnz_rows\n"
        << a.solver << ',' << iterations << ',' << fmt(objective) << ',' << (converged ? 1 : 0)
        << ',' << nnz << '\n';
  } else {
    out << "solver      " << a.solver << "\niterations  " << iterations << "\nobjective   "
        << fmt(objective) << "\nconverged   " << (converged ? "yes" : "no") << "\nnonzero     "
        << nnz << '\n';
  }
  return converged ? kSuccess : kNotConverged;
}

// ---- predict ---------------------------------------------------------------

struct PredictArgs {
  std::string model;
  std::string data;
  std::string out;
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const SavedModel saved = load_model_file(a.model);
  std::size_t p = 0;
  ParseOptions po;
  po.allow_missing_labels = true;
  if (const auto* m = std::get_if<MultiModel>(&saved.model)) {
    p = m->features();
    po.kind = LabelKind::multiclass;
    po.classes = m->classes();
  } else {
    p = std::get<BinaryModel>(saved.model).features();
    po.kind = LabelKind::binary;
  }
  Dataset data = read_libsvm_file(a.data, po);
  if (data.features() > p) {
    throw UsageError("data has " + std::to_string(data.features()) +
                     " features but the model has " + std::to_string(p));
  }
  data = data.with_features(p);
  const auto labels = predict(saved.model, data);

  std::ofstream file;
  if (!a.out.empty()) file = open_out(a.out);
  std::ostream& dest = a.out.empty() ? out : file;
  for (int y : labels) dest << y << '\n';
  if (!a.out.empty() && !file) throw IoError("I/O failure while writing '" + a.out + "'");
  if (data.has_labels()) out << "accuracy " << fmt(evaluate(saved.model, data).accuracy) << '\n';
  return kSuccess;
}

// ---- cv --------------------------------------------------------------------

struct CvArgs {
  std::string data;
  std::string solver = "bpgh";
  std::string lambda1;
  std::string lambda2;
  std::string lambda3 = "1";
  double delta = 1.0;
  int folds = 10;
  std::uint64_t seed = 0;
  std::string table;
};

int cmd_cv(const CvArgs& a, std::ostream& out) {
  const Dataset data = read_libsvm_file(a.data);
  Grid grid;
  if (!a.lambda1.empty()) grid.lambda1_values = parse_list(a.lambda1, "--lambda1");
  if (!a.lambda2.empty()) grid.lambda2_values = parse_list(a.lambda2, "--lambda2");
  if (a.lambda3 == "tie") {
    grid.lambda3 = std::nullopt;
  } else {
    grid.lambda3 = parse_list(a.lambda3, "--lambda3").at(0);
  }
  grid.delta = a.delta;
  grid.folds = a.folds;
  const SolverChoice solver = a.solver == "mpgh"    ? SolverChoice::mpgh
                              : a.solver == "bpgh2" ? SolverChoice::bpgh2
                                                    : SolverChoice::bpgh;
  if ((solver == SolverChoice::mpgh) != (data.kind() == LabelKind::multiclass)) {
    throw UsageError("solver " + a.solver + " does not match the label kind of the data");
  }
  const GridResult result = grid_search(data, grid, solver, a.seed);
  if (!a.table.empty()) {
    auto f = open_out(a.table);
    write_cv_table(f, result);
    if (!f) throw IoError("I/O failure while writing '" + a.table + "'");
  }
  out << "best lambda1=" << fmt(result.best_lambda1) << " lambda2=" << fmt(result.best_lambda2)
      << '\n';
  return kSuccess;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
  std::string scenario = "ablation";
  GenArgs gen;
  std::string data;
  HyperArgs hyper;
  int repeats = 1;
};

int cmd_bench(const BenchArgs& a, Format format, std::ostream& out) {
  Dataset data = a.data.empty() ? generate([&] {
    SynthSpec s = spec_from(a.gen);
    s.validate();
    return s;
  }())
                                 : read_libsvm_file(a.data);
  const Hyperparams hp = hyper_from(a.hyper);
  if (a.repeats < 1) throw UsageError("--repeats must be >= 1");

  struct Row {
    std::string setting;
    BinaryFit fit;
    double ms = 0.0;
  };
  std::vector<Row> rows;
  auto timed = [&](const std::string& name, auto&& run) {
    Row row{name, {}, 0.0};
    for (int r = 0; r < a.repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      row.fit = run();
      row.ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    }
    row.ms /= a.repeats;
    rows.push_back(std::move(row));
  };
  if (a.scenario == "ablation") {
    timed("ours", [&] { return ablation_run(data, hp, AblationSetting::ours); });
    timed("backtrack_no_monotone",
          [&] { return ablation_run(data, hp, AblationSetting::backtrack_no_monotone); });
    timed("fixed_L_no_monotone",
          [&] { return ablation_run(data, hp, AblationSetting::fixed_L_no_monotone); });
  } else {
    timed("bpgh", [&] { return fit_binary(data, hp); });
    timed("bpgh2", [&] { return fit_binary_two_stage(data, hp); });
  }
  if (format == Format::csv) {
    out << "scenario,setting,iterations,time_ms,objective,converged\n";
    for (const auto& r : rows) {
      out << a.scenario << ',' << r.setting << ',' << r.fit.iterations << ',' << fmt(r.ms) << ','
          << fmt(r.fit.final_objective) << ',' << (r.fit.converged ? 1 : 0) << '\n';
    }
  } else {
    for (const auto& r : rows) {
      out << r.setting << ": " << r.fit.iterations << " iterations, " << r.ms << " ms, F = "
          << fmt(r.fit.final_objective) << (r.fit.converged ? "" : " (not converged)") << '\n';
    }
  }
  return kSuccess;
}

// ---- stats -----------------------------------------------------------------

struct StatsArgs {
  std::string scores;
  std::string kind = "scores";
  bool lower_is_better = false;
  double alpha = 0.05;
  std::size_t control = 0;
};

struct ScoreTable {
  std::vector<std::string> methods;
  RankTable table;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

// Header of method names; an optional leading "dataset" column holds row names.
ScoreTable read_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  ScoreTable t;
  if (!std::getline(in, line)) throw UsageError("scores file is empty");
  auto header = split_csv(line);
  const bool named_rows = !header.empty() && header.front() == "dataset";
  t.methods.assign(header.begin() + (named_rows ? 1 : 0), header.end());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw UsageError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, found " +
                       std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (std::size_t c = named_rows ? 1 : 0; c < cells.size(); ++c) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cells[c].size()) {
        throw UsageError("line " + std::to_string(line_no) + ": bad number '" + cells[c] + "'");
      }
      row.push_back(v);
    }
    t.table.values.push_back(std::move(row));
  }
  if (t.table.values.empty()) throw UsageError("scores file has no data rows");
  return t;
}

int cmd_stats(const StatsArgs& a, Format format, std::ostream& out) {
  ScoreTable st = read_scores(a.scores);
  st.table.kind = a.kind == "ranks" ? TableKind::ranks : TableKind::raw_scores;
  st.table.higher_is_better = !a.lower_is_better;
  const std::size_t K = st.methods.size();
  if (a.control >= K) throw UsageError("--control is out of range");

  const auto fr = friedman(st.table);
  const auto cmp = compare_to_control(st.table, a.control);
  std::vector<double> ps;
  for (const auto& c : cmp) ps.push_back(c.p);
  const auto reject = holm(ps, a.alpha);

  std::vector<std::vector<double>> columns(K);
  for (const auto& row : st.table.values) {
    for (std::size_t j = 0; j < K; ++j) columns[j].push_back(row[j]);
  }
  const bool csv = format == Format::csv;
  if (csv) out << "section,method_a,method_b,statistic,z,p,decision\n";
  if (!csv) out << "Wilcoxon signed-ranks (T, z, p)\n";
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = i + 1; j < K; ++j) {
      const auto w = wilcoxon_z(columns[i], columns[j]);
      if (csv) {
        out << "wilcoxon," << st.methods[i] << ',' << st.methods[j] << ',' << fmt(w.T) << ','
            << fmt(w.z) << ',' << fmt(w.p) << ",\n";
      } else {
        out << "  " << st.methods[i] << " vs " << st.methods[j] << ": T = " << w.T
            << ", z = " << w.z << ", p = " << w.p << '\n';
      }
    }
  }
  if (!csv) out << "Average ranks\n";
  for (std::size_t j = 0; j < K; ++j) {
    if (csv) {
      out << "average_rank," << st.methods[j] << ",," << fmt(fr.average_ranks[j]) << ",,,\n";
    } else {
      out << "  " << st.methods[j] << ": " << fr.average_ranks[j] << '\n';
    }
  }
  if (csv) {
    out << "friedman,,," << fmt(fr.chi2) << ",," << fmt(fr.p) << ",\n";
  } else {
    out << "Friedman: chi2 = " << fr.chi2 << ", p = " << fr.p << '\n';
    out << "Holm vs " << st.methods[a.control] << " at alpha = " << a.alpha << '\n';
  }
  for (std::size_t k = 0; k < cmp.size(); ++k) {
    const char* decision = reject[k] ? "reject" : "accept";
    if (csv) {
      out << "holm," << st.methods[a.control] << ',' << st.methods[cmp[k].method] << ",,"
          << fmt(cmp[k].z) << ',' << fmt(cmp[k].p) << ',' << decision << '\n';
    } else {
      out << "  " << st.methods[cmp[k].method] << ": z = " << cmp[k].z << ", p = " << cmp[k].p
          << ", " << decision << '\n';
    }
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Huberized SVM training and evaluation"};
  app.require_subcommand(1);
  Format format = Format::csv;
  app.add_option("--format", format, "csv or human")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic train/test pair");
  add_gen_flags(gen_cmd, gen);
  gen_cmd->add_option("--n-test", gen.n_test, "test samples");
  gen_cmd->add_option("--out", gen.out, "output prefix")->required();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "fit a model");
  train_cmd->add_option("--data", train.data, "LIBSVM training file")->required();
  train_cmd->add_option("--solver", train.solver, "bpgh, bpgh2 or mpgh")
      ->check(CLI::IsMember({"bpgh", "bpgh2", "mpgh"}));
  add_hyper_flags(train_cmd, train.hyper);
  train_cmd->add_option("--tol", train.tol, "stopping tolerance");
  train_cmd->add_option("--max-iter", train.max_iter, "iteration limit");
  train_cmd->add_option("--eta", train.eta, "backtracking factor");
  train_cmd->add_flag("--no-monotone", train.no_monotone, "disable monotone restarts");
  train_cmd->add_flag("--no-backtracking", train.no_backtracking, "fix L to the global constant");
  train_cmd->add_flag("--no-extrapolation", train.no_extrapolation, "plain proximal gradient");
  train_cmd->add_option("--model", train.model, "model output path");
  train_cmd->add_option("--trace", train.trace, "trace CSV output path");

  PredictArgs pred;
  auto* pred_cmd = app.add_subcommand("predict", "predict labels");
  pred_cmd->add_option("--model", pred.model, "model file")->required();
  pred_cmd->add_option("--data", pred.data, "LIBSVM file")->required();
  pred_cmd->add_option("--out", pred.out, "labels output path (default stdout)");

  CvArgs cv;
  auto* cv_cmd = app.add_subcommand("cv", "k-fold grid search over (lambda1, lambda2)");
  cv_cmd->add_option("--data", cv.data, "LIBSVM training file")->required();
  cv_cmd->add_option("--solver", cv.solver, "bpgh, bpgh2 or mpgh")
      ->check(CLI::IsMember({"bpgh", "bpgh2", "mpgh"}));
  cv_cmd->add_option("--lambda1", cv.lambda1, "comma-separated lambda1 values");
  cv_cmd->add_option("--lambda2", cv.lambda2, "comma-separated lambda2 values");
  cv_cmd->add_option("--lambda3", cv.lambda3, "fixed lambda3, or 'tie' for lambda3 = lambda2");
  cv_cmd->add_option("--delta", cv.delta, "huberization width");
  cv_cmd->add_option("--folds", cv.folds, "number of folds");
  cv_cmd->add_option("--seed", cv.seed, "fold assignment seed");
  cv_cmd->add_option("--table", cv.table, "CV table CSV output path");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "solver timing and ablation");
  bench_cmd->add_option("--scenario", bench.scenario, "ablation or two_stage")
      ->check(CLI::IsMember({"ablation", "two_stage"}));
  add_gen_flags(bench_cmd, bench.gen);
  bench_cmd->add_option("--data", bench.data, "LIBSVM file instead of a generated instance");
  add_hyper_flags(bench_cmd, bench.hyper);
  bench_cmd->add_option("--repeats", bench.repeats, "runs averaged per setting");

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Wilcoxon, Friedman and Holm report");
  stats_cmd->add_option("--scores", stats.scores, "CSV: header of method names, one row per data set")
      ->required();
  stats_cmd->add_option("--kind", stats.kind, "scores or ranks")
      ->check(CLI::IsMember({"scores", "ranks"}));
  stats_cmd->add_flag("--lower-is-better", stats.lower_is_better, "rank smaller scores first");
  stats_cmd->add_option("--alpha", stats.alpha, "Holm significance level");
  stats_cmd->add_option("--control", stats.control, "0-based control method column");

  std::vector<std::string> argv_store{"hsvm"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*train_cmd) return cmd_train(train, format, out);
    if (*pred_cmd) return cmd_predict(pred, out);
    if (*cv_cmd) return cmd_cv(cv, out);
    if (*bench_cmd) return cmd_bench(bench, format, out);
    if (*stats_cmd) return cmd_stats(stats, format, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace hsvm::cli
