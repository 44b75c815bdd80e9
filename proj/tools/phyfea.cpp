// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. JSON goes to stdout, diagnostics to stderr.
// Exit codes: 0 ok, 1 internal error, 2 invalid input or configuration,
// 3 anomalies found (check only).

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "phyfea/analyzer.hpp"
#include "phyfea/config.hpp"
#include "phyfea/dilation.hpp"
#include "phyfea/gradcheck.hpp"
#include "phyfea/io.hpp"
#include "phyfea/json_io.hpp"
#include "phyfea/loss.hpp"
#include "phyfea/opening.hpp"
#include "phyfea/parallel.hpp"
#include "phyfea/rng.hpp"
#include "phyfea/version.hpp"

namespace {

using namespace phyfea;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitAnomalies = 3;

// Engine flags shared by several subcommands. Values land here first and are
// applied over the config file only when given, so flags override the file.
struct EngineFlags {
  double alpha = 0;
  double epsilon = 0;
  std::size_t iterations = 0;
  std::string losses;
  std::string pair_mode;
  int connectivity = 0;
  std::string precision;
  double bg_tol = 0;
  std::uint64_t threshold = 0;
  std::size_t threads = 0;
  bool no_early_exit = false;
  int ignore_value = 0;

  std::vector<std::pair<std::string, CLI::Option*>> opts;

  void attach(CLI::App* app, bool penalty_flags, bool analysis_flags) {
    if (penalty_flags) {
      opts.emplace_back("alpha", app->add_option("--alpha", alpha, "penalty weight in (0,1)"));
      opts.emplace_back("epsilon", app->add_option("--epsilon", epsilon, "normalization guard"));
      opts.emplace_back("iterations",
                        app->add_option("--iterations", iterations, "override the iteration budget"));
      opts.emplace_back("losses", app->add_option("--losses", losses, "opening|dilation|both"));
      opts.emplace_back("pair_mode",
                        app->add_option("--pair-mode", pair_mode, "all|infeasible_only"));
      opts.emplace_back("precision", app->add_option("--precision", precision, "single|double"));
      opts.emplace_back("bg_tol", app->add_option("--bg-tol", bg_tol, "background tolerance"));
      opts.emplace_back("early_exit", app->add_flag("--no-early-exit", no_early_exit,
                                                    "always run the full iteration budget"));
    }
    if (analysis_flags) {
      opts.emplace_back("connectivity",
                        app->add_option("--connectivity", connectivity, "4 or 8"));
      opts.emplace_back("threshold", app->add_option("--threshold", threshold,
                                                     "max occurrences for an infeasible pair"));
    }
    opts.emplace_back("ignore_value", app->add_option("--ignore-value", ignore_value));
    opts.emplace_back("workers", app->add_option("--threads", threads, "worker count"));
  }

  EngineConfig apply(EngineConfig c) const {
    for (const auto& [name, opt] : opts) {
      if (!opt->count()) continue;
      if (name == "alpha") c.alpha = alpha;
      if (name == "epsilon") c.epsilon = epsilon;
      if (name == "iterations") c.iterations = iterations;
      if (name == "losses") set_losses(c, losses);
      if (name == "pair_mode") c.pair_mode = parse_pair_mode(pair_mode);
      if (name == "precision") c.precision = parse_precision(precision);
      if (name == "bg_tol") c.bg_tol = bg_tol;
      if (name == "early_exit") c.early_exit = !no_early_exit;
      if (name == "connectivity") c.connectivity = connectivity;
      if (name == "threshold") c.infeasibility_threshold = threshold;
      if (name == "ignore_value") c.ignore_value = ignore_value;
      if (name == "workers") c.workers = threads;
    }
    return c;
  }
};

void emit(const Json& j) { std::cout << dump_json(j) << '\n'; }

Tensor<float> random_scores(std::size_t classes, std::size_t rows, std::size_t cols,
                            std::uint64_t seed, double spread) {
  Rng rng(seed);
  Tensor<float> t(Dims{classes, rows, cols});
  for (auto& v : t.data()) v = static_cast<float>(spread * rng.normal());
  return t;
}

// ---- loss --------------------------------------------------------------------

struct LossArgs {
  std::string tensor;
  std::string grad_out;
  std::string catalog;
  std::string labels;
  std::optional<double> cross_entropy;
};

template <class T>
int run_loss(const LossArgs& args, const EngineConfig& cfg) {
  const Tensor<float> raw = read_tensor(args.tensor);
  require_rank(raw.dims(), 3, "loss input tensor");
  std::optional<ConstraintCatalog> catalog;
  if (!args.catalog.empty()) catalog = read_catalog(args.catalog);
  if (cfg.pair_mode == PairMode::infeasible_only && !catalog) {
    throw ConfigError("pair_mode infeasible_only needs --catalog");
  }
  IgnoreMask ignore;
  if (!args.labels.empty()) {
    const auto map = read_label_map(args.labels, 0, cfg.ignore_value);
    if (map.rows != raw.dim(1) || map.cols != raw.dim(2)) {
      throw DimensionError("label map " + std::to_string(map.rows) + "x" +
                           std::to_string(map.cols) + " does not match scores " +
                           format_dims(raw.dims()));
    }
    ignore.resize(map.size());
    for (std::size_t i = 0; i < map.size(); ++i) ignore[i] = map.ignored(i);
  }
  EngineConfig run = cfg;
  run.with_grad = !args.grad_out.empty();
  auto report = compute_penalty(tensor_cast<T>(raw), run, catalog ? &*catalog : nullptr, ignore);
  if (args.cross_entropy) report.total = combine_total(report.penalty, *args.cross_entropy);
  if (report.grad) write_tensor(args.grad_out, tensor_cast<float>(*report.grad));
  Json j = to_json(report);
  j["config"] = to_json(cfg);
  emit(j);
  return kExitOk;
}

// ---- check -------------------------------------------------------------------

struct CheckArgs {
  std::string gt;
  std::string pred;
  std::size_t num_classes = 0;
  std::string report;
  std::string overlay;
};

int run_check(const CheckArgs& args, const EngineConfig& cfg) {
  const auto gt = read_label_map(args.gt, args.num_classes, cfg.ignore_value);
  const auto pred = read_label_map(args.pred, args.num_classes, cfg.ignore_value);
  const auto report = check(gt, pred, cfg.connectivity);
  const Json j = to_json(report);
  if (!args.report.empty()) write_json(args.report, j);
  if (!args.overlay.empty()) {
    std::vector<std::uint8_t> mask(pred.size(), 0);
    for (const auto& e : report.enclosures) {
      for (auto p : e.component.pixels) mask[p] = 1;
    }
    write_overlay(args.overlay, pred, mask);
  }
  emit(j);
  return report.clean() ? kExitOk : kExitAnomalies;
}

// ---- analyze -----------------------------------------------------------------

struct AnalyzeArgs {
  std::string corpus;
  std::string catalog_out;
  std::string predictions;
  std::string corpus_id;
  std::size_t num_classes = 0;
};

std::vector<LabelMap> load_corpus(const std::string& dir, std::size_t classes, int ignore) {
  std::vector<LabelMap> maps;
  for (const auto& f : list_label_files(dir)) maps.push_back(read_label_map(f, classes, ignore));
  if (maps.empty()) throw ValidationError("no .pgm or .png label maps in '" + dir + "'");
  if (classes) {
    for (auto& m : maps) m.num_classes = classes;
  }
  return maps;
}

int run_analyze(const AnalyzeArgs& args, const EngineConfig& cfg) {
  const std::size_t workers = resolve_workers(cfg.workers);
  const auto corpus = load_corpus(args.corpus, args.num_classes, cfg.ignore_value);
  const std::string id = args.corpus_id.empty()
                             ? std::filesystem::path(args.corpus).lexically_normal().filename().string()
                             : args.corpus_id;
  const auto catalog =
      build_catalog(corpus, cfg.infeasibility_threshold, cfg.connectivity, id, workers);
  if (!args.catalog_out.empty()) write_json(args.catalog_out, to_json(catalog));
  Json j;
  j["corpus_id"] = catalog.corpus_id;
  j["num_images"] = catalog.num_images;
  j["num_classes"] = catalog.num_classes;
  j["threshold"] = catalog.threshold;
  j["ground_truth"] = to_json(empirical_stats(catalog));
  if (!args.predictions.empty()) {
    const auto preds = load_corpus(args.predictions, catalog.num_classes, cfg.ignore_value);
    j["predictions"] = to_json(empirical_stats(preds, catalog, cfg.connectivity, workers));
  }
  emit(j);
  return kExitOk;
}

// ---- gradcheck ---------------------------------------------------------------

struct GradArgs {
  std::size_t rows = 8;
  std::size_t cols = 8;
  std::size_t classes = 3;
  std::uint64_t seed = 0;
  std::size_t probes = 16;
  std::optional<double> tolerance;
  std::optional<double> step;
};

template <class T>
GradCheckReport gradcheck_scores(const Tensor<float>& scores, const EngineConfig& cfg,
                                 const GradArgs& args) {
  GradCheckOptions opts;
  opts.probes = args.probes;
  opts.seed = args.seed;
  opts.tolerance = args.tolerance.value_or(std::is_same_v<T, float> ? 1e-3 : 1e-6);
  opts.step = args.step.value_or(1e-4);
  ScalarFn<T> f = [&](const Var<T>& x) { return penalty_graph(x, cfg); };
  ScalarFn<double> reference = [&](const Var<double>& x) { return penalty_graph(x, cfg); };
  return vjp_check(f, tensor_cast<T>(scores), opts, reference);
}

int run_gradcheck(const GradArgs& args, const EngineConfig& cfg) {
  cfg.validate();
  const auto scores = random_scores(args.classes, args.rows, args.cols, args.seed, 2.0);
  const auto report = cfg.precision == Precision::single
                          ? gradcheck_scores<float>(scores, cfg, args)
                          : gradcheck_scores<double>(scores, cfg, args);
  Json j = to_json(report);
  j["dims"] = Json::array({args.classes, args.rows, args.cols});
  j["seed"] = args.seed;
  j["precision"] = std::string(precision_name(cfg.precision));
  emit(j);
  return report.passed ? kExitOk : kExitInvalid;
}

// ---- synth -------------------------------------------------------------------

struct SynthArgs {
  FixtureSpec spec;
  std::string kind = "enclosure";
  std::string out;
  std::string scores_out;
};

int run_synth(SynthArgs args) {
  args.spec.kind = parse_fixture(args.kind);
  args.spec.with_scores = !args.scores_out.empty();
  const auto fx = gen_fixture(args.spec);
  write_label_map(args.out, fx.labels);
  if (fx.scores) write_tensor(args.scores_out, *fx.scores);
  Json j;
  j["kind"] = args.kind;
  j["dims"] = Json::array({fx.labels.rows, fx.labels.cols});
  j["num_classes"] = fx.labels.num_classes;
  j["labels"] = args.out;
  j["scores"] = args.scores_out.empty() ? Json(nullptr) : Json(args.scores_out);
  j["enclosures"] = find_enclosures(fx.labels, 8).size();
  emit(j);
  return kExitOk;
}

// ---- bench -------------------------------------------------------------------

struct BenchArgs {
  std::size_t classes = 19;
  std::size_t size = 256;
  std::uint64_t seed = 0;
  std::size_t regions = 48;
};

// Blobby label map (nearest of `regions` random sites) with a few enclosed
// specks, so channels carry realistic amounts of work.
LabelMap bench_labels(const BenchArgs& a) {
  Rng rng(a.seed);
  std::vector<std::pair<double, double>> sites;
  std::vector<std::int32_t> cls;
  for (std::size_t k = 0; k < a.regions; ++k) {
    sites.emplace_back(rng.uniform(0, static_cast<double>(a.size)),
                       rng.uniform(0, static_cast<double>(a.size)));
    cls.push_back(static_cast<std::int32_t>(rng.below(a.classes)));
  }
  LabelMap map(a.size, a.size, a.classes);
  for (std::size_t r = 0; r < a.size; ++r) {
    for (std::size_t c = 0; c < a.size; ++c) {
      double best = 1e300;
      for (std::size_t k = 0; k < sites.size(); ++k) {
        const double dr = sites[k].first - static_cast<double>(r);
        const double dc = sites[k].second - static_cast<double>(c);
        if (dr * dr + dc * dc < best) {
          best = dr * dr + dc * dc;
          map.at(r, c) = cls[k];
        }
      }
    }
  }
  for (std::size_t k = 0; k < a.regions; ++k) {
    const auto r = static_cast<std::size_t>(rng.below(a.size - 8)) + 4;
    const auto c = static_cast<std::size_t>(rng.below(a.size - 8)) + 4;
    map.at(r, c) = static_cast<std::int32_t>(rng.below(a.classes));
  }
  return map;
}

template <class T>
int run_bench(const BenchArgs& args, const EngineConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  auto ms = [](Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  };
  cfg.validate();
  const std::size_t workers = resolve_workers(cfg.workers);
  const auto labels = bench_labels(args);
  auto scores = scores_for_labels(labels, 0, 0.9, 0.7);
  Rng rng(args.seed + 1);
  for (auto& v : scores.data()) v += static_cast<float>(0.05 * rng.normal());
  const Tensor<T> input = tensor_cast<T>(scores);
  const std::size_t iters = iteration_budget(args.size, args.size, cfg.iterations);
  const auto eps = static_cast<T>(cfg.epsilon);

  auto t0 = Clock::now();
  const auto probs = normalize_scores(input);
  const double t_norm = ms(t0);
  t0 = Clock::now();
  const auto stack = build_pair_stack(probs);
  const double t_stack = ms(t0);

  StageOptions opts;
  opts.workers = workers;
  opts.early_exit = cfg.early_exit;
  double t_open = 0, t_dil = 0, l_open = 0, l_dil = 0;
  std::size_t max_open = 0, max_dil = 0;
  if (cfg.use_opening) {
    t0 = Clock::now();
    const auto o = open_stack(stack, iters, eps, opts);
    t_open = ms(t0);
    l_open = o.loss;
    for (auto n : o.iterations_used) max_open = std::max(max_open, n);
  }
  if (cfg.use_dilation) {
    t0 = Clock::now();
    const auto d = dilate_stack(stack, iters, eps, static_cast<T>(cfg.bg_tol), opts);
    t_dil = ms(t0);
    l_dil = d.loss;
    for (auto n : d.iterations_used) max_dil = std::max(max_dil, n);
  }

  Json j;
  j["dims"] = Json::array({stack.size(), args.size, args.size});
  j["precision"] = std::string(precision_name(cfg.precision));
  j["workers"] = workers;
  j["iteration_budget"] = iters;
  j["early_exit"] = cfg.early_exit;
  j["max_iterations_used"] = {{"opening", max_open}, {"dilation", max_dil}};
  j["l_opening"] = l_open;
  j["l_dilation"] = l_dil;
  j["timing_ms"] = {{"normalize", t_norm},
                    {"pair_stack", t_stack},
                    {"opening", t_open},
                    {"dilation", t_dil},
                    {"forward_total", t_norm + t_stack + t_open + t_dil}};
  emit(j);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physical-feasibility penalty and label-map analysis"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override it")
      ->check(CLI::ExistingFile);
  app.set_version_flag("--version", version_info());

  LossArgs loss_args;
  EngineFlags loss_flags;
  auto* loss = app.add_subcommand("loss", "evaluate the penalty on an SFT1 score tensor");
  loss->add_option("tensor", loss_args.tensor, "(C,H,W) SFT1 file")->required();
  loss->add_option("--grad-out", loss_args.grad_out, "write d penalty / d scores as SFT1");
  loss->add_option("--catalog", loss_args.catalog, "constraint catalog JSON");
  loss->add_option("--labels", loss_args.labels, "label map whose ignore pixels are excluded");
  loss->add_option("--cross-entropy", loss_args.cross_entropy, "external cross-entropy value");
  loss_flags.attach(loss, true, false);

  CheckArgs check_args;
  EngineFlags check_flags;
  auto* chk = app.add_subcommand("check", "report enclosures and discontinuities of a prediction");
  chk->add_option("gt", check_args.gt)->required();
  chk->add_option("pred", check_args.pred)->required();
  chk->add_option("--num-classes", check_args.num_classes);
  chk->add_option("--report", check_args.report, "also write the JSON report here");
  chk->add_option("--overlay", check_args.overlay, "PNG/PPM with enclosures in red");
  check_flags.attach(chk, false, true);

  AnalyzeArgs analyze_args;
  EngineFlags analyze_flags;
  auto* ana = app.add_subcommand("analyze", "build a constraint catalog from a label corpus");
  ana->add_option("corpus", analyze_args.corpus, "directory of .pgm/.png label maps")->required();
  ana->add_option("--catalog-out", analyze_args.catalog_out, "catalog JSON output");
  ana->add_option("--predictions", analyze_args.predictions,
                  "directory of predicted maps scored against the catalog");
  ana->add_option("--corpus-id", analyze_args.corpus_id);
  ana->add_option("--num-classes", analyze_args.num_classes);
  analyze_flags.attach(ana, false, true);

  GradArgs grad_args;
  EngineFlags grad_flags;
  auto* grad = app.add_subcommand("gradcheck", "finite-difference check of the full penalty");
  grad->add_option("--rows", grad_args.rows);
  grad->add_option("--cols", grad_args.cols);
  grad->add_option("--classes", grad_args.classes);
  grad->add_option("--seed", grad_args.seed);
  grad->add_option("--probes", grad_args.probes);
  grad->add_option("--tol", grad_args.tolerance);
  grad->add_option("--step", grad_args.step);
  grad_flags.attach(grad, true, false);

  SynthArgs synth_args;
  auto* syn = app.add_subcommand("synth", "generate a fixture label map and optional scores");
  syn->add_option("--kind", synth_args.kind,
                  "enclosure|broken_bar|clean|ring|random_binary");
  syn->add_option("--rows", synth_args.spec.rows);
  syn->add_option("--cols", synth_args.spec.cols);
  syn->add_option("--classes", synth_args.spec.num_classes);
  syn->add_option("--inner", synth_args.spec.inner);
  syn->add_option("--outer", synth_args.spec.outer);
  syn->add_option("--background", synth_args.spec.background);
  syn->add_option("--gap", synth_args.spec.gap);
  syn->add_option("--bar-length", synth_args.spec.bar_length);
  syn->add_flag("--at-border", synth_args.spec.at_border);
  syn->add_option("--density", synth_args.spec.density);
  syn->add_option("--seed", synth_args.spec.seed);
  syn->add_option("--p-fg", synth_args.spec.p_fg);
  syn->add_option("--p-context", synth_args.spec.p_context);
  syn->add_option("--out", synth_args.out, "label map (.pgm or .png)")->required();
  syn->add_option("--scores-out", synth_args.scores_out, "SFT1 score tensor");

  BenchArgs bench_args;
  EngineFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "time the forward pass on a C*(C-1)-channel stack");
  bench->add_option("--classes", bench_args.classes);
  bench->add_option("--size", bench_args.size);
  bench->add_option("--seed", bench_args.seed);
  bench_flags.attach(bench, true, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    EngineConfig base;
    if (!config_path.empty()) base = read_config(config_path, base);
    if (*loss) {
      const auto cfg = loss_flags.apply(base);
      cfg.validate();
      return cfg.precision == Precision::single ? run_loss<float>(loss_args, cfg)
                                                : run_loss<double>(loss_args, cfg);
    }
    if (*chk) {
      const auto cfg = check_flags.apply(base);
      cfg.validate(false);
      return run_check(check_args, cfg);
    }
    if (*ana) {
      const auto cfg = analyze_flags.apply(base);
      cfg.validate(false);
      return run_analyze(analyze_args, cfg);
    }
    if (*grad) return run_gradcheck(grad_args, grad_flags.apply(base));
    if (*syn) return run_synth(synth_args);
    if (*bench) {
      EngineConfig cfg = base;
      if (config_path.empty()) cfg.precision = Precision::single;
      cfg = bench_flags.apply(cfg);
      return cfg.precision == Precision::single ? run_bench<float>(bench_args, cfg)
                                                : run_bench<double>(bench_args, cfg);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ContractError& e) {
    // Value preconditions on user data (NaN scores, negative cross entropy).
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
