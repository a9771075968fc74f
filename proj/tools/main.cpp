#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "analysis.hpp"
#include "nnqft/snapshot.hpp"
#include "nnqft/wick.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nnqft;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kSchemaVersion = 1;

struct Options {
  std::string config;
  std::string out = ".";
  std::string snapshots;
  std::string seed;
  std::vector<int> widths;
  int width = 0;
  std::vector<std::string> cutoffs;
  std::string cutoff;
  int threads = 0;
  int quad_points = 0;
  bool desk_scale = false;
  bool paper_scale = false;
  bool train = false;
  std::string model = "all";
  std::vector<std::string> stages;
};

double parse_cutoff_text(const std::string& s) {
  if (s == "inf" || s == "infinity") return kInfiniteCutoff;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::Config, "invalid cutoff '" + s + "'");
}

std::string hex(std::uint64_t v) {
  std::ostringstream o;
  o << std::hex << v;
  return o.str();
}

std::string cutoff_text(double c) {
  if (std::isinf(c)) return "inf";
  std::ostringstream o;
  o << std::setprecision(17) << c;
  return o.str();
}

json cutoff_json(double c) { return std::isinf(c) ? json("inf") : json(c); }

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream o;
  o << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return o.str();
}

/// Loaded config with command-line overrides folded into the hash.
struct Context {
  Options opt;
  ExperimentConfig cfg;
  EnsembleOptions ensemble;
  fs::path out;
  fs::path snapshots;
  std::vector<std::string> outputs;
  std::string started;
};

Context make_context(const Options& opt) {
  Context ctx;
  ctx.opt = opt;
  ctx.started = now_utc();
  ctx.cfg = load_config(opt.config);
  auto& cfg = ctx.cfg;
  std::string overrides;
  if (opt.desk_scale && opt.paper_scale) {
    throw Error(ErrorCode::Config, "--desk-scale and --paper-scale are exclusive");
  }
  if (opt.desk_scale) {
    apply_desk_scale(cfg.plan);
    overrides += "|desk";
  }
  if (opt.paper_scale) {
    apply_paper_scale(cfg.plan);
    overrides += "|paper";
  }
  if (!opt.seed.empty()) {
    try {
      std::size_t used = 0;
      cfg.plan.seed = std::stoull(opt.seed, &used);
      if (used != opt.seed.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::Config, "--seed must be an unsigned 64-bit integer");
    }
    overrides += "|seed=" + opt.seed;
  }
  if (!opt.widths.empty()) {
    cfg.plan.widths = opt.widths;
    overrides += "|widths";
    for (int w : opt.widths) overrides += "," + std::to_string(w);
  }
  if (!overrides.empty()) cfg.hash = fnv1a64(hex(cfg.hash) + overrides);
  if (opt.quad_points > 0) cfg.analysis.quad_points = opt.quad_points;
  if (!opt.cutoff.empty()) cfg.analysis.cutoff = parse_cutoff_text(opt.cutoff);
  if (!opt.cutoffs.empty()) {
    cfg.analysis.cutoffs.clear();
    for (const auto& c : opt.cutoffs) cfg.analysis.cutoffs.push_back(parse_cutoff_text(c));
  }
  validate(cfg.plan, cfg.arch.with_width(cfg.plan.widths.empty() ? 1 : cfg.plan.widths.front()));

  int threads = opt.threads;
  if (threads <= 0) {
    if (const char* env = std::getenv("NNQFT_THREADS")) threads = std::atoi(env);
  }
  ctx.ensemble.threads = std::max(threads, 0);
  ctx.out = opt.out;
  ctx.snapshots = opt.snapshots.empty() ? ctx.out : fs::path(opt.snapshots);
  fs::create_directories(ctx.out);
  return ctx;
}

std::ofstream open_output(Context& ctx, const std::string& name) {
  const auto path = ctx.out / name;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  f << std::setprecision(17);
  ctx.outputs.push_back(name);
  return f;
}

void write_json(Context& ctx, const std::string& name, json doc) {
  doc["schema_version"] = kSchemaVersion;
  auto f = open_output(ctx, name);
  f << doc.dump(2) << "\n";
}

void write_manifest(Context& ctx, const std::string& command) {
  json m;
  m["schema_version"] = kSchemaVersion;
  m["command"] = command;
  m["config"] = ctx.opt.config;
  m["config_hash"] = hex(ctx.cfg.hash);
  m["seed"] = std::to_string(ctx.cfg.plan.seed);
  m["started"] = ctx.started;
  m["finished"] = now_utc();
  m["outputs"] = ctx.outputs;
  m["artifact_version"] = kVersion;
  std::ofstream f(ctx.out / ("manifest_" + command + ".json"), std::ios::trunc);
  if (!f) throw Error(ErrorCode::Io, "cannot write manifest");
  f << m.dump(2) << "\n";
}

std::string snapshot_name(int width, bool train) {
  return std::string(train ? "snapshot_train_w" : "snapshot_w") + std::to_string(width) + ".json";
}

ExperimentConfig config_for_grid(const ExperimentConfig& cfg, const InputGrid& grid) {
  auto copy = cfg;
  copy.plan.grid = grid;
  return copy;
}

void cmd_sample_width(Context& ctx, int width, bool train) {
  const auto grid = train ? app::train_grid(ctx.cfg) : ctx.cfg.plan.grid;
  Snapshot snap;
  snap.config_hash = ctx.cfg.hash;
  snap.seed = ctx.cfg.plan.seed;
  snap.width = width;
  snap.nets_per_experiment = ctx.cfg.plan.nets_per_experiment;
  snap.arch = ctx.cfg.arch.with_width(width);
  snap.grid = grid;
  snap.experiments = app::sample(ctx.cfg, width, grid, ctx.ensemble);
  const auto name = snapshot_name(width, train);
  write_snapshot(snap, (ctx.out / name).string());
  ctx.outputs.push_back(name);
}

std::vector<int> selected_widths(const Context& ctx) {
  if (ctx.opt.width > 0) return {ctx.opt.width};
  return ctx.cfg.plan.widths;
}

void cmd_sample(Context& ctx) {
  for (int w : selected_widths(ctx)) cmd_sample_width(ctx, w, false);
  if (ctx.opt.train) {
    cmd_sample_width(ctx, ctx.opt.width > 0 ? ctx.opt.width : app::eft_width(ctx.cfg), true);
  }
}

std::vector<MomentAccumulator> load_ensemble(const Context& ctx, int width, bool train) {
  const auto path = ctx.snapshots / snapshot_name(width, train);
  const auto snap = read_snapshot(path.string());
  const auto grid = train ? app::train_grid(ctx.cfg) : ctx.cfg.plan.grid;
  check_snapshot(snap, config_for_grid(ctx.cfg, grid));
  if (snap.width != width) {
    throw Error(ErrorCode::SnapshotMismatch, "snapshot width differs from the file name");
  }
  return snap.experiments;
}

std::string point_text(const Point& p) {
  std::ostringstream o;
  o << std::setprecision(17);
  for (std::size_t a = 0; a < p.size(); ++a) o << (a ? ";" : "") << p[a];
  return o.str();
}

std::string indices_text(const std::vector<int>& idx) {
  std::string s;
  for (std::size_t a = 0; a < idx.size(); ++a) s += (a ? ";" : "") + std::to_string(idx[a]);
  return s;
}

void cmd_kernels(Context& ctx) {
  const KernelModel kernel(ctx.cfg.arch.with_width(app::eft_width(ctx.cfg)));
  const auto& grid = ctx.cfg.plan.grid;
  auto f = open_output(ctx, "kernels.csv");
  f << "i,j,x_i,x_j,K,K_W\n";
  for (int i = 0; i < grid.size(); ++i) {
    for (int j = 0; j < grid.size(); ++j) {
      f << i << ',' << j << ',' << point_text(grid.points[i]) << ','
        << point_text(grid.points[j]) << ',' << kernel(grid.points[i], grid.points[j]) << ','
        << kernel.weight_part(grid.points[i], grid.points[j]) << '\n';
    }
  }
}

void cmd_npt(Context& ctx) {
  json summary = json::array();
  const auto& grid = ctx.cfg.plan.grid;
  for (int w : selected_widths(ctx)) {
    const KernelModel kernel(ctx.cfg.arch.with_width(w));
    const auto acc = load_ensemble(ctx, w, false);
    const auto gram = kernel.gram(grid);
    auto f = open_output(ctx, "npt_w" + std::to_string(w) + ".csv");
    f << "order,indices,G,G_GP,delta,m,m_std,ci_low,ci_high,degenerate\n";
    json entry{{"width", w}};
    for (int order : {2, 4, 6}) {
      const auto rep = deviation(empirical_npt(acc, order), gp_tensor(gram, order));
      for (std::size_t m = 0; m < rep.gp.size(); ++m) {
        f << order << ',' << indices_text(rep.gp.indices(m)) << ','
          << rep.gp[m] + rep.delta[m] << ',' << rep.gp[m] << ',' << rep.delta[m] << ','
          << rep.m[m] << ',' << rep.m_std[m] << ',' << rep.ci_low[m] << ',' << rep.ci_high[m]
          << ',' << (rep.degenerate[m] ? 1 : 0) << '\n';
      }
      entry["m" + std::to_string(order)] = {{"mean_abs", rep.mean_abs_m},
                                            {"background", rep.background}};
    }
    summary.push_back(entry);
  }
  write_json(ctx, "npt_summary.json", {{"widths", summary}});
}

json slope_json(const std::optional<SlopeFit>& s) {
  if (!s) return nullptr;
  return {{"slope", s->slope}, {"intercept", s->intercept}, {"r_squared", s->r_squared},
          {"points", s->points}};
}

app::ScalingSummary cmd_scaling(Context& ctx) {
  std::vector<app::WidthStats> stats;
  for (int w : ctx.cfg.plan.widths) {
    const KernelModel kernel(ctx.cfg.arch.with_width(w));
    stats.push_back(app::width_stats(kernel, ctx.cfg.plan.grid, load_ensemble(ctx, w, false)));
  }
  auto f = open_output(ctx, "scaling.csv");
  f << "width,m2,bg2,m4,bg4,m6,bg6,g6_conn,g6_conn_bg\n";
  for (const auto& s : stats) {
    f << s.width << ',' << s.mean_abs_m[0] << ',' << s.background[0] << ',' << s.mean_abs_m[1]
      << ',' << s.background[1] << ',' << s.mean_abs_m[2] << ',' << s.background[2] << ','
      << s.g6_conn << ',' << s.g6_conn_background << '\n';
  }
  const auto sum = app::scaling(stats);
  write_json(ctx, "scaling.json",
             {{"m2_below_background", sum.m2_below_background},
              {"g4", slope_json(sum.g4)},
              {"g6", slope_json(sum.g6)},
              {"g6_conn", slope_json(sum.g6_conn)}});
  return sum;
}

int analysis_width(const Context& ctx) {
  return ctx.opt.width > 0 ? ctx.opt.width : app::eft_width(ctx.cfg);
}

app::LambdaResult cmd_extract_lambda(Context& ctx) {
  const int w = analysis_width(ctx);
  const KernelModel kernel(ctx.cfg.arch.with_width(w));
  const auto& grid = ctx.cfg.plan.grid;
  const double cutoff = app::analysis_cutoff(ctx.cfg);
  const auto res = app::extract_lambda(kernel, grid, load_ensemble(ctx, w, false), cutoff,
                                       app::quadrature_for(kernel, grid, ctx.cfg.analysis));
  const auto tag = "_w" + std::to_string(w);
  auto f = open_output(ctx, "lambda" + tag + ".csv");
  f << "indices,lambda_m,vertex4\n";
  for (std::size_t m = 0; m < res.lambda_m.size(); ++m) {
    f << indices_text(res.lambda_m.indices(m)) << ',' << res.lambda_m[m] << ','
      << res.vertex4[m] << '\n';
  }
  write_json(ctx, "lambda" + tag + ".json",
             {{"width", w},
              {"cutoff", cutoff_json(cutoff)},
              {"lambda_bar", res.lambda_bar},
              {"lambda_rel_spread", res.rel_spread}});
  return res;
}

app::G6Result cmd_predict_g6(Context& ctx, const app::LambdaResult& lambda) {
  const int w = analysis_width(ctx);
  const auto res = app::predict_g6(lambda, load_ensemble(ctx, w, false));
  const auto tag = "_w" + std::to_string(w);
  auto f = open_output(ctx, "g6" + tag + ".csv");
  f << "indices,G6,GP,prediction,ratio_prediction,ratio_gp,delta\n";
  for (std::size_t m = 0; m < res.g6.size(); ++m) {
    f << indices_text(res.g6.indices(m)) << ',' << res.g6[m] << ',' << res.gp[m] << ','
      << res.prediction[m] << ',' << res.prediction[m] / res.g6[m] << ','
      << res.gp[m] / res.g6[m] << ',' << res.delta.delta[m] << '\n';
  }
  write_json(ctx, "g6" + tag + ".json",
             {{"width", w},
              {"lambda_bar", lambda.lambda_bar},
              {"cutoff", cutoff_json(lambda.cutoff)},
              {"delta6_mean_abs", res.delta.mean_abs},
              {"delta6_gp_mean_abs", res.delta_gp.mean_abs},
              {"closer_fraction", res.closer_fraction},
              {"in_band_fraction", res.in_band_fraction}});
  return res;
}

app::LambdaResult lambda_for_g6(Context& ctx) {
  const int w = analysis_width(ctx);
  const KernelModel kernel(ctx.cfg.arch.with_width(w));
  const auto& grid = ctx.cfg.plan.grid;
  return app::extract_lambda(kernel, grid, load_ensemble(ctx, w, false),
                             app::analysis_cutoff(ctx.cfg),
                             app::quadrature_for(kernel, grid, ctx.cfg.analysis));
}

SweepResult cmd_rg_sweep(Context& ctx) {
  const int w = analysis_width(ctx);
  const KernelModel kernel(ctx.cfg.arch.with_width(w));
  const auto& grid = ctx.cfg.plan.grid;
  const auto cutoffs = app::sweep_cutoffs(ctx.cfg);
  auto sweep = cutoff_sweep(empirical_npt(load_ensemble(ctx, w, false), 4).pooled, kernel, grid,
                            cutoffs, app::quadrature_for(kernel, grid, ctx.cfg.analysis));
  const auto tag = "_w" + std::to_string(w);
  auto f = open_output(ctx, "rg" + tag + ".csv");
  f << "cutoff,lambda_bar,spread,error\n";
  for (const auto& p : sweep.points) {
    f << cutoff_text(p.cutoff) << ',' << p.lambda_bar << ',' << p.rel_spread << ','
      << (p.error ? "\"" + *p.error + "\"" : "") << '\n';
  }
  json doc{{"width", w}, {"min_cutoff", app::sweep_min_cutoff(ctx.cfg)}};
  doc["theory_slope"] = sweep.activation == Activation::ReLU ? json(sweep.theory_slope) : json(nullptr);
  try {
    apply_fit(sweep, app::sweep_min_cutoff(ctx.cfg));
    doc["slope"] = sweep.slope;
    doc["intercept"] = sweep.intercept;
    doc["stderr"] = sweep.slope_stderr;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientPoints) throw;
    doc["slope"] = nullptr;
    doc["stderr"] = nullptr;
    doc["fit_error"] = e.what();
  }
  write_json(ctx, "rg" + tag + ".json", doc);
  return sweep;
}

std::map<FitModel, FitReport> cmd_fit(Context& ctx) {
  const int w = analysis_width(ctx);
  const KernelModel kernel(ctx.cfg.arch.with_width(w));
  const double cutoff = app::analysis_cutoff(ctx.cfg);
  const auto in = app::fit_inputs(kernel, app::train_grid(ctx.cfg), load_ensemble(ctx, w, true),
                                  ctx.cfg.plan.grid, load_ensemble(ctx, w, false), cutoff,
                                  ctx.cfg.analysis);
  std::vector<FitModel> models;
  if (ctx.opt.model == "all") {
    models = {FitModel::M0, FitModel::M1, FitModel::M2, FitModel::M3};
  } else {
    models = {parse_fit_model(ctx.opt.model)};
  }
  std::map<FitModel, FitReport> out;
  for (auto m : models) {
    json doc{{"model", std::string(to_string(m))}, {"width", w},
             {"cutoff", cutoff_json(cutoff)}};
    try {
      const auto r = app::fit_and_evaluate(m, in);
      out[m] = r;
      doc.update({{"lambda0", r.lambda0},
                  {"lambda2", r.lambda2},
                  {"lambda_nl", r.lambda_nl},
                  {"train_mse", r.train_mse},
                  {"test_mse", r.test_mse},
                  {"test_mape", r.test_mape},
                  {"test_excluded", r.test_excluded}});
    } catch (const Error& e) {
      // a single model's collinear features do not stop the others
      if (e.code() != ErrorCode::CollinearFeatures || models.size() == 1) throw;
      doc["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    }
    write_json(ctx, "fit_" + std::string(to_string(m)) + ".json", doc);
  }
  return out;
}

const std::vector<std::string> kStages{"sample", "npt", "scaling", "extract-lambda",
                                       "predict-g6", "rg-sweep", "fit-couplings"};

void cmd_pipeline(Context& ctx) {
  std::vector<std::string> stages = ctx.opt.stages.empty() ? kStages : ctx.opt.stages;
  std::size_t last = 0;
  for (const auto& s : stages) {
    const auto it = std::find(kStages.begin(), kStages.end(), s);
    if (it == kStages.end()) throw Error(ErrorCode::Config, "unknown stage '" + s + "'");
    const auto pos = static_cast<std::size_t>(it - kStages.begin());
    if (pos < last) throw Error(ErrorCode::Config, "stages out of dependency order at '" + s + "'");
    last = pos;
  }
  ctx.opt.width = 0;
  ctx.snapshots = ctx.out;
  json summary;
  std::optional<app::LambdaResult> lambda;
  for (const auto& s : stages) {
    try {
      if (s == "sample") {
        ctx.opt.train = true;
        cmd_sample(ctx);
      } else if (s == "npt") {
        cmd_npt(ctx);
      } else if (s == "scaling") {
        const auto sc = cmd_scaling(ctx);
        summary["m2_below_background"] = sc.m2_below_background;
        summary["g4_slope"] = sc.g4 ? json(sc.g4->slope) : json(nullptr);
        summary["g6_slope"] = sc.g6 ? json(sc.g6->slope) : json(nullptr);
        summary["g6_conn_slope"] = sc.g6_conn ? json(sc.g6_conn->slope) : json(nullptr);
      } else if (s == "extract-lambda") {
        lambda = cmd_extract_lambda(ctx);
        summary["lambda_bar"] = lambda->lambda_bar;
        summary["lambda_rel_spread"] = lambda->rel_spread;
      } else if (s == "predict-g6") {
        if (!lambda) lambda = lambda_for_g6(ctx);
        const auto g6 = cmd_predict_g6(ctx, *lambda);
        summary["delta6_mean_abs"] = g6.delta.mean_abs;
        summary["g6_closer_fraction"] = g6.closer_fraction;
      } else if (s == "rg-sweep") {
        const auto sweep = cmd_rg_sweep(ctx);
        summary["rg_slope"] = sweep.slope_stderr > 0.0 || sweep.slope != 0.0 ? json(sweep.slope)
                                                                               : json(nullptr);
      } else if (s == "fit-couplings") {
        ctx.opt.model = "all";
        json fits;
        for (const auto& [m, r] : cmd_fit(ctx)) {
          fits[std::string(to_string(m))] = {{"test_mape", r.test_mape}, {"lambda0", r.lambda0}};
        }
        summary["fits"] = fits;
      }
    } catch (const Error& e) {
      throw Error(e.code(), "stage " + s + ": " + e.what());
    }
  }
  for (const char* key : {"m2_below_background", "g4_slope", "g6_conn_slope", "lambda_rel_spread",
                          "delta6_mean_abs"}) {
    if (!summary.contains(key)) summary[key] = nullptr;
  }
  summary["config_hash"] = hex(ctx.cfg.hash);
  write_json(ctx, "summary.json", summary);
}

int report_error(const std::string& code, const std::string& message) {
  json err{{"error", code}, {"message", message}};
  std::cerr << err.dump() << std::endl;
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-width neural network ensembles as non-Gaussian field theories"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "experiment config (JSON)")->required();
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", opt.seed, "override the plan seed (u64)");
    sub->add_option("--widths", opt.widths, "override the plan widths")->delimiter(',');
    sub->add_option("--threads", opt.threads, "worker cap (default NNQFT_THREADS or all cores)");
    sub->add_option("--quad-points", opt.quad_points, "quadrature nodes per panel per axis");
    auto* desk = sub->add_flag("--desk-scale", opt.desk_scale, "20 experiments x 5e4 nets");
    sub->add_flag("--paper-scale", opt.paper_scale, "100 experiments x 1e5 nets")->excludes(desk);
  };
  auto reads = [&](CLI::App* sub) {
    sub->add_option("--snapshots", opt.snapshots, "snapshot directory (default --out)");
    sub->add_option("--width", opt.width, "width to analyse");
  };
  auto with_cutoff = [&](CLI::App* sub) {
    sub->add_option("--cutoff", opt.cutoff, "integration cutoff, a number or inf");
  };

  auto* sample = app.add_subcommand("sample", "sample ensembles and write moment snapshots");
  common(sample);
  sample->add_option("--width", opt.width, "only this width");
  sample->add_flag("--train", opt.train, "also sample the train grid at the analysis width");

  auto* kernels = app.add_subcommand("kernels", "kernel values over the grid (CSV)");
  common(kernels);

  auto* npt = app.add_subcommand("npt", "n-point deviations per width");
  common(npt);
  reads(npt);

  auto* scaling = app.add_subcommand("scaling", "width scaling of deviations");
  common(scaling);
  reads(scaling);

  auto* extract = app.add_subcommand("extract-lambda", "measured quartic couplings");
  common(extract);
  reads(extract);
  with_cutoff(extract);

  auto* g6 = app.add_subcommand("predict-g6", "6-point prediction from the mean coupling");
  common(g6);
  reads(g6);
  with_cutoff(g6);

  auto* rg = app.add_subcommand("rg-sweep", "coupling flow with the cutoff");
  common(rg);
  reads(rg);
  rg->add_option("--cutoffs", opt.cutoffs, "cutoff list")->delimiter(',');

  auto* fit = app.add_subcommand("fit-couplings", "fit coupling models on train, score on test");
  common(fit);
  reads(fit);
  with_cutoff(fit);
  fit->add_option("--model", opt.model, "m0, m1, m2, m3 or all")
      ->check(CLI::IsMember({"m0", "m1", "m2", "m3", "all"}));

  auto* pipe = app.add_subcommand("pipeline", "run every stage and write summary.json");
  common(pipe);
  with_cutoff(pipe);
  pipe->add_option("--stages", opt.stages, "subset of stages in order")->delimiter(',');
  pipe->add_option("--cutoffs", opt.cutoffs, "cutoff list for the sweep")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage-error", e.what());
  }

  try {
    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    Context ctx = make_context(opt);
    if (name == "sample") {
      cmd_sample(ctx);
    } else if (name == "kernels") {
      cmd_kernels(ctx);
    } else if (name == "npt") {
      cmd_npt(ctx);
    } else if (name == "scaling") {
      cmd_scaling(ctx);
    } else if (name == "extract-lambda") {
      cmd_extract_lambda(ctx);
    } else if (name == "predict-g6") {
      cmd_predict_g6(ctx, lambda_for_g6(ctx));
    } else if (name == "rg-sweep") {
      cmd_rg_sweep(ctx);
    } else if (name == "fit-couplings") {
      cmd_fit(ctx);
    } else if (name == "pipeline") {
      cmd_pipeline(ctx);
    }
    write_manifest(ctx, name);
  } catch (const Error& e) {
    return report_error(std::string(to_string(e.code())), e.what());
  } catch (const std::exception& e) {
    return report_error("internal-error", e.what());
  }
  return 0;
}
