#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcu/io.hpp"
#include "dcu/penner.hpp"
#include "dcu/uniformize.hpp"

namespace dcu::cli {

namespace {

using nlohmann::ordered_json;

// Options shared by every subcommand.
struct CommonOpts {
  std::string out;     // report destination; empty = stdout
  bool quiet = false;  // suppress stderr progress
  std::string format;  // input format override: off | obj | metric-json
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("--out", opts.out, "Write the JSON report here (default: stdout)");
  sub->add_flag("--quiet", opts.quiet, "Suppress progress output on stderr");
  sub->add_option("--format", opts.format,
                  "Input format override: off, obj or metric-json")
      ->check(CLI::IsMember({"off", "obj", "metric-json"}));
}

ParsedMesh load(const std::string& path, const CommonOpts& opts) {
  if (opts.format.empty()) return parse_mesh_file(path);
  MeshFormat f = opts.format == "off"   ? MeshFormat::Off
                 : opts.format == "obj" ? MeshFormat::Obj
                                        : MeshFormat::MetricJson;
  return parse_mesh_file(path, f);
}

void emit(const ordered_json& j, const std::string& out) {
  std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error(ErrorCode::ParseError, out + ": cannot open for writing");
  f << text;
}

std::mutex stderr_mutex;

void progress(const CommonOpts& opts, const std::string& line) {
  if (opts.quiet) return;
  std::lock_guard<std::mutex> lock(stderr_mutex);
  std::cerr << line << "\n";
}

ordered_json strings(const std::vector<double>& vals) {
  ordered_json arr = ordered_json::array();
  for (double v : vals) arr.push_back(format_double(v));
  return arr;
}

ordered_json flip_entries(const FlipLog& log) {
  ordered_json arr = ordered_json::array();
  for (const FlipRecord& rec : log.entries)
    arr.push_back({{"edge", rec.e},
                   {"old_length", format_double(rec.old_length)},
                   {"new_length", format_double(rec.new_length)},
                   {"iteration", rec.index}});
  return arr;
}

ordered_json header(const char* command, const std::string& input) {
  ordered_json j;
  j["format"] = "dcu-report/1";
  j["command"] = command;
  j["input"] = input;
  return j;
}

// Embeds a metric document under a report key, preserving key order.
ordered_json metric_json(const MarkedSurface& m, const PLMetric& d,
                         const std::optional<std::vector<double>>& target = {},
                         const std::optional<std::vector<double>>& u = {}) {
  return ordered_json::parse(serialize_metric(document_from(m, d, target, u)));
}

ordered_json error_json(const Error& err) {
  ordered_json j;
  j["format"] = "dcu-error/1";
  j["error"] = error_code_name(err.code());
  std::string message = err.what();
  std::string prefix = std::string(error_code_name(err.code())) + ": ";
  if (message.rfind(prefix, 0) == 0) message = message.substr(prefix.size());
  j["message"] = message;
  if (const auto* solve = dynamic_cast<const SolveError*>(&err)) {
    j["termination"] = termination_name(solve->report().termination);
    j["iterations"] = solve->report().iterations;
    if (!solve->report().residual_max_history.empty())
      j["residual_max"] =
          format_double(solve->report().residual_max_history.back());
  }
  return j;
}

// --target: "uniform", "flat", or a path to a JSON array (or an object with
// a "target_curvature" member). Empty string falls back to the input file's
// own target map if present, else uniform.
CurvatureTarget resolve_target(const std::string& spec, const ParsedMesh& pm) {
  if (spec.empty()) {
    if (pm.target_curvature) return CurvatureTarget{*pm.target_curvature};
    return CurvatureTarget::uniform(pm.surface);
  }
  if (spec == "uniform") return CurvatureTarget::uniform(pm.surface);
  if (spec == "flat") return CurvatureTarget::flat(pm.surface);
  std::ifstream in(spec, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, spec + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  ordered_json j;
  try {
    j = ordered_json::parse(buf.str());
  } catch (const ordered_json::parse_error& err) {
    throw Error(ErrorCode::ParseError, spec + ": " + err.what());
  }
  const ordered_json* arr = &j;
  if (j.is_object()) {
    if (!j.contains("target_curvature"))
      throw Error(ErrorCode::InvalidMetric,
                  spec + ": no \"target_curvature\" member");
    arr = &j["target_curvature"];
  }
  if (!arr->is_array())
    throw Error(ErrorCode::InvalidMetric,
                spec + ": target curvature must be an array");
  CurvatureTarget target;
  for (size_t i = 0; i < arr->size(); i++) {
    const auto& v = (*arr)[i];
    if (v.is_string())
      target.k_star.push_back(parse_double(
          v.get<std::string>(), spec + ": target_curvature[" +
                                    std::to_string(i) + "]"));
    else if (v.is_number())
      target.k_star.push_back(v.get<double>());
    else
      throw Error(ErrorCode::InvalidMetric,
                  spec + ": target_curvature[" + std::to_string(i) +
                      "] must be a number");
  }
  return target;
}

ordered_json solve_report_json(const char* command, const std::string& input,
                               const SolveReport& rep,
                               const CurvatureTarget& target) {
  ordered_json j = header(command, input);
  j["termination"] = termination_name(rep.termination);
  j["iterations"] = rep.iterations;
  j["residual_max"] = format_double(rep.residual_max_history.back());
  j["residual_l2"] = format_double(rep.residual_l2_history.back());
  j["residual_max_history"] = strings(rep.residual_max_history);
  j["residual_l2_history"] = strings(rep.residual_l2_history);
  j["flips_total"] = rep.total_flips();
  j["flips_per_iteration"] = rep.flips_per_iteration;
  j["initial_repair"] = flip_entries(rep.initial_repair);
  j["flip_log"] = flip_entries(rep.flip_log);
  j["cocircular_edges"] = rep.cocircular_edges;
  j["u_final"] = strings(rep.u_final.u);
  j["metric"] = metric_json(rep.surface, rep.metric, target.k_star,
                            rep.u_final.u);
  j["wall_time_ms"] = rep.wall_time_ms;  // timing; not covered by determinism
  return j;
}

// Solver-family options shared by `uniformize` and `flow`.
struct SolveOpts {
  std::vector<std::string> inputs;
  std::string target;
  double tol = 1e-10;
  int max_iters = 0;  // 0 = keep the config default
  double step = 0.1;
  double initial_noise = 0.0;
  unsigned long long seed = 0;
};

void add_solve(CLI::App* sub, SolveOpts& opts, bool flow) {
  sub->add_option("inputs", opts.inputs, "Input mesh/metric files")
      ->required()
      ->expected(-1);
  sub->add_option("--target", opts.target,
                  "Target curvature: uniform, flat, or a JSON file");
  sub->add_option("--tol", opts.tol, "Convergence threshold on max|K - K*|");
  sub->add_option("--max-iters", opts.max_iters, "Iteration cap");
  if (flow) sub->add_option("--step", opts.step, "Euler step size");
  sub->add_option("--initial-noise", opts.initial_noise,
                  "Uniform random perturbation added to the initial factors");
  sub->add_option("--seed", opts.seed, "RNG seed for --initial-noise");
}

SolverConfig config_from(const SolveOpts& opts, bool flow) {
  SolverConfig cfg;
  cfg.residual_tol = opts.tol;
  if (opts.max_iters > 0) {
    if (flow)
      cfg.max_flow_iters = opts.max_iters;
    else
      cfg.max_newton_iters = opts.max_iters;
  }
  cfg.flow_step = opts.step;
  cfg.initial_noise = opts.initial_noise;
  cfg.rng_seed = opts.seed;
  return cfg;
}

int thread_cap(size_t jobs) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned cap = hw;
  if (const char* env = std::getenv("UNIFORMIZER_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    cap = v > 0 ? static_cast<unsigned>(v) : 1u;
  }
  return static_cast<int>(std::min<size_t>(cap, jobs));
}

// Runs one solve per input, in parallel up to UNIFORMIZER_THREADS wide.
// A single input prints its report directly; several inputs produce one
// batch document with per-file reports in input order.
int run_solve_batch(const char* command, const SolveOpts& opts,
                    const CommonOpts& common, bool flow) {
  const size_t n = opts.inputs.size();
  std::vector<ordered_json> results(n);
  std::vector<char> failed(n, 0);
  std::atomic<size_t> next{0};

  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      const std::string& path = opts.inputs[i];
      try {
        ParsedMesh pm = load(path, common);
        CurvatureTarget target = resolve_target(opts.target, pm);
        SolverConfig cfg = config_from(opts, flow);
        SolveReport rep =
            flow ? yamabe_flow(pm.surface, pm.metric, target, cfg)
                 : newton_uniformize(pm.surface, pm.metric, target, cfg);
        results[i] = solve_report_json(command, path, rep, target);
        progress(common, path + ": " + termination_name(rep.termination) +
                             " in " + std::to_string(rep.iterations) +
                             " iterations, " +
                             std::to_string(rep.total_flips()) + " flips");
      } catch (const Error& err) {
        results[i] = error_json(err);
        results[i]["input"] = path;
        failed[i] = 1;
        progress(common, path + ": " + err.what());
      }
    }
  };

  int width = thread_cap(n);
  if (width <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < width; t++) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  bool any_failed = std::any_of(failed.begin(), failed.end(),
                                [](char c) { return c != 0; });
  if (n == 1) {
    emit(results[0], common.out);
  } else {
    ordered_json batch;
    batch["format"] = "dcu-batch/1";
    batch["command"] = command;
    batch["reports"] = ordered_json::array();
    for (auto& r : results) batch["reports"].push_back(std::move(r));
    emit(batch, common.out);
  }
  return any_failed ? 1 : 0;
}

int run_curvature(const std::string& input, const CommonOpts& common) {
  ParsedMesh pm = load(input, common);
  CurvatureField k = curvature_field(pm.surface, pm.metric);
  ordered_json j = header("curvature", input);
  j["vertices"] = pm.surface.vertex_count();
  j["edges"] = pm.surface.edge_count();
  j["faces"] = pm.surface.face_count();
  j["euler_characteristic"] = pm.surface.euler_characteristic();
  j["genus"] = (2 - pm.surface.euler_characteristic()) / 2;
  j["curvature"] = strings(k.k);
  double total = std::accumulate(k.k.begin(), k.k.end(), 0.0);
  j["total_curvature"] = format_double(total);
  emit(j, common.out);
  return 0;
}

int run_check_delaunay(const std::string& input, const CommonOpts& common) {
  ParsedMesh pm = load(input, common);
  ordered_json violated = ordered_json::array();
  ordered_json cocircular = ordered_json::array();
  for (EdgeId e = 0; e < pm.surface.edge_count(); e++) {
    switch (is_delaunay_edge(pm.surface, pm.metric, e)) {
      case DelaunayClass::Violated: violated.push_back(e); break;
      case DelaunayClass::Cocircular: cocircular.push_back(e); break;
      case DelaunayClass::StrictlyDelaunay: break;
    }
  }
  ordered_json j = header("check-delaunay", input);
  j["is_delaunay"] = violated.empty();
  j["violated"] = std::move(violated);
  j["cocircular"] = std::move(cocircular);
  emit(j, common.out);
  return 0;
}

int run_make_delaunay(const std::string& input, const CommonOpts& common) {
  ParsedMesh pm = load(input, common);
  MarkedSurface m = pm.surface;
  PLMetric d = pm.metric;
  FlipLog log = make_delaunay(m, d);
  ordered_json j = header("make-delaunay", input);
  j["flip_count"] = log.count();
  j["flips"] = flip_entries(log);
  j["metric"] = metric_json(m, d, pm.target_curvature, pm.conformal_factors);
  emit(j, common.out);
  progress(common, input + ": " + std::to_string(log.count()) + " flips");
  return 0;
}

int run_equivalent(const std::string& input_a, const std::string& input_b,
                   double tol, const CommonOpts& common) {
  ParsedMesh a = load(input_a, common);
  ParsedMesh b = load(input_b, common);
  if (!(a.surface == b.surface))
    throw Error(ErrorCode::InvalidMetric,
                "the two inputs must share one triangulation "
                "(same faces and gluing)");
  EquivalenceResult r =
      conformal_equivalent(a.surface, a.metric, b.metric, tol);
  ordered_json j = header("equivalent", input_a);
  j["input_b"] = input_b;
  j["tol"] = format_double(tol);
  j["equivalent"] = r.equivalent;
  j["max_rel_diff"] = format_double(r.max_rel_diff);
  j["normalized_a"] = strings(r.normalized_a);
  j["normalized_b"] = strings(r.normalized_b);
  emit(j, common.out);
  progress(common, std::string(r.equivalent ? "true" : "false") +
                       " (max relative difference " +
                       format_double(r.max_rel_diff) + ")");
  return 0;
}

int run_penner(const std::string& input, const CommonOpts& common) {
  ParsedMesh pm = load(input, common);
  MarkedSurface m = pm.surface;
  PLMetric d = pm.metric;
  FlipLog repair = make_delaunay(m, d);  // canonical chart for the invariants
  DecoratedMetric dm = pl_to_decorated(m, d);
  ordered_json j = header("penner", input);
  j["repair_flip_count"] = repair.count();
  j["lambda"] = strings(dm.lambda);
  j["horocycle_lengths"] = strings(horocycle_lengths(dm));
  j["shear"] = strings(shear_vector(dm));
  j["metric"] = metric_json(m, d);
  emit(j, common.out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Discrete conformal uniformization of closed triangulated "
               "surfaces",
               "uniformizer"};
  app.require_subcommand(1);

  CommonOpts c_curv, c_check, c_make, c_uni, c_flow, c_equiv, c_penner;
  std::string in_curv, in_check, in_make, in_penner, in_eq_a, in_eq_b;
  double eq_tol = 1e-6;
  SolveOpts s_uni, s_flow;

  CLI::App* curv = app.add_subcommand(
      "curvature", "Vertex curvatures 2*pi - cone angle of a metric");
  curv->add_option("input", in_curv, "Input mesh/metric file")->required();
  add_common(curv, c_curv);

  CLI::App* check = app.add_subcommand(
      "check-delaunay", "Classify every edge against the Delaunay inequality");
  check->add_option("input", in_check, "Input mesh/metric file")->required();
  add_common(check, c_check);

  CLI::App* make = app.add_subcommand(
      "make-delaunay", "Flip to an isometric Delaunay triangulation");
  make->add_option("input", in_make, "Input mesh/metric file")->required();
  add_common(make, c_make);

  CLI::App* uni = app.add_subcommand(
      "uniformize", "Newton solve for the target curvature");
  add_solve(uni, s_uni, /*flow=*/false);
  add_common(uni, c_uni);

  CLI::App* flow = app.add_subcommand(
      "flow", "Explicit-Euler curvature flow to the target curvature");
  add_solve(flow, s_flow, /*flow=*/true);
  add_common(flow, c_flow);

  CLI::App* equiv = app.add_subcommand(
      "equivalent", "Decide discrete conformal equivalence of two metrics");
  equiv->add_option("input_a", in_eq_a, "First metric")->required();
  equiv->add_option("input_b", in_eq_b, "Second metric")->required();
  equiv->add_option("--tol", eq_tol, "Relative length tolerance");
  add_common(equiv, c_equiv);

  CLI::App* penner = app.add_subcommand(
      "penner", "Lambda-lengths, horocycle lengths and shear coordinates");
  penner->add_option("input", in_penner, "Input mesh/metric file")->required();
  add_common(penner, c_penner);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // help/version exit 0; genuine usage errors exit 2
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(curv)) return run_curvature(in_curv, c_curv);
    if (app.got_subcommand(check)) return run_check_delaunay(in_check, c_check);
    if (app.got_subcommand(make)) return run_make_delaunay(in_make, c_make);
    if (app.got_subcommand(uni))
      return run_solve_batch("uniformize", s_uni, c_uni, /*flow=*/false);
    if (app.got_subcommand(flow))
      return run_solve_batch("flow", s_flow, c_flow, /*flow=*/true);
    if (app.got_subcommand(equiv))
      return run_equivalent(in_eq_a, in_eq_b, eq_tol, c_equiv);
    if (app.got_subcommand(penner)) return run_penner(in_penner, c_penner);
  } catch (const Error& err) {
    emit(error_json(err), std::string());
    return 1;
  } catch (const std::exception& err) {
    ordered_json j;
    j["format"] = "dcu-error/1";
    j["error"] = "Internal";
    j["message"] = err.what();
    emit(j, std::string());
    return 1;
  }
  return 2;  // unreachable; require_subcommand guarantees a match
}

}  // namespace dcu::cli
