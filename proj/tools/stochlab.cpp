// Command-line entry point. Every subcommand builds an experiment config and
// hands it to run_experiment, so a result file can always be regenerated
// from the config embedded in it (`stochlab run --config FILE`).
//
// Exit codes: 0 success, 1 error, 2 a conjecture check found a violation.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <numbers>

#include "stochlab/epidemic.hpp"
#include "stochlab/exact.hpp"
#include "stochlab/experiment.hpp"
#include "stochlab/mirrors_lattice.hpp"
#include "stochlab/needles.hpp"
#include "stochlab/saw.hpp"
#include "stochlab/simd/kernels.hpp"

using nlohmann::json;
using namespace stochlab;

namespace {

struct Common {
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned workers = 0;
  std::string output;
  std::string format = "csv";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Master seed (default: $STOCHLAB_SEED or built-in)")
      ->each([&c](const std::string&) { c.seed_given = true; });
  app->add_option("--workers", c.workers, "Worker threads (0: all cores); never changes results");
  app->add_option("--output,-o", c.output, "Write CSV here (plus .json, and .witness.txt on violations)");
  app->add_option("--format", c.format, "Stdout format when no --output is given")
      ->check(CLI::IsMember({"csv", "json"}));
}

int emit(const ExperimentConfig& config, const Common& c) {
  const auto record = run_experiment(config, c.workers);
  if (!config.output.empty()) {
    for (const auto& p : write_outputs(record)) std::cerr << "wrote " << p.string() << '\n';
  } else if (c.format == "json") {
    std::cout << to_json(record).dump(2) << '\n';
  } else {
    write_csv(record, std::cout);
  }
  if (record.violation) {
    std::cerr << "VIOLATION FOUND\n";
    if (!record.witness.empty()) std::cerr << record.witness;
    return 2;
  }
  return 0;
}

// Runs `module` with the params collected by the subcommand's options.
struct Command {
  CLI::App* app;
  std::string module;
  std::function<json()> params;
};

int selftest() {
  int failures = 0;
  auto check = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "ok   " : "FAIL ") << what << '\n';
    failures += !ok;
  };
  check(count_saws(LatticeKind::Square, 10).sigma == 44100, "square lattice sigma_10 = 44100");
  check(count_saws(LatticeKind::Hex, 10).sigma == 1218, "hexagonal lattice sigma_10 = 1218");
  const auto k2 = bunkbed_probabilities(SimpleGraph::complete(2), 0, 1, ExactProb(1, 2));
  check(k2.gap() >= 0, "bunkbed gap on K2 at p = 1/2 is non-negative");
  const auto ust = ust_check(SimpleGraph::complete(3));
  check(ust.p_e == ExactProb(2, 3) && ust.p_ef == ExactProb(1, 3), "spanning tree marginals on K3");
  check(enumerate_forests(SimpleGraph::complete(3)).count() == 7, "K3 has 7 forests");
  const auto field = MirrorField::explicit_field(10, {{{0, 1}, MirrorState::NE}});
  check(trace_ray(field, {{0, 0}, Heading::N}, 10, state_budget(10)).kind == TraceKind::Escaped,
        "single mirror deflects the ray out of the box");
  // Kernel backends must agree bit for bit.
  std::vector<double> ax, ay, ex, ey;
  RngStream s(1, 2);
  for (int i = 0; i < 257; ++i) {
    ax.push_back(s.uniform01() * 4 - 2);
    ay.push_back(s.uniform01() * 4 - 2);
    ex.push_back(s.uniform01() - 0.5);
    ey.push_back(s.uniform01() - 0.5);
  }
  const simd::SegmentSoA segs{ax, ay, ex, ey};
  std::vector<double> t1(257), s1(257), t2(257), s2(257);
  simd::scalar::ray_segment_params(0.1, 0.2, 0.6, 0.8, segs, t1, s1);
  bool same = true;
  if (simd::backend_available(simd::Backend::Avx2)) {
    simd::avx2::ray_segment_params(0.1, 0.2, 0.6, 0.8, segs, t2, s2);
    same = t1 == t2 && s1 == s2;
  }
  check(same, std::string("kernel backends agree (active: ") + simd::to_string(simd::active_backend()) + ")");
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochlab: simulation and exact checks for lattice and continuum probability models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", library_version());
  Common common;
  std::vector<Command> commands;

  auto command = [&](CLI::App* parent, const std::string& name, const std::string& desc,
                     const std::string& module) {
    auto* sub = parent->add_subcommand(name, desc);
    add_common(sub, common);
    commands.push_back({sub, module, nullptr});
    return sub;
  };

  // saw
  auto* saw = app.add_subcommand("saw", "Self-avoiding walks")->require_subcommand(1);
  std::string lattice = "square";
  int saw_n = 10, kappa_n = 20, sample_n = 100, sample_trials = 100;
  auto* saw_count = command(saw, "count", "Exact counts sigma_0..sigma_N", "saw-count");
  saw_count->add_option("--lattice", lattice)->check(CLI::IsMember({"square", "hex"}));
  saw_count->add_option("--n", saw_n, "Maximum length")->required();
  commands.back().params = [&] { return json{{"lattice", lattice}, {"n", saw_n}}; };
  std::string kappa_lattice = "hex";
  auto* saw_kappa = command(saw, "estimate-kappa", "sigma_n^(1/n), Fekete bound and power-law fit", "saw-kappa");
  saw_kappa->add_option("--lattice", kappa_lattice)->check(CLI::IsMember({"square", "hex"}));
  saw_kappa->add_option("--n", kappa_n);
  commands.back().params = [&] { return json{{"lattice", kappa_lattice}, {"n", kappa_n}}; };
  auto* saw_sample = command(saw, "sample", "Uniform walks rescaled by n^(-3/4)", "saw-sample");
  saw_sample->add_option("--lattice", lattice)->check(CLI::IsMember({"square", "hex"}));
  saw_sample->add_option("--n", sample_n);
  saw_sample->add_option("--trials", sample_trials);
  commands.back().params = [&] { return json{{"lattice", lattice}, {"n", sample_n}, {"trials", sample_trials}}; };

  // mirrors
  auto* mirrors = app.add_subcommand("mirrors", "Lattice mirror models")->require_subcommand(1);
  double mirror_p = 1.0, mirror_q = 0.5;
  std::vector<int> mirror_L{50, 100, 200};
  int mirror_trials = 1000;
  bool swap = false, flip_rows = false, flip_columns = false;
  std::string dump_path;
  auto* ehr = command(mirrors, "ehrenfest", "Escape probability of the northward ray", "mirrors-ehrenfest");
  ehr->add_option("--p", mirror_p);
  ehr->add_option("--L", mirror_L)->delimiter(',');
  ehr->add_option("--trials", mirror_trials);
  ehr->add_flag("--swap", swap, "Exchange the NE/NW labels");
  ehr->add_option("--dump-path", dump_path, "Write the first trial's path at the first L to this file");
  commands.back().params = [&] {
    return json{{"p", mirror_p}, {"L", mirror_L}, {"trials", mirror_trials}, {"swap", swap}};
  };
  auto* man = command(mirrors, "manhattan", "Manhattan pinball escape probability", "mirrors-manhattan");
  man->add_option("--q", mirror_q);
  man->add_option("--L", mirror_L)->delimiter(',');
  man->add_option("--trials", mirror_trials);
  man->add_flag("--flip-rows", flip_rows);
  man->add_flag("--flip-columns", flip_columns);
  commands.back().params = [&] {
    return json{{"q", mirror_q}, {"L", mirror_L}, {"trials", mirror_trials},
                {"flip_rows", flip_rows}, {"flip_columns", flip_columns}};
  };

  // needles
  auto* needles = app.add_subcommand("needles", "Poisson needle mirrors")->require_subcommand(1);
  double eps = 1.0, R = 20.0, side = 20.0;
  std::string law = "uniform";
  int budget = 100000, fields = 10, angles = 64, crossing_trials = 200, traces = 50;
  std::vector<double> eps_grid{0.5, 1.0, 1.5, 2.0, 2.5, 3.0}, t_grid{5, 10, 20, 40, 80};
  std::string trace_csv;
  auto* esc = command(needles, "escape", "Escape spectrum over initial angles", "needles-escape");
  esc->add_option("--epsilon", eps);
  esc->add_option("--law", law, "uniform | degenerate:A | atoms:P/Q,...:W,... | table:A,...:W,...");
  esc->add_option("--R", R);
  esc->add_option("--budget", budget, "Reflection budget per trace");
  esc->add_option("--fields", fields);
  esc->add_option("--angles", angles);
  commands.back().params = [&] {
    return json{{"epsilon", eps}, {"law", law}, {"R", R}, {"budget", budget}, {"fields", fields}, {"angles", angles}};
  };
  auto* cross = command(needles, "crossing", "Vacant left-right crossing probability", "needles-crossing");
  cross->add_option("--law", law);
  cross->add_option("--side", side);
  cross->add_option("--grid", eps_grid, "Needle lengths")->delimiter(',');
  cross->add_option("--trials", crossing_trials);
  commands.back().params = [&] {
    return json{{"law", law}, {"side", side}, {"epsilon", eps_grid}, {"trials", crossing_trials}};
  };
  auto* diff = command(needles, "diffusivity", "Variance of the ray position against arc length", "needles-diffusivity");
  std::string diff_law = "atoms:1/4,3/4:0.5,0.5";
  double diff_eps = 0.5, diff_R = 40.0;
  int diff_budget = 1000000;
  diff->add_option("--epsilon", diff_eps);
  diff->add_option("--law", diff_law);
  diff->add_option("--R", diff_R);
  diff->add_option("--budget", diff_budget);
  diff->add_option("--traces", traces);
  diff->add_option("--t-grid", t_grid)->delimiter(',');
  diff->add_option("--trace-csv", trace_csv, "Also write the trace polylines here");
  commands.back().params = [&] {
    return json{{"epsilon", diff_eps}, {"law", diff_law}, {"R", diff_R}, {"budget", diff_budget},
                {"traces", traces}, {"t", t_grid}};
  };

  // bunkbed / forest
  std::string graph_file, graph6;
  int max_vertices = 0;
  std::vector<std::string> p_grid;
  bool conditional = false;
  auto graph_params = [&] {
    json j;
    if (!graph_file.empty()) j["graphs"] = graph_file;
    if (!graph6.empty()) j["graph6"] = graph6;
    if (max_vertices > 0) j["max_vertices"] = max_vertices;
    return j;
  };
  auto add_graph_options = [&](CLI::App* sub) {
    auto* file = sub->add_option("--graph,--graphs", graph_file, "graph6 file");
    auto* one = sub->add_option("--graph6", graph6, "A single graph6 string");
    auto* all = sub->add_option("--max-vertices", max_vertices, "All connected graphs with at most N vertices");
    file->excludes(one)->excludes(all);
    one->excludes(all);
  };
  auto* bunkbed = app.add_subcommand("bunkbed", "Bunkbed inequality")->require_subcommand(1);
  auto* bcheck = command(bunkbed, "check", "Exact check over vertex pairs and a p grid", "bunkbed");
  add_graph_options(bcheck);
  bcheck->add_option("--p-grid", p_grid, "Rationals such as 1/10 or 0.3")->delimiter(',');
  bcheck->add_flag("--conditional", conditional, "Fix the open vertical edges; sweep every subset");
  commands.back().params = [&] {
    json j = graph_params();
    if (!p_grid.empty()) j["p"] = p_grid;
    j["conditional"] = conditional;
    return j;
  };
  auto* forest = app.add_subcommand("forest", "Negative correlation of uniform subgraph laws")->require_subcommand(1);
  std::string forest_class = "usf";
  auto* fcheck = command(forest, "check", "Exact pairwise correlation check", "forest");
  add_graph_options(fcheck);
  fcheck->add_option("--class", forest_class)->check(CLI::IsMember({"usf", "ucs", "ust"}));
  commands.back().params = [&] {
    json j = graph_params();
    j["class"] = forest_class;
    return j;
  };

  // oriented
  auto* oriented = app.add_subcommand("oriented", "Randomly oriented square lattice")->require_subcommand(1);
  double or_p = 0.5, enhance = 0.0;
  std::vector<int> or_L{50, 100, 200};
  int or_trials = 1000;
  auto* theta = command(oriented, "theta", "Probability that the origin reaches the box boundary", "oriented");
  theta->add_option("--p", or_p);
  theta->add_option("--L-grid", or_L)->delimiter(',');
  theta->add_option("--trials", or_trials);
  theta->add_option("--enhance", enhance, "Extra right/up passages with this density");
  commands.back().params = [&] {
    return json{{"p", or_p}, {"L", or_L}, {"trials", or_trials}, {"enhance", enhance}};
  };

  // epidemic
  auto* epidemic = app.add_subcommand("epidemic", "Spatial S/I/R epidemics")->require_subcommand(1);
  std::string model = "delayed";
  int dim = 2, ep_trials = 100;
  std::vector<double> alpha{1.0};
  EpidemicConfig ep;
  bool coupled = false;
  std::string event_log;
  auto add_epidemic = [&](CLI::App* sub, bool scan) {
    sub->add_option("--model", model)->check(CLI::IsMember({"diffusion", "delayed"}));
    sub->add_option("--d", dim)->check(CLI::IsMember({1, 2}));
    sub->add_option(scan ? "--alpha-grid" : "--alpha", alpha)->delimiter(',');
    sub->add_option("--trials", ep_trials);
    sub->add_option("--box-radius", ep.box_radius);
    sub->add_option("--dt", ep.dt);
    sub->add_option("--diffusion", ep.diffusion);
    sub->add_option("--max-infected", ep.max_infected);
    sub->add_option("--boundary-margin", ep.boundary_margin);
  };
  auto epidemic_params = [&] {
    return json{{"model", model},         {"dimension", dim},         {"alpha", alpha},
                {"trials", ep_trials},    {"box_radius", ep.box_radius}, {"dt", ep.dt},
                {"diffusion", ep.diffusion}, {"max_infected", ep.max_infected},
                {"boundary_margin", ep.boundary_margin}, {"coupled", coupled}};
  };
  auto* ep_run = command(epidemic, "run", "Survival-proxy probability", "epidemic");
  add_epidemic(ep_run, false);
  ep_run->add_option("--event-log", event_log, "Write the first trial's event log (CSV) here");
  commands.back().params = epidemic_params;
  auto* ep_scan = command(epidemic, "scan", "Survival curve over alpha", "epidemic");
  add_epidemic(ep_scan, true);
  ep_scan->add_flag("--coupled", coupled, "Reuse the same randomness at every alpha");
  commands.back().params = epidemic_params;

  // run / selftest
  std::string config_file;
  auto* rerun = app.add_subcommand("run", "Run a JSON config, or the config embedded in a result CSV");
  Common rerun_common;
  rerun->add_option("--config", config_file)->required()->check(CLI::ExistingFile);
  rerun->add_option("--workers", rerun_common.workers);
  rerun->add_option("--output,-o", rerun_common.output, "Override the output path");
  rerun->add_option("--format", rerun_common.format)->check(CLI::IsMember({"csv", "json"}));
  auto* self = app.add_subcommand("selftest", "Quick internal consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (self->parsed()) return selftest();
    if (rerun->parsed()) {
      auto config = load_config(config_file);
      if (!rerun_common.output.empty()) config.output = rerun_common.output;
      return emit(config, rerun_common);
    }
    for (const auto& cmd : commands) {
      if (!cmd.app->parsed()) continue;
      ExperimentConfig config;
      config.module = cmd.module;
      config.params = cmd.params();
      config.seed = common.seed_given ? common.seed : seed_from_env(kDefaultSeed);
      config.output = common.output;
      const int code = emit(config, common);
      // Optional debugging side outputs.
      if (cmd.app == ehr && !dump_path.empty()) {
        const RngStream stream = RngStream(config.seed, 0x656872).child(0).child(0);
        const MirrorField field(mirror_p, mirror_L.front(), stream, swap);
        std::ofstream out(dump_path);
        const auto path = trace_path(field, {{0, 0}, Heading::N}, mirror_L.front(), state_budget(mirror_L.front()));
        stochlab::dump_path(path, out);
      }
      if (cmd.app == ep_run && !event_log.empty()) {
        EpidemicConfig cfg = ep;
        cfg.model = epidemic_model_from_string(model);
        cfg.dimension = dim;
        cfg.alpha = alpha.front();
        cfg.record_events = true;
        const auto outcome = run(cfg, RngStream(config.seed, 0x657069).child(0).child(0));
        std::ofstream out(event_log);
        write_event_csv(outcome.events, out);
      }
      if (cmd.app == diff && !trace_csv.empty()) {
        std::vector<ContinuumTrace> polylines;
        const auto angle_law = AngleLaw::parse(diff_law);
        const RngStream base(config.seed, 0x646966);
        for (int i = 0; i < traces; ++i) {
          const RngStream s = base.child(static_cast<std::uint64_t>(i));
          const NeedleField field(s.key(), static_cast<int>(std::ceil(diff_R + diff_eps / 2)) + 1, diff_eps, angle_law);
          polylines.push_back(trace_continuum(field, 2.0 * std::numbers::pi * to_unit(s.at(0)), diff_R,
                                              static_cast<std::size_t>(diff_budget)));
        }
        std::ofstream out(trace_csv);
        write_trace_csv(polylines, out);
      }
      return code;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
