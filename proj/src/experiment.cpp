#include "stochlab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include "stochlab/epidemic.hpp"
#include "stochlab/parallel.hpp"
#include "stochlab/mirrors_lattice.hpp"
#include "stochlab/needles.hpp"
#include "stochlab/oriented.hpp"
#include "stochlab/saw.hpp"

#ifndef STOCHLAB_VERSION
#define STOCHLAB_VERSION "unknown"
#endif

namespace stochlab {

using nlohmann::json;

const char* library_version() noexcept { return STOCHLAB_VERSION; }

const std::vector<std::string>& experiment_modules() {
  static const std::vector<std::string> names = {
      "saw-count",      "saw-kappa",        "saw-sample",          "mirrors-ehrenfest",
      "mirrors-manhattan", "needles-escape", "needles-crossing",   "needles-diffusivity",
      "bunkbed",        "forest",           "oriented",            "epidemic"};
  return names;
}

// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw InvalidParameter("config: expected a JSON object");
  static const std::set<std::string> known = {"module", "params", "seed", "output", "format"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw InvalidParameter("config." + key + ": unknown field");
  ExperimentConfig c;
  if (!j.contains("module") || !j["module"].is_string())
    throw InvalidParameter("config.module: required string");
  c.module = j["module"].get<std::string>();
  const auto& mods = experiment_modules();
  if (std::find(mods.begin(), mods.end(), c.module) == mods.end())
    throw InvalidParameter("config.module: unknown module '" + c.module + "'");
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw InvalidParameter("config.params: expected an object");
    c.params = j["params"];
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw InvalidParameter("config.seed: expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw InvalidParameter("config.output: expected a string");
    c.output = j["output"].get<std::string>();
  }
  if (j.contains("format")) {
    if (!j["format"].is_string() || j["format"].get<std::string>() != kFormatTag)
      throw InvalidParameter(std::string("config.format: expected \"") + kFormatTag + "\"");
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json j = {{"format", format}, {"module", module}, {"params", params}, {"seed", seed}};
  if (!output.empty()) j["output"] = output;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const std::string marker = "# config: ";
  if (const auto pos = text.find(marker); pos != std::string::npos && text.rfind('#', 0) == 0) {
    const auto end = text.find('\n', pos);
    return ExperimentConfig::from_json(json::parse(text.substr(pos + marker.size(), end - pos - marker.size())));
  }
  try {
    return ExperimentConfig::from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw InvalidParameter(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

namespace {

// Typed access to the params object; every key must be consumed.
class Params {
 public:
  Params(const json& j, std::string module) : j_(j), module_(std::move(module)) {}

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!take(key)) return fallback;
    if (!j_[key].is_number_integer()) fail(key, "expected an integer");
    return j_[key].get<std::int64_t>();
  }
  std::int64_t positive(const std::string& key, std::int64_t fallback) {
    const auto v = integer(key, fallback);
    if (v < 1) fail(key, "must be >= 1");
    return v;
  }
  double number(const std::string& key, double fallback) {
    if (!take(key)) return fallback;
    if (!j_[key].is_number()) fail(key, "expected a number");
    return j_[key].get<double>();
  }
  double probability(const std::string& key, double fallback) {
    const double v = number(key, fallback);
    if (!(v >= 0 && v <= 1)) fail(key, "must lie in [0, 1]");
    return v;
  }
  std::optional<double> optional_number(const std::string& key) {
    if (!take(key)) return std::nullopt;
    if (!j_[key].is_number()) fail(key, "expected a number");
    return j_[key].get<double>();
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!take(key)) return fallback;
    if (!j_[key].is_boolean()) fail(key, "expected true or false");
    return j_[key].get<bool>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    if (!take(key)) return fallback;
    if (!j_[key].is_string()) fail(key, "expected a string");
    return j_[key].get<std::string>();
  }
  bool has(const std::string& key) const { return j_.contains(key); }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!take(key)) return fallback;
    const auto& v = j_[key];
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array() || v.empty()) fail(key, "expected a number or a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) fail(key, "expected numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback) {
    if (!take(key)) return fallback;
    const auto& v = j_[key];
    if (v.is_string()) return {v.get<std::string>()};
    if (!v.is_array() || v.empty()) fail(key, "expected a string or a non-empty array of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
      if (!x.is_string()) fail(key, "expected strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }
  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!used_.contains(key)) fail(key, "unknown parameter for module " + module_);
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw InvalidParameter("params." + key + ": " + what);
  }

 private:
  bool take(const std::string& key) {
    used_.insert(key);
    return j_.contains(key) && !j_[key].is_null();
  }

  const json& j_;
  std::string module_;
  std::set<std::string> used_;
};

std::string num(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::vector<std::string> ci_cells(const EstimateCI& e) {
  return {std::to_string(e.trials), std::to_string(e.successes), num(e.point), num(e.lower), num(e.upper)};
}

std::vector<int> int_list(Params& p, const std::string& key, std::vector<double> fallback) {
  std::vector<int> out;
  for (const double v : p.numbers(key, std::move(fallback))) {
    if (v != std::floor(v) || v < 1 || v > 1e6) p.fail(key, "expected positive integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<SimpleGraph> select_graphs(Params& p) {
  const int sources = p.has("graphs") + p.has("graph6") + p.has("max_vertices");
  if (sources > 1) p.fail("graphs", "give only one of graphs, graph6, max_vertices");
  if (p.has("graphs")) return ingest_graphs(p.string("graphs", ""));
  if (p.has("graph6")) {
    std::vector<SimpleGraph> out;
    for (const auto& s : p.strings("graph6", {})) out.push_back(parse_graph6(s));
    return out;
  }
  const auto n = p.integer("max_vertices", 4);
  if (n < 1 || n > 6) p.fail("max_vertices", "must lie in [1, 6]");
  return connected_graphs_upto(static_cast<int>(n));
}

std::vector<ExactProb> p_grid(Params& p) {
  std::vector<ExactProb> out;
  for (const auto& s : p.strings("p", {"1/10", "2/10", "3/10", "4/10", "5/10", "6/10", "7/10", "8/10", "9/10"})) {
    const auto q = parse_rational(s);
    if (q < 0 || q > 1) p.fail("p", "values must lie in [0, 1]");
    out.push_back(q);
  }
  return out;
}

using Runner = void (*)(Params&, const ExperimentConfig&, unsigned, ResultRecord&);

void run_saw_count(Params& p, const ExperimentConfig&, unsigned workers, ResultRecord& r) {
  const auto kind = lattice_kind_from_string(p.string("lattice", "square"));
  const auto n = p.integer("n", 10);
  if (n < 0) p.fail("n", "must be >= 0");
  p.finish();
  EnumerationLimits limits;
  limits.workers = workers;
  r.table.columns = {"lattice", "n", "sigma"};
  for (const auto& c : count_saws_upto(kind, static_cast<int>(n), limits))
    r.table.rows.push_back({to_string(kind), std::to_string(c.n), c.sigma.str()});
}

void run_saw_kappa(Params& p, const ExperimentConfig&, unsigned workers, ResultRecord& r) {
  const auto kind = lattice_kind_from_string(p.string("lattice", "hex"));
  const auto n = p.positive("n", 20);
  std::optional<double> kappa = p.optional_number("kappa");
  if (!kappa && kind == LatticeKind::Hex) kappa = std::sqrt(2.0 + std::numbers::sqrt2);  // Duminil-Copin and Smirnov
  const auto fit_from = p.integer("fit_from", 4);
  p.finish();
  EnumerationLimits limits;
  limits.workers = workers;
  const auto counts = count_saws_upto(kind, static_cast<int>(n), limits);
  const auto est = connective_estimates(counts, kappa, static_cast<int>(fit_from));
  r.table.columns = {"lattice", "n", "sigma", "root"};
  if (kind == LatticeKind::Hex) r.table.columns.push_back("fekete_bound");
  for (std::size_t i = 0; i < est.n.size(); ++i) {
    const auto& c = counts.at(static_cast<std::size_t>(est.n[i]));
    std::vector<std::string> row = {to_string(kind), std::to_string(est.n[i]), c.sigma.str(), num(est.root[i])};
    if (kind == LatticeKind::Hex) row.push_back(meets_hex_fekete_bound(c.sigma, c.n) ? "holds" : "violated");
    r.table.rows.push_back(std::move(row));
  }
  if (est.fekete_bound_holds) {
    r.summary["fekete_bound_holds"] = *est.fekete_bound_holds;
    if (!*est.fekete_bound_holds) r.violation = true;
  }
  if (est.fit) {
    r.summary["fit"] = {{"amplitude", est.fit->amplitude}, {"gamma", est.fit->gamma},
                        {"kappa", est.fit->kappa}, {"kappa_fitted", est.fit->kappa_fitted},
                        {"residuals", est.fit->residuals}};
  }
}

void run_saw_sample(Params& p, const ExperimentConfig& c, unsigned workers, ResultRecord& r) {
  const auto kind = lattice_kind_from_string(p.string("lattice", "square"));
  const auto n = p.positive("n", 100);
  const auto trials = p.positive("trials", 100);
  p.finish();
  std::vector<Walk> walks(static_cast<std::size_t>(trials));
  const RngStream base(c.seed, 0x736177);
  parallel_for(walks.size(), workers, [&](std::size_t i) {
    RngStream s = base.child(i);
    walks[i] = sample_uniform_saw(kind, static_cast<int>(n), s);
  });
  std::ostringstream csv;
  export_rescaled_walks(walks, csv);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);  // header
  r.table.columns = {"walk", "step", "x", "y"};
  while (std::getline(lines, line)) {
    std::vector<std::string> row;
    std::istringstream cells(line);
    for (std::string cell; std::getline(cells, cell, ',');) row.push_back(cell);
    r.table.rows.push_back(std::move(row));
  }
  double msd = 0;
  for (const auto& w : walks) {
    const auto [x, y] = embed(kind, w.sites.back());
    msd += x * x + y * y;
  }
  r.summary["mean_squared_endpoint_distance"] = msd / double(walks.size());
}

void run_ehrenfest(Params& p, const ExperimentConfig& c, unsigned workers, ResultRecord& r) {
  const double prob = p.probability("p", 1.0);
  const auto Ls = int_list(p, "L", {50, 100, 200});
  const auto trials = p.positive("trials", 1000);
  const bool swap = p.boolean("swap", false);
  p.finish();
  r.table.columns = {"p", "L", "trials", "escaped", "estimate", "lower", "upper"};
  const RngStream base(c.seed, 0x656872);
  for (std::size_t k = 0; k < Ls.size(); ++k) {
    const auto e = estimate_theta_ehrenfest(prob, Ls[k], static_cast<std::uint64_t>(trials), base.child(k), workers, swap);
    std::vector<std::string> row = {num(prob), std::to_string(Ls[k])};
    for (auto& cell : ci_cells(e)) row.push_back(cell);
    r.table.rows.push_back(std::move(row));
  }
}

void run_manhattan(Params& p, const ExperimentConfig& c, unsigned workers, ResultRecord& r) {
  const double q = p.probability("q", 0.5);
  const auto Ls = int_list(p, "L", {50, 100, 200});
  const auto trials = p.positive("trials", 1000);
  const bool flip_rows = p.boolean("flip_rows", false);
  const bool flip_columns = p.boolean("flip_columns", false);
  p.finish();
  r.table.columns = {"q", "L", "trials", "escaped", "estimate", "lower", "upper"};
  const RngStream base(c.seed, 0x6d616e);
  for (std::size_t k = 0; k < Ls.size(); ++k) {
    const auto e = estimate_theta_manhattan(q, Ls[k], static_cast<std::uint64_t>(trials), base.child(k), workers,
                                            flip_rows, flip_columns);
    std::vector<std::string> row = {num(q), std::to_string(Ls[k])};
    for (auto& cell : ci_cells(e)) row.push_back(cell);
    r.table.rows.push_back(std::move(row));
  }
}

int needle_window(double R, double eps) { return static_cast<int>(std::ceil(R + eps / 2.0)) + 1; }

void run_needles_escape(Params& p, const ExperimentConfig& c, unsigned workers, ResultRecord& r) {
  const double eps = p.number("epsilon", 1.0);
  const auto law = AngleLaw::parse(p.string("law", "uniform"));
  const double R = p.number("R", 20.0);
  const auto budget = p.positive("budget", 100000);
  const auto fields = p.positive("fields", 10);
  const auto angles = p.positive("angles", 64);
  p.finish();
  if (!(R > 0)) p.fail("R", "must be positive");
  std::vector<double> grid;
  for (std::int64_t k = 0; k < angles; ++k) grid.push_back(2.0 * std::numbers::pi * (double(k) + 0.5) / double(angles));
  std::vector<EscapeSpectrum> spectra(static_cast<std::size_t>(fields));
  std::vector<std::uint64_t> rejections(spectra.size());
  const RngStream base(c.seed, 0x657363);
  parallel_for(spectra.size(), workers, [&](std::size_t f) {
    const NeedleField field(base.child(f).key(), needle_window(R, eps), eps, law);
    rejections[f] = field.origin_rejections();
    spectra[f] = escape_spectrum(field, grid, R, static_cast<std::size_t>(budget));
  });
  r.table.columns = {"field", "angles", "escaped", "degenerate", "escaped_fraction", "origin_rejections"};
  std::size_t with_escape = 0;
  for (std::size_t f = 0; f < spectra.size(); ++f) {
    const auto& s = spectra[f];
    with_escape += s.escaped > 0;
    r.table.rows.push_back({std::to_string(f), std::to_string(s.rows.size()), std::to_string(s.escaped),
                            std::to_string(s.degenerate), num(s.escaped_fraction()), std::to_string(rejections[f])});
  }
  r.summary["law"] = law.describe();
  r.summary["fields_with_escape"] = with_escape;
}

void run_needles_crossing(Params& p, const ExperimentConfig& c, unsigned workers, ResultRecord& r) {
  const auto law = AngleLaw::parse(p.string("law", "uniform"));
  const double side = p.number("side", 20.0);
  const auto eps_grid = p.numbers("epsilon", {0.5, 1.0, 1.5, 2.0, 2.5, 3.0});
  const auto trials = p.positive("trials", 200);
  p.finish();
  r.table.columns = {"epsilon", "side", "trials", "crossings", "estimate", "lower", "upper"};
  // The same field seeds at every epsilon: indicators are coupled pathwise.
  const RngStream base(c.seed, 0x637273);
  for (const double eps : eps_grid) {
    const auto e = vacant_crossing_probability(eps, law, side, static_cast<std::uint64_t>(trials), base, workers);
    std::vector<std::string> row = {num(eps), num(side)};
    for (auto& cell : ci_cells(e)) row.push_back(cell);
    r.table.rows.push_back(std::move(row));
  }
  r.summary["law"] = law.describe();
}

void run_needles_diffusivity(Params& p, const ExperimentConfig& c, unsigned workers, ResultRecord& r) {
  const double eps = p.number("epsilon", 0.5);
  const auto law = AngleLaw::parse(p.string("law", "atoms:1/4,3/4:0.5,0.5"));
  const double R = p.number("R", 40.0);
  const auto budget = p.positive("budget", 1000000);
  const auto traces = p.positive("traces", 50);
  const auto t_grid = p.numbers("t", {5, 10, 20, 40, 80});
  p.finish();
  std::vector<ContinuumTrace> out(static_cast<std::size_t>(traces));
  const RngStream base(c.seed, 0x646966);
  parallel_for(out.size(), workers, [&](std::size_t i) {
    const RngStream s = base.child(i);
    const NeedleField field(s.key(), needle_window(R, eps), eps, law);
    out[i] = trace_continuum(field, 2.0 * std::numbers::pi * to_unit(s.at(0)), R, static_cast<std::size_t>(budget));
  });
  const auto report = estimate_diffusivity(out, t_grid);
  r.table.columns = {"t", "traces", "variance", "variance_over_t"};
  for (const auto& row : report.rows)
    r.table.rows.push_back({num(row.t), std::to_string(row.traces), num(row.variance), num(row.variance / row.t)});
  r.summary["sigma2"] = report.sigma2;
  r.summary["exponent"] = report.exponent;
  r.summary["diffusive"] = report.diffusive;
  r.summary["law"] = law.describe();
}

void run_bunkbed(Params& p, const ExperimentConfig&, unsigned workers, ResultRecord& r) {
  const auto graphs = select_graphs(p);
  const auto grid = p_grid(p);
  const bool conditional = p.boolean("conditional", false);
  const auto ceiling = p.positive("ceiling", static_cast<std::int64_t>(kDefaultEdgeCeiling));
  p.finish();
  struct Item {
    std::size_t graph;
    std::vector<int> open;  // conditional only
    BunkbedReport report;
  };
  std::vector<Item> items;
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    if (!conditional) {
      items.push_back({g, {}, {}});
      continue;
    }
    const int n = graphs[g].vertices();
    if (n > 20) throw InvalidParameter("bunkbed: too many vertices for the all-T sweep");
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<int> open;
      for (int v = 0; v < n; ++v)
        if (mask >> v & 1) open.push_back(v);
      items.push_back({g, std::move(open), {}});
    }
  }
  parallel_for(items.size(), workers, [&](std::size_t i) {
    auto& it = items[i];
    const auto ceil = static_cast<std::size_t>(ceiling);
    it.report = conditional ? bunkbed_check_conditional(graphs[it.graph], it.open, grid, ceil)
                            : bunkbed_check(graphs[it.graph], grid, ceil);
  });
  r.table.columns = {"graph6", "open_vertical", "checked", "min_gap", "u", "v", "p", "p11", "p12"};
  for (const auto& it : items) {
    std::string open;
    for (const int v : it.open) open += (open.empty() ? "" : " ") + std::to_string(v);
    if (!conditional) open = "random";
    const auto& b = it.report;
    r.table.rows.push_back({to_graph6(graphs[it.graph]), open, std::to_string(b.checked), to_string(b.min_gap),
                            std::to_string(b.u), std::to_string(b.v), to_string(b.p), to_string(b.p11),
                            to_string(b.p12)});
    if (b.violated() && !r.violation) {
      r.violation = true;
      std::ostringstream w;
      write_bunkbed_witness(graphs[it.graph], b, w, conditional ? &it.open : nullptr);
      r.witness = w.str();
    }
  }
  r.summary["graphs"] = graphs.size();
  r.summary["violations"] = std::count_if(items.begin(), items.end(), [](const Item& i) { return i.report.violated(); });
}

void run_forest(Params& p, const ExperimentConfig&, unsigned workers, ResultRecord& r) {
  const auto kind = subgraph_class_from_string(p.string("class", "usf"));
  const auto graphs = select_graphs(p);
  const auto weight = parse_rational(p.string("weight", "1"));
  const auto ceiling = p.positive("ceiling", static_cast<std::int64_t>(kDefaultEdgeCeiling));
  p.finish();
  if (weight != 1 && kind != SubgraphClass::Forest) p.fail("weight", "only applies to the forest class");
  std::vector<CorrelationReport> reports(graphs.size());
  parallel_for(graphs.size(), workers, [&](std::size_t g) {
    const auto stats = enumerate_subgraphs(graphs[g], kind, static_cast<std::size_t>(ceiling));
    reports[g] = correlation_report(stats, weight);
  });
  r.table.columns = {"graph6", "class", "pairs", "max_excess", "e", "f", "p_e", "p_f", "p_ef"};
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    const auto& c = reports[g];
    std::string e = "-", f = "-";
    if (c.witness) {
      const auto& ee = graphs[g].edges()[c.witness->first];
      const auto& ff = graphs[g].edges()[c.witness->second];
      e = std::to_string(ee.first) + "-" + std::to_string(ee.second);
      f = std::to_string(ff.first) + "-" + std::to_string(ff.second);
    }
    r.table.rows.push_back({to_graph6(graphs[g]), to_string(kind), std::to_string(c.pairs), to_string(c.max_excess),
                            e, f, to_string(c.p_e), to_string(c.p_f), to_string(c.p_ef)});
    if (!c.passes() && !r.violation) {
      r.violation = true;
      std::ostringstream w;
      write_correlation_witness(graphs[g], c, w);
      r.witness = w.str();
    }
  }
  r.summary["graphs"] = graphs.size();
}

void run_oriented(Params& p, const ExperimentConfig& c, unsigned workers, ResultRecord& r) {
  const double prob = p.probability("p", 0.5);
  const auto Ls = int_list(p, "L", {50, 100, 200});
  const auto trials = p.positive("trials", 1000);
  const double enhance = p.probability("enhance", 0.0);
  p.finish();
  r.table.columns = {"p", "L", "enhance", "trials", "touched", "estimate", "lower", "upper"};
  const RngStream base(c.seed, 0x6f7269);
  for (std::size_t k = 0; k < Ls.size(); ++k) {
    const auto e = estimate_theta_oriented(prob, Ls[k], static_cast<std::uint64_t>(trials), base.child(k), workers, enhance);
    std::vector<std::string> row = {num(prob), std::to_string(Ls[k]), num(enhance)};
    for (auto& cell : ci_cells(e)) row.push_back(cell);
    r.table.rows.push_back(std::move(row));
  }
}

void run_epidemic(Params& p, const ExperimentConfig& c, unsigned workers, ResultRecord& r) {
  EpidemicConfig cfg;
  cfg.model = epidemic_model_from_string(p.string("model", "delayed"));
  cfg.dimension = static_cast<int>(p.integer("dimension", 2));
  const auto alphas = p.numbers("alpha", {1.0});
  cfg.box_radius = p.number("box_radius", cfg.box_radius);
  cfg.dt = p.number("dt", cfg.dt);
  cfg.diffusion = p.number("diffusion", cfg.diffusion);
  cfg.max_infected = static_cast<std::uint64_t>(p.positive("max_infected", static_cast<std::int64_t>(cfg.max_infected)));
  cfg.boundary_margin = p.number("boundary_margin", cfg.boundary_margin);
  cfg.max_steps = static_cast<std::uint64_t>(p.positive("max_steps", static_cast<std::int64_t>(cfg.max_steps)));
  const auto trials = p.positive("trials", 100);
  const bool coupled = p.boolean("coupled", false);
  p.finish();
  cfg.alpha = alphas.front();
  cfg.validate();
  const RngStream base(c.seed, 0x657069);
  const auto curve = scan_alpha(cfg, alphas, static_cast<std::uint64_t>(trials), base, coupled, workers);
  r.table.columns = {"model", "dimension", "alpha", "trials", "survived", "estimate", "lower", "upper"};
  for (std::size_t k = 0; k < curve.alpha.size(); ++k) {
    std::vector<std::string> row = {to_string(cfg.model), std::to_string(cfg.dimension), num(curve.alpha[k])};
    for (auto& cell : ci_cells(curve.estimate[k])) row.push_back(cell);
    r.table.rows.push_back(std::move(row));
  }
  if (curve.crossover) r.summary["alpha_crossover"] = *curve.crossover;
  r.summary["dt"] = cfg.dt;
  r.summary["max_infected"] = cfg.max_infected;
  r.summary["boundary_margin"] = cfg.boundary_margin;
}

Runner runner_for(const std::string& module) {
  if (module == "saw-count") return run_saw_count;
  if (module == "saw-kappa") return run_saw_kappa;
  if (module == "saw-sample") return run_saw_sample;
  if (module == "mirrors-ehrenfest") return run_ehrenfest;
  if (module == "mirrors-manhattan") return run_manhattan;
  if (module == "needles-escape") return run_needles_escape;
  if (module == "needles-crossing") return run_needles_crossing;
  if (module == "needles-diffusivity") return run_needles_diffusivity;
  if (module == "bunkbed") return run_bunkbed;
  if (module == "forest") return run_forest;
  if (module == "oriented") return run_oriented;
  if (module == "epidemic") return run_epidemic;
  throw InvalidParameter("config.module: unknown module '" + module + "'");
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

ResultRecord run_experiment(const ExperimentConfig& config, unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  ResultRecord r;
  r.config = config;
  Params params(config.params, config.module);
  runner_for(config.module)(params, config, workers, r);
  r.provenance.seed = config.seed;
  r.provenance.version = library_version();
  r.provenance.timestamp = utc_now();
  r.provenance.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string data_columns(const ResultRecord& r) {
  std::ostringstream out;
  for (std::size_t i = 0; i < r.table.columns.size(); ++i) out << (i ? "," : "") << csv_cell(r.table.columns[i]);
  out << '\n';
  for (const auto& row : r.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
  return out.str();
}

void write_csv(const ResultRecord& r, std::ostream& out) {
  out << "# " << kFormatTag << '\n';
  out << "# config: " << r.config.to_json().dump() << '\n';
  out << "# provenance: seed=" << r.provenance.seed << " version=" << r.provenance.version
      << " timestamp=" << r.provenance.timestamp << " runtime_s=" << num(r.provenance.runtime_seconds) << '\n';
  if (!r.summary.empty()) out << "# summary: " << r.summary.dump() << '\n';
  out << data_columns(r);
}

json to_json(const ResultRecord& r) {
  return {{"config", r.config.to_json()},
          {"columns", r.table.columns},
          {"rows", r.table.rows},
          {"summary", r.summary},
          {"violation", r.violation},
          {"provenance",
           {{"seed", r.provenance.seed},
            {"version", r.provenance.version},
            {"timestamp", r.provenance.timestamp},
            {"runtime_seconds", r.provenance.runtime_seconds}}}};
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidParameter("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InvalidParameter("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::filesystem::path> write_outputs(const ResultRecord& r) {
  std::vector<std::filesystem::path> written;
  if (r.config.output.empty()) return written;
  const std::filesystem::path csv = r.config.output;
  std::ostringstream text;
  write_csv(r, text);
  write_file_atomic(csv, text.str());
  written.push_back(csv);
  auto js = csv;
  js += ".json";
  write_file_atomic(js, to_json(r).dump(2) + "\n");
  written.push_back(js);
  if (r.violation && !r.witness.empty()) {
    auto w = csv;
    w += ".witness.txt";
    write_file_atomic(w, r.witness);
    written.push_back(w);
  }
  return written;
}

std::vector<SimpleGraph> ingest_graphs(const std::filesystem::path& path) { return read_graph6_file(path); }

}  // namespace stochlab
