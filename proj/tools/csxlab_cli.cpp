// csxlab SCENARIO [--config PATH] [--set key=value ...] [--out DIR] [--threads N] [--reproducible]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csxlab/cli.hpp"
#include "csxlab/csxlab.hpp"
#include "csxlab/scenarios.hpp"

using namespace csxlab;
using namespace csxlab::cli;
namespace sc = csxlab::scenarios;
namespace fs = std::filesystem;

namespace {

// ---- schema -----------------------------------------------------------------

const KeySpec kS{"s", Kind::reals, "0.25,0.5,0.75", "fractional orders, each in (0, 1)", 1e-6, 1 - 1e-6};
const KeySpec kSeed{"seed", Kind::integer, "20240601", "seed for sampled Hölder scans", 0, 2147483647};
const KeySpec kGrading{"grading", Kind::real, "default", "t grading exponent, >= 1", 1, 6, {"default"}};
const KeySpec kEps{"eps", Kind::real, "default", "ε in (0, s); default 0.1 s", 1e-6, 1, {"default"}};
const KeySpec kGeometry{"geometry", Kind::text, "unit-ball", "(-1, 1) for N = 1, unit disk for N = 2", 0, 0,
                        {"unit-ball"}};
const KeySpec kTol{"tol", Kind::real, "1e-8", "tolerance of extension values", 1e-14, 1e-2};

KeySpec dim(const std::string& fallback, std::vector<std::string> only = {}) {
  KeySpec k{"N", Kind::integer, fallback, "space dimension", 1, 2};
  if (only.size() == 1) k.lo = k.hi = std::stod(only[0]);
  return k;
}
KeySpec resolution(const std::string& fallback) {
  return {"resolution", Kind::integer, fallback, "nodes per direction", 8, 256};
}
KeySpec levels(const std::string& fallback) {
  return {"levels", Kind::integers, fallback, "refinement levels (nodes per direction)", 8, 512};
}

struct Scenario {
  std::string name;
  std::string help;
  std::vector<KeySpec> keys;
  std::function<void(const Config&, struct Sink&)> run;
};

// ---- output -----------------------------------------------------------------

struct Sink {
  fs::path dir;
  const Config* cfg = nullptr;
  std::string sha;
  bool reproducible = false;
  std::chrono::steady_clock::time_point start;
  std::vector<std::string> files;

  json metadata(const std::string& file) const {
    json m;
    m["file"] = file;
    m["scenario"] = cfg->scenario();
    m["s"] = cfg->reals("s");
    if (cfg->has("N")) m["N"] = cfg->integer("N");
    m["geometry"] = cfg->has("geometry") ? cfg->text("geometry") : "none";
    json grid;
    for (const char* k : {"resolution", "levels", "grading"})
      if (cfg->has(k)) grid[k] = cfg->text(k);
    m["grid"] = grid.empty() ? json::object() : grid;
    m["config_sha1"] = sha;
    json c;
    for (const auto& [k, v] : cfg->values()) c[k] = v;
    m["config"] = c;
    return m;
  }

  /// CSV plus `<name>.json` sidecar; `fits` holds exponents shown on plots.
  void table(const std::string& name, const Table& t, const json& fits = json::object()) {
    const std::string file = name + ".csv";
    write_text(dir / file, t.csv());
    auto m = metadata(file);
    m["columns"] = t.columns;
    m["rows"] = t.rows.size();
    if (!fits.empty()) m["fits"] = fits;
    if (!reproducible) m["elapsed_seconds"] = elapsed();
    write_text(dir / (name + ".json"), m.dump(2) + "\n");
    files.push_back(file);
  }

  void field(const std::string& name, const ExtensionField& F, const std::vector<bool>& mask,
             const std::map<std::string, std::string>& meta) {
    auto full = meta;
    full["config_sha1"] = sha;
    write_text(dir / (name + ".field"), field_text(F, mask, full));
    files.push_back(name + ".field");
  }

  double elapsed() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }
};

json rate_json(const RateReport& r) {
  json j;
  j["fitted_exponent"] = r.exact ? json("inf") : json(r.fitted_exponent);
  j["constant"] = r.constant;
  j["fit_residual"] = r.fit_residual;
  j["excluded"] = r.excluded;
  j["exact"] = r.exact;
  return j;
}

double eps_for(const Config& c, const FracOrder& ord) {
  const auto e = c.real_or_default("eps");
  if (!e) return sc::default_eps(ord);
  if (*e >= ord.s()) throw ConfigError("eps", "eps must be smaller than every s (got " + c.text("eps") + ")");
  return *e;
}

HolderOptions holder_options(const Config& c) {
  HolderOptions h;
  h.seed = std::uint64_t(c.integer("seed"));
  return h;
}

std::string tag(double s, int N) { return "s" + num(s) + "_N" + std::to_string(N); }

// ---- scenarios --------------------------------------------------------------

void run_barrier(const Config& c, Sink& out) {
  Table summary{{"s", "trace_error", "homogeneity_error", "polar_constant", "cross_route_gap"}};
  Table profile{{"s", "delta", "h_trace"}};
  for (double s : c.reals("s")) {
    const auto r = sc::barrier_check(FracOrder(s), c.integer("trace_points"), c.integer("homog_points"),
                                     c.integer("ref_points"));
    summary.add(s, r.trace_error, r.homogeneity_error, r.polar_constant, r.cross_route_gap);
    for (std::size_t i = 0; i < r.deltas.size(); ++i) profile.add(s, r.deltas[i], r.trace_values[i]);
  }
  out.table("barrier_check", summary);
  out.table("barrier_trace", profile);
}

void run_extend(const Config& c, Sink& out) {
  Table t{{"s", "N", "t", "mass", "mass_error", "nodes", "violations"}};
  const int N = c.integer("N");
  for (double s : c.reals("s")) {
    const auto r = sc::extend_check(FracOrder(s, N), c.integer("resolution"), c.real_or_default("grading"));
    for (std::size_t i = 0; i < r.t.size(); ++i) t.add(s, N, r.t[i], r.mass[i], r.mass[i] - 1.0, r.nodes, r.violations);
  }
  out.table("extend_check", t);
}

void run_a2(const Config& c, Sink& out) {
  Table t{{"s", "N", "radius", "center_t", "product"}};
  const int N = c.integer("N");
  for (double s : c.reals("s"))
    for (const auto& r : sc::a2_table(FracOrder(s, N), c.reals("radii"), c.reals("centers")))
      t.add(s, N, r.radius, r.center_t, r.product);
  out.table("a2", t);
}

void run_ks(const Config& c, Sink& out) {
  Table t{{"s", "ks", "ks_reference", "spread", "stable"}};
  Table per{{"s", "function", "ks"}};
  for (double s : c.reals("s")) {
    const auto k = calibrate_ks(FracOrder(s));
    const double ref = std::pow(2.0, 1 - 2 * s) * std::tgamma(1 - s) / std::tgamma(s);
    t.add(s, k.ks, ref, k.spread, k.stable);
    for (std::size_t i = 0; i < k.per_function.size(); ++i) per.add(s, int(i), k.per_function[i]);
  }
  out.table("calibrate_ks", t);
  out.table("calibrate_ks_functions", per);
}

void run_neumann(const Config& c, Sink& out) {
  Table reg{{"s", "M", "alpha", "seminorm", "sup_w", "sup_f", "constant"}};
  Table drift{{"s", "alpha", "drift"}};
  Table cv{{"s", "M", "error", "relative_residual"}};
  json fits;
  const auto grading = c.real_or_default("grading");
  for (double s : c.reals("s")) {
    const FracOrder ord(s);
    const double ks = c.text("ks") == "calibrated" ? calibrate_ks(ord).ks : c.real("ks");
    const auto nr = sc::neumann_regularity(ord, ks, c.integers("levels"), eps_for(c, ord), grading, holder_options(c));
    for (const auto& lv : nr.levels) reg.add(s, lv.M, nr.alpha, lv.seminorm, lv.sup_w, lv.sup_f, lv.constant);
    drift.add(s, nr.alpha, nr.drift);
    if (c.boolean("cross_validate")) {
      const auto x = sc::cross_validation(ord, ks, c.integers("levels"), grading);
      for (std::size_t i = 0; i < x.M.size(); ++i) cv.add(s, x.M[i], x.error[i], x.residual[i]);
      fits[num(s)] = {{"refinement_order", x.order}};
    }
  }
  out.table("neumann_regularity", reg);
  out.table("neumann_regularity_drift", drift);
  if (c.boolean("cross_validate")) out.table("cross_validation", cv, fits);
}

std::vector<BoundaryPoint> points_for(const Config& c, const FracOrder& ord) {
  return sc::ball_boundary_points(ord, c.integer("points"));
}

void run_projection(const Config& c, Sink& out) {
  Table q{{"s", "N", "point", "k", "radius", "q", "increment"}};
  Table taylor{{"s", "N", "point", "radius", "error"}};
  Table summary{{"s", "N", "point", "x0_1", "x0_2", "nu_1", "nu_2", "q_limit", "cauchy", "increment_exponent",
                 "rate_exponent", "taylor_exponent", "exact"}};
  json fits;
  const int N = c.integer("N");
  sc::ProjectionConfig pc;
  pc.r0 = c.real("r0");
  pc.kmax = c.integer("kmax");
  pc.r_min = c.real("r_min");
  pc.taylor_points = c.integer("taylor_points");
  pc.resolution = c.integer("resolution");
  if (pc.r_min >= pc.r0) throw ConfigError("r_min", "r_min must be smaller than r0");
  for (double s : c.reals("s")) {
    const FracOrder ord(s, N);
    const auto W = extension_sampler(ball_solution(ord), ord, c.real("tol"));
    const auto rows = sc::projection_rates(ord, W, points_for(c, ord), pc);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& p = rows[i].projection;
      const auto& b = rows[i].point;
      for (std::size_t k = 0; k < p.radii.size(); ++k)
        q.add(s, N, int(i), int(k), p.radii[k], p.q_values[k],
              k == 0 ? std::numeric_limits<double>::quiet_NaN() : p.increments[k - 1]);
      for (std::size_t k = 0; k < rows[i].taylor.radii.size(); ++k)
        taylor.add(s, N, int(i), rows[i].taylor.radii[k], rows[i].taylor.errors[k]);
      summary.add(s, N, int(i), b.x0[0], b.x0[1], b.nu[0], b.nu[1], p.q_limit, p.cauchy, p.increment_exponent,
                  p.rate, rows[i].taylor.fitted_exponent, p.exact);
      const std::string key = tag(s, N) + "_p" + std::to_string(i);
      fits[key]["increment_exponent"] = p.increment_exponent;
      fits[key]["rate_exponent"] = p.rate;
      fits[key]["taylor"] = rate_json(rows[i].taylor);
    }
  }
  out.table("projection_q", q, fits);
  out.table("taylor_gap", taylor, fits);
  out.table("projection_summary", summary, fits);
}

void run_lemma6(const Config& c, Sink& out) {
  static const char* names[6] = {"sup_halfspace", "semi_halfspace", "semi_inverse_halfspace",
                                 "sup_dist",      "semi_dist",      "semi_inverse_dist"};
  Table t{{"s", "N", "quantity", "radius", "xbar_1", "xbar_2", "value"}};
  json fits;
  const int N = c.integer("N");
  const auto radii = c.reals("radii");
  for (double s : c.reals("s")) {
    const FracOrder ord(s, N);
    const auto geom = sc::ball_geometry(ord);
    const auto xs = xbar_schedule(sc::ball_boundary_points(ord).front(), radii);
    const auto r = barrier_gap_suite(geom, xs, ord, eps_for(c, ord), c.integer("resolution"),
                                    holder_options(c));
    const RateReport* q[6] = {&r.sup_halfspace, &r.semi_halfspace, &r.semi_inverse_halfspace,
                              &r.sup_dist,      &r.semi_dist,      &r.semi_inverse_dist};
    json f;
    f["alpha"] = r.alpha;
    for (int i = 0; i < 6; ++i) {
      for (std::size_t k = 0; k < q[i]->radii.size(); ++k)
        t.add(s, N, names[i], q[i]->radii[k], xs[k][0], xs[k][1], q[i]->errors[k]);
      f[names[i]] = rate_json(*q[i]);
    }
    fits[tag(s, N)] = f;
  }
  out.table("lemma6_suite", t, fits);
}

void run_main(const Config& c, Sink& out) {
  Table t{{"s", "N", "M", "alpha", "q", "sup_w", "sup_f", "psi_seminorm", "constant", "barrier_seminorm",
           "excluded", "interface"}};
  Table d{{"s", "N", "drift", "barrier_drift"}};
  json fits;
  const int N = c.integer("N");
  const auto grading = c.real_or_default("grading");
  for (double s : c.reals("s")) {
    const FracOrder ord(s, N);
    const auto W = extension_sampler(ball_solution(ord), ord, c.real("tol"));
    // the ball solution is radial: one boundary point fixes Q on the whole sphere
    const auto b = sc::ball_boundary_points(ord).front();
    const auto p = projection_limit(W, b.x0, b.nu, c.real("r0"), c.integer("kmax"), ord, c.integer("resolution"));
    const double q = p.q_limit;
    const auto mt = sc::main_theorem(ord, W, c.integers("levels"), eps_for(c, ord), [q](const Point&) { return q; },
                                     grading, holder_options(c));
    for (const auto& lv : mt.levels)
      t.add(s, N, lv.M, mt.alpha, q, lv.sup_w, lv.sup_f, lv.psi.holder.seminorm, lv.constant,
            lv.barrier.holder.seminorm, lv.psi.excluded, lv.psi.interface);
    d.add(s, N, mt.drift, mt.barrier_drift);
    fits[tag(s, N)]["q"] = q;
    fits[tag(s, N)]["projection_rate_exponent"] = p.rate;
    fits[tag(s, N)]["drift"] = mt.drift;
    fits[tag(s, N)]["barrier_drift"] = mt.barrier_drift;
    if (c.boolean("write_fields") && !mt.levels.empty()) {
      const auto& lv = mt.levels.back();
      const std::map<std::string, std::string> meta{{"quantity", "psi"}, {"M", std::to_string(lv.M)},
                                                    {"alpha", num(mt.alpha)}, {"q", num(q)}};
      out.field("psi_" + tag(s, N), lv.psi.psi, lv.psi.included, meta);
    }
  }
  out.table("main_theorem", t, fits);
  out.table("main_theorem_drift", d);
}

std::vector<Scenario> scenario_table() {
  const KeySpec r0{"r0", Kind::real, "0.4", "largest projection radius", 1e-3, 1};
  const KeySpec kmax{"kmax", Kind::integer, "5", "radii r0 2^-k, k = 0..kmax", 4, 12};
  return {
      {"barrier-check", "half-space barrier: trace, homogeneity and route agreement",
       {kS, kSeed, {"trace_points", Kind::integer, "401", "trace samples on [-2, 2]", 2, 100000},
        {"homog_points", Kind::integer, "20", "homogeneity grid per axis", 2, 1000},
        {"ref_points", Kind::integer, "50", "cross-route grid per axis", 2, 1000}},
       run_barrier},
      {"extend-check", "Poisson-kernel mass and maximum principle of extensions",
       {kS, kSeed, dim("1"), resolution("8"), kGrading}, run_extend},
      {"a2", "weighted A2 product on balls",
       {kS, kSeed, dim("1"), {"radii", Kind::reals, "0.1,1,10", "ball radii", 1e-8, 1e8},
        {"centers", Kind::reals, "0,0.5,2", "ball centres t = c r", 0, 1e3}},
       run_a2},
      {"calibrate-ks", "Neumann constant from the discrete weak form", {kS, kSeed}, run_ks},
      {"neumann-regularity", "Neumann-only solver: Hölder constant under refinement",
       {kS, kSeed, dim("1", {"1"}), levels("16,32,64"), kGrading, kEps,
        {"ks", Kind::real, "calibrated", "Neumann constant", 1e-6, 1e6, {"calibrated"}},
        {"cross_validate", Kind::boolean, "true", "also compare with the kernel route"}},
       run_neumann},
      {"projection-rates", "Q_r(x0) sequence, its limit and the Taylor gap",
       {kS, kSeed, dim("1"), kGeometry, resolution("12"), kTol, r0, kmax,
        {"r_min", Kind::real, "0.05", "smallest Taylor radius", 1e-4, 1},
        {"taylor_points", Kind::integer, "7", "Taylor radii between r0 and r_min", 3, 64},
        {"points", Kind::integer, "3", "boundary points (N = 2)", 1, 64}},
       run_projection},
      {"lemma6-suite", "barrier gap rates near the boundary",
       {kS, kSeed, dim("2"), kGeometry, resolution("12"), kEps,
        {"radii", Kind::reals, "0.2,0.1,0.05,0.025,0.0125", "half distances to the boundary", 1e-6, 0.25}},
       run_lemma6},
      {"main-theorem", "Ψ = W / d^s on [0, 1] x closed ball",
       {kS, kSeed, dim("1"), kGeometry, levels("16,32"), kGrading, kEps, kTol, resolution("16"), r0, kmax,
        {"write_fields", Kind::boolean, "true", "write Ψ at the finest level"}},
       run_main},
  };
}

// ---- driver -----------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("", "cannot read config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int fail(const json& record, const fs::path& dir) {
  std::cerr << record.dump() << "\n";
  std::error_code ec;
  if (!dir.empty() && fs::create_directories(dir, ec), !ec && fs::is_directory(dir, ec))
    std::ofstream(dir / "error.json") << record.dump(2) << "\n";
  return record["kind"] == "config" ? 2 : 3;
}

std::string kind_of(const std::exception& e) {
  if (dynamic_cast<const QuadratureError*>(&e)) return "quadrature";
  if (dynamic_cast<const SolverError*>(&e)) return "solver";
  if (dynamic_cast<const ProjectionError*>(&e)) return "projection";
  if (dynamic_cast<const GeometryError*>(&e)) return "geometry";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid-argument";
  return "runtime";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments for the boundary behaviour of fractional extensions"};
  app.require_subcommand(1);
  std::string config_path, out_dir = "csxlab-out";
  std::vector<std::string> overrides;
  unsigned threads = 1;
  bool reproducible = false, print_schema = false;
  app.add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "override one key, key=value (repeatable)");
  app.add_option("--out", out_dir, "output directory (CSXLAB_OUT takes precedence)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--reproducible", reproducible, "byte-identical outputs: one thread, no timings");
  app.add_flag("--schema", print_schema, "print the accepted keys and exit");
  app.fallthrough();

  const auto all = scenario_table();
  for (const auto& s : all) app.add_subcommand(s.name, s.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (const char* env = std::getenv("CSXLAB_OUT"); env && *env) out_dir = env;
  const fs::path dir(out_dir);

  const Scenario* sc_ptr = nullptr;
  for (const auto& s : all)
    if (app.got_subcommand(s.name)) sc_ptr = &s;
  const Scenario& scn = *sc_ptr;

  if (print_schema) {
    for (const auto& k : scn.keys) std::cout << k.name << " = " << k.fallback << "    # " << k.doc << "\n";
    return 0;
  }

  Config cfg;
  try {
    auto given = config_path.empty() ? std::map<std::string, std::string>{} : parse_config(read_file(config_path));
    given.erase("scenario");
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw ConfigError("", "--set expects key=value, got '" + o + "'");
      given[trim(o.substr(0, eq))] = trim(o.substr(eq + 1));
    }
    cfg = resolve(scn.name, scn.keys, given);
  } catch (const ConfigError& e) {
    return fail(error_record("config", e.what(), scn.name, e.key), dir);
  }

  set_thread_count(reproducible ? 1 : threads);
  Sink sink;
  sink.dir = dir;
  sink.cfg = &cfg;
  sink.sha = git_blob_sha1(cfg.canonical());
  sink.reproducible = reproducible;
  sink.start = std::chrono::steady_clock::now();
  try {
    fs::create_directories(dir);
    write_text(dir / "config.resolved", cfg.canonical());
    scn.run(cfg, sink);
  } catch (const ConfigError& e) {
    return fail(error_record("config", e.what(), scn.name, e.key), dir);
  } catch (const std::exception& e) {
    return fail(error_record(kind_of(e), e.what(), scn.name), dir);
  }
  fs::remove(dir / "error.json");
  json summary{{"status", "ok"}, {"scenario", scn.name}, {"config_sha1", sink.sha}, {"files", sink.files}};
  std::cout << summary.dump() << "\n";
  return 0;
}
