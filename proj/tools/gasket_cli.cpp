// Command-line front door: every pipeline end to end, JSON summaries on
// stdout, bulk artifacts (CSV, PPM, JSON reports) under --out.
//
// Exit codes: 0 success, 1 computational failure, 2 usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gasket/embed.hpp"
#include "gasket/energy.hpp"
#include "gasket/level.hpp"
#include "gasket/preimage.hpp"
#include "gasket/rational.hpp"
#include "gasket/renorm.hpp"
#include "gasket/spectrum.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gasket;

namespace {

struct CommonOpts {
  int n = 2;
  int m = 1;
  std::string lambda_text = "-0.5925925925925926";
  double tol = 1e-9;
  int max_iter = 200;
  int level = 3;
  int level_cap = 7;
  int trials = 100;
  std::uint64_t seed = 0;
  std::string out_dir;
};

Complex parse_lambda(const std::string& text) {
  std::istringstream is(text);
  double re = 0.0, im = 0.0;
  char comma = 0;
  if (!(is >> re)) throw CLI::ValidationError("--lambda", "expected 're' or 're,im'");
  if (is >> comma) {
    if (comma != ',' || !(is >> im))
      throw CLI::ValidationError("--lambda", "expected 're' or 're,im'");
  }
  return {re, im};
}

MapSpec make_spec(const CommonOpts& o) {
  return MapSpec::validated(o.n, o.m, parse_lambda(o.lambda_text));
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

void write_file(const fs::path& dir, const std::string& name, const std::string& bytes) {
  fs::create_directories(dir);
  std::ofstream os(dir / name, std::ios::binary);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error("failed to write " + (dir / name).string());
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_level = true) {
  cmd->add_option("--n", o.n, "numerator exponent (z^n term)");
  cmd->add_option("--m", o.m, "pole exponent (lambda / z^m term)");
  cmd->add_option("--lambda", o.lambda_text, "map parameter, 're' or 're,im'");
  cmd->add_option("--tol", o.tol, "numeric tolerance");
  cmd->add_option("--max-iter", o.max_iter, "orbit iteration cap");
  cmd->add_option("--seed", o.seed, "seed for randomized checks");
  cmd->add_option("--out", o.out_dir, "output directory for artifacts");
  cmd->add_option("--trials", o.trials, "number of randomized trials");
  if (with_level) {
    cmd->add_option("--level", o.level, "graph level");
    cmd->add_option("--level-cap", o.level_cap, "largest allowed level");
  }
}

double unit_real(std::mt19937_64& gen) { return (gen() >> 11) * 0x1.0p-53; }

VecX<double> random_fn(int n, std::mt19937_64& gen) {
  VecX<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = 2.0 * unit_real(gen) - 1.0;
  return u;
}

VecX<Rational> random_rational_fn(int n, std::mt19937_64& gen) {
  VecX<Rational> u(n);
  for (int i = 0; i < n; ++i)
    u[i] = Rational(static_cast<std::int64_t>(gen() % 65) - 32, std::int64_t(1) << (gen() % 5));
  return u;
}

GluingTable table_for(const MapSpec& spec) { return infer_gluing(spec); }

int run_classify(const CommonOpts& o) {
  MapSpec spec = make_spec(o);
  ClassificationReport rep = classify(spec, o.max_iter, o.tol);
  json j;
  j["subcommand"] = "classify";
  j["n"] = spec.n;
  j["m"] = spec.m;
  j["lambda"] = complex_json(spec.lambda);
  j["critical_points"] = json::array();
  for (Complex c : rep.critical_points) j["critical_points"].push_back(complex_json(c));
  j["critical_orbits"] = json::array();
  for (const auto& orb : rep.critical_orbits) {
    json oj;
    oj["preperiod"] = orb.preperiod;
    oj["period"] = orb.period;
    oj["multiplier"] = complex_json(orb.multiplier);
    oj["converged"] = orb.converged;
    oj["escaped"] = orb.escaped;
    j["critical_orbits"].push_back(oj);
  }
  j["post_critical_set"] = json::array();
  for (Complex p : rep.post_critical_set) j["post_critical_set"].push_back(complex_json(p));
  j["s"] = rep.s;
  j["s_literal"] = rep.s_literal;
  j["mu_min"] = rep.mu_min;
  j["is_misiurewicz"] = rep.is_misiurewicz;
  j["is_ms_candidate"] = rep.is_ms_candidate;
  j["indifferent_indeterminate"] = rep.indifferent_indeterminate;
  if (!o.out_dir.empty()) write_file(o.out_dir, "report.json", j.dump(2) + "\n");
  std::cout << j.dump() << "\n";
  return 0;
}

int run_render(const CommonOpts& o, const RenderConfig& cfg) {
  MapSpec spec = make_spec(o);
  Image img = render(spec, cfg);
  std::string bytes = ppm_bytes(img);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  json j;
  j["subcommand"] = "render";
  j["width"] = img.width;
  j["height"] = img.height;
  j["max_iter"] = cfg.max_iter;
  j["bytes"] = bytes.size();
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  j["fnv1a"] = hex;
  if (!o.out_dir.empty()) {
    write_file(o.out_dir, "julia.ppm", bytes);
    j["file"] = (fs::path(o.out_dir) / "julia.ppm").string();
  }
  std::cout << j.dump() << "\n";
  return 0;
}

int run_graph(const CommonOpts& o) {
  MapSpec spec = make_spec(o);
  GluingTable table = table_for(spec);
  auto levels = build_levels(table, o.level);
  const LevelGraph& g = levels[o.level];
  json j;
  j["subcommand"] = "graph";
  j["level"] = o.level;
  j["vertices"] = g.vertex_count();
  j["edges"] = g.edges.size();
  j["cells"] = g.cells.size();
  j["gluing_table"] = json::parse(to_json(table));
  if (!o.out_dir.empty()) {
    write_file(o.out_dir, "vertices.csv", vertices_csv(g));
    write_file(o.out_dir, "edges.csv", edges_csv(g));
    write_file(o.out_dir, "cells.csv", cells_csv(g));
    write_file(o.out_dir, "gluing.json", to_json(table) + "\n");
  }
  std::cout << j.dump() << "\n";
  return 0;
}

int run_vertices(const CommonOpts& o) {
  MapSpec spec = make_spec(o);
  GluingTable table = table_for(spec);
  auto levels = build_levels(table, o.level);
  auto emb = embed_vertices(spec, table, levels, o.level, o.tol);
  double worst = 0.0;
  for (int m = 1; m <= o.level; ++m)
    for (int v = 0; v < levels[m].vertex_count(); ++v)
      worst = std::max(worst, std::abs(eval(spec, emb[m].coords[v]) -
                                       emb[m - 1].coords[apply_R(levels, m, v)]));
  json j;
  j["subcommand"] = "vertices";
  j["level"] = o.level;
  j["count"] = emb[o.level].coords.size();
  j["max_dynamics_residual"] = worst;
  j["max_glue_mismatch"] = emb[o.level].max_glue_mismatch;
  if (!o.out_dir.empty()) {
    write_file(o.out_dir, "coords.csv", coords_csv(levels[o.level], emb[o.level]));
    write_file(o.out_dir, "vertices.csv", vertices_csv(levels[o.level]));
  }
  std::cout << j.dump() << "\n";
  return 0;
}

int run_energy_check(const CommonOpts& o) {
  MapSpec spec = make_spec(o);
  GluingTable table = table_for(spec);
  auto levels = build_levels(table, o.level);
  auto model = standard_sg_model<double>(table);
  auto rmodel = standard_sg_model<Rational>(table);
  std::mt19937_64 gen(o.seed);

  double worst_raw = 0.0, worst_renorm = 0.0;
  for (int t = 0; t < o.trials; ++t) {
    int m = 1 + static_cast<int>(gen() % o.level);
    VecX<double> u = random_fn(levels[m - 1].vertex_count(), gen);
    auto r = check_dynamical_invariance(levels, table, model, m, u);
    double scale = 1.0 + energy(levels[m - 1], model, u).renormalized;
    worst_raw = std::max(worst_raw, r.raw_defect / scale);
    worst_renorm = std::max(worst_renorm, r.renorm_defect / (5.0 * scale));
  }
  bool exact = true;
  int rational_levels = std::min(o.level, 5);
  for (int m = 1; m <= rational_levels; ++m) {
    VecX<Rational> u = random_rational_fn(levels[m - 1].vertex_count(), gen);
    auto r = check_dynamical_invariance(levels, table, rmodel, m, u);
    if (!(r.raw_defect == Rational(0)) || !(r.renorm_defect == Rational(0))) exact = false;
  }
  json j;
  j["subcommand"] = "energy-check";
  j["level"] = o.level;
  j["trials"] = o.trials;
  j["seed"] = o.seed;
  j["max_raw_residual"] = worst_raw;
  j["max_renorm_residual"] = worst_renorm;
  j["rational_exact"] = exact;
  std::cout << j.dump() << "\n";
  return 0;
}

int run_harmonic(const CommonOpts& o, const std::string& boundary_text) {
  MapSpec spec = make_spec(o);
  GluingTable table = table_for(spec);
  auto levels = build_levels(table, std::max(o.level, 1));
  auto model = standard_sg_model<double>(table);

  VecX<double> u(table.B);
  {
    std::istringstream is(boundary_text);
    std::string tok;
    int i = 0;
    while (std::getline(is, tok, ',') && i < table.B) u[i++] = std::stod(tok);
    if (i != table.B) throw CLI::ValidationError("--boundary", "expected B comma-separated values");
  }

  json j;
  j["subcommand"] = "harmonic";
  j["boundary"] = std::vector<double>(u.data(), u.data() + u.size());
  VecX<double> cur = u;
  double e_prev = energy(levels[0], model, cur).renormalized;
  j["energy_level0"] = e_prev;
  double worst = 0.0;
  for (int m = 0; m < o.level; ++m) {
    cur = harmonic_extension(levels, table, model, m, cur);
    double e = energy(levels[m + 1], model, cur).renormalized;
    worst = std::max(worst, std::abs(e - e_prev) / (1.0 + std::abs(e_prev)));
    e_prev = e;
    if (m == 0) j["values_level1"] = std::vector<double>(cur.data(), cur.data() + cur.size());
  }
  j["level"] = o.level;
  j["max_compatibility_defect"] = worst;
  if (!o.out_dir.empty())
    write_file(o.out_dir, "function.csv",
               function_csv(std::vector<double>(cur.data(), cur.data() + cur.size())));
  std::cout << j.dump() << "\n";
  return 0;
}

int run_renorm(const CommonOpts& o, double r, const std::string& c_text, int grid) {
  json j;
  j["subcommand"] = "renorm";
  if (!c_text.empty()) {
    std::istringstream is(c_text);
    std::string tok;
    std::vector<double> c;
    while (std::getline(is, tok, ',')) c.push_back(std::stod(tok));
    if (c.size() != 3) throw CLI::ValidationError("--c", "expected three conductances");
    auto sols = general_scan(c[0], c[1], c[2], grid);
    j["conductances"] = c;
    j["solutions"] = json::array();
    for (const auto& s : sols) j["solutions"].push_back(json::parse(to_json(s)));
  } else {
    auto sol = solve_symmetric(r);
    j = json::parse(to_json(sol));
    j["subcommand"] = "renorm";
    j["r"] = r;
  }
  if (!o.out_dir.empty()) write_file(o.out_dir, "report.json", j.dump(2) + "\n");
  std::cout << j.dump() << "\n";
  return 0;
}

int run_spectrum(const CommonOpts& o, const std::string& kind_text, int count) {
  MapSpec spec = make_spec(o);
  GluingTable table = table_for(spec);
  auto levels = build_levels(table, o.level);
  auto model = standard_sg_model<double>(table);
  SpectrumKind kind =
      kind_text == "neumann" ? SpectrumKind::neumann : SpectrumKind::dirichlet;

  std::vector<SpectralReport> reports;
  for (int m = (kind == SpectrumKind::dirichlet ? 1 : 0); m <= o.level; ++m) {
    auto pair = assemble(levels[m], model, vertex_measure(levels[m], table));
    auto rep = solve_spectrum(pair, kind, false);
    if (kind == SpectrumKind::dirichlet && m >= 1 && m < o.level) {
      auto mapped = spectral_map_report(levels, table, model, m,
                                        std::min<int>(count, rep.eigenvalues.size()));
      mapped.eigenvalues = rep.eigenvalues;
      reports.push_back(mapped);
    } else {
      reports.push_back(rep);
    }
  }
  const auto& last = reports.back();
  json j;
  j["subcommand"] = "spectrum";
  j["level"] = o.level;
  j["kind"] = kind_text;
  json evs = json::array();
  for (int i = 0; i < std::min<int>(count, last.eigenvalues.size()); ++i)
    evs.push_back(last.eigenvalues[i]);
  j["eigenvalues"] = evs;
  if (reports.size() >= 2) {
    const auto& prev = reports[reports.size() - 2];
    if (!prev.spectrum_distances.empty()) {
      j["map_residuals"] = prev.map_residuals;
      j["spectrum_distances"] = prev.spectrum_distances;
    }
  }
  if (!o.out_dir.empty()) write_file(o.out_dir, "eigenvalues.csv", eigenvalues_csv(reports));
  std::cout << j.dump() << "\n";
  return 0;
}

int run_invariance(const CommonOpts& o) {
  MapSpec spec = make_spec(o);
  GluingTable table = table_for(spec);
  auto levels = build_levels(table, o.level);
  auto model = standard_sg_model<double>(table);
  std::mt19937_64 gen(o.seed);

  double worst = 0.0;
  for (int t = 0; t < o.trials; ++t) {
    int m = 1 + static_cast<int>(gen() % o.level);
    VecX<double> u = random_fn(levels[m - 1].vertex_count(), gen);
    auto r = check_dynamical_invariance(levels, table, model, m, u);
    double scale = 1.0 + 5.0 * energy(levels[m - 1], model, u).renormalized;
    worst = std::max(worst, std::max(r.raw_defect, r.renorm_defect) / scale);
  }
  bool measure_exact = true;
  bool cells_ok = true;
  for (int m = 0; m + 1 <= std::min(o.level, 5); ++m) {
    auto rep = measure_invariance_check<Rational>(levels, table, m);
    if (!(rep.max_vertex_defect == Rational(0))) measure_exact = false;
    if (!rep.cells_ok) cells_ok = false;
  }
  json j;
  j["subcommand"] = "invariance";
  j["level"] = o.level;
  j["trials"] = o.trials;
  j["seed"] = o.seed;
  j["max_energy_residual"] = worst;
  j["measure_defect_zero"] = measure_exact;
  j["cell_preimage_ok"] = cells_ok;
  std::cout << j.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph Laplacians on gasket-like Julia sets of z^n + lambda/z^m"};
  app.require_subcommand(1);

  CommonOpts o;
  RenderConfig rcfg;
  double renorm_r = 1.0;
  std::string renorm_c;
  int scan_grid = 10000;
  std::string boundary_text = "1,0,0";
  std::string kind_text = "dirichlet";
  int eig_count = 10;

  auto* c_classify = app.add_subcommand("classify", "critical orbits and the subexpanding test");
  add_common(c_classify, o, false);

  auto* c_render = app.add_subcommand("render", "escape-time image of the Julia set");
  add_common(c_render, o, false);
  c_render->add_option("--width", rcfg.width, "image width");
  c_render->add_option("--height", rcfg.height, "image height");
  c_render->add_option("--iters", rcfg.max_iter, "escape iteration cap");
  c_render->add_option("--window", [&rcfg](const std::vector<std::string>& vals) {
    std::istringstream is(vals.front());
    char c1, c2, c3;
    return static_cast<bool>(is >> rcfg.re_min >> c1 >> rcfg.re_max >> c2 >> rcfg.im_min >>
                             c3 >> rcfg.im_max);
  }, "window as 'x0,x1,y0,y1'");
  c_render->add_option("--escape-radius", rcfg.escape_radius, "escape radius (>= 2)");

  auto* c_graph = app.add_subcommand("graph", "combinatorial level graph and CSV dumps");
  add_common(c_graph, o);
  auto* c_vertices = app.add_subcommand("vertices", "planar vertex embedding by preimages");
  add_common(c_vertices, o);
  auto* c_energy = app.add_subcommand("energy-check", "dynamical energy invariance residuals");
  add_common(c_energy, o);
  auto* c_harmonic = app.add_subcommand("harmonic", "harmonic extension ladder");
  add_common(c_harmonic, o);
  c_harmonic->add_option("--boundary", boundary_text, "comma-separated boundary values");
  auto* c_renorm = app.add_subcommand("renorm", "delta-wye renormalization solutions");
  add_common(c_renorm, o, false);
  c_renorm->add_option("--r", renorm_r, "symmetric weight (1, r, r)");
  c_renorm->add_option("--c", renorm_c, "three conductances 'c0,c1,c2' for the general scan");
  c_renorm->add_option("--grid", scan_grid, "scan grid size");
  auto* c_spectrum = app.add_subcommand("spectrum", "Laplacian eigenvalues and map diagnostics");
  add_common(c_spectrum, o);
  c_spectrum->add_option("--kind", kind_text, "dirichlet or neumann")
      ->check(CLI::IsMember({"dirichlet", "neumann"}));
  c_spectrum->add_option("--count", eig_count, "eigenvalues to report");
  auto* c_invariance = app.add_subcommand("invariance", "energy and measure invariance checks");
  add_common(c_invariance, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (o.level < 0 || o.level > o.level_cap) {
      std::cerr << "usage error: --level must lie in [0, " << o.level_cap << "]\n";
      return 2;
    }
    if (c_classify->parsed()) return run_classify(o);
    if (c_render->parsed()) return run_render(o, rcfg);
    if (c_graph->parsed()) return run_graph(o);
    if (c_vertices->parsed()) return run_vertices(o);
    if (c_energy->parsed()) return run_energy_check(o);
    if (c_harmonic->parsed()) return run_harmonic(o, boundary_text);
    if (c_renorm->parsed()) return run_renorm(o, renorm_r, renorm_c, scan_grid);
    if (c_spectrum->parsed()) return run_spectrum(o, kind_text, eig_count);
    if (c_invariance->parsed()) return run_invariance(o);
    std::cerr << "usage error: no subcommand\n";
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    json err;
    err["error"] = e.what();
    std::cout << err.dump() << "\n";
    return 1;
  }
}
