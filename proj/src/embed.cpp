#include "gasket/embed.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "gasket/preimage.hpp"

namespace gasket {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Sector structure cut along the rays through the critical points.
struct Sectors {
  std::vector<double> crit_args;    // ascending in (-pi, pi]
  std::vector<Complex> crit_points;
  std::vector<int> tile_of_sector;  // sector k = (arg_k, arg_{k+1})

  int sector_of_angle(double a) const {
    const int N = static_cast<int>(crit_args.size());
    double rel = a - crit_args[0];
    rel -= kTwoPi * std::floor(rel / kTwoPi);
    for (int k = N - 1; k >= 0; --k) {
      double lo = crit_args[k] - crit_args[0];
      if (rel >= lo) return k;
    }
    return 0;
  }
};

Sectors make_sectors(const MapSpec& spec, const std::vector<Complex>& boundary) {
  Sectors s;
  s.crit_points = critical_points(spec);
  for (Complex c : s.crit_points) s.crit_args.push_back(std::arg(c));

  const int N = spec.degree();
  s.tile_of_sector.assign(N, -1);
  for (std::size_t j = 0; j < boundary.size(); ++j) {
    int k = s.sector_of_angle(std::arg(boundary[j]));
    if (s.tile_of_sector[k] != -1)
      throw std::runtime_error("sector assignment: two boundary points in one sector");
    s.tile_of_sector[k] = static_cast<int>(j);
  }
  for (int k = 0; k < N; ++k)
    if (s.tile_of_sector[k] == -1)
      throw std::runtime_error("sector assignment: empty sector");
  return s;
}

/// Tiles a preimage root belongs to: both neighbours of the critical ray for
/// a glue point, otherwise the sector of its argument.
std::vector<int> tiles_of_root(const Sectors& s, Complex p, double crit_tol) {
  const int N = static_cast<int>(s.crit_args.size());
  for (int k = 0; k < N; ++k) {
    if (std::abs(p - s.crit_points[k]) <= crit_tol) {
      int right = s.tile_of_sector[k];           // sector starting at arg_k
      int left = s.tile_of_sector[(k + N - 1) % N];
      return {std::min(left, right), std::max(left, right)};
    }
  }
  return {s.tile_of_sector[s.sector_of_angle(std::arg(p))]};
}

}  // namespace

std::vector<Complex> boundary_coordinates(const MapSpec& spec) {
  ClassificationReport rep = classify(spec);
  if (!rep.is_misiurewicz)
    throw std::runtime_error("boundary_coordinates: map did not classify as Misiurewicz");

  // Forward orbit points of the closed-form critical points, with the
  // periodic ones polished onto their cycle equations.
  std::vector<Complex> pts;
  for (const auto& orb : rep.critical_orbits) {
    Complex w = orb.start;
    for (int k = 1; k <= orb.preperiod + orb.period; ++k) {
      w = eval(spec, w);
      bool dup = false;
      for (Complex q : pts)
        if (std::abs(q - w) < 1e-8) { dup = true; break; }
      if (!dup) pts.push_back(w);
    }
  }
  for (Complex& p : pts) {
    for (int period = 1; period <= 8; ++period) {
      Complex w = p;
      for (int k = 0; k < period; ++k) w = eval(spec, w);
      if (std::abs(w - p) < 1e-6) {
        p = refine_periodic(spec, p, period);
        break;
      }
    }
  }

  std::sort(pts.begin(), pts.end(),
            [](Complex a, Complex b) { return std::arg(a) < std::arg(b); });
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (std::abs(std::arg(pts[i]) - std::arg(pts[i - 1])) < 1e-9)
      throw std::runtime_error("boundary_coordinates: duplicate argument, boundary not star-shaped");

  std::size_t start = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (std::abs(std::arg(pts[i])) < std::abs(std::arg(pts[start]))) start = i;
  std::rotate(pts.begin(), pts.begin() + start, pts.end());
  return pts;
}

std::vector<EmbeddedLevel> embed_vertices(const MapSpec& spec, const GluingTable& table,
                                          const std::vector<LevelGraph>& levels, int m,
                                          double tol) {
  if (m >= static_cast<int>(levels.size()))
    throw std::invalid_argument("embed_vertices: levels not built deep enough");
  if (table.N != spec.degree())
    throw std::invalid_argument("embed_vertices: table tile count does not match map degree");

  std::vector<Complex> q = boundary_coordinates(spec);
  if (static_cast<int>(q.size()) != table.B)
    throw std::runtime_error("embed_vertices: post-critical size does not match table boundary");
  for (int v = 0; v < table.B; ++v) {
    if (std::abs(eval(spec, q[v]) - q[table.boundary_dynamics[v]]) > 1e-6)
      throw std::runtime_error("embed_vertices: boundary dynamics mismatch with table");
  }

  Sectors sectors = make_sectors(spec, q);
  const double crit_tol = 1e-6 * (1.0 + std::abs(spec.lambda));
  const double glue_tol = 1e-6;

  std::vector<EmbeddedLevel> out;
  EmbeddedLevel e0;
  e0.level = 0;
  e0.coords = q;
  e0.tolerance = tol;
  out.push_back(e0);

  for (int lvl = 0; lvl < m; ++lvl) {
    const LevelGraph& fine = levels.at(lvl + 1);
    EmbeddedLevel ef;
    ef.level = lvl + 1;
    ef.tolerance = tol;
    ef.coords.assign(fine.vertex_count(), Complex{0.0, 0.0});
    std::vector<bool> assigned(fine.vertex_count(), false);

    for (int w = 0; w < static_cast<int>(out[lvl].coords.size()); ++w) {
      Complex target = out[lvl].coords[w];
      PreimageSet pre = solve_preimages(spec, target);
      std::vector<bool> tile_filled(table.N, false);
      for (std::size_t ri = 0; ri < pre.roots.size(); ++ri) {
        Complex p = pre.roots[ri];
        std::vector<int> tiles = tiles_of_root(sectors, p, crit_tol);
        if (static_cast<int>(tiles.size()) != pre.multiplicities[ri])
          throw std::runtime_error("embed_vertices: root multiplicity does not match sector count");
        for (int t : tiles) {
          if (tile_filled[t])
            throw std::runtime_error("embed_vertices: two preimages assigned to one tile");
          tile_filled[t] = true;
          int id = fine.tile_maps[t][w];
          if (assigned[id]) {
            double mismatch = std::abs(ef.coords[id] - p);
            ef.max_glue_mismatch = std::max(ef.max_glue_mismatch, mismatch);
            if (mismatch > glue_tol)
              throw std::runtime_error("embed_vertices: glued addresses disagree beyond tolerance");
          } else {
            ef.coords[id] = p;
            assigned[id] = true;
          }
        }
      }
      for (int t = 0; t < table.N; ++t)
        if (!tile_filled[t])
          throw std::runtime_error("embed_vertices: empty tile sector for a preimage set");
    }

    // The embedded copy of the previous level must keep its coordinates.
    for (int v = 0; v < static_cast<int>(out[lvl].coords.size()); ++v) {
      int up = embed_up(levels, table, lvl, v);
      if (std::abs(ef.coords[up] - out[lvl].coords[v]) > glue_tol)
        throw std::runtime_error("embed_vertices: embedded vertex moved between levels");
    }
    out.push_back(std::move(ef));
  }
  return out;
}

GluingTable infer_gluing(const MapSpec& spec, double tol) {
  ClassificationReport rep = classify(spec);
  if (!rep.is_misiurewicz) throw std::runtime_error("infer_gluing: map is not Misiurewicz");

  std::vector<Complex> q = boundary_coordinates(spec);
  const int N = spec.degree();
  const int B = static_cast<int>(q.size());
  if (B != N)
    throw std::runtime_error("infer_gluing: only one post-critical point per tile is supported");

  Sectors sectors = make_sectors(spec, q);
  const double crit_tol = 1e-6 * (1.0 + std::abs(spec.lambda));

  // Tile copies of the boundary set.
  std::vector<std::vector<Complex>> T(N, std::vector<Complex>(B));
  std::vector<std::vector<bool>> filled(N, std::vector<bool>(B, false));
  for (int a = 0; a < B; ++a) {
    PreimageSet pre = solve_preimages(spec, q[a]);
    for (std::size_t ri = 0; ri < pre.roots.size(); ++ri) {
      std::vector<int> tiles = tiles_of_root(sectors, pre.roots[ri], crit_tol);
      if (static_cast<int>(tiles.size()) != pre.multiplicities[ri])
        throw std::runtime_error("infer_gluing: root multiplicity does not match sector count");
      for (int t : tiles) {
        if (filled[t][a]) throw std::runtime_error("infer_gluing: preimage matches two slots");
        T[t][a] = pre.roots[ri];
        filled[t][a] = true;
      }
    }
  }
  for (int t = 0; t < N; ++t)
    for (int a = 0; a < B; ++a)
      if (!filled[t][a]) throw std::runtime_error("infer_gluing: preimage matches no tile");

  GluingTable table;
  table.N = N;
  table.B = B;
  table.base_edges = cycle_edges(B);

  for (int v = 0; v < B; ++v) {
    int d = -1;
    Complex rv = eval(spec, q[v]);
    for (int a = 0; a < B; ++a)
      if (std::abs(rv - q[a]) <= 1e-6) d = a;
    if (d < 0) throw std::runtime_error("infer_gluing: boundary point leaves the boundary set");
    table.boundary_dynamics.push_back(d);
  }

  // Glue points are the critical points shared by adjacent tile copies.
  for (std::size_t k = 0; k < sectors.crit_points.size(); ++k) {
    Complex c = sectors.crit_points[k];
    std::vector<TileSlot> slots;
    for (int t = 0; t < N; ++t)
      for (int a = 0; a < B; ++a)
        if (std::abs(T[t][a] - c) <= crit_tol) slots.push_back({t, a});
    if (slots.size() != 2 || slots[0].index != slots[1].index)
      throw std::runtime_error("infer_gluing: critical point does not glue exactly two slots");
    if (slots[0].tile > slots[1].tile) std::swap(slots[0], slots[1]);
    table.glue_pairs.emplace_back(slots[0], slots[1]);
  }
  std::sort(table.glue_pairs.begin(), table.glue_pairs.end(),
            [](const auto& x, const auto& y) {
              return std::tuple(x.first.tile, x.first.index, x.second.tile) <
                     std::tuple(y.first.tile, y.first.index, y.second.tile);
            });

  for (int v = 0; v < B; ++v) {
    std::vector<TileSlot> hits;
    for (int t = 0; t < N; ++t)
      for (int a = 0; a < B; ++a)
        if (std::abs(T[t][a] - q[v]) <= 1e-6) hits.push_back({t, a});
    if (hits.size() != 1)
      throw std::runtime_error("infer_gluing: boundary lift is not unique");
    table.boundary_lift.push_back(hits.front());
  }

  validate(table);
  (void)tol;
  return table;
}

int escape_count(const MapSpec& spec, const RenderConfig& cfg, Complex z) {
  if (std::abs(z) > cfg.escape_radius) return 0;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    if (z == Complex{0.0, 0.0}) return k;  // pole: straight through the trap door
    z = eval(spec, z);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return k;
    if (std::abs(z) > cfg.escape_radius) return k;
  }
  return cfg.max_iter;
}

Image render(const MapSpec& spec, const RenderConfig& cfg) {
  if (cfg.width < 1 || cfg.height < 1) throw std::invalid_argument("render: bad image size");
  if (!(cfg.escape_radius >= 2.0)) throw std::invalid_argument("render: escape radius < 2");
  Image img;
  img.width = cfg.width;
  img.height = cfg.height;
  img.pixels.resize(static_cast<std::size_t>(cfg.width) * cfg.height);
  for (int row = 0; row < cfg.height; ++row) {
    double im = cfg.im_max - (row + 0.5) * (cfg.im_max - cfg.im_min) / cfg.height;
    for (int col = 0; col < cfg.width; ++col) {
      double re = cfg.re_min + (col + 0.5) * (cfg.re_max - cfg.re_min) / cfg.width;
      int count = escape_count(spec, cfg, Complex{re, im});
      img.pixels[static_cast<std::size_t>(row) * cfg.width + col] =
          static_cast<std::uint8_t>((255 * count) / cfg.max_iter);
    }
  }
  return img;
}

std::string ppm_bytes(const Image& img) {
  std::ostringstream os;
  os << "P5\n" << img.width << " " << img.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.pixels.data()),
           static_cast<std::streamsize>(img.pixels.size()));
  return os.str();
}

std::string coords_csv(const LevelGraph& g, const EmbeddedLevel& e) {
  std::ostringstream os;
  os.precision(17);
  os << "id,re,im\n";
  for (int v = 0; v < g.vertex_count(); ++v)
    os << v << "," << e.coords[v].real() << "," << e.coords[v].imag() << "\n";
  return os.str();
}

}  // namespace gasket
