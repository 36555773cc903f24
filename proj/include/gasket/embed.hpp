#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gasket/gluing.hpp"
#include "gasket/level.hpp"
#include "gasket/map.hpp"

namespace gasket {

/// Planar coordinates of every canonical vertex of one level.
struct EmbeddedLevel {
  int level = 0;
  std::vector<Complex> coords;  // by canonical id
  double tolerance = 0.0;
  double max_glue_mismatch = 0.0;  // worst coincidence defect seen
};

/// Post-critical cycle representatives, Newton-polished and ordered by
/// argument starting from the point nearest the positive real axis.
/// Throws std::runtime_error when two share an argument (boundary not
/// star-shaped about 0).
std::vector<Complex> boundary_coordinates(const MapSpec& spec);

/// Embeds levels 0..m by preimage iteration: each level-m coordinate pulls
/// back through the root set of the preimage polynomial, with roots assigned
/// to tiles by the angular sectors cut at the critical points.
/// Throws std::runtime_error on ambiguous branch assignment or when glued
/// addresses land on distinct coordinates.
std::vector<EmbeddedLevel> embed_vertices(const MapSpec& spec, const GluingTable& table,
                                          const std::vector<LevelGraph>& levels, int m,
                                          double tol = 1e-8);

/// Recovers the gluing table from the level-1 numerics: partitions the
/// preimages of the boundary set into tile copies, reads the glue points off
/// the critical points and the lift/dynamics off the orbit data.
GluingTable infer_gluing(const MapSpec& spec, double tol = 1e-8);

struct RenderConfig {
  double re_min = -1.6, re_max = 1.6;
  double im_min = -1.6, im_max = 1.6;
  int width = 512, height = 512;
  int max_iter = 96;
  double escape_radius = 2.0;
};

/// Iterations until |z| exceeds the escape radius (0 and infinity escape
/// through the trap door immediately); max_iter when the orbit never left.
int escape_count(const MapSpec& spec, const RenderConfig& cfg, Complex z);

/// Grayscale escape-time field, row-major bytes scaled by count / max_iter.
struct Image {
  int width = 0, height = 0;
  std::vector<std::uint8_t> pixels;
};

Image render(const MapSpec& spec, const RenderConfig& cfg);

/// Binary PPM (P5) encoding of the image.
std::string ppm_bytes(const Image& img);

std::string coords_csv(const LevelGraph& g, const EmbeddedLevel& e);

}  // namespace gasket
