#pragma once

#include <string>
#include <utility>
#include <vector>

namespace gasket {

/// One glued slot: boundary copy `index` of tile `tile`.
struct TileSlot {
  int tile = 0;
  int index = 0;
  friend bool operator==(const TileSlot&, const TileSlot&) = default;
};

/// Finite combinatorial description of how N tile copies of the level-0
/// vertex set are glued. This one table generates every level graph.
///
///   glue_pairs        pairs of slots identified to a single point (stored
///                     once with tile_a < tile_b); a valid table pairs equal
///                     boundary indices, since both branches invert the map
///                     at the glued point
///   boundary_lift     for boundary vertex v, the slot (t_v, a_v) realizing
///                     v one level deeper; stripping the lift letter applies
///                     the map, so a_v = boundary_dynamics[v]
///   boundary_dynamics the map restricted to the boundary set (may collapse)
///   base_edges        level-0 edge list; the boundary cycle by default
struct GluingTable {
  int N = 0;
  int B = 0;
  std::vector<std::pair<TileSlot, TileSlot>> glue_pairs;
  std::vector<TileSlot> boundary_lift;
  std::vector<int> boundary_dynamics;
  std::vector<std::pair<int, int>> base_edges;

  friend bool operator==(const GluingTable&, const GluingTable&) = default;
};

/// Structural validation; throws std::invalid_argument with a diagnostic
/// when a table cannot define a gasket-like complex.
void validate(const GluingTable& table);

/// The N=3, B=3 table of the dynamical Sierpinski gasket IFS,
/// i.e. the compositions of the midpoint maps with rotations evaluated
/// on the model triangle.
GluingTable sg_dynamical_gluing();

/// Cycle base edges (v, v+1 mod B).
std::vector<std::pair<int, int>> cycle_edges(int B);

std::string to_json(const GluingTable& table);
GluingTable gluing_from_json(const std::string& text);

}  // namespace gasket
