#pragma once

#include <string>
#include <vector>

#include "gasket/gluing.hpp"

namespace gasket {

/// Address of a vertex at level m: a word of m tile letters followed by a
/// boundary index. Vertices are equivalence classes of addresses; the
/// canonical representative is the lexicographically smallest one.
struct Address {
  std::string word;  // tile letters as characters '0'.. for readability
  int boundary = 0;

  std::string str() const { return word + ":" + std::to_string(boundary); }
};

struct Edge {
  int a = 0;
  int b = 0;
  std::string word;   // provenance cell word
  int base_edge = 0;  // originating level-0 edge
};

struct Cell {
  std::string word;
  std::vector<int> corners;  // B vertex ids in boundary-index order
};

/// Graph approximation at one level: vertices are canonical ids assigned in
/// lexicographic address order, so rebuilds are reproducible.
struct LevelGraph {
  int level = 0;
  std::vector<Address> addresses;          // canonical address per vertex
  std::vector<Edge> edges;
  std::vector<Cell> cells;
  std::vector<int> boundary;               // B ids realizing the level-0 set
  // tile_maps[i][u] = id at this level of tile i's copy of vertex u one
  // level down; empty at level 0.
  std::vector<std::vector<int>> tile_maps;
  // members[v] = (tile, previous-level id) pairs forming class v.
  std::vector<std::vector<TileSlot>> members;

  int vertex_count() const { return static_cast<int>(addresses.size()); }
};

/// Builds levels 0..m_max; level m is made of N copies of level m-1 glued
/// at the top step per the table's pairs.
/// Throws std::runtime_error if the table merges two vertices of one tile.
std::vector<LevelGraph> build_levels(const GluingTable& table, int m_max);

/// The map realized as the address shift: a vertex of level m+1 maps to the
/// level-m vertex obtained by stripping any member's tile letter.
/// `level` is the source level (must be >= 1).
int apply_R(const std::vector<LevelGraph>& levels, int level, int vertex);

/// Fibers of apply_R: for each level-(m) vertex, the distinct level-(m+1)
/// vertices mapping onto it.
std::vector<std::vector<int>> apply_R_fibers(const std::vector<LevelGraph>& levels, int src_level);

/// Resolve an address (word letters as ints, then boundary index) to the
/// canonical id at level word.size(). Walks tile maps from the inside out.
int resolve(const std::vector<LevelGraph>& levels, const std::vector<int>& word, int boundary);

/// Id at level m+1 of the level-m vertex v (the boundary-lift embedding).
int embed_up(const std::vector<LevelGraph>& levels, const GluingTable& table, int level, int v);

/// u on V_m composed with the map: a function on V_{m+1}.
template <class Vec>
Vec pullback(const std::vector<LevelGraph>& levels, int m, const Vec& u) {
  const LevelGraph& fine = levels.at(m + 1);
  Vec out(fine.vertex_count());
  for (int v = 0; v < fine.vertex_count(); ++v) out[v] = u[apply_R(levels, m + 1, v)];
  return out;
}

/// CSV exports (vertices.csv, edges.csv, cells.csv).
std::string vertices_csv(const LevelGraph& g);
std::string edges_csv(const LevelGraph& g);
std::string cells_csv(const LevelGraph& g);

/// Functions on a level as CSV (canonical id, value).
std::string function_csv(const std::vector<double>& values);
std::vector<double> function_from_csv(const std::string& text);

}  // namespace gasket
