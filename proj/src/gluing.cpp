#include "gasket/gluing.hpp"

#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace gasket {

using nlohmann::json;

std::vector<std::pair<int, int>> cycle_edges(int B) {
  std::vector<std::pair<int, int>> e;
  for (int v = 0; v < B; ++v) e.emplace_back(v, (v + 1) % B);
  return e;
}

void validate(const GluingTable& table) {
  if (table.N < 2) throw std::invalid_argument("GluingTable: N must be >= 2");
  if (table.B < 3) throw std::invalid_argument("GluingTable: B must be >= 3");
  auto slot_ok = [&](const TileSlot& s) {
    return s.tile >= 0 && s.tile < table.N && s.index >= 0 && s.index < table.B;
  };

  std::set<std::pair<int, int>> seen;
  for (const auto& [a, b] : table.glue_pairs) {
    if (!slot_ok(a) || !slot_ok(b)) throw std::invalid_argument("GluingTable: slot out of range");
    if (a.tile >= b.tile) throw std::invalid_argument("GluingTable: glue pair must have tile_a < tile_b");
    if (a.index != b.index)
      throw std::invalid_argument("GluingTable: glued slots must carry the same boundary index");
    for (const auto& s : {a, b}) {
      if (!seen.insert({s.tile, s.index}).second)
        throw std::invalid_argument("GluingTable: slot appears in two glue pairs");
    }
  }

  if (static_cast<int>(table.boundary_lift.size()) != table.B)
    throw std::invalid_argument("GluingTable: boundary_lift must have B entries");
  if (static_cast<int>(table.boundary_dynamics.size()) != table.B)
    throw std::invalid_argument("GluingTable: boundary_dynamics must have B entries");

  std::set<std::pair<int, int>> lift_slots;
  for (int v = 0; v < table.B; ++v) {
    const TileSlot& s = table.boundary_lift[v];
    if (!slot_ok(s)) throw std::invalid_argument("GluingTable: lift slot out of range");
    if (!lift_slots.insert({s.tile, s.index}).second)
      throw std::invalid_argument("GluingTable: boundary_lift is not injective");
    if (seen.count({s.tile, s.index}))
      throw std::invalid_argument("GluingTable: lift slot collides with a glue pair");
    int d = table.boundary_dynamics[v];
    if (d < 0 || d >= table.B) throw std::invalid_argument("GluingTable: dynamics out of range");
    if (s.index != d)
      throw std::invalid_argument("GluingTable: stripping the lift letter must apply the map");
  }

  for (const auto& [a, b] : table.base_edges) {
    if (a < 0 || a >= table.B || b < 0 || b >= table.B || a == b)
      throw std::invalid_argument("GluingTable: bad base edge");
  }
  if (table.base_edges.empty()) throw std::invalid_argument("GluingTable: no base edges");
}

GluingTable sg_dynamical_gluing() {
  GluingTable t;
  t.N = 3;
  t.B = 3;
  // Evaluating the rotated midpoint maps on the model triangle identifies
  // the three midpoints pairwise between tiles.
  t.glue_pairs = {{{0, 1}, {1, 1}}, {{0, 2}, {2, 2}}, {{1, 0}, {2, 0}}};
  t.boundary_lift = {{0, 0}, {1, 2}, {2, 1}};
  t.boundary_dynamics = {0, 2, 1};
  t.base_edges = cycle_edges(3);
  validate(t);
  return t;
}

std::string to_json(const GluingTable& table) {
  json j;
  j["N"] = table.N;
  j["B"] = table.B;
  j["glue_pairs"] = json::array();
  for (const auto& [a, b] : table.glue_pairs)
    j["glue_pairs"].push_back({{a.tile, a.index}, {b.tile, b.index}});
  j["boundary_lift"] = json::array();
  for (const auto& s : table.boundary_lift) j["boundary_lift"].push_back({s.tile, s.index});
  j["boundary_dynamics"] = table.boundary_dynamics;
  j["base_edges"] = json::array();
  for (const auto& [a, b] : table.base_edges) j["base_edges"].push_back({a, b});
  return j.dump();
}

GluingTable gluing_from_json(const std::string& text) {
  json j = json::parse(text);
  GluingTable t;
  t.N = j.at("N").get<int>();
  t.B = j.at("B").get<int>();
  for (const auto& p : j.at("glue_pairs"))
    t.glue_pairs.push_back({{p.at(0).at(0), p.at(0).at(1)}, {p.at(1).at(0), p.at(1).at(1)}});
  for (const auto& s : j.at("boundary_lift")) t.boundary_lift.push_back({s.at(0), s.at(1)});
  t.boundary_dynamics = j.at("boundary_dynamics").get<std::vector<int>>();
  for (const auto& e : j.at("base_edges")) t.base_edges.emplace_back(e.at(0), e.at(1));
  validate(t);
  return t;
}

}  // namespace gasket
