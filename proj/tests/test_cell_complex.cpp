#include <doctest.h>

#include <map>
#include <stdexcept>
#include <set>

#include "gasket/level.hpp"

using namespace gasket;

namespace {
long expected_sg_vertices(int m) {
  long p = 1;
  for (int i = 0; i <= m; ++i) p *= 3;
  return (p + 3) / 2;
}
}  // namespace

TEST_CASE("the dynamical gluing table of the gasket") {
  GluingTable t = sg_dynamical_gluing();
  CHECK(t.N == 3);
  CHECK(t.B == 3);
  REQUIRE(t.glue_pairs.size() == 3);
  CHECK(t.glue_pairs[0] == std::pair<TileSlot, TileSlot>{{0, 1}, {1, 1}});
  CHECK(t.glue_pairs[1] == std::pair<TileSlot, TileSlot>{{0, 2}, {2, 2}});
  CHECK(t.glue_pairs[2] == std::pair<TileSlot, TileSlot>{{1, 0}, {2, 0}});
  CHECK(t.boundary_dynamics == std::vector<int>{0, 2, 1});
  CHECK(t.boundary_lift[1] == TileSlot{1, 2});
}

TEST_CASE("gluing table JSON roundtrip") {
  GluingTable t = sg_dynamical_gluing();
  GluingTable u = gluing_from_json(to_json(t));
  CHECK(t == u);
}

TEST_CASE("invalid tables are rejected") {
  GluingTable t = sg_dynamical_gluing();
  t.glue_pairs[0].second.index = 2;  // glued slots with different indices
  CHECK_THROWS_AS(validate(t), std::invalid_argument);

  GluingTable u = sg_dynamical_gluing();
  u.boundary_dynamics = {0, 1, 2};  // lift no longer strips to the dynamics
  CHECK_THROWS_AS(validate(u), std::invalid_argument);

  GluingTable v = sg_dynamical_gluing();
  v.boundary_lift[0] = {0, 1};  // collides with glue pair ((0,1),(1,1))
  CHECK_THROWS_AS(validate(v), std::invalid_argument);
}

TEST_CASE("level counts match the closed forms up to level 8") {
  auto levels = build_levels(sg_dynamical_gluing(), 8);
  long edges = 3;
  for (int m = 0; m <= 8; ++m) {
    CHECK(levels[m].vertex_count() == expected_sg_vertices(m));
    CHECK(static_cast<long>(levels[m].edges.size()) == edges * 1);
    CHECK(static_cast<long>(levels[m].cells.size()) == edges / 3);
    edges *= 3;
  }
  // Spot values from the recursion: 3 copies minus 3 gluings.
  CHECK(levels[0].vertex_count() == 3);
  CHECK(levels[1].vertex_count() == 6);
  CHECK(levels[1].edges.size() == 9);
  CHECK(levels[1].cells.size() == 3);
  CHECK(levels[2].vertex_count() == 15);
  CHECK(levels[2].edges.size() == 27);
  CHECK(levels[2].cells.size() == 9);
}

TEST_CASE("cells have B corners and own exactly B edges each") {
  auto levels = build_levels(sg_dynamical_gluing(), 4);
  for (const auto& g : levels) {
    std::map<std::string, int> edges_in_cell;
    for (const Edge& e : g.edges) edges_in_cell[e.word]++;
    for (const Cell& c : g.cells) {
      CHECK(c.corners.size() == 3);
      CHECK(edges_in_cell[c.word] == 3);
    }
    // Every edge's word is a cell word.
    std::set<std::string> cell_words;
    for (const Cell& c : g.cells) cell_words.insert(c.word);
    for (const Edge& e : g.edges) CHECK(cell_words.count(e.word) == 1);
  }
}

TEST_CASE("address shift: stripping a letter applies the map") {
  auto table = sg_dynamical_gluing();
  auto levels = build_levels(table, 4);

  // Boundary vertices follow the boundary dynamics: q1 -> q2 at every level.
  for (int m = 1; m <= 4; ++m) {
    int q1 = levels[m].boundary[1];
    int q2_prev = levels[m - 1].boundary[2];
    CHECK(apply_R(levels, m, q1) == q2_prev);
    int q0 = levels[m].boundary[0];
    CHECK(apply_R(levels, m, q0) == levels[m - 1].boundary[0]);
  }

  // All member addresses of a class map to the same class.
  for (int m = 1; m <= 4; ++m) {
    for (int v = 0; v < levels[m].vertex_count(); ++v) {
      int image = levels[m].members[v].front().index;
      for (const TileSlot& s : levels[m].members[v]) CHECK(s.index == image);
    }
  }
}

TEST_CASE("exactly three fine edges cover each coarse edge") {
  auto levels = build_levels(sg_dynamical_gluing(), 5);
  for (int m = 1; m <= 5; ++m) {
    std::map<std::pair<int, int>, int> cover;
    for (const Edge& e : levels[m].edges) {
      int a = apply_R(levels, m, e.a);
      int b = apply_R(levels, m, e.b);
      cover[std::minmax(a, b)]++;
    }
    CHECK(cover.size() == levels[m - 1].edges.size());
    for (const Edge& e : levels[m - 1].edges) {
      auto key = std::minmax(e.a, e.b);
      CHECK(cover[key] == 3);
    }
  }
}

TEST_CASE("the map commutes with the boundary-lift embedding") {
  auto table = sg_dynamical_gluing();
  auto levels = build_levels(table, 4);
  for (int m = 1; m <= 3; ++m) {
    for (int v = 0; v < levels[m].vertex_count(); ++v) {
      int lhs = apply_R(levels, m + 1, embed_up(levels, table, m, v));
      int rhs = embed_up(levels, table, m - 1, apply_R(levels, m, v));
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("pullback is total and respects gluing") {
  auto table = sg_dynamical_gluing();
  auto levels = build_levels(table, 3);

  std::vector<double> ones(levels[1].vertex_count(), 1.0);
  auto pb = pullback(levels, 1, ones);
  for (double x : pb) CHECK(x == 1.0);

  // Indicator of q0 on V0 pulls back to the indicator of its fiber on V1.
  std::vector<double> ind(3, 0.0);
  ind[0] = 1.0;
  auto up = pullback(levels, 0, ind);
  auto fibers = apply_R_fibers(levels, 1);
  int hits = 0;
  for (int v = 0; v < levels[1].vertex_count(); ++v) {
    if (up[v] == 1.0) ++hits;
    bool in_fiber = false;
    for (int x : fibers[0])
      if (x == v) in_fiber = true;
    CHECK((up[v] == 1.0) == in_fiber);
  }
  CHECK(hits == 2);  // q0 itself and the glued critical vertex
}

TEST_CASE("canonical ids are stable across rebuilds") {
  auto a = build_levels(sg_dynamical_gluing(), 4);
  auto b = build_levels(sg_dynamical_gluing(), 4);
  for (int m = 0; m <= 4; ++m) {
    REQUIRE(a[m].vertex_count() == b[m].vertex_count());
    for (int v = 0; v < a[m].vertex_count(); ++v)
      CHECK(a[m].addresses[v].str() == b[m].addresses[v].str());
  }
}

TEST_CASE("resolve walks addresses to canonical ids") {
  auto table = sg_dynamical_gluing();
  auto levels = build_levels(table, 3);
  // The two addresses of a glued midpoint resolve to the same id.
  int a = resolve(levels, {0}, 1);
  int b = resolve(levels, {1}, 1);
  CHECK(a == b);
  // Deeper copies of the same identification.
  CHECK(resolve(levels, {2, 0}, 1) == resolve(levels, {2, 1}, 1));
  CHECK(resolve(levels, {0, 0}, 1) != resolve(levels, {2, 0}, 1));
}

TEST_CASE("CSV exports") {
  auto levels = build_levels(sg_dynamical_gluing(), 1);
  auto v = vertices_csv(levels[1]);
  CHECK(v.find("id,address") == 0);
  auto e = edges_csv(levels[1]);
  CHECK(e.find("id_a,id_b,word") == 0);
  auto c = cells_csv(levels[1]);
  CHECK(c.find("word,vertices") == 0);
}

TEST_CASE("apply_R rejects level 0") {
  auto levels = build_levels(sg_dynamical_gluing(), 1);
  CHECK_THROWS_AS(apply_R(levels, 0, 0), std::domain_error);
}

TEST_CASE("function CSV roundtrip") {
  std::vector<double> u{0.5, -1.25, 3.0, 1.0 / 3.0};
  auto back = function_from_csv(function_csv(u));
  REQUIRE(back.size() == u.size());
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(back[i] == u[i]);
  CHECK_THROWS_AS(function_from_csv("id,value\nbroken"), std::invalid_argument);
}
