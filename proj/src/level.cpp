#include "gasket/level.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace gasket {

namespace {

char letter(int tile) { return static_cast<char>('0' + tile); }

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

LevelGraph build_level0(const GluingTable& table) {
  LevelGraph g;
  g.level = 0;
  for (int v = 0; v < table.B; ++v) {
    g.addresses.push_back({"", v});
    g.boundary.push_back(v);
  }
  int e_idx = 0;
  for (const auto& [a, b] : table.base_edges) g.edges.push_back({a, b, "", e_idx++});
  Cell c;
  c.word = "";
  c.corners = g.boundary;
  g.cells.push_back(c);
  return g;
}

LevelGraph build_next(const GluingTable& table, const LevelGraph& prev) {
  const int N = table.N;
  const int P = prev.vertex_count();
  UnionFind uf(N * P);
  auto flat = [P](int tile, int u) { return tile * P + u; };

  for (const auto& [a, b] : table.glue_pairs)
    uf.unite(flat(a.tile, prev.boundary[a.index]), flat(b.tile, prev.boundary[b.index]));

  // Classes, each with its member slots and canonical (lex-min) address.
  std::vector<int> root_of(N * P);
  std::vector<std::vector<TileSlot>> members_of(N * P);
  for (int t = 0; t < N; ++t)
    for (int u = 0; u < P; ++u) {
      int r = uf.find(flat(t, u));
      root_of[flat(t, u)] = r;
      members_of[r].push_back({t, u});
      if (members_of[r].size() > 1 && members_of[r][members_of[r].size() - 2].tile == t)
        throw std::runtime_error("build_levels: table merges two vertices of the same tile");
    }

  struct ClassInfo {
    int root;
    Address addr;
    std::vector<TileSlot> members;
  };
  std::vector<ClassInfo> classes;
  for (int r = 0; r < N * P; ++r) {
    if (members_of[r].empty()) continue;
    Address best;
    bool first = true;
    for (const TileSlot& s : members_of[r]) {
      Address cand;
      cand.word = letter(s.tile) + prev.addresses[s.index].word;
      cand.boundary = prev.addresses[s.index].boundary;
      if (first || cand.str() < best.str()) { best = cand; first = false; }
    }
    classes.push_back({r, best, members_of[r]});
  }
  std::sort(classes.begin(), classes.end(),
            [](const ClassInfo& x, const ClassInfo& y) { return x.addr.str() < y.addr.str(); });

  LevelGraph g;
  g.level = prev.level + 1;
  std::vector<int> id_of_root(N * P, -1);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    id_of_root[classes[i].root] = static_cast<int>(i);
    g.addresses.push_back(classes[i].addr);
    g.members.push_back(classes[i].members);
  }

  g.tile_maps.assign(N, std::vector<int>(P));
  for (int t = 0; t < N; ++t)
    for (int u = 0; u < P; ++u) g.tile_maps[t][u] = id_of_root[root_of[flat(t, u)]];

  for (int t = 0; t < N; ++t)
    for (const Edge& e : prev.edges)
      g.edges.push_back({g.tile_maps[t][e.a], g.tile_maps[t][e.b], letter(t) + e.word, e.base_edge});

  for (int t = 0; t < N; ++t)
    for (const Cell& c : prev.cells) {
      Cell nc;
      nc.word = letter(t) + c.word;
      for (int v : c.corners) nc.corners.push_back(g.tile_maps[t][v]);
      g.cells.push_back(nc);
    }

  for (int v = 0; v < table.B; ++v) {
    const TileSlot& s = table.boundary_lift[v];
    g.boundary.push_back(g.tile_maps[s.tile][prev.boundary[s.index]]);
  }
  return g;
}

}  // namespace

std::vector<LevelGraph> build_levels(const GluingTable& table, int m_max) {
  validate(table);
  if (m_max < 0) throw std::invalid_argument("build_levels: m_max must be >= 0");
  if (table.N > 10)
    throw std::invalid_argument("build_levels: tile letters are single digits, N <= 10");
  std::vector<LevelGraph> levels;
  levels.push_back(build_level0(table));
  for (int m = 1; m <= m_max; ++m) levels.push_back(build_next(table, levels.back()));
  return levels;
}

int apply_R(const std::vector<LevelGraph>& levels, int level, int vertex) {
  if (level < 1 || level >= static_cast<int>(levels.size()))
    throw std::domain_error("apply_R: source level out of range");
  const auto& mem = levels[level].members.at(vertex);
  return mem.front().index;  // strip the tile letter; class-independent
}

std::vector<std::vector<int>> apply_R_fibers(const std::vector<LevelGraph>& levels, int src_level) {
  const LevelGraph& fine = levels.at(src_level);
  const LevelGraph& coarse = levels.at(src_level - 1);
  std::vector<std::vector<int>> fibers(coarse.vertex_count());
  for (int v = 0; v < fine.vertex_count(); ++v)
    fibers[apply_R(levels, src_level, v)].push_back(v);
  return fibers;
}

int resolve(const std::vector<LevelGraph>& levels, const std::vector<int>& word, int boundary) {
  const int m = static_cast<int>(word.size());
  if (m >= static_cast<int>(levels.size()))
    throw std::domain_error("resolve: level not built");
  int id = boundary;  // level-0 id equals the boundary index
  for (int k = m - 1; k >= 0; --k) {
    const int lvl = m - k;
    id = levels[lvl].tile_maps.at(word[k]).at(id);
  }
  return id;
}

int embed_up(const std::vector<LevelGraph>& levels, const GluingTable& table, int level, int v) {
  const Address& a = levels.at(level).addresses.at(v);
  const TileSlot& lift = table.boundary_lift.at(a.boundary);
  std::vector<int> word;
  for (char c : a.word) word.push_back(c - '0');
  word.push_back(lift.tile);
  return resolve(levels, word, lift.index);
}

std::string vertices_csv(const LevelGraph& g) {
  std::ostringstream os;
  os << "id,address\n";
  for (int v = 0; v < g.vertex_count(); ++v) os << v << "," << g.addresses[v].str() << "\n";
  return os.str();
}

std::string edges_csv(const LevelGraph& g) {
  std::ostringstream os;
  os << "id_a,id_b,word\n";
  for (const Edge& e : g.edges) os << e.a << "," << e.b << "," << e.word << "\n";
  return os.str();
}

std::string cells_csv(const LevelGraph& g) {
  std::ostringstream os;
  os << "word,vertices\n";
  for (const Cell& c : g.cells) {
    os << c.word << ",";
    for (std::size_t i = 0; i < c.corners.size(); ++i)
      os << (i ? " " : "") << c.corners[i];
    os << "\n";
  }
  return os.str();
}

std::string function_csv(const std::vector<double>& values) {
  std::ostringstream os;
  os.precision(17);
  os << "id,value\n";
  for (std::size_t v = 0; v < values.size(); ++v) os << v << "," << values[v] << "\n";
  return os.str();
}

std::vector<double> function_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);  // header
  std::vector<double> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("function_from_csv: bad row");
    std::size_t id = std::stoul(line.substr(0, comma));
    double value = std::stod(line.substr(comma + 1));
    if (out.size() <= id) out.resize(id + 1, 0.0);
    out[id] = value;
  }
  return out;
}

}  // namespace gasket
