#include "mllg/proofnet.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "mllg/error.hpp"

namespace mllg {

namespace {

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[a] = b;
    return true;
  }
};

}  // namespace

int StructureGraph::lca(int u, int v) const {
  while (depth[u] > depth[v]) u = parent[u];
  while (depth[v] > depth[u]) v = parent[v];
  while (u != v) {
    u = parent[u];
    v = parent[v];
  }
  return u;
}

std::vector<int> StructureGraph::tree_path(int u, int v) const {
  if (u == v) return {};
  std::vector<int> up, down;
  while (depth[u] > depth[v]) {
    up.push_back(u);
    u = parent[u];
  }
  while (depth[v] > depth[u]) {
    down.push_back(v);
    v = parent[v];
  }
  while (u != v) {
    up.push_back(u);
    down.push_back(v);
    u = parent[u];
    v = parent[v];
  }
  up.push_back(u);
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

StructureGraph build_structure(const Sequent& s, const Linking& l) {
  validate_linking(s, l);
  StructureGraph g;
  const int N = s.literal_count();
  const int F = static_cast<int>(s.formulas.size());
  const int total = N + s.count(Formula::Kind::Tensor) + s.count(Formula::Kind::Par) + (F - 1);
  g.literals = N;
  g.kind.assign(total, StructureGraph::Kind::Literal);
  g.parent.assign(total, -1);
  g.kids.assign(total, {-1, -1});
  g.depth.assign(total, 0);
  g.path.assign(total, {});
  g.joiner.assign(total, 0);
  int next_lit = 0, next_int = N;
  std::vector<int> path;
  std::function<int(const Formula&)> build = [&](const Formula& f) {
    if (f.is_lit()) {
      int id = next_lit++;
      g.path[id] = path;
      return id;
    }
    int id = next_int++;
    g.kind[id] = f.kind == Formula::Kind::Tensor ? StructureGraph::Kind::Tensor : StructureGraph::Kind::Par;
    g.path[id] = path;
    int kid[2];
    for (int k = 0; k < 2; ++k) {
      path.push_back(k);
      kid[k] = build(f.kids[k]);
      path.pop_back();
      g.parent[kid[k]] = id;
    }
    g.kids[id] = {kid[0], kid[1]};
    return id;
  };
  std::vector<int> roots;
  for (int k = 0; k < F; ++k) {
    path.assign(1, k);
    roots.push_back(build(s.formulas[k]));
  }
  int acc = roots[0];
  for (int k = 1; k < F; ++k) {
    int id = next_int++;
    g.kind[id] = StructureGraph::Kind::Par;
    g.joiner[id] = 1;
    g.kids[id] = {acc, roots[k]};
    g.parent[acc] = id;
    g.parent[roots[k]] = id;
    acc = id;
  }
  g.root = acc;
  // depths top-down: parents always have larger ids than children except literals
  std::function<void(int, int)> set_depth = [&](int x, int d) {
    g.depth[x] = d;
    if (g.kind[x] != StructureGraph::Kind::Literal) {
      set_depth(g.kids[x].first, d + 1);
      set_depth(g.kids[x].second, d + 1);
    }
  };
  set_depth(g.root, 0);
  for (int x = 0; x < total; ++x)
    if (g.kind[x] == StructureGraph::Kind::Par) g.pars.push_back(x);
  for (auto [p, q] : l.pairs) g.axioms.emplace_back(p - 1, q - 1);
  return g;
}

std::uint64_t switching_count(const StructureGraph& g) {
  if (g.pars.size() >= 64) return UINT64_MAX;
  return std::uint64_t(1) << g.pars.size();
}

namespace {

template <class F>
void switching_edges(const StructureGraph& g, std::uint64_t sw, F&& edge) {
  std::size_t pi = 0;
  for (int x = g.literals; x < g.size(); ++x) {
    auto [a, b] = g.kids[x];
    if (g.kind[x] == StructureGraph::Kind::Tensor) {
      edge(x, a);
      edge(x, b);
    } else {
      // g.pars is sorted by id, so the bit order follows node order
      while (g.pars[pi] != x) ++pi;
      edge(x, (sw >> pi & 1) ? b : a);
      ++pi;
    }
  }
  for (auto [p, q] : g.axioms) edge(p, q);
}

}  // namespace

SwitchingStats analyse_switching(const StructureGraph& g, std::uint64_t sw) {
  UnionFind uf(g.size());
  SwitchingStats st;
  int merges = 0;
  switching_edges(g, sw, [&](int a, int b) {
    if (uf.unite(a, b))
      ++merges;
    else
      st.acyclic = false;
  });
  st.components = g.size() - merges;
  return st;
}

std::vector<int> components(const StructureGraph& g, std::uint64_t sw) {
  UnionFind uf(g.size());
  switching_edges(g, sw, [&](int a, int b) { uf.unite(a, b); });
  std::vector<int> label(g.size(), -1), out(g.size());
  int next = 0;
  for (int x = 0; x < g.size(); ++x) {
    int r = uf.find(x);
    if (label[r] < 0) label[r] = next++;
    out[x] = label[r];
  }
  return out;
}

int switching_bound() { return 20; }

namespace {

bool all_switchings(const Sequent& s, const Linking& l, bool need_connected) {
  StructureGraph g = build_structure(s, l);
  if (static_cast<int>(g.pars.size()) > switching_bound())
    fail(ErrorKind::Limit, std::to_string(g.pars.size()) + " par vertices exceed the switching bound of " +
                               std::to_string(switching_bound()) + "; use the MDNF fast check");
  std::uint64_t total = switching_count(g);
  for (std::uint64_t sw = 0; sw < total; ++sw) {
    auto st = analyse_switching(g, sw);
    if (!st.acyclic) return false;
    if (need_connected && st.components != 1) return false;
  }
  return true;
}

}  // namespace

bool is_mll_net(const Sequent& s, const Linking& l) { return all_switchings(s, l, true); }
bool is_mix_net(const Sequent& s, const Linking& l) { return all_switchings(s, l, false); }

bool first_switching_connected(const Sequent& s, const Linking& l) {
  StructureGraph g = build_structure(s, l);
  return analyse_switching(g, 0).components == 1;
}

BlockGraph block_graph(const Sequent& s, const Linking& l) {
  validate_linking(s, l);
  BlockGraph bg;
  bg.blocks = blocks(s);
  bg.block_of.assign(s.literal_count() + 1, -1);
  for (std::size_t b = 0; b < bg.blocks.size(); ++b)
    for (int o : bg.blocks[b]) bg.block_of[o] = static_cast<int>(b);
  for (auto [p, q] : l.pairs) bg.edges.emplace_back(bg.block_of[p], bg.block_of[q]);
  return bg;
}

bool mdnf_fast_check(const Sequent& s, const Linking& l, Mode mode) {
  if (!is_mdnf(s)) fail(ErrorKind::Input, "mdnf_fast_check: sequent is not in MDNF");
  BlockGraph bg = block_graph(s, l);
  UnionFind uf(static_cast<int>(bg.blocks.size()));
  int comps = static_cast<int>(bg.blocks.size());
  for (auto [a, b] : bg.edges) {
    if (!uf.unite(a, b)) return false;
    --comps;
  }
  return mode == Mode::Mix || comps == 1;
}

// ---- switching cycles ----

std::vector<std::pair<int, int>> SwitchingCycle::links() const {
  std::vector<std::pair<int, int>> out;
  for (auto [a, b] : steps) out.emplace_back(std::min(a, b), std::max(a, b));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> SwitchingCycle::key() const {
  std::vector<int> k;
  for (auto [a, b] : steps) {
    k.push_back(a);
    k.push_back(b);
  }
  std::sort(k.begin(), k.end());
  return k;
}

namespace {

// Paths between two literals whose top is a ⊗, with their vertices.
struct PathTable {
  int n;
  std::vector<std::vector<int>> verts;
  std::vector<char> ok;
  PathTable(const StructureGraph& g) : n(g.literals), verts(n * n), ok(n * n, 0) {
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        if (u == v) continue;
        int c = g.lca(u, v);
        if (g.kind[c] != StructureGraph::Kind::Tensor) continue;
        ok[u * n + v] = 1;
        verts[u * n + v] = g.tree_path(u, v);
      }
  }
};

struct CycleSearch {
  const StructureGraph& g;
  PathTable pt;
  std::vector<std::pair<int, int>> links;  // node ids (pos, neg)
  std::vector<char> used_vertex, used_link;
  std::vector<std::pair<int, int>> steps;  // node ids
  int start = 0;
  std::optional<std::pair<std::vector<int>, std::vector<std::pair<int, int>>>> best;
  bool any_length = false;
  bool stop = false;

  CycleSearch(const StructureGraph& gr) : g(gr), pt(gr), used_vertex(gr.size(), 0) {
    links = g.axioms;
    used_link.assign(links.size(), 0);
  }

  bool place(int u, int v, bool on) {
    if (!pt.ok[u * pt.n + v]) return false;
    auto& vs = pt.verts[u * pt.n + v];
    if (on) {
      for (int x : vs)
        if (used_vertex[x]) return false;
    }
    for (int x : vs) used_vertex[x] = on;
    return true;
  }

  void consider() {
    std::vector<int> key;
    std::vector<std::pair<int, int>> st;
    for (auto [a, b] : steps) {
      key.push_back(a + 1);
      key.push_back(b + 1);
      st.emplace_back(a + 1, b + 1);
    }
    std::sort(key.begin(), key.end());
    if (!best || std::tie(key, st) < std::tie(best->first, best->second)) best = std::make_pair(key, st);
    if (any_length) stop = true;
  }

  void dfs(std::size_t k) {
    if (stop) return;
    int u = steps.back().second;
    if (any_length || steps.size() == k) {
      int v = steps.front().first;
      if (place(u, v, true)) {
        consider();
        place(u, v, false);
      }
      if (!any_length || stop) return;
    }
    if (steps.size() >= k) return;
    for (std::size_t t = start + 1; t < links.size(); ++t) {
      if (used_link[t]) continue;
      for (int o = 0; o < 2; ++o) {
        int from = o ? links[t].second : links[t].first;
        int to = o ? links[t].first : links[t].second;
        if (!place(u, from, true)) continue;
        used_link[t] = 1;
        steps.emplace_back(from, to);
        dfs(k);
        steps.pop_back();
        used_link[t] = 0;
        place(u, from, false);
        if (stop) return;
      }
    }
  }

  void run(std::size_t k) {
    for (std::size_t s = 0; s < links.size() && !stop; ++s) {
      start = static_cast<int>(s);
      used_link[s] = 1;
      for (int o = 0; o < 2 && !stop; ++o) {
        steps.clear();
        steps.emplace_back(o ? links[s].second : links[s].first, o ? links[s].first : links[s].second);
        dfs(k);
      }
      used_link[s] = 0;
    }
  }
};

}  // namespace

std::optional<std::vector<int>> route_cycle(const StructureGraph& g, const std::vector<std::pair<int, int>>& steps) {
  if (steps.empty()) return std::nullopt;
  std::vector<char> used(g.size(), 0);
  std::vector<int> out;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    int a = steps[k].first - 1, b = steps[k].second - 1;
    if (a < 0 || b < 0 || a >= g.literals || b >= g.literals) return std::nullopt;
    bool linked = false;
    for (auto [p, q] : g.axioms)
      if ((p == a && q == b) || (p == b && q == a)) linked = true;
    if (!linked) return std::nullopt;
    int u = b, v = steps[(k + 1) % steps.size()].first - 1;
    if (u == v) return std::nullopt;
    if (g.kind[g.lca(u, v)] != StructureGraph::Kind::Tensor) return std::nullopt;
    for (int x : g.tree_path(u, v)) {
      if (used[x]) return std::nullopt;
      used[x] = 1;
      out.push_back(x);
    }
  }
  return out;
}

std::optional<SwitchingCycle> find_minimal_cycle(const Sequent& s, const Linking& l) {
  StructureGraph g = build_structure(s, l);
  CycleSearch cs(g);
  for (std::size_t k = 1; k <= cs.links.size(); ++k) {
    cs.run(k);
    if (cs.best) {
      SwitchingCycle c;
      c.steps = cs.best->second;
      auto r = route_cycle(g, c.steps);
      require(r.has_value(), "find_minimal_cycle: found cycle does not route");
      c.vertices = *r;
      return c;
    }
  }
  return std::nullopt;
}

bool has_switching_cycle(const Sequent& s, const Linking& l) {
  StructureGraph g = build_structure(s, l);
  CycleSearch cs(g);
  cs.any_length = true;
  cs.run(cs.links.size());
  return cs.best.has_value();
}

int par_vertices(const StructureGraph& g, const SwitchingCycle& c) {
  int n = 0;
  for (int x : c.vertices)
    if (g.kind[x] == StructureGraph::Kind::Par) ++n;
  return n;
}

std::string to_dot(const Sequent& s, const Linking& l) {
  StructureGraph g = build_structure(s, l);
  auto occ = s.occurrences();
  std::ostringstream os;
  os << "graph proof_structure {\n  node [fontname=\"Helvetica\"];\n";
  std::vector<int> block_of(g.literals, -1);
  if (is_mdnf(s)) {
    auto bs = blocks(s);
    for (std::size_t b = 0; b < bs.size(); ++b) {
      os << "  subgraph cluster_b" << b << " { style=rounded; label=\"block " << b + 1 << "\";";
      for (int o : bs[b]) os << " n" << o - 1 << ";";
      os << " }\n";
    }
  }
  os << "  { rank=same;";
  for (int x = 0; x < g.literals; ++x) os << " n" << x << ";";
  os << " }\n";
  for (int x = 0; x < g.size(); ++x) {
    os << "  n" << x << " [";
    if (x < g.literals) {
      os << "shape=plaintext, label=\"" << (occ[x].positive ? "" : "~") << occ[x].atom << " (" << x + 1 << ")\"";
    } else if (g.kind[x] == StructureGraph::Kind::Tensor) {
      os << "shape=circle, label=\"*\"";
    } else {
      os << "shape=circle, label=\"|\"" << (g.joiner[x] ? ", style=dashed" : "");
    }
    os << "];\n";
  }
  for (int x = g.literals; x < g.size(); ++x) {
    os << "  n" << g.kids[x].first << " -- n" << x << ";\n";
    os << "  n" << g.kids[x].second << " -- n" << x << ";\n";
  }
  for (auto [p, q] : g.axioms) os << "  n" << p << " -- n" << q << " [constraint=false, color=blue, penwidth=2];\n";
  os << "}\n";
  return os.str();
}

}  // namespace mllg
