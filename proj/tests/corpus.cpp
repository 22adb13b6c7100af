#include "corpus.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "mllg/error.hpp"

namespace corpus {

std::vector<Formula> shapes(int literals) {
  static std::map<int, std::vector<Formula>> memo;
  if (auto it = memo.find(literals); it != memo.end()) return it->second;
  std::vector<Formula> out;
  if (literals == 1) {
    out.push_back(Formula::lit("", true));
  } else {
    for (int left = 1; left < literals; ++left)
      for (auto& l : shapes(left))
        for (auto& r : shapes(literals - left)) {
          out.push_back(Formula::tensor(l, r));
          out.push_back(Formula::par(l, r));
        }
  }
  memo[literals] = out;
  return out;
}

std::vector<std::vector<std::pair<std::string, bool>>> assignments(int literals, int atoms) {
  std::vector<std::vector<std::pair<std::string, bool>>> out;
  std::vector<std::pair<std::string, bool>> cur;
  const std::string names = "abcdefgh";
  // pos/neg counts per atom
  std::vector<int> pos(atoms, 0), neg(atoms, 0);
  std::function<void(int, int)> rec = [&](int k, int used) {
    if (k == literals) {
      for (int a = 0; a < atoms; ++a)
        if (pos[a] != neg[a]) return;
      out.push_back(cur);
      return;
    }
    for (int a = 0; a < std::min(atoms, used + 1); ++a) {
      bool fresh = pos[a] + neg[a] == 0;
      for (bool p : {true, false}) {
        if (fresh && !p) continue;  // first occurrence is positive
        (p ? pos : neg)[a]++;
        cur.push_back({std::string(1, names[a]), p});
        rec(k + 1, std::max(used, a + 1));
        cur.pop_back();
        (p ? pos : neg)[a]--;
      }
    }
  };
  rec(0, 0);
  return out;
}

namespace {

void fill_rec(Formula& f, const std::vector<std::pair<std::string, bool>>& lits, std::size_t& k) {
  if (f.is_lit()) {
    f.atom = lits[k].first;
    f.positive = lits[k].second;
    ++k;
    return;
  }
  for (auto& c : f.kids) fill_rec(c, lits, k);
}

}  // namespace

Formula fill(const Formula& shape, const std::vector<std::pair<std::string, bool>>& lits) {
  Formula f = shape;
  std::size_t k = 0;
  fill_rec(f, lits, k);
  if (k != lits.size()) mllg::fail(ErrorKind::Internal, "fill: literal count mismatch");
  return f;
}

void for_each_sequent(int max_literals, const std::function<void(const Sequent&)>& f) {
  for (int L = 2; L <= max_literals; L += 2) {
    auto as = assignments(L);
    for (auto& sh : shapes(L))
      for (auto& a : as) f(Sequent{{fill(sh, a)}});
  }
}

void for_each_multi_sequent(int max_literals, const std::function<void(const Sequent&)>& f) {
  for (int L = 2; L <= max_literals; L += 2) {
    auto as = assignments(L);
    // compositions of L into at least two parts
    std::vector<int> parts;
    std::function<void(int)> comp = [&](int left) {
      if (left == 0) {
        if (parts.size() < 2) return;
        std::vector<Formula> cur;
        std::function<void(std::size_t)> pick = [&](std::size_t k) {
          if (k == parts.size()) {
            for (auto& a : as) {
              Sequent s;
              std::size_t at = 0;
              for (std::size_t q = 0; q < parts.size(); ++q) {
                std::vector<std::pair<std::string, bool>> sub(a.begin() + at, a.begin() + at + parts[q]);
                s.formulas.push_back(fill(cur[q], sub));
                at += parts[q];
              }
              f(s);
            }
            return;
          }
          for (auto& sh : shapes(parts[k])) {
            cur.push_back(sh);
            pick(k + 1);
            cur.pop_back();
          }
        };
        pick(0);
        return;
      }
      for (int p = 1; p <= left; ++p) {
        parts.push_back(p);
        comp(left - p);
        parts.pop_back();
      }
    };
    comp(L);
  }
}

namespace {

struct Graph {
  int nodes = 0;
  std::vector<std::pair<int, int>> fixed;              // ⊗ edges, axiom edges
  std::vector<std::pair<int, int>> par_left, par_right;  // one per ℘
  std::vector<int> lit_node;                           // occurrence-1 -> node
};

int build(const Formula& f, Graph& g) {
  int me = g.nodes++;
  if (f.is_lit()) {
    g.lit_node.push_back(me);
    return me;
  }
  int l = build(f.kids[0], g);
  int r = build(f.kids[1], g);
  if (f.kind == Formula::Kind::Tensor) {
    g.fixed.push_back({me, l});
    g.fixed.push_back({me, r});
  } else {
    g.par_left.push_back({me, l});
    g.par_right.push_back({me, r});
  }
  return me;
}

}  // namespace

NetOracle danos_regnier(const Sequent& s, const Linking& l) {
  Graph g;
  for (auto& f : s.formulas) build(f, g);
  for (auto [p, q] : l.pairs) g.fixed.push_back({g.lit_node[p - 1], g.lit_node[q - 1]});
  NetOracle out;
  const std::size_t P = g.par_left.size();
  for (std::uint64_t sw = 0; sw < (std::uint64_t{1} << P); ++sw) {
    std::vector<int> uf(g.nodes);
    std::iota(uf.begin(), uf.end(), 0);
    std::function<int(int)> find = [&](int x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
    int comps = g.nodes;
    bool cyc = false;
    auto join = [&](std::pair<int, int> e) {
      int a = find(e.first), b = find(e.second);
      if (a == b) {
        cyc = true;
        return;
      }
      uf[a] = b;
      --comps;
    };
    for (auto& e : g.fixed) join(e);
    for (std::size_t p = 0; p < P; ++p) join((sw >> p & 1) ? g.par_right[p] : g.par_left[p]);
    if (cyc) out.acyclic = false;
    if (comps != 1)
      out.connected = false;
    else
      out.all_disconnected = false;
  }
  return out;
}

DenseTensor dense_denotation(const LinComb& c, Index n) {
  const int L = c.sequent.literal_count();
  const Semiring& sr = *c.sr;
  DenseTensor out(sr, L, n);
  for_each_index(L, n, [&](const MultiIndex& at) {
    Scalar v = sr.zero;
    for (auto& t : c.terms) {
      bool ok = true;
      for (auto [p, q] : t.linking.pairs) ok = ok && at[p - 1] == at[q - 1];
      if (ok) v = sr.add(v, t.coeff);
    }
    if (!sr.is_zero(v)) out.set(at, v);
  });
  return out;
}

Named naive_contract(const Named& a, const Named& b) {
  std::vector<std::pair<int, int>> shared;
  std::vector<int> a_open, b_open;
  Named out{DenseTensor(a.t.semiring(), 0, a.t.dim()), {}};
  for (int x = 0; x < static_cast<int>(a.names.size()); ++x) {
    auto it = std::find(b.names.begin(), b.names.end(), a.names[x]);
    if (it == b.names.end()) {
      a_open.push_back(x);
      out.names.push_back(a.names[x]);
    } else {
      shared.push_back({x, static_cast<int>(it - b.names.begin())});
    }
  }
  for (int y = 0; y < static_cast<int>(b.names.size()); ++y)
    if (std::find(a.names.begin(), a.names.end(), b.names[y]) == a.names.end()) {
      b_open.push_back(y);
      out.names.push_back(b.names[y]);
    }
  const Semiring& sr = a.t.semiring();
  out.t = DenseTensor(sr, static_cast<int>(out.names.size()), a.t.dim());
  for (auto& [ia, va] : a.t.entries())
    for (auto& [ib, vb] : b.t.entries()) {
      bool ok = true;
      for (auto [x, y] : shared) ok = ok && ia[x] == ib[y];
      if (!ok) continue;
      MultiIndex r;
      for (int x : a_open) r.push_back(ia[x]);
      for (int y : b_open) r.push_back(ib[y]);
      out.t.accumulate(r, sr.mul(va, vb));
    }
  return out;
}

namespace {

Formula random_tree(std::mt19937_64& rng, std::vector<Formula>& leaves, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return leaves[lo];
  std::uniform_int_distribution<std::size_t> cut(lo + 1, hi - 1);
  std::size_t m = cut(rng);
  Formula l = random_tree(rng, leaves, lo, m);
  Formula r = random_tree(rng, leaves, m, hi);
  return std::bernoulli_distribution(0.5)(rng) ? Formula::tensor(l, r) : Formula::par(l, r);
}

}  // namespace

Sequent random_sequent(std::mt19937_64& rng, int literals, int atoms) {
  std::vector<Formula> leaves;
  std::uniform_int_distribution<int> atom(0, atoms - 1);
  for (int k = 0; k < literals; ++k)
    leaves.push_back(Formula::lit(std::string(1, static_cast<char>('a' + atom(rng))), std::bernoulli_distribution(0.5)(rng)));
  return Sequent{{random_tree(rng, leaves, 0, leaves.size())}};
}

Sequent random_balanced_sequent(std::mt19937_64& rng, int literals, int atoms, int formulas) {
  if (literals % 2 || formulas < 1 || formulas > literals) mllg::fail(ErrorKind::Input, "random_balanced_sequent: bad sizes");
  std::vector<Formula> leaves;
  std::uniform_int_distribution<int> atom(0, atoms - 1);
  for (int k = 0; k < literals / 2; ++k) {
    std::string a(1, static_cast<char>('a' + atom(rng)));
    leaves.push_back(Formula::lit(a, true));
    leaves.push_back(Formula::lit(a, false));
  }
  std::shuffle(leaves.begin(), leaves.end(), rng);
  // cut points for the formulas
  std::vector<std::size_t> cuts(literals - 1);
  std::iota(cuts.begin(), cuts.end(), 1);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(formulas - 1);
  cuts.push_back(0);
  cuts.push_back(leaves.size());
  std::sort(cuts.begin(), cuts.end());
  Sequent s;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) s.formulas.push_back(random_tree(rng, leaves, cuts[k], cuts[k + 1]));
  return s;
}

LinComb random_lincomb(std::mt19937_64& rng, const Semiring& sr, const Sequent& s, int max_terms, int max_coeff) {
  auto all = enumerate_linkings(s);
  if (all.empty()) mllg::fail(ErrorKind::Input, "random_lincomb: sequent has no linking");
  std::shuffle(all.begin(), all.end(), rng);
  int k = std::uniform_int_distribution<int>(1, std::min<int>(max_terms, all.size()))(rng);
  bool signed_ok = sr.contains(Scalar(-1));
  std::uniform_int_distribution<int> coeff(signed_ok ? -max_coeff : 0, max_coeff);
  std::vector<LinTerm> terms;
  for (int t = 0; t < k; ++t) {
    Scalar c(coeff(rng));
    if (sr.name == "bool") c = c != 0 ? 1 : 0;
    terms.push_back(LinTerm{c, all[t]});
  }
  return make_lincomb(sr, s, terms);
}

}  // namespace corpus
