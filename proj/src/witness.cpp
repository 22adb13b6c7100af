#include "mllg/witness.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "mllg/error.hpp"

namespace mllg {

std::string witness_kind_name(WitnessKind k) {
  switch (k) {
    case WitnessKind::ScalarSum: return "scalar_sum";
    case WitnessKind::Cycle: return "cycle";
    case WitnessKind::Disconnect: return "disconnect";
    case WitnessKind::Uniqueness: return "uniqueness";
    case WitnessKind::MixUniqueness: return "mix_uniqueness";
    case WitnessKind::MixCycle: return "mix_cycle";
  }
  return "?";
}

WitnessKind parse_witness_kind(const std::string& s) {
  for (WitnessKind k : {WitnessKind::ScalarSum, WitnessKind::Cycle, WitnessKind::Disconnect, WitnessKind::Uniqueness,
                        WitnessKind::MixUniqueness, WitnessKind::MixCycle}) {
    std::string name = witness_kind_name(k);
    std::string dashed = name;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    if (s == name || s == dashed) return k;
  }
  fail(ErrorKind::Input, "unknown witness kind '" + s + "'");
}

namespace {

std::vector<std::string> group_names(const Sequent& s, const std::vector<int>& occs) {
  auto occ = s.occurrences();
  std::vector<std::string> out;
  for (int o : occs) out.push_back(index_name(occ[o - 1]));
  return out;
}

DeltaExpr ones(const Semiring& sr, Index n, const std::string& name) {
  DeltaExpr e(sr, n, {name});
  e.add_term(Term{sr.one, {}});
  return e;
}

// Σ δ^{t} over distinct tuples
DeltaExpr constant_sum(const Semiring& sr, Index n, const std::vector<std::string>& names,
                       const std::vector<MultiIndex>& tuples) {
  DeltaExpr e = DeltaExpr::zero(sr, n, names);
  std::set<MultiIndex> seen;
  for (auto& t : tuples)
    if (seen.insert(t).second) e = add(e, DeltaExpr::constant(sr, n, names, t));
  return e;
}

// Support of a coefficient-one sum of constant deltas, or nullopt.
std::optional<std::vector<MultiIndex>> constant_support(const DeltaExpr& e) {
  std::vector<MultiIndex> out;
  for (auto& t : e.terms()) {
    if (t.coeff != e.semiring().one) return std::nullopt;
    MultiIndex m(e.order(), 0);
    for (auto& f : t.factors) {
      if (f.kind != Factor::Kind::Delta || !f.args[0].is_var() || f.args[1].is_var()) return std::nullopt;
      if (m[f.args[0].var] != 0) return std::nullopt;
      m[f.args[0].var] = f.args[1].val;
    }
    for (Index v : m)
      if (v == 0) return std::nullopt;
    out.push_back(m);
  }
  return out;
}

bool structurally_partial_permutation(const DeltaExpr& e) {
  auto sup = constant_support(e);
  if (!sup) return false;
  for (std::size_t a = 0; a < sup->size(); ++a)
    for (std::size_t b = a + 1; b < sup->size(); ++b) {
      int diff = 0;
      for (int k = 0; k < e.order(); ++k) diff += (*sup)[a][k] != (*sup)[b][k];
      if (diff < 2) return false;
    }
  return true;
}

DeltaExpr contract_all(const Witness& w) {
  DeltaExpr acc = to_tensor(w.comb, w.n);
  for (auto& t : w.block_tensors)
    if (t) acc = contract_common(acc, *t);
  return acc.reordered(w.open_names);
}

nlohmann::json tuples_json(const std::vector<MultiIndex>& ts) {
  nlohmann::json j = nlohmann::json::array();
  for (auto& t : ts) j.push_back(t);
  return j;
}

std::vector<LinTerm> nonzero_terms(const LinComb& c) {
  std::vector<LinTerm> out;
  for (auto& t : c.terms)
    if (!c.sr->is_zero(t.coeff)) out.push_back(t);
  return out;
}

// block index (0-based) of each occurrence, index 0 unused
std::vector<int> block_index(const std::vector<std::vector<int>>& bl, int literals) {
  std::vector<int> of(literals + 1, -1);
  for (std::size_t b = 0; b < bl.size(); ++b)
    for (int o : bl[b]) of[o] = static_cast<int>(b);
  return of;
}

void finish(Witness& w) {
  w.contraction = contract_all(w);
  verify(w);
}

}  // namespace

// ---- verification ----

void verify(const Witness& w) {
  auto bad = [&](const std::string& why) { fail(ErrorKind::Internal, witness_kind_name(w.kind) + " witness: " + why); };
  const Semiring& sr = *w.comb.sr;
  if (w.kind == WitnessKind::ScalarSum) {
    Scalar sum = sr.zero;
    for (auto& t : w.comb.terms) sum = sr.add(sum, t.coeff);
    if (sum != w.sum) bad("recorded sum differs from the coefficients");
    if (sum == sr.one) bad("coefficients sum to one");
    DenseTensor d = to_tensor(w.comb, 1).densify();
    if (d.at(MultiIndex(d.order(), 1)) != sum) bad("evaluation at dimension one differs from the sum");
    return;
  }
  if (w.block_tensors.size() != w.groups.size()) bad("one tensor slot per block expected");
  if (!w.contraction) bad("no recorded contraction");
  for (std::size_t m = 0; m < w.groups.size(); ++m) {
    const auto& t = w.block_tensors[m];
    bool open = static_cast<int>(m) == w.block;
    if (open != !t.has_value()) bad("block " + std::to_string(m + 1) + " has the wrong tensor slot");
    if (!t) continue;
    if (t->names() != group_names(w.comb.sequent, w.groups[m])) bad("block tensor indices do not match the block");
    switch (w.family) {
      case Family::A:
        if (!structurally_partial_permutation(*t)) bad("block tensor " + std::to_string(m + 1) + " is not a partial permutation");
        break;
      case Family::C:
        if (!is_full_permutation(*t)) bad("block tensor " + std::to_string(m + 1) + " is not a full permutation");
        break;
      case Family::S: {
        DenseTensor d = t->densify();
        DenseTensor want(sr, 2, w.n);
        for (Index y = 1; y <= w.n; ++y) want.set({w.xvec[m], y}, sr.one);
        if (d != want) bad("block tensor " + std::to_string(m + 1) + " is not the S covalue for its constant");
        break;
      }
      case Family::D: {
        DenseTensor d = t->densify();
        if (t->order() == 1) {
          if (d != DenseTensor::delta(sr, 2, {1})) bad("one-literal covalue must be d^1");
        } else if (!(d.at({1, 1}) == sr.one && sr.is_zero(d.at({1, 2})) && sr.is_zero(d.at({2, 1})))) {
          bad("two-literal covalue outside Xi_2");
        }
        break;
      }
      default:
        bad("unexpected family");
    }
  }
  DeltaExpr again = contract_all(w);
  if (!equivalent(again, *w.contraction)) bad("contraction does not recompute to the recorded result");
  switch (w.kind) {
    case WitnessKind::Cycle:
    case WitnessKind::Uniqueness: {
      if (w.probes.size() != 2 || w.probes[0] == w.probes[1]) bad("two distinct probe entries expected");
      for (auto& p : w.probes)
        if (sr.is_zero(again.eval(p))) bad("probe entry is zero");
      break;
    }
    case WitnessKind::Disconnect:
      if (!again.is_zero()) bad("contraction is not the zero tensor");
      break;
    case WitnessKind::MixUniqueness:
      if (is_full_permutation(again.densify())) bad("contraction lies in Perm(2,n)");
      break;
    case WitnessKind::MixCycle:
      if (again.densify() == DenseTensor::delta(sr, 2, {1, 1})) bad("contraction equals the D value");
      break;
    default:
      break;
  }
}

bool verifies(const Witness& w, std::string* why) {
  try {
    verify(w);
    return true;
  } catch (const Error& e) {
    if (why) *why = e.what();
    return false;
  }
}

nlohmann::json to_json(const Witness& w) {
  nlohmann::json j;
  j["kind"] = witness_kind_name(w.kind);
  j["family"] = family_name(w.family);
  j["n"] = w.n;
  j["combination"] = to_json(w.comb);
  if (w.kind == WitnessKind::ScalarSum) {
    j["sum"] = format_scalar(w.sum);
  } else {
    j["block"] = w.block + 1;
    j["groups"] = w.groups;
    nlohmann::json bt = nlohmann::json::array();
    for (auto& t : w.block_tensors) bt.push_back(t ? to_json(*t) : nlohmann::json(nullptr));
    j["block_tensors"] = bt;
    j["open_indices"] = w.open_names;
    if (!w.probes.empty()) {
      j["probe_tuples"] = tuples_json(w.probes);
      nlohmann::json pv = nlohmann::json::array();
      for (auto& p : w.probes) pv.push_back(format_scalar(w.contraction->eval(p)));
      j["probe_values"] = pv;
    }
    if (!w.xvec.empty()) j["x"] = w.xvec;
    if (w.contraction) {
      j["contraction"] = to_json(*w.contraction);
      j["contraction_text"] = to_string(*w.contraction);
    }
  }
  j["violation"] = w.violation;
  if (!w.log.is_null()) j["detail"] = w.log;
  return j;
}

// ---- scalar sum ----

std::optional<Witness> scalar_sum_check(const LinComb& c) {
  const Semiring& sr = *c.sr;
  Scalar sum = sr.zero;
  for (auto& t : c.terms) sum = sr.add(sum, t.coeff);
  if (sum == sr.one) return std::nullopt;
  Witness w;
  w.kind = WitnessKind::ScalarSum;
  w.family = Family::C1;
  w.n = 1;
  w.comb = c;
  w.sum = sum;
  w.violation = "coefficients sum to " + format_scalar(sum) + ", the only C1 value is 1";
  verify(w);
  return w;
}

// ---- cycles (A_n) ----

CycleNumbering cycle_numbering(const Sequent& s, const Linking& l, const SwitchingCycle& cyc) {
  auto bl = blocks(s);
  const int L = s.literal_count();
  auto in_cycle = cyc.links();
  std::set<std::pair<int, int>> cyc_set(in_cycle.begin(), in_cycle.end());
  std::vector<std::pair<int, int>> plain, hot;
  for (auto& p : l.pairs) (cyc_set.count({std::min(p.first, p.second), std::max(p.first, p.second)}) ? hot : plain).push_back(p);
  auto by_low = [](const std::pair<int, int>& a, const std::pair<int, int>& b) {
    return std::min(a.first, a.second) < std::min(b.first, b.second);
  };
  std::sort(plain.begin(), plain.end(), by_low);
  std::sort(hot.begin(), hot.end(), by_low);
  CycleNumbering out;
  out.numbers.assign(L + 1, {});
  Index i = 0;
  for (auto& [p, q] : plain) {
    ++i;
    out.numbers[p] = {i};
    out.numbers[q] = {i};
  }
  for (auto& [p, q] : hot) {
    out.numbers[p] = {i + 1, i + 2};
    out.numbers[q] = {i + 1, i + 2};
    i += 2;
  }
  out.n = i;
  for (auto& b : bl) {
    bool touched = false;
    for (int o : b) touched |= out.numbers[o].size() == 2;
    MultiIndex lo, hi;
    for (int o : b) {
      lo.push_back(out.numbers[o].front());
      hi.push_back(out.numbers[o].back());
    }
    if (touched)
      out.tuples.push_back({lo, hi});
    else
      out.tuples.push_back({lo});
  }
  return out;
}

Witness cycle_witness(const LinComb& c, std::size_t term, const SwitchingCycle& cyc) {
  validate(c);
  if (!is_mdnf(c.sequent)) fail(ErrorKind::Input, "cycle_witness: the sequent must be in MDNF");
  if (term >= c.terms.size()) fail(ErrorKind::Input, "cycle_witness: no such term");
  if (c.sr->is_zero(c.terms[term].coeff)) fail(ErrorKind::Input, "cycle_witness: the chosen linking has coefficient zero");
  const Linking& lam = c.terms[term].linking;
  StructureGraph g = build_structure(c.sequent, lam);
  if (!route_cycle(g, cyc.steps)) fail(ErrorKind::Input, "cycle_witness: not a switching cycle of the linking");
  CycleNumbering num = cycle_numbering(c.sequent, lam, cyc);
  auto bl = blocks(c.sequent);
  int k = -1;
  for (std::size_t m = 0; m < bl.size() && k < 0; ++m)
    if (num.tuples[m].size() == 2) k = static_cast<int>(m);
  require(k >= 0, "cycle_witness: the cycle touches no block");

  Witness w;
  w.kind = WitnessKind::Cycle;
  w.family = Family::A;
  w.n = num.n;
  w.comb = c;
  w.groups = bl;
  w.block = k;
  for (std::size_t m = 0; m < bl.size(); ++m) {
    if (static_cast<int>(m) == k) {
      w.block_tensors.emplace_back(std::nullopt);
      continue;
    }
    w.block_tensors.emplace_back(constant_sum(*c.sr, w.n, group_names(c.sequent, bl[m]), num.tuples[m]));
  }
  w.open_names = group_names(c.sequent, bl[k]);
  w.probes = num.tuples[k];
  w.violation = "two nonzero entries where F(A_n) allows at most one";
  nlohmann::json nums = nlohmann::json::object();
  for (std::size_t o = 1; o < num.numbers.size(); ++o) nums[std::to_string(o)] = num.numbers[o];
  nlohmann::json tup = nlohmann::json::array();
  for (auto& t : num.tuples) tup.push_back(tuples_json(t));
  w.log = {{"term", term + 1}, {"linking", to_json(lam)}, {"cycle", cyc.links()}, {"numbers", nums}, {"tuples", tup}};
  finish(w);
  return w;
}

// ---- completion of partial permutations ----

Index completion_dimension(Index next_label, int powers) {
  Index P = std::max<Index>(next_label, powers + 1);
  if (P < 2) P = 2;
  if (P > 62) fail(ErrorKind::Limit, "permutation completion needs n = 2^" + std::to_string(P) + " - 1, beyond 64-bit indices");
  return (Index{1} << P) - 1;
}

DeltaExpr complete_partial_permutation(const Semiring& sr, const std::vector<std::string>& names,
                                       const std::vector<ExitTuple>& tuples, Index n) {
  const int L = static_cast<int>(names.size());
  for (auto& t : tuples) {
    if (static_cast<int>(t.vals.size()) != L) fail(ErrorKind::Input, "completion: tuple length differs from the order");
    if (t.exit < 0 || t.exit >= L) fail(ErrorKind::Input, "completion: every tuple needs one exit position");
    for (Index v : t.vals)
      if (v < 1 || v > n) fail(ErrorKind::Input, "completion: tuple entry outside [n]");
  }
  if (L == 1) {
    std::set<Index> vals;
    for (auto& t : tuples) vals.insert(t.vals[0]);
    if (vals.size() > 1) fail(ErrorKind::Input, "completion: a 1-permutation has a single entry");
    return DeltaExpr::constant(sr, n, names, {vals.empty() ? 1 : *vals.begin()});
  }
  // exit entries must be private to their tuple
  std::set<std::pair<int, Index>> exits, plain;
  for (auto& t : tuples) {
    for (int l = 0; l < L; ++l) (l == t.exit ? exits : plain).insert({l, t.vals[l]});
  }
  for (auto& e : exits)
    if (plain.count(e)) fail(ErrorKind::Input, "completion: an exit value reappears at its position");
  std::vector<std::map<Index, Index>> alpha(L);
  int e = 1;
  for (auto& t : tuples)
    for (int l = 0; l < L; ++l)
      if (l != t.exit && !alpha[l].count(t.vals[l])) {
        if (e > 62) fail(ErrorKind::Limit, "completion: too many relabelled values");
        alpha[l][t.vals[l]] = Index{1} << e++;
      }
  for (auto& t : tuples) {
    __int128 sum = 0;
    for (int l = 0; l < L; ++l)
      if (l != t.exit) sum += alpha[l][t.vals[l]];
    __int128 v = static_cast<__int128>(n) - sum;
    if (v < 1 || v > n) fail(ErrorKind::Limit, "completion: dimension too small for the relabelling");
    auto it = alpha[t.exit].find(t.vals[t.exit]);
    if (it != alpha[t.exit].end() && it->second != static_cast<Index>(v))
      fail(ErrorKind::Input, "completion: conflicting exit entries");
    alpha[t.exit][t.vals[t.exit]] = static_cast<Index>(v);
  }
  std::vector<BijectionPtr> al;
  for (int l = 0; l < L; ++l) {
    auto b = std::make_shared<SparseBijection>();
    for (auto& [x, y] : alpha[l]) b->define(x, y);  // throws on non-injective maps
    al.push_back(b);
  }
  return DeltaExpr::cycle(sr, n, names, 0, al);
}

// ---- disconnectedness (C_n) ----

Witness disconnect_witness(const LinComb& c0) {
  validate(c0);
  LinComb c = c0;
  c.terms = nonzero_terms(c0);
  const Sequent& s = c.sequent;
  if (!is_mdnf(s)) fail(ErrorKind::Input, "disconnect_witness: the sequent must be in MDNF");
  if (c.terms.empty()) fail(ErrorKind::NotApplicable, "disconnect_witness: no nonzero term");
  auto bl = blocks(s);
  const int M = static_cast<int>(bl.size());
  const int Lits = s.literal_count();
  auto of = block_index(bl, Lits);
  for (std::size_t t = 0; t < c.terms.size(); ++t) {
    if (has_switching_cycle(s, c.terms[t].linking))
      fail(ErrorKind::NotApplicable, "disconnect_witness: term " + std::to_string(t + 1) + " is cyclic");
    if (first_switching_connected(s, c.terms[t].linking))
      fail(ErrorKind::NotApplicable, "disconnect_witness: term " + std::to_string(t + 1) + " is connected");
  }
  // leaves carry fixed labels 1..B in block order
  std::vector<Index> leaf_label(M, 0);
  Index i = 1;
  for (int m = 0; m < M; ++m)
    if (bl[m].size() == 1) leaf_label[m] = i++;
  std::vector<std::vector<ExitTuple>> tuples(M);
  nlohmann::json runs = nlohmann::json::array();

  for (std::size_t t = 0; t < c.terms.size(); ++t) {
    const Linking& lam = c.terms[t].linking;
    // block components under this linking
    std::vector<int> comp(M);
    std::iota(comp.begin(), comp.end(), 0);
    std::function<int(int)> find = [&](int x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
    for (auto& [p, q] : lam.pairs) comp[find(of[p])] = find(of[q]);
    int root_of_1 = find(0);
    int chosen = -1;
    for (int m = 0; m < M && chosen < 0; ++m)
      if (find(m) != root_of_1) chosen = find(m);
    require(chosen >= 0, "disconnect_witness: no component avoids block 1");
    std::vector<char> inC(M, 0);
    for (int m = 0; m < M; ++m) inC[m] = find(m) == chosen;
    int root = -1;
    for (int m = 0; m < M; ++m)
      if (inC[m] && bl[m].size() == 1) root = m;
    require(root >= 0, "disconnect_witness: component without a one-literal block");

    std::vector<Index> label(Lits + 1, 0);
    for (int m = 0; m < M; ++m)
      if (leaf_label[m]) label[bl[m][0]] = leaf_label[m];
    std::vector<int> val(M, 0);
    for (int m = 0; m < M; ++m)
      if (inC[m]) val[m] = static_cast<int>(bl[m].size());
    val[root] = 0;
    std::vector<int> exit_pos(M, -1);
    Index offered = 0;
    nlohmann::json steps = nlohmann::json::array();
    while (true) {
      int m = -1;
      for (int b = 0; b < M && m < 0; ++b)
        if (inC[b] && val[b] == 1) m = b;
      if (m < 0) break;
      if (bl[m].size() == 1) {
        val[m] = 0;
        int p = lam.partner(bl[m][0]);
        int pb = of[p];
        if (bl[pb].size() == 1) {
          require(pb == root, "disconnect_witness: two non-root leaves linked");
          offered = leaf_label[m];
        } else {
          require(label[p] == 0, "disconnect_witness: literal labelled twice");
          label[p] = leaf_label[m];
          --val[pb];
        }
        steps.push_back({{"block", m + 1}, {"sends", leaf_label[m]}, {"to", p}});
        continue;
      }
      int ex = -1;
      for (std::size_t l = 0; l < bl[m].size(); ++l)
        if (label[bl[m][l]] == 0) {
          require(ex < 0, "disconnect_witness: more than one unlabelled literal at valency one");
          ex = static_cast<int>(l);
        }
      require(ex >= 0, "disconnect_witness: no exit literal");
      Index x = 0;
      for (auto& tp : tuples[m]) {
        if (tp.exit != ex) continue;
        bool same = true;
        for (std::size_t l = 0; l < bl[m].size(); ++l)
          if (static_cast<int>(l) != ex && tp.vals[l] != label[bl[m][l]]) same = false;
        if (same) x = tp.vals[ex];
      }
      if (x == 0) x = i++;
      label[bl[m][ex]] = x;
      exit_pos[m] = ex;
      int p = lam.partner(bl[m][ex]);
      int pb = of[p];
      if (bl[pb].size() == 1) {
        require(pb == root, "disconnect_witness: exit reaches a non-root leaf");
        offered = x;
      } else {
        require(label[p] == 0, "disconnect_witness: literal labelled twice");
        label[p] = x;
      }
      --val[m];
      --val[pb];
      steps.push_back({{"block", m + 1}, {"exit", bl[m][ex]}, {"value", x}, {"to", p}});
    }
    for (int m = 0; m < M; ++m) {
      if (!inC[m] || bl[m].size() == 1) continue;
      require(exit_pos[m] >= 0, "disconnect_witness: block " + std::to_string(m + 1) + " never processed");
      ExitTuple et;
      for (int o : bl[m]) et.vals.push_back(label[o]);
      et.exit = exit_pos[m];
      bool dup = false;
      for (auto& tp : tuples[m])
        if (tp.vals == et.vals) {
          require(tp.exit == et.exit, "disconnect_witness: duplicate tuple with a different exit");
          dup = true;
        }
      if (!dup) tuples[m].push_back(et);
    }
    require(offered != 0 && offered != leaf_label[root], "disconnect_witness: the root leaf is not refuted");
    runs.push_back({{"term", t + 1},
                    {"component_blocks", [&] {
                       std::vector<int> v;
                       for (int m = 0; m < M; ++m)
                         if (inC[m]) v.push_back(m + 1);
                       return v;
                     }()},
                    {"root_leaf", root + 1},
                    {"root_label", leaf_label[root]},
                    {"offered", offered},
                    {"steps", steps}});
  }
  int powers = 0;
  for (int m = 0; m < M; ++m) {
    std::set<std::pair<int, Index>> ps;
    for (auto& tp : tuples[m])
      for (std::size_t l = 0; l < tp.vals.size(); ++l)
        if (static_cast<int>(l) != tp.exit) ps.insert({static_cast<int>(l), tp.vals[l]});
    powers = std::max(powers, static_cast<int>(ps.size()));
  }
  Witness w;
  w.kind = WitnessKind::Disconnect;
  w.family = Family::C;
  w.n = completion_dimension(i, powers);
  w.comb = c;
  w.groups = bl;
  w.block = 0;
  nlohmann::json partial = nlohmann::json::array();
  for (int m = 0; m < M; ++m) {
    auto names = group_names(s, bl[m]);
    nlohmann::json pj = nlohmann::json::array();
    if (m == 0) {
      w.block_tensors.emplace_back(std::nullopt);
    } else if (bl[m].size() == 1) {
      w.block_tensors.emplace_back(DeltaExpr::constant(*c.sr, w.n, names, {leaf_label[m]}));
      pj.push_back({{"tuple", MultiIndex{leaf_label[m]}}});
    } else {
      w.block_tensors.emplace_back(complete_partial_permutation(*c.sr, names, tuples[m], w.n));
      for (auto& tp : tuples[m]) pj.push_back({{"tuple", tp.vals}, {"exit", tp.exit + 1}});
    }
    partial.push_back(pj);
  }
  w.open_names = group_names(s, bl[0]);
  w.violation = "zero tensor over block 1, while F(C_n) values are constant deltas";
  w.log = {{"next_label", i}, {"partial_permutations", partial}, {"runs", runs}};
  finish(w);
  return w;
}

// ---- uniqueness (A_n) ----

Witness uniqueness_witness(const LinComb& c0) {
  validate(c0);
  LinComb c = c0;
  c.terms = nonzero_terms(c0);
  const Sequent& s = c.sequent;
  if (!is_mdnf(s)) fail(ErrorKind::Input, "uniqueness_witness: the sequent must be in MDNF");
  if (c.terms.size() < 2) fail(ErrorKind::NotApplicable, "uniqueness_witness: needs two nonzero terms");
  auto bl = blocks(s);
  const int M = static_cast<int>(bl.size());
  const int Lits = s.literal_count();
  auto of = block_index(bl, Lits);
  int leaf = -1;
  for (int m = 0; m < M; ++m)
    if (bl[m].size() == 1) leaf = m;
  if (leaf < 0) fail(ErrorKind::Unsupported, "uniqueness_witness: no one-literal block to leave open");
  std::vector<std::vector<MultiIndex>> tuples(M);
  Index i = 0;
  std::vector<Index> offered;
  nlohmann::json runs = nlohmann::json::array();
  for (int pass = 0; pass < 2; ++pass) {
    const Linking& lam = c.terms[pass].linking;
    std::vector<Index> label(Lits + 1, 0);
    std::vector<int> val(M);
    for (int m = 0; m < M; ++m) val[m] = static_cast<int>(bl[m].size());
    val[leaf] = 0;
    nlohmann::json steps = nlohmann::json::array();
    while (true) {
      int m = -1;
      for (int b = 0; b < M && m < 0; ++b)
        if (val[b] == 1) m = b;
      if (m < 0) break;
      int ex = -1;
      for (std::size_t l = 0; l < bl[m].size(); ++l)
        if (label[bl[m][l]] == 0) ex = static_cast<int>(l);
      require(ex >= 0, "uniqueness_witness: no unlabelled literal");
      Index x = 0;
      for (auto& tp : tuples[m]) {
        bool same = true;
        for (std::size_t l = 0; l < bl[m].size(); ++l)
          if (static_cast<int>(l) != ex && tp[l] != label[bl[m][l]]) same = false;
        if (same) {
          x = tp[ex];
          break;
        }
      }
      if (x == 0) x = ++i;
      label[bl[m][ex]] = x;
      int p = lam.partner(bl[m][ex]);
      require(label[p] == 0, "uniqueness_witness: literal labelled twice (not a net?)");
      label[p] = x;
      --val[m];
      --val[of[p]];
      steps.push_back({{"block", m + 1}, {"exit", bl[m][ex]}, {"value", x}, {"to", p}});
    }
    for (int m = 0; m < M; ++m) {
      MultiIndex tp;
      for (int o : bl[m]) {
        require(label[o] != 0, "uniqueness_witness: literal left unlabelled (not a net?)");
        tp.push_back(label[o]);
      }
      if (std::find(tuples[m].begin(), tuples[m].end(), tp) == tuples[m].end()) tuples[m].push_back(tp);
    }
    offered.push_back(label[bl[leaf][0]]);
    runs.push_back({{"term", pass + 1}, {"offered", label[bl[leaf][0]]}, {"steps", steps}});
  }
  Witness w;
  w.kind = WitnessKind::Uniqueness;
  w.family = Family::A;
  w.n = std::max<Index>(i, 1);
  w.comb = c;
  w.groups = bl;
  w.block = leaf;
  nlohmann::json tj = nlohmann::json::array();
  for (int m = 0; m < M; ++m) {
    tj.push_back(tuples_json(tuples[m]));
    if (m == leaf)
      w.block_tensors.emplace_back(std::nullopt);
    else
      w.block_tensors.emplace_back(constant_sum(*c.sr, w.n, group_names(s, bl[m]), tuples[m]));
  }
  w.open_names = group_names(s, bl[leaf]);
  w.probes = {{offered[0]}, {offered[1]}};
  w.violation = "two nonzero entries on the open leaf where F(A_n) allows at most one";
  w.log = {{"leaf", leaf + 1}, {"tuples", tj}, {"runs", runs}};
  finish(w);
  return w;
}

// ---- Mix: uniqueness (S_n) ----

Normalized mix_all(const LinComb& c) {
  Normalized out{c, {}};
  while (true) {
    std::vector<int> at;
    std::function<bool(const Formula&, std::vector<int>&)> find = [&](const Formula& f, std::vector<int>& path) {
      if (f.kind == Formula::Kind::Tensor) return true;
      for (int k = 0; k < static_cast<int>(f.kids.size()); ++k) {
        path.push_back(k);
        if (find(f.kids[k], path)) return true;
        path.pop_back();
      }
      return false;
    };
    bool found = false;
    for (int fi = 0; fi < static_cast<int>(out.comb.sequent.formulas.size()) && !found; ++fi) {
      at = {fi};
      found = find(out.comb.sequent.formulas[fi], at);
    }
    if (!found) break;
    TraceEntry e{RewriteStep{Rule::mix, at}, {}};
    out.comb = apply_step(out.comb, e.step, &e.occ_map);
    out.trace.push_back(std::move(e));
  }
  return out;
}

std::optional<Witness> mix_uniqueness_witness(const LinComb& c0, RewriteTrace* trace) {
  validate(c0);
  const Semiring& sr = *c0.sr;
  if (!is_zero_sum_free(sr))
    fail(ErrorKind::OutsideTheory, "mix uniqueness: semiring '" + sr.name +
                                       "' is not zero-sum-free, where the glued model is not known to be complete");
  LinComb c = c0;
  c.terms = nonzero_terms(c0);
  if (c.terms.empty()) fail(ErrorKind::NotApplicable, "mix uniqueness: no nonzero term");
  if (c.terms.size() == 1 && c.terms[0].coeff == sr.one) return std::nullopt;
  Normalized nm = normalize_mdnf(c);
  Normalized mx = mix_all(nm.comb);
  RewriteTrace tr = nm.trace;
  tr.insert(tr.end(), mx.trace.begin(), mx.trace.end());
  if (trace) *trace = tr;
  const LinComb& p = mx.comb;
  std::vector<std::pair<int, int>> pairs = p.terms[0].linking.pairs;
  const int M = static_cast<int>(pairs.size());
  const Index n = std::max(M, 1);
  std::vector<std::vector<int>> groups;
  for (auto& [a, b] : pairs) groups.push_back({a, b});
  auto names_of = [&](int m) { return group_names(p.sequent, groups[m]); };
  auto attempt = [&](int k, const std::vector<Index>& x) -> std::optional<Witness> {
    Witness w;
    w.kind = WitnessKind::MixUniqueness;
    w.family = Family::S;
    w.n = n;
    w.comb = p;
    w.groups = groups;
    w.block = k;
    w.xvec = x;
    for (int m = 0; m < M; ++m) {
      if (m == k) {
        w.block_tensors.emplace_back(std::nullopt);
        continue;
      }
      auto nm2 = names_of(m);
      w.block_tensors.emplace_back(outer(DeltaExpr::constant(sr, n, {nm2[0]}, {x[m]}), ones(sr, n, nm2[1])));
    }
    w.open_names = names_of(k);
    DeltaExpr r = contract_all(w);
    if (is_full_permutation(r.densify())) return std::nullopt;
    w.contraction = r;
    w.violation = "contraction over pair " + std::to_string(k + 1) + " is not in Perm(2," + std::to_string(n) + ")";
    w.log = {{"pairs", pairs}};
    verify(w);
    return w;
  };
  // the constants x_m = m first, then the rest in lexicographic order
  std::vector<Index> ident(M);
  for (int m = 0; m < M; ++m) ident[m] = m + 1;
  for (int k = 0; k < M; ++k) {
    auto x = ident;
    x[k] = 0;
    if (auto w = attempt(k, x)) return w;
  }
  std::uint64_t budget = 200000;
  for (int k = 0; k < M; ++k) {
    std::vector<Index> x(M, 1);
    x[k] = 0;
    while (true) {
      if (budget-- == 0) fail(ErrorKind::Limit, "mix uniqueness: search budget exhausted");
      if (auto w = attempt(k, x)) return w;
      int pos = 0;
      for (; pos < M; ++pos) {
        if (pos == k) continue;
        if (x[pos] < n) {
          ++x[pos];
          break;
        }
        x[pos] = 1;
      }
      if (pos == M) break;
    }
  }
  fail(ErrorKind::Internal, "mix uniqueness: no violation found for a non-simple combination");
}

// ---- Mix: cycles (D) ----

Witness mix_cycle_witness(const MixNormalized& mn) {
  const LinComb& c = mn.comb;
  validate(c);
  int g = 0, d = 0;
  if (!is_mix_normal_shape(c.sequent, &g, &d) || d < 1)
    fail(ErrorKind::Input, "mix_cycle_witness: expected the shape Gamma par Delta with Delta nonempty");
  if (c.terms.size() != 1) fail(ErrorKind::Input, "mix_cycle_witness: single term expected");
  const Semiring& sr = *c.sr;
  auto bl = blocks(c.sequent);
  Witness w;
  w.kind = WitnessKind::MixCycle;
  w.family = Family::D;
  w.n = 2;
  w.comb = c;
  w.groups = bl;
  w.block = g;  // first two-literal block
  for (int m = 0; m < static_cast<int>(bl.size()); ++m) {
    auto names = group_names(c.sequent, bl[m]);
    if (m == g)
      w.block_tensors.emplace_back(std::nullopt);
    else if (bl[m].size() == 1)
      w.block_tensors.emplace_back(DeltaExpr::constant(sr, 2, names, {1}));
    else
      w.block_tensors.emplace_back(DeltaExpr::link(sr, 2, names[0], names[1]));
  }
  w.open_names = group_names(c.sequent, bl[g]);
  w.violation = "contraction differs from d^{11}, the only value of D tensor D";
  w.log = {{"gamma", g}, {"delta", d}, {"cycle", mn.cycle.links()}};
  finish(w);
  return w;
}

// ---- the Par_M equations ----

std::vector<std::vector<int>> par_permutations(int M) {
  std::vector<int> p(M);
  std::iota(p.begin(), p.end(), 1);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::vector<ParEquation> par_equations(const Semiring& sr, int M, const std::vector<Index>& y) {
  if (static_cast<int>(y.size()) != M) fail(ErrorKind::Input, "par_equations: one y per pair");
  auto perms = par_permutations(M);
  std::vector<ParEquation> out;
  for (int k = 1; k <= M; ++k)
    for (Index v = 1; v <= M; ++v) {
      ParEquation e;
      e.k = k;
      e.v = v;
      for (std::size_t p = 0; p < perms.size(); ++p)
        if (perms[p][k - 1] == v) e.perms.push_back(static_cast<int>(p));
      e.rhs = v == y[k - 1] ? sr.one : sr.zero;
      out.push_back(e);
    }
  return out;
}

int first_violated(const Semiring& sr, const std::vector<ParEquation>& eqs, const std::vector<Scalar>& coeffs) {
  for (std::size_t e = 0; e < eqs.size(); ++e) {
    Scalar lhs = sr.zero;
    for (int p : eqs[e].perms) lhs = sr.add(lhs, coeffs.at(p));
    if (lhs != eqs[e].rhs) return static_cast<int>(e);
  }
  return -1;
}

// ---- the zero-sum counterexample ----

ZeroSumReport zero_sum_counterexample(const Semiring& sr, const Scalar& s) {
  if (!sr.contains(s)) fail(ErrorKind::Input, "counterexample: s is not an element of " + sr.name);
  if (sr.is_zero(s)) fail(ErrorKind::NotApplicable, "counterexample: s must be nonzero");
  auto inv = sr.additive_inverse(s);
  if (!inv) fail(ErrorKind::NotApplicable, "counterexample: " + format_scalar(s) + " has no additive inverse in " + sr.name);
  Sequent seq = parse_sequent("a|~a|a|~a|a|~a");
  // identity, the two 3-cycles, the three transpositions
  const std::vector<std::vector<int>> perms = {{1, 2, 3}, {2, 3, 1}, {3, 1, 2}, {1, 3, 2}, {2, 1, 3}, {3, 2, 1}};
  std::vector<Scalar> coeffs = {sr.add(sr.one, s), s, s, *inv, *inv, *inv};
  std::vector<LinTerm> terms;
  for (std::size_t p = 0; p < perms.size(); ++p) {
    Linking l;
    for (int a = 0; a < 3; ++a) l.pairs.emplace_back(2 * a + 1, 2 * perms[p][a]);
    l.normalize();
    terms.push_back(LinTerm{coeffs[p], l});
  }
  ZeroSumReport rep;
  rep.comb = make_lincomb(sr, seq, terms);
  bool ok = true;
  nlohmann::json log;
  nlohmann::json cj = nlohmann::json::array();
  for (std::size_t p = 0; p < perms.size(); ++p) cj.push_back({{"permutation", perms[p]}, {"coeff", format_scalar(coeffs[p])}});
  log["coefficients"] = cj;
  Scalar sum = sr.zero;
  for (auto& c : coeffs) sum = sr.add(sum, c);
  log["coefficient_sum"] = format_scalar(sum);
  ok &= sum == sr.one;

  // the nine equations with y_k = k, coefficients listed in lexicographic permutation order
  auto lex = par_permutations(3);
  std::vector<Scalar> by_lex(lex.size(), sr.zero);
  for (std::size_t p = 0; p < perms.size(); ++p)
    by_lex[std::find(lex.begin(), lex.end(), perms[p]) - lex.begin()] = coeffs[p];
  auto eqs = par_equations(sr, 3, {1, 2, 3});
  nlohmann::json ej = nlohmann::json::array();
  for (auto& e : eqs) {
    Scalar lhs = sr.zero;
    for (int p : e.perms) lhs = sr.add(lhs, by_lex[p]);
    ej.push_back({{"k", e.k}, {"v", e.v}, {"lhs", format_scalar(lhs)}, {"rhs", format_scalar(e.rhs)}, {"holds", lhs == e.rhs}});
    ok &= lhs == e.rhs;
  }
  log["equations"] = ej;

  DeltaExpr tau = to_tensor(rep.comb, 3);
  nlohmann::json entries = nlohmann::json::object();
  for (auto& p : lex) {
    MultiIndex at = {1, p[0], 2, p[1], 3, p[2]};
    entries[std::to_string(p[0]) + std::to_string(p[1]) + std::to_string(p[2])] = format_scalar(tau.eval(at));
  }
  log["entries_at_i123"] = entries;

  MdnfShape pairs = MdnfShape::pairs(seq, {{1, 2}, {3, 4}, {5, 6}});
  nlohmann::json sj = nlohmann::json::array();
  for (Index n = 1; n <= 3; ++n) {
    Membership mem = mdnf_value_membership(to_tensor(rep.comb, n).densify(), pairs, Family::S, n);
    sj.push_back({{"n", n}, {"member", mem.member}});
    if (!mem.member) sj.back()["certificate"] = mem.certificate;
    ok &= mem.member;
  }
  log["S_membership"] = sj;
  Membership dm = mdnf_value_membership(to_tensor(rep.comb, 2).densify(), MdnfShape::from_sequent(seq), Family::D, 2);
  log["D_membership"] = {{"member", dm.member}};
  if (!dm.member) log["D_membership"]["certificate"] = dm.certificate;
  ok &= dm.member;
  rep.verified = ok;
  rep.log = log;
  return rep;
}

}  // namespace mllg
