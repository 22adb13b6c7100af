#include "mllg/rewrite.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "mllg/error.hpp"

namespace mllg {

using Kind = Formula::Kind;

std::string rule_name(Rule r) {
  switch (r) {
    case Rule::wLL: return "wLL";
    case Rule::wLR: return "wLR";
    case Rule::wRL: return "wRL";
    case Rule::wRR: return "wRR";
    case Rule::assocL: return "assocL";
    case Rule::assocR: return "assocR";
    case Rule::sym: return "sym";
    case Rule::mix: return "mix";
    case Rule::join: return "join";
  }
  return "?";
}

Rule parse_rule(const std::string& name) {
  for (Rule r : {Rule::wLL, Rule::wLR, Rule::wRL, Rule::wRR, Rule::assocL, Rule::assocR, Rule::sym, Rule::mix, Rule::join})
    if (rule_name(r) == name) return r;
  fail(ErrorKind::Input, "unknown rewrite rule '" + name + "'");
}

namespace {

void tag_leaves(Formula& f, int& next) {
  if (f.is_lit()) {
    f.tag = next++;
    return;
  }
  tag_leaves(f.kids[0], next);
  tag_leaves(f.kids[1], next);
}

void read_tags(const Formula& f, std::vector<int>& out) {
  if (f.is_lit()) {
    out.push_back(f.tag);
    return;
  }
  read_tags(f.kids[0], out);
  read_tags(f.kids[1], out);
}

void tag_sequent(Sequent& s) {
  int next = 1;
  for (auto& f : s.formulas) tag_leaves(f, next);
}

std::vector<int> tag_order(const Sequent& s) {
  std::vector<int> out;
  for (auto& f : s.formulas) read_tags(f, out);
  return out;
}

bool has_kind(const Formula& f, Kind k) { return !f.is_lit() && f.kind == k; }

const char* pattern_error(Rule r) {
  switch (r) {
    case Rule::wLL:
    case Rule::wLR: return "needs X*(Y|Z)";
    case Rule::wRL:
    case Rule::wRR: return "needs (X|Y)*Z";
    case Rule::assocL: return "needs A o (B o C) with one connective";
    case Rule::assocR: return "needs (A o B) o C with one connective";
    case Rule::sym: return "needs a connective";
    case Rule::mix: return "needs X*Y";
    case Rule::join: return "needs a formula followed by another";
  }
  return "";
}

bool local_match(const Formula& f, Rule r) {
  switch (r) {
    case Rule::wLL:
    case Rule::wLR: return f.kind == Kind::Tensor && has_kind(f.kids[1], Kind::Par);
    case Rule::wRL:
    case Rule::wRR: return f.kind == Kind::Tensor && has_kind(f.kids[0], Kind::Par);
    case Rule::assocL: return !f.is_lit() && has_kind(f.kids[1], f.kind);
    case Rule::assocR: return !f.is_lit() && has_kind(f.kids[0], f.kind);
    case Rule::sym: return !f.is_lit();
    case Rule::mix: return f.kind == Kind::Tensor;
    case Rule::join: return false;
  }
  return false;
}

void rewrite_at(Formula& f, Rule r) {
  auto take = [](Formula& x) { return std::move(x); };
  switch (r) {
    case Rule::wLL: {  // X*(Y|Z) -> (X*Y)|Z
      Formula X = take(f.kids[0]), Y = take(f.kids[1].kids[0]), Z = take(f.kids[1].kids[1]);
      f = Formula::par(Formula::tensor(std::move(X), std::move(Y)), std::move(Z));
      break;
    }
    case Rule::wLR: {  // X*(Y|Z) -> (X*Z)|Y
      Formula X = take(f.kids[0]), Y = take(f.kids[1].kids[0]), Z = take(f.kids[1].kids[1]);
      f = Formula::par(Formula::tensor(std::move(X), std::move(Z)), std::move(Y));
      break;
    }
    case Rule::wRL: {  // (X|Y)*Z -> Y|(X*Z)
      Formula X = take(f.kids[0].kids[0]), Y = take(f.kids[0].kids[1]), Z = take(f.kids[1]);
      f = Formula::par(std::move(Y), Formula::tensor(std::move(X), std::move(Z)));
      break;
    }
    case Rule::wRR: {  // (X|Y)*Z -> X|(Y*Z)
      Formula X = take(f.kids[0].kids[0]), Y = take(f.kids[0].kids[1]), Z = take(f.kids[1]);
      f = Formula::par(std::move(X), Formula::tensor(std::move(Y), std::move(Z)));
      break;
    }
    case Rule::assocL: {
      Kind k = f.kind;
      Formula A = take(f.kids[0]), B = take(f.kids[1].kids[0]), C = take(f.kids[1].kids[1]);
      Formula inner = k == Kind::Tensor ? Formula::tensor(std::move(A), std::move(B)) : Formula::par(std::move(A), std::move(B));
      f = k == Kind::Tensor ? Formula::tensor(std::move(inner), std::move(C)) : Formula::par(std::move(inner), std::move(C));
      break;
    }
    case Rule::assocR: {
      Kind k = f.kind;
      Formula A = take(f.kids[0].kids[0]), B = take(f.kids[0].kids[1]), C = take(f.kids[1]);
      Formula inner = k == Kind::Tensor ? Formula::tensor(std::move(B), std::move(C)) : Formula::par(std::move(B), std::move(C));
      f = k == Kind::Tensor ? Formula::tensor(std::move(A), std::move(inner)) : Formula::par(std::move(A), std::move(inner));
      break;
    }
    case Rule::sym:
      std::swap(f.kids[0], f.kids[1]);
      break;
    case Rule::mix:
      f.kind = Kind::Par;
      break;
    case Rule::join:
      break;
  }
}

std::string path_str(const std::vector<int>& p) {
  std::string s = "[";
  for (std::size_t k = 0; k < p.size(); ++k) s += (k ? "," : "") + std::to_string(p[k]);
  return s + "]";
}

}  // namespace

bool matches(const Sequent& s, const RewriteStep& step) {
  if (step.rule == Rule::join)
    return step.path.size() == 1 && step.path[0] >= 0 && step.path[0] + 1 < static_cast<int>(s.formulas.size());
  try {
    return local_match(subformula(s, step.path), step.rule);
  } catch (const Error&) {
    return false;
  }
}

Sequent apply_step(const Sequent& s, const RewriteStep& step, std::vector<int>* occ_map) {
  if (!matches(s, step))
    fail(ErrorKind::Input, "rule " + rule_name(step.rule) + " does not apply at " + path_str(step.path) + ": " +
                               pattern_error(step.rule));
  Sequent out = s;
  tag_sequent(out);
  if (step.rule == Rule::join) {
    int k = step.path[0];
    Formula j = Formula::par(std::move(out.formulas[k]), std::move(out.formulas[k + 1]));
    out.formulas.erase(out.formulas.begin() + k + 1);
    out.formulas[k] = std::move(j);
  } else {
    rewrite_at(subformula(out, step.path), step.rule);
  }
  if (occ_map) {
    auto order = tag_order(out);
    occ_map->assign(order.size() + 1, 0);
    for (std::size_t k = 0; k < order.size(); ++k) (*occ_map)[order[k]] = static_cast<int>(k) + 1;
  }
  return out;
}

Linking transport(const Linking& l, const std::vector<int>& m) {
  Linking out;
  for (auto [p, q] : l.pairs) out.pairs.emplace_back(m.at(p), m.at(q));
  out.normalize();
  return out;
}

LinComb apply_step(const LinComb& c, const RewriteStep& step, std::vector<int>* occ_map) {
  std::vector<int> m;
  LinComb out{c.sr, apply_step(c.sequent, step, &m), {}};
  for (auto& t : c.terms) out.terms.push_back(LinTerm{t.coeff, transport(t.linking, m)});
  if (occ_map) *occ_map = std::move(m);
  return out;
}

std::vector<int> compose(const RewriteTrace& trace, int literals) {
  std::vector<int> m(literals + 1);
  for (int k = 0; k <= literals; ++k) m[k] = k;
  for (auto& e : trace)
    for (int k = 1; k <= literals; ++k) m[k] = e.occ_map.at(m[k]);
  return m;
}

LinComb replay(const LinComb& c, const RewriteTrace& trace) {
  LinComb cur = c;
  for (auto& e : trace) {
    std::vector<int> m;
    cur = apply_step(cur, e.step, &m);
    if (m != e.occ_map) fail(ErrorKind::Internal, "replay: occurrence map differs at " + rule_name(e.step.rule));
  }
  return cur;
}

namespace {

std::vector<std::pair<int, int>> move_steps(std::vector<std::pair<int, int>> steps, const RewriteTrace& trace) {
  for (auto& e : trace)
    for (auto& [a, b] : steps) {
      a = e.occ_map.at(a);
      b = e.occ_map.at(b);
    }
  return steps;
}

struct Driver {
  LinComb cur;
  RewriteTrace trace;

  void step(Rule r, std::vector<int> path) {
    RewriteStep st{r, std::move(path)};
    std::vector<int> m;
    cur = apply_step(cur, st, &m);
    trace.push_back(TraceEntry{st, std::move(m)});
  }
};

// pre-order search over every formula
bool find_node(const Sequent& s, const std::function<bool(const Formula&, const std::vector<int>&)>& pred,
               std::vector<int>& found) {
  std::vector<int> path;
  std::function<bool(const Formula&)> go = [&](const Formula& f) {
    if (pred(f, path)) {
      found = path;
      return true;
    }
    if (f.is_lit()) return false;
    for (int k = 0; k < 2; ++k) {
      path.push_back(k);
      if (go(f.kids[k])) return true;
      path.pop_back();
    }
    return false;
  };
  for (std::size_t k = 0; k < s.formulas.size(); ++k) {
    path.assign(1, static_cast<int>(k));
    if (go(s.formulas[k])) return true;
  }
  return false;
}

}  // namespace

std::optional<SwitchingCycle> transport_cycle(const SwitchingCycle& cyc, const RewriteTrace& trace, const LinComb& after,
                                              std::size_t term) {
  SwitchingCycle out;
  out.steps = move_steps(cyc.steps, trace);
  StructureGraph g = build_structure(after.sequent, after.terms.at(term).linking);
  auto r = route_cycle(g, out.steps);
  if (!r) return std::nullopt;
  out.vertices = *r;
  return out;
}

Normalized normalize_mdnf(const LinComb& c) {
  validate(c);
  Driver d{c, {}};
  const int bound = c.sequent.count(Kind::Tensor) * c.sequent.count(Kind::Par) + 1;
  for (int guard = 0;; ++guard) {
    require(guard <= bound, "normalize_mdnf: step bound exceeded");
    std::vector<int> at;
    if (find_node(d.cur.sequent, [](const Formula& f, const std::vector<int>&) { return local_match(f, Rule::wLL); }, at)) {
      d.step(Rule::wLL, at);
      continue;
    }
    if (find_node(d.cur.sequent, [](const Formula& f, const std::vector<int>&) { return local_match(f, Rule::wRR); }, at)) {
      d.step(Rule::wRR, at);
      continue;
    }
    break;
  }
  require(is_mdnf(d.cur.sequent), "normalize_mdnf: result not in MDNF");
  return Normalized{std::move(d.cur), std::move(d.trace)};
}

CycleNormalized normalize_preserving_cycle(const LinComb& c, std::size_t term, const SwitchingCycle& cycle) {
  validate(c);
  if (term >= c.terms.size()) fail(ErrorKind::Input, "normalize_preserving_cycle: no such term");
  {
    StructureGraph g = build_structure(c.sequent, c.terms[term].linking);
    if (!route_cycle(g, cycle.steps)) fail(ErrorKind::Input, "normalize_preserving_cycle: not a switching cycle of the term");
  }
  Driver d{c, {}};
  SwitchingCycle cur = cycle;
  const int bound = (c.sequent.count(Kind::Tensor) + 1) * (c.sequent.count(Kind::Par) + 1) * 4;
  for (int guard = 0;; ++guard) {
    require(guard <= bound, "normalize_preserving_cycle: step bound exceeded");
    StructureGraph g = build_structure(d.cur.sequent, d.cur.terms[term].linking);
    auto r = route_cycle(g, cur.steps);
    require(r.has_value(), "normalize_preserving_cycle: cycle lost");
    cur.vertices = *r;
    if (par_vertices(g, cur) == 0) break;
    std::vector<char> on(g.size(), 0);
    for (int x : cur.vertices) on[x] = 1;
    // node ids by path, for the ⊗ / ℘ test
    std::map<std::vector<int>, int> id_of;
    for (int x = 0; x < g.size(); ++x)
      if (!g.joiner[x]) id_of[g.path[x]] = x;
    std::vector<int> at;
    Rule rule = Rule::wLL;
    bool found = find_node(d.cur.sequent, [&](const Formula& f, const std::vector<int>& p) {
      if (f.kind != Kind::Tensor || !on[id_of.at(p)]) return false;
      for (int side : {1, 0}) {
        if (!has_kind(f.kids[side], Kind::Par)) continue;
        std::vector<int> pp = p;
        pp.push_back(side);
        if (!on[id_of.at(pp)]) continue;
        pp.push_back(0);
        bool first_on = on[id_of.at(pp)];
        if (side == 1)
          rule = first_on ? Rule::wLL : Rule::wLR;
        else
          rule = first_on ? Rule::wRL : Rule::wRR;
        return true;
      }
      return false;
    }, at);
    require(found, "normalize_preserving_cycle: par on cycle without a tensor parent on the cycle");
    std::size_t before = d.trace.size();
    d.step(rule, at);
    cur.steps = move_steps(cur.steps, RewriteTrace(d.trace.begin() + before, d.trace.end()));
  }
  return CycleNormalized{std::move(d.cur), std::move(cur), std::move(d.trace)};
}

// ---- mix normal form ----

namespace {

std::vector<int> leaf_path(const Sequent& s, int occ) { return s.occurrences().at(occ - 1).path; }

// Path of the maximal subtree containing `p` whose connectives are all `k`.
std::vector<int> maximal_root(const Sequent& s, std::vector<int> p, Kind k) {
  while (p.size() > 1) {
    std::vector<int> up(p.begin(), p.end() - 1);
    if (subformula(s, up).kind != k) break;
    p = up;
  }
  return p;
}

// Items of a maximal `k`-tree rooted at p, as first-leaf occurrences, left to right.
void items_of(const Sequent& s, const std::vector<int>& p, Kind k, std::vector<std::vector<int>>& out) {
  const Formula& f = subformula(s, p);
  if (f.is_lit() || f.kind != k) {
    out.push_back(p);
    return;
  }
  for (int c = 0; c < 2; ++c) {
    auto q = p;
    q.push_back(c);
    items_of(s, q, k, out);
  }
}

int first_leaf(const Sequent& s, const std::vector<int>& p) {
  for (auto& o : s.occurrences()) {
    if (o.path.size() >= p.size() && std::equal(p.begin(), p.end(), o.path.begin())) return o.index;
  }
  return 0;
}

// Turn the k-tree at p into a left comb and put its items into the order
// given by `rank` (keyed by the tag of the item's first leaf).
void comb_and_sort(Driver& d, const std::vector<int>& root, Kind k, const std::function<long(int)>& rank_of_tag) {
  // left comb
  std::vector<int> p = root;
  while (true) {
    const Formula& f = subformula(d.cur.sequent, p);
    if (f.is_lit() || f.kind != k) break;
    while (has_kind(subformula(d.cur.sequent, p).kids[1], k)) d.step(Rule::assocL, p);
    p.push_back(0);
  }
  auto node_of = [&](int j, int count) {  // N_j, 2 <= j <= count
    std::vector<int> q = root;
    for (int t = 0; t < count - j; ++t) q.push_back(0);
    return q;
  };
  auto ranks = [&]() {
    std::vector<std::vector<int>> its;
    items_of(d.cur.sequent, root, k, its);
    Sequent tagged = d.cur.sequent;
    tag_sequent(tagged);
    std::vector<long> r;
    for (auto& ip : its) r.push_back(rank_of_tag(first_leaf(tagged, ip)));
    return r;
  };
  std::vector<long> r = ranks();
  const int count = static_cast<int>(r.size());
  // bubble sort by adjacent swaps
  for (bool swapped = true; swapped;) {
    swapped = false;
    for (int j = 1; j < count; ++j) {  // items j and j+1 (1-based)
      if (r[j - 1] <= r[j]) continue;
      if (j == 1) {
        d.step(Rule::sym, node_of(2, count));
      } else {
        auto n = node_of(j + 1, count);
        d.step(Rule::assocR, n);
        auto rc = n;
        rc.push_back(1);
        d.step(Rule::sym, rc);
        d.step(Rule::assocL, n);
      }
      std::swap(r[j - 1], r[j]);
      swapped = true;
    }
  }
}

}  // namespace

CycleNormalized normalize_mdnf_keeping_cycle(const LinComb& c, std::size_t term, const SwitchingCycle& cycle) {
  CycleNormalized out = normalize_preserving_cycle(c, term, cycle);
  const int bound = (c.sequent.count(Kind::Tensor) + 1) * (c.sequent.count(Kind::Par) + 1) * 4;
  for (int guard = 0; !is_mdnf(out.comb.sequent); ++guard) {
    require(guard <= bound, "normalize_mdnf_keeping_cycle: step bound exceeded");
    // one step of the plain search; the cycle has no ℘ vertex here, so it
    // survives any distributivity step and the next pass clears it again
    std::vector<int> at;
    Rule r = Rule::wLL;
    if (!find_node(out.comb.sequent, [](const Formula& f, const std::vector<int>&) { return local_match(f, Rule::wLL); }, at)) {
      r = Rule::wRR;
      require(find_node(out.comb.sequent, [](const Formula& f, const std::vector<int>&) { return local_match(f, Rule::wRR); }, at),
              "normalize_mdnf_keeping_cycle: no redex outside MDNF");
    }
    Driver d{out.comb, {}};
    d.step(r, at);
    auto moved = transport_cycle(out.cycle, d.trace, d.cur, term);
    require(moved.has_value(), "normalize_mdnf_keeping_cycle: a step broke the cycle");
    CycleNormalized next = normalize_preserving_cycle(d.cur, term, *moved);
    out.trace.insert(out.trace.end(), d.trace.begin(), d.trace.end());
    out.trace.insert(out.trace.end(), next.trace.begin(), next.trace.end());
    out.comb = std::move(next.comb);
    out.cycle = std::move(next.cycle);
  }
  return out;
}

MixNormalized mix_normal_form(const LinComb& c) {
  validate(c);
  if (!is_mdnf(c.sequent)) fail(ErrorKind::Input, "mix_normal_form: input is not in MDNF");
  if (c.terms.size() != 1) fail(ErrorKind::Input, "mix_normal_form: needs exactly one term");
  Driver d{c, {}};
  while (d.cur.sequent.formulas.size() > 1) d.step(Rule::join, {0});

  auto cyc0 = find_minimal_cycle(d.cur.sequent, d.cur.terms[0].linking);
  if (!cyc0) fail(ErrorKind::Input, "mix_normal_form: the term is acyclic");
  // cycle literals, tracked through later steps by their original occurrence
  std::vector<std::pair<int, int>> steps0 = cyc0->steps;
  const std::size_t trace_mark = d.trace.size();
  auto now = [&](int occ_at_mark) {
    int o = occ_at_mark;
    for (std::size_t k = trace_mark; k < d.trace.size(); ++k) o = d.trace[k].occ_map.at(o);
    return o;
  };

  // pairs of cycle literals per block, in the block order at the mark
  auto bs = blocks(d.cur.sequent);
  std::vector<int> block_of(d.cur.sequent.literal_count() + 1, -1);
  for (std::size_t b = 0; b < bs.size(); ++b)
    for (int o : bs[b]) block_of[o] = static_cast<int>(b);
  std::vector<std::vector<int>> cyc_lits(bs.size());
  for (auto [a, b] : steps0) {
    cyc_lits[block_of[a]].push_back(a);
    cyc_lits[block_of[b]].push_back(b);
  }
  for (auto& v : cyc_lits) {
    std::sort(v.begin(), v.end());
    require(v.empty() || v.size() == 2, "mix_normal_form: minimal cycle visits a block twice");
  }

  std::set<std::pair<int, int>> keep_pairs;  // mark-time occurrences (u, v)
  for (std::size_t b = 0; b < bs.size(); ++b) {
    if (cyc_lits[b].empty() || bs[b].size() < 2) continue;
    int u = cyc_lits[b][0], v = cyc_lits[b][1];
    keep_pairs.insert({u, v});
    if (bs[b].size() == 2) continue;
    auto root = maximal_root(d.cur.sequent, leaf_path(d.cur.sequent, now(u)), Kind::Tensor);
    // rank: u, v first; others keep their current order
    comb_and_sort(d, root, Kind::Tensor, [&](int tag) -> long {
      if (tag == now(u)) return -2;
      if (tag == now(v)) return -1;
      return tag;
    });
  }
  // mix every ⊗ except the kept pairs
  auto kept = [&](const Formula& f) {
    if (f.kind != Kind::Tensor || !f.kids[0].is_lit() || !f.kids[1].is_lit()) return false;
    return true;
  };
  while (true) {
    Sequent tagged = d.cur.sequent;
    tag_sequent(tagged);
    std::set<std::pair<int, int>> live;
    for (auto [u, v] : keep_pairs) live.insert({now(u), now(v)});
    std::vector<int> at;
    bool found = find_node(tagged, [&](const Formula& f, const std::vector<int>&) {
      if (f.kind != Kind::Tensor) return false;
      if (kept(f)) {
        int a = f.kids[0].tag, b = f.kids[1].tag;
        if (live.count({std::min(a, b), std::max(a, b)})) return false;
      }
      return true;
    }, at);
    if (!found) break;
    d.step(Rule::mix, at);
  }
  // Γ literals first, then Δ pairs, each in current left-to-right order
  if (d.cur.sequent.formulas[0].kind == Kind::Par) {
    Sequent tagged = d.cur.sequent;
    tag_sequent(tagged);
    std::vector<std::vector<int>> its;
    items_of(tagged, {0}, Kind::Par, its);
    std::map<int, long> rank;
    for (auto& ip : its) {
      int t = first_leaf(tagged, ip);
      bool pair = !subformula(tagged, ip).is_lit();
      rank[t] = (pair ? 1000000L : 0L) + t;
    }
    comb_and_sort(d, {0}, Kind::Par, [&](int tag) { return rank.at(tag); });
  }

  MixNormalized out;
  out.comb = d.cur;
  out.trace = d.trace;
  require(is_mix_normal_shape(out.comb.sequent, &out.gamma, &out.delta), "mix_normal_form: output shape");
  auto moved = transport_cycle(*cyc0, RewriteTrace(d.trace.begin() + trace_mark, d.trace.end()), out.comb, 0);
  require(moved.has_value(), "mix_normal_form: cycle lost");
  out.cycle = *moved;
  require(static_cast<int>(out.cycle.steps.size()) == out.delta, "mix_normal_form: cycle does not pass through every pair");
  require(out.cycle.key().front() == out.gamma + 1, "mix_normal_form: cycle touches a one-literal item");
  return out;
}

bool is_mix_normal_shape(const Sequent& s, int* gamma, int* delta) {
  if (s.formulas.size() != 1) return false;
  std::vector<const Formula*> items;
  const Formula* f = &s.formulas[0];
  while (f->kind == Kind::Par) {
    if (f->kids[1].kind == Kind::Par) return false;
    items.push_back(&f->kids[1]);
    f = &f->kids[0];
  }
  items.push_back(f);
  std::reverse(items.begin(), items.end());
  int g = 0, dd = 0;
  for (auto* it : items) {
    if (it->is_lit()) {
      if (dd) return false;
      ++g;
    } else if (it->kind == Kind::Tensor && it->kids[0].is_lit() && it->kids[1].is_lit()) {
      ++dd;
    } else {
      return false;
    }
  }
  if (gamma) *gamma = g;
  if (delta) *delta = dd;
  return true;
}

nlohmann::json to_json(const RewriteTrace& t, bool with_maps) {
  nlohmann::json a = nlohmann::json::array();
  for (auto& e : t) {
    nlohmann::json j = {{"rule", rule_name(e.step.rule)}, {"path", e.step.path}};
    if (with_maps) j["occ_map"] = std::vector<int>(e.occ_map.begin() + 1, e.occ_map.end());
    a.push_back(j);
  }
  return a;
}

}  // namespace mllg
