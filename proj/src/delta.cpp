#include "mllg/delta.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "mllg/error.hpp"

namespace mllg {

CrossCheck& cross_check() {
  static CrossCheck c;
  return c;
}

// ---- SparseBijection ----

void SparseBijection::define(Index x, Index y) {
  auto f = fwd_.find(x);
  if (f != fwd_.end()) {
    if (f->second != y) fail(ErrorKind::Internal, "bijection: conflicting images for " + std::to_string(x));
    return;
  }
  if (inv_.count(y)) fail(ErrorKind::Internal, "bijection: image " + std::to_string(y) + " already used");
  fwd_[x] = y;
  inv_[y] = x;
}

namespace {

// k-th (1-based) positive integer missing from the sorted key set
Index kth_missing(const std::map<Index, Index>& taken, Index k) {
  Index y = k;
  for (auto& [t, _] : taken) {
    if (t <= y)
      ++y;
    else
      break;
  }
  return y;
}

Index rank_missing(const std::map<Index, Index>& taken, Index x) {
  Index below = 0;
  for (auto& [t, _] : taken) {
    if (t < x)
      ++below;
    else
      break;
  }
  return x - below;
}

}  // namespace

Index SparseBijection::eval(Index x) const {
  auto it = fwd_.find(x);
  if (it != fwd_.end()) return it->second;
  return kth_missing(inv_, rank_missing(fwd_, x));
}

Index SparseBijection::inverse(Index y) const {
  auto it = inv_.find(y);
  if (it != inv_.end()) return it->second;
  return kth_missing(fwd_, rank_missing(inv_, y));
}

bool SparseBijection::is_identity() const {
  for (auto& [x, y] : fwd_)
    if (x != y) return false;
  return true;
}

// ---- Factor ordering ----

namespace {

int cmp_alpha(const BijectionPtr& a, const BijectionPtr& b) {
  bool ia = !a || a->pairs().empty(), ib = !b || b->pairs().empty();
  if (ia || ib) return ia == ib ? 0 : (ia ? -1 : 1);
  auto c = *a <=> *b;
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

int cmp_factor(const Factor& x, const Factor& y) {
  if (x.kind != y.kind) return x.kind < y.kind ? -1 : 1;
  if (x.args != y.args) return x.args < y.args ? -1 : 1;
  if (x.residue != y.residue) return x.residue < y.residue ? -1 : 1;
  std::size_t na = x.alpha.size(), nb = y.alpha.size();
  for (std::size_t k = 0; k < std::max(na, nb); ++k) {
    int c = cmp_alpha(k < na ? x.alpha[k] : nullptr, k < nb ? y.alpha[k] : nullptr);
    if (c) return c;
  }
  return 0;
}

}  // namespace

bool Factor::operator<(const Factor& o) const { return cmp_factor(*this, o) < 0; }
bool Factor::operator==(const Factor& o) const { return cmp_factor(*this, o) == 0; }

// ---- reduction ----

namespace {

Index mod_n(__int128 v, Index n) {
  __int128 r = v % n;
  if (r < 0) r += n;
  return static_cast<Index>(r);
}

bool substitute(std::vector<Factor>& fs, std::size_t skip, int var, const Arg& by) {
  bool any = false;
  for (std::size_t j = 0; j < fs.size(); ++j) {
    if (j == skip) continue;
    for (auto& a : fs[j].args)
      if (a.var == var) {
        a = by;
        any = true;
      }
  }
  return any;
}

void canonicalize(Factor& f) {
  if (f.kind == Factor::Kind::Delta) {
    Arg& a = f.args[0];
    Arg& b = f.args[1];
    if (!a.is_var() || (b.is_var() && b.var < a.var)) std::swap(a, b);
    return;
  }
  bool ident = true;
  for (auto& p : f.alpha)
    if (p && !p->pairs().empty()) ident = false;
  if (ident) f.alpha.clear();
}

struct Reducer {
  const Semiring& sr;
  Index n;
  std::vector<Term>& out;

  // false if the term vanished
  bool simplify(Term& t, std::vector<char>& summed) {
    auto& fs = t.factors;
    bool changed = true;
    while (changed) {
      changed = false;
      // evaluate closed factors, turn solvable cycles into constants
      for (std::size_t i = 0; i < fs.size(); ++i) {
        Factor& f = fs[i];
        for (auto& a : f.args)
          if (!a.is_var() && (a.val < 1 || a.val > n)) return false;
        if (f.kind == Factor::Kind::Delta) {
          const Arg &a = f.args[0], &b = f.args[1];
          if (!a.is_var() && !b.is_var()) {
            if (a.val != b.val) return false;
          } else if (!(a.is_var() && b.is_var() && a.var == b.var)) {
            continue;
          }
          fs.erase(fs.begin() + i);
          changed = true;
          break;
        }
        int nvar = 0, vpos = -1;
        __int128 s = 0;
        for (std::size_t k = 0; k < f.args.size(); ++k) {
          if (f.args[k].is_var()) {
            ++nvar;
            vpos = static_cast<int>(k);
          } else {
            s += f.apply(k, f.args[k].val);
          }
        }
        if (nvar == 0) {
          if (mod_n(s, n) != mod_n(f.residue, n)) return false;
          fs.erase(fs.begin() + i);
          changed = true;
          break;
        }
        if (nvar == 1) {
          Index target = mod_n(static_cast<__int128>(f.residue) - s, n);
          if (target == 0) target = n;
          Factor d;
          d.kind = Factor::Kind::Delta;
          d.args = {f.args[vpos], Arg::c(f.unapply(vpos, target))};
          fs[i] = d;
          changed = true;
          break;
        }
      }
      if (changed) continue;
      // constants and links propagate
      for (std::size_t i = 0; i < fs.size() && !changed; ++i) {
        Factor& f = fs[i];
        if (f.kind != Factor::Kind::Delta) continue;
        Arg a = f.args[0], b = f.args[1];
        if (!a.is_var()) std::swap(a, b);
        if (!b.is_var()) {
          bool any = substitute(fs, i, a.var, b);
          if (summed[a.var]) {
            summed[a.var] = 0;
            fs.erase(fs.begin() + i);
            changed = true;
          } else if (any) {
            changed = true;
          }
        } else if (summed[a.var] || summed[b.var]) {
          int gone = summed[a.var] ? a.var : b.var;
          int keep = gone == a.var ? b.var : a.var;
          substitute(fs, i, gone, Arg::v(keep));
          summed[gone] = 0;
          fs.erase(fs.begin() + i);
          changed = true;
        }
      }
      if (changed) continue;
      // summed indices that occur nowhere or only once inside a full permutation
      std::vector<int> count(summed.size(), 0), where(summed.size(), -1);
      for (std::size_t i = 0; i < fs.size(); ++i)
        for (auto& a : fs[i].args)
          if (a.is_var()) {
            ++count[a.var];
            where[a.var] = static_cast<int>(i);
          }
      for (std::size_t v = 0; v < summed.size(); ++v) {
        if (!summed[v]) continue;
        if (count[v] == 0) {
          t.coeff = sr.mul(t.coeff, sr.from_count(static_cast<std::uint64_t>(n)));
          summed[v] = 0;
          changed = true;
        } else if (count[v] == 1 && fs[where[v]].kind == Factor::Kind::Cycle && fs[where[v]].args.size() >= 2) {
          fs.erase(fs.begin() + where[v]);
          summed[v] = 0;
          changed = true;
          break;
        }
      }
      if (sr.is_zero(t.coeff)) return false;
    }
    return true;
  }

  void run(Term t, std::vector<char> summed) {
    if (!simplify(t, summed)) return;
    std::vector<int> stuck;
    for (std::size_t v = 0; v < summed.size(); ++v)
      if (summed[v]) stuck.push_back(static_cast<int>(v));
    if (stuck.empty()) {
      for (auto& f : t.factors) canonicalize(f);
      std::sort(t.factors.begin(), t.factors.end());
      t.factors.erase(std::unique(t.factors.begin(), t.factors.end()), t.factors.end());
      out.push_back(std::move(t));
      return;
    }
    if (dense_size(static_cast<int>(stuck.size()), n) > dense_limit())
      fail(ErrorKind::Limit, "symbolic contraction: " + std::to_string(stuck.size()) +
                                 " summed indices resist elimination at dimension " + std::to_string(n));
    for_each_index(static_cast<int>(stuck.size()), n, [&](const MultiIndex& vals) {
      Term c = t;
      std::vector<char> s = summed;
      for (std::size_t k = 0; k < stuck.size(); ++k) {
        substitute(c.factors, c.factors.size(), stuck[k], Arg::c(vals[k]));
        s[stuck[k]] = 0;
      }
      run(std::move(c), std::move(s));
    });
  }
};

std::vector<Term> merge_terms(const Semiring& sr, std::vector<Term> terms) {
  std::map<std::vector<Factor>, Scalar> acc;
  std::vector<std::vector<Factor>> order;
  for (auto& t : terms) {
    auto it = acc.find(t.factors);
    if (it == acc.end()) {
      order.push_back(t.factors);
      acc.emplace(std::move(t.factors), t.coeff);
    } else {
      it->second = sr.add(it->second, t.coeff);
    }
  }
  std::vector<Term> out;
  for (auto& k : order) {
    const Scalar& c = acc[k];
    if (!sr.is_zero(c)) out.push_back(Term{c, k});
  }
  std::sort(out.begin(), out.end(), [](const Term& a, const Term& b) { return a.factors < b.factors; });
  return out;
}

std::vector<Term> reduce_all(const Semiring& sr, Index n, std::vector<Term> in, const std::vector<char>& summed) {
  std::vector<Term> out;
  Reducer r{sr, n, out};
  for (auto& t : in) {
    if (sr.is_zero(t.coeff)) continue;
    r.run(std::move(t), summed);
  }
  return merge_terms(sr, std::move(out));
}

bool eval_factor(const Factor& f, const MultiIndex& at, Index n) {
  auto val = [&](const Arg& a) { return a.is_var() ? at[a.var] : a.val; };
  if (f.kind == Factor::Kind::Delta) return val(f.args[0]) == val(f.args[1]);
  __int128 s = 0;
  for (std::size_t k = 0; k < f.args.size(); ++k) {
    Index x = val(f.args[k]);
    if (x < 1 || x > n) return false;
    s += f.apply(k, x);
  }
  return mod_n(s, n) == mod_n(f.residue, n);
}

void check_names(const std::vector<std::string>& names) {
  std::set<std::string> seen;
  for (auto& s : names) {
    if (s.empty()) fail(ErrorKind::Input, "empty index name");
    if (!seen.insert(s).second) fail(ErrorKind::Input, "duplicate index name '" + s + "'");
  }
}

}  // namespace

// ---- DeltaExpr ----

DeltaExpr::DeltaExpr(const Semiring& sr, Index dim, std::vector<std::string> names)
    : sr_(&sr), dim_(dim), names_(std::move(names)) {
  if (dim < 1) fail(ErrorKind::Input, "dimension must be at least 1");
  check_names(names_);
}

int DeltaExpr::position(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

void DeltaExpr::add_term(Term t) {
  for (auto& f : t.factors) {
    for (auto& a : f.args)
      if (a.is_var() && a.var >= order()) fail(ErrorKind::Input, "term refers to an unknown index");
    if (f.kind == Factor::Kind::Delta && f.args.size() != 2) fail(ErrorKind::Input, "delta factor needs two arguments");
    if (f.kind == Factor::Kind::Cycle && !f.alpha.empty() && f.alpha.size() != f.args.size())
      fail(ErrorKind::Input, "cycle factor: one relabeling per argument");
    if (f.kind == Factor::Kind::Cycle) f.residue = mod_n(f.residue, dim_);
  }
  std::vector<Term> all = terms_;
  all.push_back(std::move(t));
  terms_ = reduce_all(*sr_, dim_, std::move(all), std::vector<char>(names_.size(), 0));
}

Scalar DeltaExpr::eval(const MultiIndex& at) const {
  if (static_cast<int>(at.size()) != order()) fail(ErrorKind::Input, "eval: wrong number of coordinates");
  for (Index x : at)
    if (x < 1 || x > dim_) fail(ErrorKind::Input, "eval: coordinate out of range");
  Scalar acc = sr_->zero;
  for (auto& t : terms_) {
    bool ok = true;
    for (auto& f : t.factors)
      if (!eval_factor(f, at, dim_)) {
        ok = false;
        break;
      }
    if (ok) acc = sr_->add(acc, t.coeff);
  }
  return acc;
}

DenseTensor DeltaExpr::densify() const {
  check_dense(order(), dim_, "densify");
  DenseTensor out(*sr_, order(), dim_);
  const int L = order();
  for (auto& t : terms_) {
    // factors become checkable once their highest variable is assigned
    std::vector<std::vector<const Factor*>> ready(L + 1);
    std::vector<Index> fixed(L, 0);
    for (auto& f : t.factors) {
      int hi = -1;
      for (auto& a : f.args) hi = std::max(hi, a.var);
      ready[hi + 1].push_back(&f);
      if (f.kind == Factor::Kind::Delta && f.args[0].is_var() && !f.args[1].is_var()) {
        Index c = f.args[1].val;
        Index& slot = fixed[f.args[0].var];
        if (slot != 0 && slot != c) slot = -1;
        else if (slot == 0) slot = c;
      }
    }
    bool dead = false;
    for (Index s : fixed)
      if (s == -1 || s > dim_) dead = true;
    if (dead) continue;
    MultiIndex at(L, 1);
    auto check = [&](int level) {
      for (auto* f : ready[level])
        if (!eval_factor(*f, at, dim_)) return false;
      return true;
    };
    if (!check(0)) continue;
    std::function<void(int)> go = [&](int k) {
      if (k == L) {
        out.accumulate(at, t.coeff);
        return;
      }
      Index lo = 1, hi = dim_;
      if (fixed[k] > 0) lo = hi = fixed[k];
      for (Index x = lo; x <= hi; ++x) {
        at[k] = x;
        if (check(k + 1)) go(k + 1);
      }
    };
    go(0);
  }
  return out;
}

DeltaExpr DeltaExpr::renamed(const std::vector<std::string>& names) const {
  if (names.size() != names_.size()) fail(ErrorKind::Input, "rename: wrong number of names");
  DeltaExpr e = *this;
  e.names_ = names;
  check_names(e.names_);
  return e;
}

DeltaExpr DeltaExpr::reordered(const std::vector<std::string>& names) const {
  if (names.size() != names_.size()) fail(ErrorKind::Input, "reorder: different index sets");
  std::vector<int> map(names_.size(), -1);
  for (std::size_t k = 0; k < names_.size(); ++k) {
    auto it = std::find(names.begin(), names.end(), names_[k]);
    if (it == names.end()) fail(ErrorKind::Input, "reorder: index '" + names_[k] + "' missing");
    map[k] = static_cast<int>(it - names.begin());
  }
  DeltaExpr e(*sr_, dim_, names);
  std::vector<Term> ts = terms_;
  for (auto& t : ts)
    for (auto& f : t.factors)
      for (auto& a : f.args)
        if (a.is_var()) a.var = map[a.var];
  e.terms_ = reduce_all(*sr_, dim_, std::move(ts), std::vector<char>(names.size(), 0));
  return e;
}

DeltaExpr DeltaExpr::scalar(const Semiring& sr, Index dim, const Scalar& v) {
  DeltaExpr e(sr, dim, {});
  e.add_term(Term{v, {}});
  return e;
}

DeltaExpr DeltaExpr::zero(const Semiring& sr, Index dim, std::vector<std::string> names) {
  return DeltaExpr(sr, dim, std::move(names));
}

DeltaExpr DeltaExpr::constant(const Semiring& sr, Index dim, std::vector<std::string> names, const MultiIndex& vals) {
  if (vals.size() != names.size()) fail(ErrorKind::Input, "constant delta: arity mismatch");
  DeltaExpr e(sr, dim, std::move(names));
  Term t{sr.one, {}};
  for (std::size_t k = 0; k < vals.size(); ++k) {
    if (vals[k] < 1 || vals[k] > dim) fail(ErrorKind::Input, "constant delta: value outside [1,n]");
    t.factors.push_back(Factor{Factor::Kind::Delta, {Arg::v(static_cast<int>(k)), Arg::c(vals[k])}, 0, {}});
  }
  e.add_term(std::move(t));
  return e;
}

DeltaExpr DeltaExpr::link(const Semiring& sr, Index dim, const std::string& a, const std::string& b) {
  DeltaExpr e(sr, dim, {a, b});
  e.add_term(Term{sr.one, {Factor{Factor::Kind::Delta, {Arg::v(0), Arg::v(1)}, 0, {}}}});
  return e;
}

DeltaExpr DeltaExpr::cycle(const Semiring& sr, Index dim, std::vector<std::string> names, Index residue,
                           std::vector<BijectionPtr> alpha) {
  if (names.empty()) fail(ErrorKind::Input, "cycle: order must be at least 1");
  if (!alpha.empty() && alpha.size() != names.size()) fail(ErrorKind::Input, "cycle: one relabeling per index");
  for (auto& a : alpha)
    if (a)
      for (auto& [x, y] : a->pairs())
        if (x < 1 || x > dim || y < 1 || y > dim) fail(ErrorKind::Input, "cycle: relabeling outside [1,n]");
  DeltaExpr e(sr, dim, std::move(names));
  Factor f;
  f.kind = Factor::Kind::Cycle;
  for (int k = 0; k < e.order(); ++k) f.args.push_back(Arg::v(k));
  f.residue = residue;
  f.alpha = std::move(alpha);
  e.add_term(Term{sr.one, {f}});
  return e;
}

DeltaExpr DeltaExpr::from_dense(const DenseTensor& t, std::vector<std::string> names) {
  if (static_cast<int>(names.size()) != t.order()) fail(ErrorKind::Input, "from_dense: arity mismatch");
  DeltaExpr e(t.semiring(), t.dim(), std::move(names));
  std::vector<Term> ts;
  for (auto& [idx, v] : t.entries()) {
    Term term{v, {}};
    for (std::size_t k = 0; k < idx.size(); ++k)
      term.factors.push_back(Factor{Factor::Kind::Delta, {Arg::v(static_cast<int>(k)), Arg::c(idx[k])}, 0, {}});
    ts.push_back(std::move(term));
  }
  e.terms_ = reduce_all(t.semiring(), t.dim(), std::move(ts), std::vector<char>(e.order(), 0));
  return e;
}

DeltaExpr add(const DeltaExpr& t, const DeltaExpr& u) {
  if (&t.semiring() != &u.semiring() || t.dim() != u.dim()) fail(ErrorKind::Input, "add: semiring or dimension mismatch");
  DeltaExpr v = u.reordered(t.names());
  DeltaExpr out = t;
  std::vector<Term> all = t.terms_;
  all.insert(all.end(), v.terms_.begin(), v.terms_.end());
  out.terms_ = merge_terms(t.semiring(), std::move(all));
  return out;
}

DeltaExpr scale(const Scalar& s, const DeltaExpr& t) {
  DeltaExpr out = DeltaExpr::zero(t.semiring(), t.dim(), t.names());
  for (auto& term : t.terms()) {
    Term c = term;
    c.coeff = t.semiring().mul(s, c.coeff);
    if (!t.semiring().is_zero(c.coeff)) out.add_term(std::move(c));
  }
  return out;
}


DeltaExpr contract(const DeltaExpr& t, const DeltaExpr& u, const std::vector<std::pair<std::string, std::string>>& pairing) {
  if (&t.semiring() != &u.semiring()) fail(ErrorKind::Input, "contract: semiring mismatch");
  if (t.dim() != u.dim()) fail(ErrorKind::Input, "contract: dimension mismatch");
  const Semiring& sr = t.semiring();
  const int nt = t.order(), nu = u.order();
  std::vector<int> umap(nu, -1);
  std::vector<char> tpaired(nt, 0);
  for (auto& [a, b] : pairing) {
    int pa = t.position(a), pb = u.position(b);
    if (pa < 0) fail(ErrorKind::Input, "contract: '" + a + "' is not an index of the left operand");
    if (pb < 0) fail(ErrorKind::Input, "contract: '" + b + "' is not an index of the right operand");
    if (tpaired[pa] || umap[pb] >= 0) fail(ErrorKind::Input, "contract: index paired twice");
    tpaired[pa] = 1;
    umap[pb] = pa;
  }
  std::vector<std::string> names = t.names();
  for (int k = 0; k < nu; ++k)
    if (umap[k] < 0) {
      umap[k] = static_cast<int>(names.size());
      names.push_back(u.names()[k]);
    }
  std::vector<char> summed(names.size(), 0);
  for (int k = 0; k < nt; ++k) summed[k] = tpaired[k];
  // result name list must be collision free
  std::vector<std::string> result_names;
  std::vector<int> compact(names.size(), -1);
  for (std::size_t k = 0; k < names.size(); ++k)
    if (!summed[k]) {
      compact[k] = static_cast<int>(result_names.size());
      result_names.push_back(names[k]);
    }
  DeltaExpr out(sr, t.dim(), result_names);

  std::vector<Term> prod;
  for (auto& a : t.terms_)
    for (auto& b : u.terms_) {
      Term c{sr.mul(a.coeff, b.coeff), a.factors};
      if (sr.is_zero(c.coeff)) continue;
      for (Factor f : b.factors) {
        for (auto& x : f.args)
          if (x.is_var()) x.var = umap[x.var];
        c.factors.push_back(std::move(f));
      }
      prod.push_back(std::move(c));
    }
  std::vector<Term> red;
  {
    Reducer r{sr, t.dim(), red};
    for (auto& c : prod) r.run(std::move(c), summed);
  }
  for (auto& c : red)
    for (auto& f : c.factors)
      for (auto& x : f.args)
        if (x.is_var()) {
          if (compact[x.var] < 0) fail(ErrorKind::Internal, "contract: summed index survived reduction");
          x.var = compact[x.var];
        }
  // compaction keeps relative order, but canonical form must be restored
  for (auto& c : red) {
    for (auto& f : c.factors) canonicalize(f);
    std::sort(c.factors.begin(), c.factors.end());
  }
  out.terms_ = merge_terms(sr, std::move(red));

  auto& cc = cross_check();
  if (cc.enabled.load(std::memory_order_relaxed)) {
    Index n = t.dim();
    if (dense_size(nt, n) <= dense_limit() && dense_size(nu, n) <= dense_limit() &&
        dense_size(out.order(), n) <= dense_limit()) {
      std::vector<std::pair<int, int>> pos;
      for (auto& [a, b] : pairing) pos.emplace_back(t.position(a), u.position(b));
      DenseTensor expect = contract(t.densify(), u.densify(), pos);
      if (expect != out.densify()) cc.mismatches.fetch_add(1);
      cc.checked.fetch_add(1);
    } else {
      cc.skipped.fetch_add(1);
    }
  }
  return out;
}

DeltaExpr outer(const DeltaExpr& t, const DeltaExpr& u) { return contract(t, u, {}); }

DeltaExpr contract_common(const DeltaExpr& t, const DeltaExpr& u) {
  std::vector<std::pair<std::string, std::string>> p;
  for (auto& s : t.names())
    if (u.position(s) >= 0) p.emplace_back(s, s);
  return contract(t, u, p);
}

bool equivalent(const DeltaExpr& a, const DeltaExpr& b) {
  if (&a.semiring() != &b.semiring() || a.dim() != b.dim() || a.order() != b.order()) return false;
  DeltaExpr bb = [&] {
    try {
      return b.reordered(a.names());
    } catch (const Error&) {
      return b.renamed(a.names());
    }
  }();
  if (dense_size(a.order(), a.dim()) <= dense_limit()) return a.densify() == bb.densify();
  if (a.terms().size() != bb.terms().size()) return false;
  for (std::size_t k = 0; k < a.terms().size(); ++k) {
    if (a.terms()[k].coeff != bb.terms()[k].coeff) return false;
    if (!(a.terms()[k].factors == bb.terms()[k].factors)) return false;
  }
  return true;
}

bool structurally_full_permutation(const DeltaExpr& e) {
  if (e.terms().size() != 1) return false;
  const Term& t = e.terms()[0];
  if (t.coeff != e.semiring().one) return false;
  if (e.order() == 0) return t.factors.empty();
  if (e.order() == 1) {
    return t.factors.size() == 1 && t.factors[0].kind == Factor::Kind::Delta && t.factors[0].args[0].var == 0 &&
           !t.factors[0].args[1].is_var();
  }
  if (t.factors.size() != 1) return false;
  const Factor& f = t.factors[0];
  if (f.kind != Factor::Kind::Cycle || static_cast<int>(f.args.size()) != e.order()) return false;
  std::vector<char> seen(e.order(), 0);
  for (auto& a : f.args) {
    if (!a.is_var() || seen[a.var]) return false;
    seen[a.var] = 1;
  }
  // relabelings are bijections of [n] by construction; their explicit pairs must stay in range
  for (auto& p : f.alpha)
    if (p)
      for (auto& [x, y] : p->pairs())
        if (x < 1 || x > e.dim() || y < 1 || y > e.dim()) return false;
  return true;
}

bool is_full_permutation(const DeltaExpr& e) {
  if (dense_size(e.order(), e.dim()) <= dense_limit()) return is_full_permutation(e.densify());
  return structurally_full_permutation(e);
}

bool is_partial_permutation(const DeltaExpr& e) { return is_partial_permutation(e.densify()); }

// ---- printing / json ----

namespace {

std::string arg_str(const DeltaExpr& e, const Arg& a) {
  return a.is_var() ? e.names()[a.var] : std::to_string(a.val);
}

}  // namespace

std::string to_string(const DeltaExpr& e) {
  if (e.terms().empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& t : e.terms()) {
    if (!first) os << " + ";
    first = false;
    bool unit = t.coeff == e.semiring().one;
    if (!unit || t.factors.empty()) os << format_scalar(t.coeff);
    for (auto& f : t.factors) {
      if (!unit || &f != &t.factors.front()) os << "*";
      if (f.kind == Factor::Kind::Delta) {
        os << "d(" << arg_str(e, f.args[0]) << "," << arg_str(e, f.args[1]) << ")";
      } else {
        os << "cyc[" << f.residue << "](";
        for (std::size_t k = 0; k < f.args.size(); ++k) {
          if (k) os << ",";
          bool rel = !f.alpha.empty() && f.alpha[k] && !f.alpha[k]->pairs().empty();
          if (rel) os << "a" << k << ":";
          os << arg_str(e, f.args[k]);
        }
        os << ")";
      }
    }
  }
  return os.str();
}

nlohmann::json to_json(const DeltaExpr& e) {
  using nlohmann::json;
  auto arg_json = [&](const Arg& a) -> json {
    if (a.is_var()) return e.names()[a.var];
    return a.val;
  };
  json terms = json::array();
  for (auto& t : e.terms()) {
    json fs = json::array();
    for (auto& f : t.factors) {
      if (f.kind == Factor::Kind::Delta) {
        bool c = !f.args[1].is_var();
        fs.push_back({{c ? "const" : "link", json::array({arg_json(f.args[0]), arg_json(f.args[1])})}});
      } else {
        json args = json::array(), alpha = json::array();
        for (std::size_t k = 0; k < f.args.size(); ++k) {
          args.push_back(arg_json(f.args[k]));
          if (f.alpha.empty() || !f.alpha[k]) {
            alpha.push_back(nullptr);
          } else {
            json pairs = json::array();
            for (auto& [x, y] : f.alpha[k]->pairs()) pairs.push_back({x, y});
            alpha.push_back(pairs);
          }
        }
        fs.push_back({{"cycle", {{"args", args}, {"residue", f.residue}, {"alpha", alpha}}}});
      }
    }
    terms.push_back({{"coeff", format_scalar(t.coeff)}, {"factors", fs}});
  }
  return {{"semiring", e.semiring().name}, {"dim", e.dim()}, {"indices", e.names()}, {"terms", terms}};
}

DeltaExpr delta_from_json(const Semiring& sr, const nlohmann::json& j) {
  try {
    DeltaExpr e(sr, j.at("dim").get<Index>(), j.at("indices").get<std::vector<std::string>>());
    auto arg = [&](const nlohmann::json& a) {
      if (a.is_string()) {
        int p = e.position(a.get<std::string>());
        if (p < 0) fail(ErrorKind::Input, "delta json: unknown index " + a.get<std::string>());
        return Arg::v(p);
      }
      return Arg::c(a.get<Index>());
    };
    for (auto& tj : j.at("terms")) {
      Term t{parse_scalar(sr, tj.at("coeff").get<std::string>()), {}};
      for (auto& fj : tj.at("factors")) {
        Factor f;
        if (fj.contains("const") || fj.contains("link")) {
          auto& a = fj.contains("const") ? fj["const"] : fj["link"];
          if (a.size() != 2) fail(ErrorKind::Input, "delta json: delta factors take two arguments");
          f.args = {arg(a[0]), arg(a[1])};
        } else if (fj.contains("cycle")) {
          auto& c = fj["cycle"];
          f.kind = Factor::Kind::Cycle;
          for (auto& a : c.at("args")) f.args.push_back(arg(a));
          f.residue = c.value("residue", Index(0));
          if (c.contains("alpha")) {
            for (auto& al : c["alpha"]) {
              if (al.is_null()) {
                f.alpha.push_back(nullptr);
                continue;
              }
              auto b = std::make_shared<SparseBijection>();
              for (auto& p : al) b->define(p.at(0).get<Index>(), p.at(1).get<Index>());
              f.alpha.push_back(b);
            }
          }
        } else {
          fail(ErrorKind::Input, "delta json: unknown factor");
        }
        t.factors.push_back(std::move(f));
      }
      e.add_term(std::move(t));
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorKind::Input, std::string("delta json: ") + ex.what());
  }
}

}  // namespace mllg
