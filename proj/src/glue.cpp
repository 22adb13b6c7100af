#include "mllg/glue.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "mllg/error.hpp"

namespace mllg {

std::string family_name(Family f) {
  switch (f) {
    case Family::A: return "A";
    case Family::C: return "C";
    case Family::S: return "S";
    case Family::D: return "D";
    case Family::C1: return "C1";
    case Family::Generic: return "generic";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  for (Family f : {Family::A, Family::C, Family::S, Family::D, Family::C1})
    if (family_name(f) == s) return f;
  fail(ErrorKind::Input, "unknown test-object family '" + s + "' (expected A, C, S, D or C1)");
}

namespace {

DenseTensor vec_delta(const Semiring& sr, Index n, Index x) { return DenseTensor::delta(sr, n, {x}); }

std::vector<DenseTensor> dedupe(std::vector<DenseTensor> v) {
  std::vector<DenseTensor> out;
  for (auto& t : v)
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
  return out;
}

bool member_of(const DenseTensor& t, const std::vector<DenseTensor>& set) {
  return std::find(set.begin(), set.end(), t) != set.end();
}

}  // namespace

bool same_set(const std::vector<DenseTensor>& a, const std::vector<DenseTensor>& b) {
  for (auto& x : a)
    if (!member_of(x, b)) return false;
  for (auto& x : b)
    if (!member_of(x, a)) return false;
  return true;
}

GluedObject test_object(const Semiring& sr, Family f, Index n) {
  GluedObject o;
  o.family = f;
  o.order = 1;
  if (n < 1) fail(ErrorKind::Input, "test object dimension must be at least 1");
  if (f == Family::D && n != 2) fail(ErrorKind::Input, "the D object has dimension 2");
  if (f == Family::C1 && n != 1) fail(ErrorKind::Input, "the C1 object has dimension 1");
  if (f == Family::Generic) fail(ErrorKind::Input, "generic objects come from glued constructions");
  o.dim = n;
  switch (f) {
    case Family::A:
      for (Index x = 1; x <= n; ++x) o.values.push_back(vec_delta(sr, n, x));
      o.values.push_back(DenseTensor(sr, 1, n));
      o.covalues = o.values;
      break;
    case Family::C:
    case Family::C1:
      for (Index x = 1; x <= n; ++x) o.values.push_back(vec_delta(sr, n, x));
      o.covalues = o.values;
      break;
    case Family::S:
      for (Index x = 1; x <= n; ++x) o.values.push_back(vec_delta(sr, n, x));
      o.covalues.push_back(DenseTensor::ones(sr, 1, n));
      break;
    case Family::D:
      o.values.push_back(vec_delta(sr, 2, 1));
      o.covalues = o.values;
      break;
    default:
      break;
  }
  o.self_dual = same_set(o.values, o.covalues);
  return o;
}

GluedObject glued_tensor(const GluedObject& r, const GluedObject& s, int max_entry) {
  if (r.dim != s.dim) fail(ErrorKind::Input, "glued_tensor: dimension mismatch");
  if (r.values.empty() && r.covalues.empty()) fail(ErrorKind::Input, "glued_tensor: empty object");
  const Semiring& sr = !r.values.empty() ? r.values[0].semiring() : r.covalues[0].semiring();
  GluedObject o;
  o.dim = r.dim;
  o.order = r.order + s.order;
  for (auto& a : r.values)
    for (auto& b : s.values) o.values.push_back(outer(a, b));
  o.values = dedupe(std::move(o.values));

  std::uint64_t cells = dense_size(o.order, o.dim);
  double cands = 1;
  for (std::uint64_t k = 0; k < cells; ++k) cands *= (max_entry + 1);
  if (cells > 20 || cands > 5e6) fail(ErrorKind::Limit, "glued_tensor: covalue brute force too large");
  std::vector<MultiIndex> idx;
  for_each_index(o.order, o.dim, [&](const MultiIndex& m) { idx.push_back(m); });
  std::vector<std::pair<int, int>> left, right;
  for (int k = 0; k < r.order; ++k) left.emplace_back(k, k);
  for (int k = 0; k < s.order; ++k) right.emplace_back(r.order + k, k);
  std::vector<int> digits(cells, 0);
  while (true) {
    DenseTensor z(sr, o.order, o.dim);
    for (std::size_t c = 0; c < cells; ++c)
      if (digits[c]) z.set(idx[c], Scalar(digits[c]));
    bool ok = true;
    if (sr.contains(Scalar(max_entry)) || max_entry <= 1) {
      for (auto& a : r.values)
        if (!member_of(contract(z, a, left), s.covalues)) {
          ok = false;
          break;
        }
      if (ok)
        for (auto& b : s.values)
          if (!member_of(contract(z, b, right), r.covalues)) {
            ok = false;
            break;
          }
    }
    bool representable = true;
    for (int d : digits)
      if (!sr.contains(Scalar(d))) representable = false;
    if (ok && representable) o.covalues.push_back(z);
    std::size_t c = 0;
    while (c < cells && digits[c] == max_entry) digits[c++] = 0;
    if (c == cells) break;
    ++digits[c];
  }
  o.self_dual = same_set(o.values, o.covalues);
  return o;
}

GluedObject glued_dual(const GluedObject& r) {
  GluedObject o = r;
  std::swap(o.values, o.covalues);
  if (r.family != Family::Generic && !r.self_dual) o.family = Family::Generic;
  return o;
}

GluedObject glued_par(const GluedObject& r, const GluedObject& s, int max_entry) {
  return glued_dual(glued_tensor(glued_dual(r), glued_dual(s), max_entry));
}

namespace {

void pperm_rec(const Semiring& sr, int order, Index n, const std::vector<MultiIndex>& pts, std::size_t at,
               std::vector<const MultiIndex*>& chosen, bool full, std::size_t need, std::size_t cap,
               std::vector<DenseTensor>& out) {
  if (at == pts.size()) {
    if (full && chosen.size() != need) return;
    if (out.size() >= cap) fail(ErrorKind::Limit, "permutation enumeration exceeds its cap");
    DenseTensor t(sr, order, n);
    for (auto* p : chosen) t.set(*p, sr.one);
    out.push_back(std::move(t));
    return;
  }
  if (full && chosen.size() + (pts.size() - at) < need) return;
  const MultiIndex& p = pts[at];
  bool compatible = true;
  for (auto* q : chosen) {
    int diff = 0;
    for (int k = 0; k < order; ++k) diff += (*q)[k] != p[k];
    if (diff < 2) {
      compatible = false;
      break;
    }
  }
  if (compatible) {
    chosen.push_back(&p);
    pperm_rec(sr, order, n, pts, at + 1, chosen, full, need, cap, out);
    chosen.pop_back();
  }
  pperm_rec(sr, order, n, pts, at + 1, chosen, full, need, cap, out);
}

std::vector<DenseTensor> enum_perm(const Semiring& sr, int order, Index n, bool full, std::size_t cap) {
  if (order < 1) fail(ErrorKind::Input, "permutation enumeration needs order at least 1");
  if (dense_size(order, n) > 64) fail(ErrorKind::Limit, "permutation enumeration: n^L above 64");
  std::vector<MultiIndex> pts;
  for_each_index(order, n, [&](const MultiIndex& m) { pts.push_back(m); });
  std::vector<const MultiIndex*> chosen;
  std::vector<DenseTensor> out;
  pperm_rec(sr, order, n, pts, 0, chosen, full, dense_size(order - 1, n), cap, out);
  return out;
}

}  // namespace

std::vector<DenseTensor> enumerate_pperm(const Semiring& sr, int order, Index n, std::size_t cap) {
  return enum_perm(sr, order, n, false, cap);
}

std::vector<DenseTensor> enumerate_perm(const Semiring& sr, int order, Index n, std::size_t cap) {
  return enum_perm(sr, order, n, true, cap);
}

// ---- shapes and membership ----

int MdnfShape::literals() const {
  int c = 0;
  for (auto& g : groups) c += static_cast<int>(g.size());
  return c;
}

MdnfShape MdnfShape::from_sequent(const Sequent& s) {
  MdnfShape sh;
  for (auto& b : blocks(s)) {
    std::vector<int> g;
    for (int o : b) g.push_back(o - 1);
    sh.groups.push_back(g);
  }
  for (auto& o : s.occurrences()) sh.positive.push_back(o.positive);
  return sh;
}

MdnfShape MdnfShape::pairs(const Sequent& s, const std::vector<std::pair<int, int>>& ps) {
  MdnfShape sh;
  auto occ = s.occurrences();
  std::vector<int> seen(occ.size(), 0);
  for (auto [p, q] : ps) {
    if (p < 1 || q < 1 || p > static_cast<int>(occ.size()) || q > static_cast<int>(occ.size()) || seen[p - 1]++ ||
        seen[q - 1]++)
      fail(ErrorKind::Input, "pair shape: pairs must partition the occurrences");
    sh.groups.push_back({p - 1, q - 1});
  }
  for (int v : seen)
    if (!v) fail(ErrorKind::Input, "pair shape: pairs must partition the occurrences");
  for (auto& o : occ) sh.positive.push_back(o.positive);
  return sh;
}

DenseTensor contract_except(const DenseTensor& t, const MdnfShape& shape, int k,
                            const std::vector<const DenseTensor*>& cov) {
  const Semiring& sr = t.semiring();
  std::vector<int> open_pos;
  for (std::size_t g = 0; g < shape.groups.size(); ++g)
    if (static_cast<int>(g) == k || !cov[g])
      for (int p : shape.groups[g]) open_pos.push_back(p);
  DenseTensor out(sr, static_cast<int>(open_pos.size()), t.dim());
  MultiIndex key, res(open_pos.size());
  for (auto& [idx, v] : t.entries()) {
    Scalar acc = v;
    bool zero = false;
    for (std::size_t g = 0; g < shape.groups.size() && !zero; ++g) {
      if (static_cast<int>(g) == k || !cov[g]) continue;
      key.clear();
      for (int p : shape.groups[g]) key.push_back(idx[p]);
      auto it = cov[g]->entries().find(key);
      if (it == cov[g]->entries().end())
        zero = true;
      else
        acc = sr.mul(acc, it->second);
    }
    if (zero) continue;
    for (std::size_t q = 0; q < open_pos.size(); ++q) res[q] = idx[open_pos[q]];
    out.accumulate(res, acc);
  }
  return out;
}

namespace {

std::vector<DenseTensor> group_covalues(const Semiring& sr, Family fam, Index n, std::size_t size) {
  switch (fam) {
    case Family::A: return enumerate_pperm(sr, static_cast<int>(size), n);
    case Family::C:
    case Family::C1: return enumerate_perm(sr, static_cast<int>(size), n);
    case Family::S: {
      if (size != 2) fail(ErrorKind::Input, "S family: every group is a (positive, negative) pair");
      std::vector<DenseTensor> out;
      for (Index x = 1; x <= n; ++x) {
        DenseTensor t(sr, 2, n);
        for (Index y = 1; y <= n; ++y) t.set({x, y}, sr.one);
        out.push_back(std::move(t));
      }
      return out;
    }
    case Family::D: {
      if (size == 1) return {DenseTensor::delta(sr, 2, {1})};
      if (size == 2) {
        DenseTensor a = DenseTensor::delta(sr, 2, {1, 1});
        DenseTensor b = a;
        b.set({2, 2}, sr.one);
        return {a, b};
      }
      fail(ErrorKind::Input, "D family: groups have one or two literals");
    }
    default:
      fail(ErrorKind::Input, "no covalue generators for this family");
  }
}

}  // namespace

void covalue_enumerate(const Semiring& sr, const MdnfShape& shape, Family fam, Index n, int open,
                       const std::function<bool(const std::vector<const DenseTensor*>&)>& f) {
  std::map<std::size_t, std::vector<DenseTensor>> cache;
  std::vector<const std::vector<DenseTensor>*> lists(shape.groups.size(), nullptr);
  for (std::size_t g = 0; g < shape.groups.size(); ++g) {
    if (static_cast<int>(g) == open) continue;
    auto sz = shape.groups[g].size();
    if (!cache.count(sz)) cache[sz] = group_covalues(sr, fam, n, sz);
    lists[g] = &cache[sz];
  }
  std::vector<std::size_t> pos(shape.groups.size(), 0);
  std::vector<const DenseTensor*> cur(shape.groups.size(), nullptr);
  while (true) {
    for (std::size_t g = 0; g < lists.size(); ++g) cur[g] = lists[g] ? &(*lists[g])[pos[g]] : nullptr;
    if (!f(cur)) return;
    std::size_t g = 0;
    for (; g < lists.size(); ++g) {
      if (!lists[g]) continue;
      if (++pos[g] < lists[g]->size()) break;
      pos[g] = 0;
    }
    if (g == lists.size()) return;
  }
}

namespace {

nlohmann::json certificate(int k, const MdnfShape& shape, const std::vector<const DenseTensor*>& cov,
                           const DenseTensor& res, const std::string& why) {
  nlohmann::json cj = nlohmann::json::array();
  for (std::size_t g = 0; g < cov.size(); ++g) cj.push_back(cov[g] && static_cast<int>(g) != k ? to_json(*cov[g]) : nullptr);
  std::vector<int> positions;
  if (k >= 0)
    for (int p : shape.groups[k]) positions.push_back(p + 1);
  return {{"group", k}, {"positions", positions}, {"covalues", cj}, {"contraction", to_json(res)}, {"violation", why}};
}

// Ξ membership at n = 2: entry (1,...,1) is one, entries with exactly one 2 vanish.
bool xi_member(const DenseTensor& t) {
  const Semiring& sr = t.semiring();
  MultiIndex ones(t.order(), 1);
  if (t.at(ones) != sr.one) return false;
  for (int k = 0; k < t.order(); ++k) {
    MultiIndex m = ones;
    m[k] = 2;
    if (!sr.is_zero(t.at(m))) return false;
  }
  return true;
}

}  // namespace

Membership mdnf_value_membership(const DenseTensor& t, const MdnfShape& shape, Family fam, Index n) {
  const Semiring& sr = t.semiring();
  if (t.dim() != n) fail(ErrorKind::Input, "membership: tensor dimension differs from n");
  if (t.order() != shape.literals()) fail(ErrorKind::Input, "membership: tensor order differs from the shape");
  if (fam == Family::Generic) fail(ErrorKind::Input, "membership: pick a test-object family");
  if ((fam == Family::A || fam == Family::C) && (n > 3 || shape.literals() > 6))
    fail(ErrorKind::Limit, "membership oracle bound: families A/C need n <= 3 and at most 6 literals");
  if (fam == Family::C1 && n != 1) fail(ErrorKind::Input, "C1 membership is at n = 1");
  if (fam == Family::D && n != 2) fail(ErrorKind::Input, "D membership is at n = 2");
  if (fam == Family::S && n > 4) fail(ErrorKind::Limit, "membership oracle bound: family S needs n <= 4");
  Membership out;
  if (fam == Family::D) {
    std::vector<int> gam, del;
    for (std::size_t g = 0; g < shape.groups.size(); ++g) (shape.groups[g].size() == 1 ? gam : del).push_back(static_cast<int>(g));
    DenseTensor want = DenseTensor::delta(sr, 2, {1, 1});
    for (int k : del) {
      covalue_enumerate(sr, shape, fam, n, k, [&](const std::vector<const DenseTensor*>& cov) {
        DenseTensor r = contract_except(t, shape, k, cov);
        if (r != want) {
          out.member = false;
          out.certificate = certificate(k, shape, cov, r, "differs from the only value d^{11}");
          return false;
        }
        return true;
      });
      if (!out.member) return out;
    }
    if (!gam.empty()) {
      covalue_enumerate(sr, shape, fam, n, -1, [&](const std::vector<const DenseTensor*>& cov0) {
        std::vector<const DenseTensor*> cov = cov0;
        for (int g : gam) cov[g] = nullptr;
        DenseTensor r = contract_except(t, shape, -1, cov);
        if (!xi_member(r)) {
          out.member = false;
          out.certificate = certificate(-1, shape, cov, r, "not in Xi over the one-literal blocks");
          return false;
        }
        return true;
      });
    }
    return out;
  }
  std::uint64_t budget = 20000000;
  for (int k = 0; k < static_cast<int>(shape.groups.size()) && out.member; ++k) {
    covalue_enumerate(sr, shape, fam, n, k, [&](const std::vector<const DenseTensor*>& cov) {
      if (budget-- == 0) fail(ErrorKind::Limit, "membership oracle: covalue tuple budget exhausted");
      DenseTensor r = contract_except(t, shape, k, cov);
      std::string why;
      if (fam == Family::A) {
        if (!(r.nnz() == 0 || (r.nnz() == 1 && r.entries().begin()->second == sr.one))) why = "not a constant delta or zero";
      } else if (fam == Family::C || fam == Family::C1) {
        if (!(r.nnz() == 1 && r.entries().begin()->second == sr.one)) why = "not a constant delta";
      } else if (fam == Family::S) {
        if (!is_full_permutation(r)) why = "not in Perm(2,n)";
      }
      if (!why.empty()) {
        out.member = false;
        out.certificate = certificate(k, shape, cov, r, why);
        return false;
      }
      return true;
    });
  }
  return out;
}

}  // namespace mllg
