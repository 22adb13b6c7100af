#include "mllg/tensor.hpp"

#include <cstdlib>
#include <limits>
#include <string>
#include <unordered_map>

#include "mllg/error.hpp"

namespace mllg {

std::uint64_t dense_limit() {
  static const std::uint64_t lim = [] {
    const char* e = std::getenv("MLLG_DENSE_LIMIT");
    if (e && *e) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(e, &end, 10);
      if (end && *end == 0 && v > 0) return static_cast<std::uint64_t>(v);
    }
    return std::uint64_t(1000000);
  }();
  return lim;
}

std::uint64_t dense_size(int order, Index dim) {
  std::uint64_t acc = 1;
  for (int k = 0; k < order; ++k) {
    if (dim != 0 && acc > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(dim))
      return std::numeric_limits<std::uint64_t>::max();
    acc *= static_cast<std::uint64_t>(dim);
  }
  return acc;
}

void check_dense(int order, Index dim, const char* what) {
  if (dense_size(order, dim) > dense_limit())
    fail(ErrorKind::Limit, std::string(what) + ": dense size " + std::to_string(dim) + "^" + std::to_string(order) +
                               " exceeds the dense limit " + std::to_string(dense_limit()));
}

DenseTensor::DenseTensor(const Semiring& sr, int order, Index dim) : sr_(&sr), order_(order), dim_(dim) {
  if (order < 0) fail(ErrorKind::Input, "negative tensor order");
  if (dim < 1) fail(ErrorKind::Input, "tensor dimension must be at least 1");
}

void DenseTensor::check_index(const MultiIndex& idx) const {
  if (static_cast<int>(idx.size()) != order_)
    fail(ErrorKind::Input, "index of length " + std::to_string(idx.size()) + " for order " + std::to_string(order_));
  for (Index x : idx)
    if (x < 1 || x > dim_) fail(ErrorKind::Input, "index coordinate " + std::to_string(x) + " outside [1," + std::to_string(dim_) + "]");
}

Scalar DenseTensor::at(const MultiIndex& idx) const {
  check_index(idx);
  auto it = entries_.find(idx);
  return it == entries_.end() ? sr_->zero : it->second;
}

void DenseTensor::set(const MultiIndex& idx, const Scalar& v) {
  check_index(idx);
  if (sr_->is_zero(v))
    entries_.erase(idx);
  else
    entries_[idx] = v;
}

void DenseTensor::accumulate(const MultiIndex& idx, const Scalar& v) {
  check_index(idx);
  auto it = entries_.find(idx);
  if (it == entries_.end()) {
    if (!sr_->is_zero(v)) entries_.emplace(idx, v);
    return;
  }
  it->second = sr_->add(it->second, v);
  if (sr_->is_zero(it->second)) entries_.erase(it);
}

bool DenseTensor::operator==(const DenseTensor& o) const {
  return order_ == o.order_ && dim_ == o.dim_ && entries_ == o.entries_;
}

DenseTensor DenseTensor::scalar(const Semiring& sr, Index dim, const Scalar& v) {
  DenseTensor t(sr, 0, dim);
  t.set({}, v);
  return t;
}

DenseTensor DenseTensor::delta(const Semiring& sr, Index dim, const MultiIndex& at) {
  DenseTensor t(sr, static_cast<int>(at.size()), dim);
  t.set(at, sr.one);
  return t;
}

DenseTensor DenseTensor::ones(const Semiring& sr, int order, Index dim) {
  check_dense(order, dim, "ones");
  DenseTensor t(sr, order, dim);
  for_each_index(order, dim, [&](const MultiIndex& m) { t.entries_.emplace(m, sr.one); });
  return t;
}

DenseTensor DenseTensor::identity(const Semiring& sr, Index dim) {
  DenseTensor t(sr, 2, dim);
  for (Index x = 1; x <= dim; ++x) t.set({x, x}, sr.one);
  return t;
}

void for_each_index(int order, Index dim, const std::function<void(const MultiIndex&)>& f) {
  MultiIndex m(order, 1);
  while (true) {
    f(m);
    int k = order - 1;
    while (k >= 0 && m[k] == dim) m[k--] = 1;
    if (k < 0) return;
    ++m[k];
  }
}

namespace {

struct VecHash {
  std::size_t operator()(const MultiIndex& v) const {
    std::size_t h = 1469598103934665603ull;
    for (Index x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
    return h;
  }
};

void same_shape_family(const DenseTensor& t, const DenseTensor& u, const char* op) {
  if (&t.semiring() != &u.semiring()) fail(ErrorKind::Input, std::string(op) + ": semiring mismatch");
  if (t.dim() != u.dim()) fail(ErrorKind::Input, std::string(op) + ": dimension mismatch");
}

}  // namespace

DenseTensor contract(const DenseTensor& t, const DenseTensor& u, const std::vector<std::pair<int, int>>& pairing) {
  same_shape_family(t, u, "contract");
  std::vector<char> tp(t.order(), 0), up(u.order(), 0);
  for (auto [a, b] : pairing) {
    if (a < 0 || a >= t.order() || b < 0 || b >= u.order()) fail(ErrorKind::Input, "contract: pairing position out of range");
    if (tp[a] || up[b]) fail(ErrorKind::Input, "contract: position paired twice");
    tp[a] = up[b] = 1;
  }
  std::vector<int> tfree, ufree;
  for (int k = 0; k < t.order(); ++k)
    if (!tp[k]) tfree.push_back(k);
  for (int k = 0; k < u.order(); ++k)
    if (!up[k]) ufree.push_back(k);
  const Semiring& sr = t.semiring();
  DenseTensor out(sr, static_cast<int>(tfree.size() + ufree.size()), t.dim());

  std::unordered_map<MultiIndex, std::vector<const std::pair<const MultiIndex, Scalar>*>, VecHash> ubuckets;
  for (auto& e : u.entries()) {
    MultiIndex key;
    key.reserve(pairing.size());
    for (auto [a, b] : pairing) key.push_back(e.first[b]);
    ubuckets[key].push_back(&e);
  }
  MultiIndex key, res(out.order());
  for (auto& e : t.entries()) {
    key.clear();
    for (auto [a, b] : pairing) key.push_back(e.first[a]);
    auto it = ubuckets.find(key);
    if (it == ubuckets.end()) continue;
    for (std::size_t k = 0; k < tfree.size(); ++k) res[k] = e.first[tfree[k]];
    for (auto* f : it->second) {
      for (std::size_t k = 0; k < ufree.size(); ++k) res[tfree.size() + k] = f->first[ufree[k]];
      out.accumulate(res, sr.mul(e.second, f->second));
    }
  }
  return out;
}

DenseTensor outer(const DenseTensor& t, const DenseTensor& u) { return contract(t, u, {}); }

DenseTensor add(const DenseTensor& t, const DenseTensor& u) {
  same_shape_family(t, u, "add");
  if (t.order() != u.order()) fail(ErrorKind::Input, "add: order mismatch");
  DenseTensor out = t;
  for (auto& [k, v] : u.entries()) out.accumulate(k, v);
  return out;
}

DenseTensor scale(const Scalar& s, const DenseTensor& t) {
  DenseTensor out(t.semiring(), t.order(), t.dim());
  for (auto& [k, v] : t.entries()) out.set(k, t.semiring().mul(s, v));
  return out;
}

DenseTensor cycle(const Semiring& sr, int order, Index n, Index r) {
  if (order < 1) fail(ErrorKind::Input, "cycle: order must be at least 1");
  check_dense(order, n, "cycle");
  DenseTensor t(sr, order, n);
  Index rr = ((r % n) + n) % n;
  // enumerate the first order-1 coordinates, solve the last one
  for_each_index(order - 1, n, [&](const MultiIndex& m) {
    Index s = 0;
    for (Index x : m) s = (s + x) % n;
    Index last = ((rr - s) % n + n) % n;
    if (last == 0) last = n;
    MultiIndex full = m;
    full.push_back(last);
    t.set(full, sr.one);
  });
  return t;
}

DenseTensor permute_positions(const DenseTensor& t, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != t.order()) fail(ErrorKind::Input, "permute_positions: wrong length");
  DenseTensor out(t.semiring(), t.order(), t.dim());
  MultiIndex m(t.order());
  for (auto& [k, v] : t.entries()) {
    for (int p = 0; p < t.order(); ++p) m[p] = k[perm[p]];
    out.set(m, v);
  }
  return out;
}

namespace {

// counts[k][rest] = number of ones once position k is dropped; false if an
// entry is not exactly the semiring's one
bool fiber_counts(const DenseTensor& t, bool full) {
  const Semiring& sr = t.semiring();
  for (auto& [k, v] : t.entries())
    if (v != sr.one) return false;
  if (t.order() == 0) return full ? t.nnz() == 1 : true;
  std::uint64_t fibers = dense_size(t.order() - 1, t.dim());
  for (int pos = 0; pos < t.order(); ++pos) {
    std::unordered_map<MultiIndex, int, VecHash> cnt;
    MultiIndex rest(t.order() - 1);
    for (auto& [k, v] : t.entries()) {
      for (int p = 0, q = 0; p < t.order(); ++p)
        if (p != pos) rest[q++] = k[p];
      if (++cnt[rest] > 1) return false;
    }
    if (full && cnt.size() != fibers) return false;
  }
  return true;
}

}  // namespace

bool is_full_permutation(const DenseTensor& t) { return fiber_counts(t, true); }
bool is_partial_permutation(const DenseTensor& t) { return fiber_counts(t, false); }

nlohmann::json to_json(const DenseTensor& t) {
  nlohmann::json ents = nlohmann::json::array();
  for (auto& [k, v] : t.entries()) ents.push_back({{"idx", k}, {"val", format_scalar(v)}});
  return {{"order", t.order()}, {"dim", t.dim()}, {"entries", ents}};
}

DenseTensor dense_from_json(const Semiring& sr, const nlohmann::json& j) {
  try {
    DenseTensor t(sr, j.at("order").get<int>(), j.at("dim").get<Index>());
    for (auto& e : j.at("entries")) {
      auto idx = e.at("idx").get<MultiIndex>();
      auto v = parse_scalar(sr, e.at("val").get<std::string>());
      if (t.at(idx) != sr.zero) fail(ErrorKind::Input, "tensor json: duplicate index");
      t.set(idx, v);
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Input, std::string("tensor json: ") + e.what());
  }
}

}  // namespace mllg
