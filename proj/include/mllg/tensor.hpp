#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mllg/semiring.hpp"

namespace mllg {

using Index = std::int64_t;
using MultiIndex = std::vector<Index>;

// Upper bound on n^L for anything stored densely. MLLG_DENSE_LIMIT overrides.
std::uint64_t dense_limit();
// n^L, or UINT64_MAX on overflow
std::uint64_t dense_size(int order, Index dim);
void check_dense(int order, Index dim, const char* what);

// Sparse storage of a dense-semantics tensor: absent entries are zero.
class DenseTensor {
public:
  DenseTensor(const Semiring& sr, int order, Index dim);

  const Semiring& semiring() const { return *sr_; }
  int order() const { return order_; }
  Index dim() const { return dim_; }

  Scalar at(const MultiIndex& idx) const;
  void set(const MultiIndex& idx, const Scalar& v);
  void accumulate(const MultiIndex& idx, const Scalar& v);
  const std::map<MultiIndex, Scalar>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }
  bool is_zero() const { return entries_.empty(); }

  bool operator==(const DenseTensor& o) const;
  bool operator!=(const DenseTensor& o) const { return !(*this == o); }

  static DenseTensor scalar(const Semiring& sr, Index dim, const Scalar& v);
  static DenseTensor delta(const Semiring& sr, Index dim, const MultiIndex& at);  // δ^{at}
  static DenseTensor ones(const Semiring& sr, int order, Index dim);
  static DenseTensor identity(const Semiring& sr, Index dim);

private:
  void check_index(const MultiIndex& idx) const;

  const Semiring* sr_;
  int order_;
  Index dim_;
  std::map<MultiIndex, Scalar> entries_;
};

// Einstein summation over paired positions. Result: t's unpaired positions
// in order, then u's unpaired positions in order.
DenseTensor contract(const DenseTensor& t, const DenseTensor& u, const std::vector<std::pair<int, int>>& pairing);
DenseTensor outer(const DenseTensor& t, const DenseTensor& u);
DenseTensor add(const DenseTensor& t, const DenseTensor& u);
DenseTensor scale(const Scalar& s, const DenseTensor& t);
// entry 1 where the coordinate sum is congruent to r mod n
DenseTensor cycle(const Semiring& sr, int order, Index n, Index r);
DenseTensor permute_positions(const DenseTensor& t, const std::vector<int>& perm);  // new pos k <- old perm[k]

bool is_full_permutation(const DenseTensor& t);
bool is_partial_permutation(const DenseTensor& t);

void for_each_index(int order, Index dim, const std::function<void(const MultiIndex&)>& f);

nlohmann::json to_json(const DenseTensor& t);
DenseTensor dense_from_json(const Semiring& sr, const nlohmann::json& j);

}  // namespace mllg
