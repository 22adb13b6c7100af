#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mllg/logic.hpp"
#include "mllg/tensor.hpp"

namespace mllg {

enum class Family { A, C, S, D, C1, Generic };

std::string family_name(Family f);
Family parse_family(const std::string& s);

// Finite generator sets of values and covalues, all tensors of one order.
struct GluedObject {
  Family family = Family::Generic;
  Index dim = 1;
  int order = 1;
  std::vector<DenseTensor> values;
  std::vector<DenseTensor> covalues;
  bool self_dual = false;
};

GluedObject test_object(const Semiring& sr, Family f, Index n);
// Covalues found by brute force over candidate tensors with entries 0..max_entry.
GluedObject glued_tensor(const GluedObject& r, const GluedObject& s, int max_entry = 2);
GluedObject glued_dual(const GluedObject& r);
GluedObject glued_par(const GluedObject& r, const GluedObject& s, int max_entry = 2);
bool same_set(const std::vector<DenseTensor>& a, const std::vector<DenseTensor>& b);

std::vector<DenseTensor> enumerate_pperm(const Semiring& sr, int order, Index n, std::size_t cap = 2000000);
std::vector<DenseTensor> enumerate_perm(const Semiring& sr, int order, Index n, std::size_t cap = 2000000);

// Groups of tensor positions (0-based, in occurrence order). For A/C/C1 the
// groups are the blocks; for S they are (positive, negative) pairs; for D the
// one-literal groups form Γ and the two-literal groups form Δ.
struct MdnfShape {
  std::vector<std::vector<int>> groups;
  std::vector<bool> positive;  // per position, kept for reporting
  int literals() const;
  static MdnfShape from_sequent(const Sequent& s);
  static MdnfShape pairs(const Sequent& s, const std::vector<std::pair<int, int>>& pairs);
};

struct Membership {
  bool member = true;
  nlohmann::json certificate;  // violating group, covalue choice and contraction
};

// Contracts t with the covalues `cov` on every group but k; result over group k.
DenseTensor contract_except(const DenseTensor& t, const MdnfShape& shape, int k, const std::vector<const DenseTensor*>& cov);

Membership mdnf_value_membership(const DenseTensor& t, const MdnfShape& shape, Family f, Index n);

// Calls `f` with one covalue per group (null for a group left open when
// `open` >= 0); stops when `f` returns false.
void covalue_enumerate(const Semiring& sr, const MdnfShape& shape, Family fam, Index n, int open,
                       const std::function<bool(const std::vector<const DenseTensor*>&)>& f);

}  // namespace mllg
