#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mllg/semiring.hpp"
#include "mllg/tensor.hpp"

namespace mllg {

// A bijection of [n] given by finitely many explicit pairs; every other
// point goes, in increasing order, to the lowest image value still unused.
class SparseBijection {
public:
  void define(Index x, Index y);
  Index eval(Index x) const;
  Index inverse(Index y) const;
  bool defined_at(Index x) const { return fwd_.count(x) != 0; }
  const std::map<Index, Index>& pairs() const { return fwd_; }
  bool is_identity() const;
  auto operator<=>(const SparseBijection& o) const { return fwd_ <=> o.fwd_; }
  bool operator==(const SparseBijection& o) const { return fwd_ == o.fwd_; }

private:
  std::map<Index, Index> fwd_, inv_;
};

struct Arg {
  int var = -1;  // position in the expression's index list, or -1 for a constant
  Index val = 0;
  bool is_var() const { return var >= 0; }
  static Arg v(int id) { return Arg{id, 0}; }
  static Arg c(Index x) { return Arg{-1, x}; }
  auto operator<=>(const Arg&) const = default;
};

using BijectionPtr = std::shared_ptr<const SparseBijection>;

struct Factor {
  enum class Kind { Delta, Cycle };
  Kind kind = Kind::Delta;
  // Delta: exactly two args (Const when one side is a constant, Link otherwise).
  // Cycle: sum_k alpha_k(args_k) == residue (mod n).
  std::vector<Arg> args;
  Index residue = 0;
  std::vector<BijectionPtr> alpha;  // empty, or one per arg (null = identity)

  Index apply(std::size_t k, Index x) const { return (alpha.empty() || !alpha[k]) ? x : alpha[k]->eval(x); }
  Index unapply(std::size_t k, Index y) const { return (alpha.empty() || !alpha[k]) ? y : alpha[k]->inverse(y); }
  bool operator<(const Factor& o) const;
  bool operator==(const Factor& o) const;
};

struct Term {
  Scalar coeff;
  std::vector<Factor> factors;
};

class DeltaExpr {
public:
  DeltaExpr(const Semiring& sr, Index dim, std::vector<std::string> names);

  const Semiring& semiring() const { return *sr_; }
  Index dim() const { return dim_; }
  int order() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  int position(const std::string& name) const;  // -1 if absent
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  // Adds a term over this expression's indices; simplifies and merges.
  void add_term(Term t);

  Scalar eval(const MultiIndex& at) const;
  DenseTensor densify() const;
  DeltaExpr renamed(const std::vector<std::string>& names) const;
  // Same set of names, reordered.
  DeltaExpr reordered(const std::vector<std::string>& names) const;

  static DeltaExpr scalar(const Semiring& sr, Index dim, const Scalar& v);
  static DeltaExpr zero(const Semiring& sr, Index dim, std::vector<std::string> names);
  // δ^{vals}_{names}
  static DeltaExpr constant(const Semiring& sr, Index dim, std::vector<std::string> names, const MultiIndex& vals);
  static DeltaExpr link(const Semiring& sr, Index dim, const std::string& a, const std::string& b);
  static DeltaExpr cycle(const Semiring& sr, Index dim, std::vector<std::string> names, Index residue,
                         std::vector<BijectionPtr> alpha = {});
  static DeltaExpr from_dense(const DenseTensor& t, std::vector<std::string> names);

private:
  friend DeltaExpr add(const DeltaExpr&, const DeltaExpr&);
  friend DeltaExpr contract(const DeltaExpr&, const DeltaExpr&, const std::vector<std::pair<std::string, std::string>>&);
  friend DeltaExpr outer(const DeltaExpr&, const DeltaExpr&);

  const Semiring* sr_;
  Index dim_;
  std::vector<std::string> names_;
  std::vector<Term> terms_;
};

DeltaExpr add(const DeltaExpr& t, const DeltaExpr& u);
DeltaExpr scale(const Scalar& s, const DeltaExpr& t);
DeltaExpr outer(const DeltaExpr& t, const DeltaExpr& u);
// Pairs are (name in t, name in u). Result indices: t's unpaired then u's unpaired.
DeltaExpr contract(const DeltaExpr& t, const DeltaExpr& u, const std::vector<std::pair<std::string, std::string>>& pairing);
// Pairs every name the two share.
DeltaExpr contract_common(const DeltaExpr& t, const DeltaExpr& u);

// Semantic equality: dense when small, structural (after merging) otherwise.
bool equivalent(const DeltaExpr& a, const DeltaExpr& b);
// Structural check that the expression is a single full permutation
// (one coefficient-one term made of one Cycle over all indices, or a Const per index when order is 1).
bool structurally_full_permutation(const DeltaExpr& e);
bool is_full_permutation(const DeltaExpr& e);     // densifies if small, structural otherwise
bool is_partial_permutation(const DeltaExpr& e);  // densifies; Limit error otherwise

std::string to_string(const DeltaExpr& e);
nlohmann::json to_json(const DeltaExpr& e);
DeltaExpr delta_from_json(const Semiring& sr, const nlohmann::json& j);

// Cross-validation of symbolic contraction against the dense backend.
struct CrossCheck {
  std::atomic<bool> enabled{false};
  std::atomic<std::uint64_t> checked{0};
  std::atomic<std::uint64_t> skipped{0};
  std::atomic<std::uint64_t> mismatches{0};
  void reset() {
    checked = 0;
    skipped = 0;
    mismatches = 0;
  }
};
CrossCheck& cross_check();

}  // namespace mllg
