#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mllg/delta.hpp"
#include "mllg/glue.hpp"
#include "mllg/logic.hpp"
#include "mllg/proofnet.hpp"
#include "mllg/rewrite.hpp"

namespace mllg {

enum class WitnessKind { ScalarSum, Cycle, Disconnect, Uniqueness, MixUniqueness, MixCycle };

std::string witness_kind_name(WitnessKind k);
WitnessKind parse_witness_kind(const std::string& s);

// A rejection certificate. `comb` is the combination the tensors refer to
// (after whatever normalization the algorithm needed); block tensors are
// named by the index names of that sequent, null for the open block.
struct Witness {
  WitnessKind kind = WitnessKind::ScalarSum;
  Family family = Family::C1;
  Index n = 1;
  LinComb comb;
  std::vector<std::optional<DeltaExpr>> block_tensors;
  std::vector<std::string> open_names;  // indices left free in the contraction
  int block = -1;                       // chosen block k / leaf l, 0-based
  std::vector<MultiIndex> probes;       // entries of the contraction that must be nonzero
  std::optional<DeltaExpr> contraction;
  Scalar sum;                  // ScalarSum
  std::vector<Index> xvec;     // MixUniqueness constants, 0 at the open pair
  std::vector<std::vector<int>> groups;  // occurrences carrying each block tensor
  std::string violation;
  nlohmann::json log;  // algorithm-specific detail (tuples, traces)
};

nlohmann::json to_json(const Witness& w);
// Throws Internal with the reason if the witness does not re-verify.
void verify(const Witness& w);
bool verifies(const Witness& w, std::string* why = nullptr);

// The C1 evaluation: nullopt when the coefficients sum to one.
std::optional<Witness> scalar_sum_check(const LinComb& c);

// Cycle numbering, exposed for tests: per occurrence the numbers it
// receives, and per block the one or two tuples.
struct CycleNumbering {
  std::vector<std::vector<Index>> numbers;  // index 0 unused
  std::vector<std::vector<MultiIndex>> tuples;
  Index n = 0;
};
CycleNumbering cycle_numbering(const Sequent& s, const Linking& l, const SwitchingCycle& cyc);
// c must be MDNF; `term` names the cyclic linking, `cyc` one of its minimal cycles.
Witness cycle_witness(const LinComb& c, std::size_t term, const SwitchingCycle& cyc);

// Partial permutation from tuples (one exit position each) completed to a
// relabelled cycle tensor; exit values must be private to their tuple.
struct ExitTuple {
  MultiIndex vals;
  int exit = -1;
};
DeltaExpr complete_partial_permutation(const Semiring& sr, const std::vector<std::string>& names,
                                       const std::vector<ExitTuple>& tuples, Index n);
// Smallest n = 2^P - 1 the completion needs: labels below `next_label`, `powers` exponents per block.
Index completion_dimension(Index next_label, int powers);

Witness disconnect_witness(const LinComb& c);
Witness uniqueness_witness(const LinComb& c);
// nullopt = passes (single coefficient-one term). Throws OutsideTheory when
// the semiring is not zero-sum-free.
std::optional<Witness> mix_uniqueness_witness(const LinComb& c, RewriteTrace* trace = nullptr);
// Mix applied at every ⊗ (pre-order), leaving a ℘ of literals.
Normalized mix_all(const LinComb& c);
// c must be in mix normal form (see mix_normal_form), single term.
Witness mix_cycle_witness(const MixNormalized& m);

// Σ_{p : p(k) = v} c_p = [v == y_k] over the permutations p of [M].
struct ParEquation {
  int k = 0;
  Index v = 0;
  std::vector<int> perms;  // indices into par_permutations(M)
  Scalar rhs;
};
std::vector<std::vector<int>> par_permutations(int M);  // lexicographic, one-line notation, 1-based
std::vector<ParEquation> par_equations(const Semiring& sr, int M, const std::vector<Index>& y);
// Index of the first violated equation, or -1.
int first_violated(const Semiring& sr, const std::vector<ParEquation>& eqs, const std::vector<Scalar>& coeffs);

struct ZeroSumReport {
  LinComb comb;
  bool verified = false;
  nlohmann::json log;
};
// Throws NotApplicable when s has no additive inverse or is zero.
ZeroSumReport zero_sum_counterexample(const Semiring& sr, const Scalar& s);

struct Decision {
  enum class Verdict { Accept, Reject, OutsideTheory };
  Verdict verdict = Verdict::Accept;
  std::optional<Witness> witness;
  RewriteTrace trace;  // from the input sequent to the witness's sequent
  std::string reason;
  Linking accepted;
};
std::string verdict_name(Decision::Verdict v);
Decision decide(const LinComb& c, Mode mode);
// Runs one algorithm regardless of the pipeline, normalizing as it needs.
Witness forced_witness(const LinComb& c, WitnessKind kind, RewriteTrace* trace = nullptr);
nlohmann::json to_json(const Decision& d);

}  // namespace mllg
