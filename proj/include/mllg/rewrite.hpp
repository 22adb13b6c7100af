#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mllg/logic.hpp"
#include "mllg/proofnet.hpp"

namespace mllg {

// join merges formulas k and k+1 of the sequent into one ℘ (path [k]).
enum class Rule { wLL, wLR, wRL, wRR, assocL, assocR, sym, mix, join };

std::string rule_name(Rule r);
Rule parse_rule(const std::string& name);

struct RewriteStep {
  Rule rule;
  std::vector<int> path;
};

struct TraceEntry {
  RewriteStep step;
  std::vector<int> occ_map;  // occ_map[old occurrence] = new occurrence; entry 0 unused
};
using RewriteTrace = std::vector<TraceEntry>;

bool matches(const Sequent& s, const RewriteStep& step);
Sequent apply_step(const Sequent& s, const RewriteStep& step, std::vector<int>* occ_map = nullptr);
LinComb apply_step(const LinComb& c, const RewriteStep& step, std::vector<int>* occ_map = nullptr);

Linking transport(const Linking& l, const std::vector<int>& occ_map);
std::vector<int> compose(const RewriteTrace& trace, int literals);
LinComb replay(const LinComb& c, const RewriteTrace& trace);
// Moves the cycle's link steps through the trace and reroutes them in the
// final structure of `after` (term `term`).
std::optional<SwitchingCycle> transport_cycle(const SwitchingCycle& cyc, const RewriteTrace& trace, const LinComb& after,
                                              std::size_t term);

struct Normalized {
  LinComb comb;
  RewriteTrace trace;
};
Normalized normalize_mdnf(const LinComb& c);

struct CycleNormalized {
  LinComb comb;
  SwitchingCycle cycle;
  RewriteTrace trace;
};
// `cycle` lives in the structure of term `term`.
CycleNormalized normalize_preserving_cycle(const LinComb& c, std::size_t term, const SwitchingCycle& cycle);

// MDNF normal form that keeps term `term` cyclic: one plain step at a time,
// each followed by normalize_preserving_cycle. The plain normal form alone
// can make a cyclic structure acyclic.
CycleNormalized normalize_mdnf_keeping_cycle(const LinComb& c, std::size_t term, const SwitchingCycle& cycle);

struct MixNormalized {
  LinComb comb;
  SwitchingCycle cycle;
  RewriteTrace trace;
  int gamma = 0;  // one-literal items
  int delta = 0;  // two-literal ⊗ items
};
MixNormalized mix_normal_form(const LinComb& c);

// Γ ℘ Δ: a left-nested ℘ of literals followed by pairs (l ⊗ l).
bool is_mix_normal_shape(const Sequent& s, int* gamma = nullptr, int* delta = nullptr);

nlohmann::json to_json(const RewriteTrace& t, bool with_maps = false);

}  // namespace mllg
