#include <algorithm>

#include "mllg/error.hpp"
#include "mllg/witness.hpp"

namespace mllg {

std::string verdict_name(Decision::Verdict v) {
  switch (v) {
    case Decision::Verdict::Accept: return "accept";
    case Decision::Verdict::Reject: return "reject";
    case Decision::Verdict::OutsideTheory: return "outside_theory";
  }
  return "?";
}

namespace {

LinComb drop_zero_terms(const LinComb& c) {
  LinComb out = c;
  out.terms.clear();
  for (auto& t : c.terms)
    if (!c.sr->is_zero(t.coeff)) out.terms.push_back(t);
  return out;
}

void append(RewriteTrace& to, const RewriteTrace& from) { to.insert(to.end(), from.begin(), from.end()); }

// index of the lexicographically least cyclic linking, or -1
int least_cyclic(const LinComb& c) {
  int best = -1;
  for (int t = 0; t < static_cast<int>(c.terms.size()); ++t)
    if (has_switching_cycle(c.sequent, c.terms[t].linking) &&
        (best < 0 || c.terms[t].linking < c.terms[best].linking))
      best = t;
  return best;
}

struct CycleRun {
  LinComb comb;
  std::size_t term = 0;
  SwitchingCycle cycle;
  RewriteTrace trace;
};

// Brings the sequent to MDNF while keeping a minimal cycle of term t.
CycleRun cycle_to_mdnf(const LinComb& c, std::size_t t) {
  auto cyc = find_minimal_cycle(c.sequent, c.terms[t].linking);
  require(cyc.has_value(), "decide: cyclic term without a minimal cycle");
  CycleNormalized cn = normalize_mdnf_keeping_cycle(c, t, *cyc);
  CycleRun out;
  out.comb = cn.comb;
  out.term = t;
  out.trace = cn.trace;
  // a minimal cycle of the normal form visits each block at most once
  auto again = find_minimal_cycle(out.comb.sequent, out.comb.terms[t].linking);
  require(again.has_value(), "decide: the normal form lost its cycle");
  out.cycle = *again;
  return out;
}

Witness cycle_path(const LinComb& c, RewriteTrace& trace) {
  int t = least_cyclic(c);
  if (t < 0) fail(ErrorKind::NotApplicable, "cycle witness: every linking is acyclic");
  CycleRun r = cycle_to_mdnf(c, static_cast<std::size_t>(t));
  append(trace, r.trace);
  return cycle_witness(r.comb, r.term, r.cycle);
}

Witness mix_cycle_path(const LinComb& c, RewriteTrace& trace) {
  if (c.terms.size() != 1) fail(ErrorKind::NotApplicable, "mix cycle witness: needs a single nonzero term");
  if (!has_switching_cycle(c.sequent, c.terms[0].linking)) fail(ErrorKind::NotApplicable, "mix cycle witness: the linking is acyclic");
  CycleRun r = cycle_to_mdnf(c, 0);
  MixNormalized mn = mix_normal_form(r.comb);
  append(trace, r.trace);
  append(trace, mn.trace);
  return mix_cycle_witness(mn);
}

Witness disconnect_path(const LinComb& c, RewriteTrace& trace) {
  Normalized nm = normalize_mdnf(c);
  append(trace, nm.trace);
  return disconnect_witness(nm.comb);
}

Witness uniqueness_path(const LinComb& c, RewriteTrace& trace) {
  Normalized nm = normalize_mdnf(c);
  append(trace, nm.trace);
  return uniqueness_witness(nm.comb);
}

}  // namespace

Decision decide(const LinComb& c0, Mode mode) {
  validate(c0);
  Decision d;
  if (auto w = scalar_sum_check(c0)) {
    d.verdict = Decision::Verdict::Reject;
    d.reason = w->violation;
    d.witness = std::move(w);
    return d;
  }
  LinComb c = drop_zero_terms(c0);
  require(!c.terms.empty(), "decide: coefficients sum to one but every term is zero");
  auto reject = [&](Witness w) {
    verify(w);
    d.verdict = Decision::Verdict::Reject;
    d.reason = w.violation;
    d.witness = std::move(w);
    return d;
  };

  bool cyclic = least_cyclic(c) >= 0;
  if (cyclic && mode == Mode::Mll) return reject(cycle_path(c, d.trace));
  if (cyclic && c.terms.size() == 1) return reject(mix_cycle_path(c, d.trace));

  if (mode == Mode::Mll) {
    for (auto& t : c.terms)
      if (!first_switching_connected(c.sequent, t.linking)) return reject(disconnect_path(c, d.trace));
  }

  if (c.terms.size() >= 2) {
    if (mode == Mode::Mll) return reject(uniqueness_path(c, d.trace));
    if (!is_zero_sum_free(*c.sr)) {
      d.verdict = Decision::Verdict::OutsideTheory;
      d.reason = "several linkings under Mix over '" + c.sr->name +
                 "', which is not zero-sum-free; the glued model is only known to be complete for zero-sum-free semirings";
      return d;
    }
    RewriteTrace tr;
    auto w = mix_uniqueness_witness(c, &tr);
    require(w.has_value(), "decide: several nonzero terms passed the S test");
    append(d.trace, tr);
    return reject(std::move(*w));
  }

  d.verdict = Decision::Verdict::Accept;
  d.accepted = c.terms[0].linking;
  d.reason = mode == Mode::Mll ? "a single MLL proof net with coefficient one" : "a single MLL+Mix proof net with coefficient one";
  return d;
}

Witness forced_witness(const LinComb& c0, WitnessKind kind, RewriteTrace* trace) {
  validate(c0);
  RewriteTrace local;
  RewriteTrace& tr = trace ? *trace : local;
  tr.clear();
  if (kind == WitnessKind::ScalarSum) {
    auto w = scalar_sum_check(c0);
    if (!w) fail(ErrorKind::NotApplicable, "scalar-sum witness: the coefficients sum to one");
    return *w;
  }
  LinComb c = drop_zero_terms(c0);
  if (c.terms.empty()) fail(ErrorKind::NotApplicable, "witness: no nonzero term");
  switch (kind) {
    case WitnessKind::Cycle: return cycle_path(c, tr);
    case WitnessKind::MixCycle: return mix_cycle_path(c, tr);
    case WitnessKind::Disconnect:
      for (auto& t : c.terms)
        if (has_switching_cycle(c.sequent, t.linking))
          fail(ErrorKind::NotApplicable, "disconnect witness: a linking is cyclic");
      return disconnect_path(c, tr);
    case WitnessKind::Uniqueness:
      if (c.terms.size() < 2) fail(ErrorKind::NotApplicable, "uniqueness witness: needs two nonzero terms");
      for (auto& t : c.terms)
        if (!is_mll_net(c.sequent, t.linking))
          fail(ErrorKind::NotApplicable, "uniqueness witness: every linking must be an MLL proof net");
      return uniqueness_path(c, tr);
    case WitnessKind::MixUniqueness: {
      auto w = mix_uniqueness_witness(c, &tr);
      if (!w) fail(ErrorKind::NotApplicable, "mix uniqueness witness: a single coefficient-one term passes");
      return *w;
    }
    default: break;
  }
  fail(ErrorKind::Internal, "forced_witness: unhandled kind");
}

nlohmann::json to_json(const Decision& d) {
  nlohmann::json j;
  j["verdict"] = verdict_name(d.verdict);
  j["reason"] = d.reason;
  if (d.verdict == Decision::Verdict::Accept) j["linking"] = to_json(d.accepted);
  if (d.witness) j["witness"] = to_json(*d.witness);
  if (!d.trace.empty()) j["trace"] = to_json(d.trace);
  return j;
}

}  // namespace mllg
