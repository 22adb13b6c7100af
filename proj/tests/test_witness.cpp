#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <random>
#include <set>

#include "corpus.hpp"
#include "mllg/error.hpp"
#include "mllg/witness.hpp"

using namespace mllg;

namespace {

LinComb comb(const char* sr, const char* seq, const std::vector<std::pair<const char*, const char*>>& terms) {
  const Semiring& r = semiring(sr);
  Sequent s = parse_sequent(seq);
  std::vector<LinTerm> ts;
  for (auto& [c, l] : terms) ts.push_back(LinTerm{parse_scalar(r, c), parse_links(s, l)});
  return make_lincomb(r, s, ts);
}

// The contraction as a dense vector over its single open index, read at the probes.
std::vector<Scalar> probe_values(const Witness& w) {
  std::vector<Scalar> out;
  for (auto& p : w.probes) out.push_back(w.contraction->eval(p));
  return out;
}

bool is_open_link(const Witness& w) {
  REQUIRE(w.contraction.has_value());
  const DeltaExpr& e = *w.contraction;
  if (e.order() != 2) return false;
  return equivalent(e, DeltaExpr::link(e.semiring(), e.dim(), e.names()[0], e.names()[1]));
}

}  // namespace

TEST_CASE("witness kind names") {
  for (auto k : {WitnessKind::ScalarSum, WitnessKind::Cycle, WitnessKind::Disconnect, WitnessKind::Uniqueness,
                 WitnessKind::MixUniqueness, WitnessKind::MixCycle})
    CHECK(parse_witness_kind(witness_kind_name(k)) == k);
  CHECK(parse_witness_kind("mix-cycle") == WitnessKind::MixCycle);
  CHECK_THROWS_AS(parse_witness_kind("loop"), Error);
}

TEST_CASE("scalar sum") {
  CHECK(!scalar_sum_check(comb("nat", "a|~a", {{"1", "1-2"}})).has_value());
  CHECK(!scalar_sum_check(comb("int", "a|~a|a|~a", {{"2", "1-2,3-4"}, {"-1", "1-4,3-2"}})).has_value());
  auto w = scalar_sum_check(comb("nat", "a|~a|a|~a", {{"1", "1-2,3-4"}, {"1", "1-4,3-2"}}));
  REQUIRE(w.has_value());
  CHECK(w->sum == 2);
  CHECK(verifies(*w));
  CHECK(to_json(*w)["kind"] == "scalar_sum");
}

TEST_CASE("cycle witness on a single tensor block") {
  LinComb c = comb("nat", "a*~a", {{"1", "1-2"}});
  auto cyc = find_minimal_cycle(c.sequent, c.terms[0].linking);
  REQUIRE(cyc.has_value());
  Witness w = cycle_witness(c, 0, *cyc);
  CHECK(w.n == 2);
  CHECK(w.block == 0);
  CHECK(w.probes == std::vector<MultiIndex>{{1, 1}, {2, 2}});
  CHECK(probe_values(w) == std::vector<Scalar>{1, 1});
  CHECK(verifies(w));
}

TEST_CASE("numbering gives each number to exactly the two ends of a link") {
  int cyclic = 0;
  corpus::for_each_sequent(6, [&](const Sequent& s0) {
    if (cyclic >= 400 || !is_mdnf(s0)) return;
    for (auto& l : enumerate_linkings(s0)) {
      auto cyc = find_minimal_cycle(s0, l);
      if (!cyc) continue;
      ++cyclic;
      CycleNumbering num = cycle_numbering(s0, l, *cyc);
      std::map<Index, std::set<int>> holders;
      for (int o = 1; o < static_cast<int>(num.numbers.size()); ++o) {
        CHECK(!num.numbers[o].empty());
        for (Index x : num.numbers[o]) holders[x].insert(o);
      }
      for (auto& [x, occ] : holders) {
        REQUIRE(occ.size() == 2);
        CHECK(l.partner(*occ.begin()) == *occ.rbegin());
      }
    }
  });
  CHECK(cyclic > 0);
}

TEST_CASE("three-block cycle contracts to two constant deltas") {
  LinComb c = comb("nat", "a*~b | b*~c | c*~a", {{"1", "1-6,3-2,5-4"}});
  auto cyc = find_minimal_cycle(c.sequent, c.terms[0].linking);
  REQUIRE(cyc.has_value());
  Witness w = cycle_witness(c, 0, *cyc);
  CHECK(verifies(w));
  CHECK(w.probes.size() == 2);
  CHECK(w.probes[0] != w.probes[1]);
  for (auto& v : probe_values(w)) CHECK(v == 1);
  // a partial permutation over the chosen block with exactly the two probes set
  CHECK(w.contraction->densify().nnz() == 2);
}

TEST_CASE("completion of partial permutations") {
  const Semiring& sr = semiring("nat");
  DeltaExpr one = complete_partial_permutation(sr, {"x", "y"}, {ExitTuple{{1, 1}, 1}}, 3);
  CHECK(one.eval({1, 1}) == 1);
  CHECK(is_full_permutation(one.densify()));

  Index n = completion_dimension(9, 2);
  CHECK(n == 511);
  DeltaExpr b4 = complete_partial_permutation(sr, {"x", "y"}, {ExitTuple{{3, 6}, 1}, ExitTuple{{2, 8}, 1}}, n);
  CHECK(b4.eval({3, 6}) == 1);
  CHECK(b4.eval({2, 8}) == 1);
  CHECK(is_full_permutation(b4.densify()));
  CHECK(structurally_full_permutation(b4));

  DeltaExpr plain = complete_partial_permutation(sr, {"x", "y", "z"}, {}, 4);
  CHECK(equivalent(plain, DeltaExpr::cycle(sr, 4, {"x", "y", "z"}, 0)));

  CHECK_THROWS_AS(complete_partial_permutation(sr, {"x", "y"}, {ExitTuple{{1, 2}, 1}, ExitTuple{{2, 2}, 0}}, 7), Error);
  CHECK_THROWS_AS(complete_partial_permutation(sr, {"x", "y"}, {ExitTuple{{1, 1}, -1}}, 3), Error);
  CHECK_THROWS_AS(completion_dimension(70, 1), Error);
}

TEST_CASE("disconnect witness on two separate identities") {
  LinComb c = comb("nat", "a|~a|a|~a", {{"1", "1-2,3-4"}});
  Witness w = disconnect_witness(c);
  CHECK(w.kind == WitnessKind::Disconnect);
  REQUIRE(w.contraction.has_value());
  CHECK(w.contraction->is_zero());
  CHECK(w.open_names == std::vector<std::string>{"i1"});
  CHECK(verifies(w));
}

TEST_CASE("disconnect witnesses on random disconnected acyclic structures") {
  std::mt19937_64 rng(31);
  int found = 0;
  for (int trial = 0; trial < 400 && found < 40; ++trial) {
    Sequent s = corpus::random_balanced_sequent(rng, 6, 2, 1);
    Normalized nm = normalize_mdnf(make_lincomb(semiring("nat"), s, {LinTerm{1, enumerate_linkings(s)[0]}}));
    const Sequent& m = nm.comb.sequent;
    for (auto& l : enumerate_linkings(m)) {
      if (has_switching_cycle(m, l) || first_switching_connected(m, l)) continue;
      ++found;
      Witness w = disconnect_witness(make_lincomb(semiring("nat"), m, {LinTerm{1, l}}));
      CHECK(w.contraction->is_zero());
      CHECK(verifies(w));
      break;
    }
  }
  CHECK(found > 0);
}

TEST_CASE("uniqueness witness on the two-net example") {
  // blocks a, ~a*~a, a with the two crossings between them
  LinComb c = comb("nat", "a | ~a*~a | a", {{"1", "1-2,4-3"}, {"1", "1-3,4-2"}});
  Witness w = uniqueness_witness(c);
  CHECK(w.block == 2);
  CHECK(w.probes.size() == 2);
  CHECK(probe_values(w) == std::vector<Scalar>{1, 1});
  CHECK(w.contraction->densify().nnz() == 2);
  CHECK(verifies(w));

  LinComb r = comb("rat", "a | ~a*~a | a", {{"1/3", "1-2,4-3"}, {"2/3", "1-3,4-2"}});
  Witness wr = uniqueness_witness(r);
  auto vals = probe_values(wr);
  CHECK(std::multiset<Scalar>(vals.begin(), vals.end()) == std::multiset<Scalar>{Scalar(1, 3), Scalar(2, 3)});
  CHECK(verifies(wr));
}

TEST_CASE("uniqueness witness needs two terms and a leaf") {
  CHECK_THROWS_AS(uniqueness_witness(comb("nat", "a | ~a", {{"1", "1-2"}})), Error);
  try {
    uniqueness_witness(comb("nat", "a*~a | a*~a", {{"1", "1-4,3-2"}, {"1", "1-2,3-4"}}));
  } catch (const Error& e) {
    CHECK(e.kind() != ErrorKind::Internal);
  }
}

TEST_CASE("mix uniqueness") {
  LinComb half = comb("nonneg_rat", "a|~a|a|~a", {{"1/2", "1-2,3-4"}, {"1/2", "1-4,3-2"}});
  auto w = mix_uniqueness_witness(half);
  REQUIRE(w.has_value());
  CHECK(verifies(*w));
  bool saw_half = false;
  DenseTensor dense = w->contraction->densify();
  for (auto& [idx, v] : dense.entries()) saw_half = saw_half || v == Scalar(1, 2);
  CHECK(saw_half);
  CHECK(!mix_uniqueness_witness(comb("nat", "a|~a|a|~a", {{"1", "1-2,3-4"}})).has_value());
  try {
    mix_uniqueness_witness(comb("rat", "a|~a|a|~a", {{"1/2", "1-2,3-4"}, {"1/2", "1-4,3-2"}}));
    FAIL("expected an outside-theory error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutsideTheory);
  }
}

TEST_CASE("Par_3 equations with y = (1,2,3) admit only the identity") {
  const Semiring& nat = semiring("nat");
  auto perms = par_permutations(3);
  REQUIRE(perms.size() == 6);
  CHECK(perms[0] == std::vector<int>{1, 2, 3});
  CHECK(perms[5] == std::vector<int>{3, 2, 1});
  auto eqs = par_equations(nat, 3, {1, 2, 3});
  CHECK(eqs.size() == 9);
  std::vector<Scalar> id = {1, 0, 0, 0, 0, 0};
  CHECK(first_violated(nat, eqs, id) == -1);
  // every other 0/1 choice with one or two terms breaks an equation
  for (int a = 0; a < 6; ++a)
    for (int b = a; b < 6; ++b) {
      std::vector<Scalar> cs(6, 0);
      cs[a] = 1;
      cs[b] = 1;
      if (a == 0 && b == 0) continue;
      CHECK(first_violated(nat, eqs, cs) >= 0);
    }
}

TEST_CASE("mix cycle witnesses") {
  for (auto [seq, links] : {std::pair{"a*~a", "1-2"}, std::pair{"a*~b | b*~c | c*~a", "1-6,3-2,5-4"},
                            std::pair{"b|~b|a*~a", "1-2,3-4"}}) {
    LinComb c = comb("nat", seq, {{"1", links}});
    MixNormalized m = mix_normal_form(c);
    Witness w = mix_cycle_witness(m);
    CHECK(w.kind == WitnessKind::MixCycle);
    CHECK(w.n == 2);
    CHECK(is_open_link(w));
    CHECK(verifies(w));
  }
}

TEST_CASE("zero-sum counterexample") {
  auto r = zero_sum_counterexample(semiring("int"), 1);
  CHECK(r.verified);
  std::vector<Scalar> got;
  for (auto& t : r.comb.terms) got.push_back(t.coeff);
  CHECK(got == std::vector<Scalar>{2, 1, 1, -1, -1, -1});
  CHECK(to_string(r.comb.sequent) == "a|~a|a|~a|a|~a");

  auto m = zero_sum_counterexample(semiring("int"), -1);
  got.clear();
  Scalar sum = 0;
  for (auto& t : m.comb.terms) {
    got.push_back(t.coeff);
    sum += t.coeff;
  }
  CHECK(got == std::vector<Scalar>{0, -1, -1, 1, 1, 1});
  CHECK(sum == 1);

  try {
    zero_sum_counterexample(semiring("nat"), 1);
    FAIL("expected not-applicable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotApplicable);
  }
  CHECK_THROWS_AS(zero_sum_counterexample(semiring("int"), 0), Error);
}

TEST_CASE("decide examples") {
  Decision a = decide(comb("nat", "a|~a", {{"1", "1-2"}}), Mode::Mll);
  CHECK(a.verdict == Decision::Verdict::Accept);

  Decision cyc = decide(comb("nat", "(a*~a)|(a*~a)", {{"1", "1-4,3-2"}}), Mode::Mll);
  REQUIRE(cyc.verdict == Decision::Verdict::Reject);
  CHECK(cyc.witness->kind == WitnessKind::Cycle);

  Decision mix = decide(comb("nat", "a|~a|a|~a", {{"1", "1-2,3-4"}}), Mode::Mix);
  CHECK(mix.verdict == Decision::Verdict::Accept);
  Decision dis = decide(comb("nat", "a|~a|a|~a", {{"1", "1-2,3-4"}}), Mode::Mll);
  REQUIRE(dis.verdict == Decision::Verdict::Reject);
  CHECK(dis.witness->kind == WitnessKind::Disconnect);

  Decision out = decide(comb("rat", "a|~a|a|~a", {{"1/2", "1-2,3-4"}, {"1/2", "1-4,3-2"}}), Mode::Mix);
  CHECK(out.verdict == Decision::Verdict::OutsideTheory);

  Decision two = decide(comb("nat", "a|~a|a|~a", {{"1", "1-2,3-4"}, {"1", "1-4,3-2"}}), Mode::Mll);
  REQUIRE(two.verdict == Decision::Verdict::Reject);
  CHECK(two.witness->kind == WitnessKind::ScalarSum);

  // zero terms are dropped before anything else
  Decision z = decide(comb("nat", "a | ~a*a | ~a", {{"0", "1-4,3-2"}, {"1", "1-2,3-4"}}), Mode::Mll);
  CHECK(z.verdict == Decision::Verdict::Accept);
  CHECK(to_json(z)["verdict"] == "accept");
}

TEST_CASE("a rejected decision replays to the witness sequent") {
  LinComb c = comb("nat", "a*(~a|a)|~a", {{"1", "1-2,3-4"}});
  Decision d = decide(c, Mode::Mll);
  REQUIRE(d.verdict == Decision::Verdict::Reject);
  LinComb again = replay(c, d.trace);
  CHECK(again.sequent == d.witness->comb.sequent);
  CHECK(again.terms[0].linking == d.witness->comb.terms[0].linking);
}

TEST_CASE("tampered witnesses fail verification") {
  LinComb c = comb("nat", "a*~a", {{"1", "1-2"}});
  Witness w = cycle_witness(c, 0, *find_minimal_cycle(c.sequent, c.terms[0].linking));
  Witness bad = w;
  bad.probes[1] = bad.probes[0];
  CHECK(!verifies(bad));
  Witness bad2 = w;
  bad2.contraction = DeltaExpr::zero(c.sr[0], w.n, w.contraction->names());
  std::string why;
  CHECK(!verifies(bad2, &why));
  CHECK(!why.empty());
  CHECK_THROWS_AS(verify(bad2), Error);
}

TEST_CASE("forced witnesses check their preconditions") {
  auto not_applicable = [](const LinComb& c, WitnessKind k) {
    try {
      forced_witness(c, k);
      return false;
    } catch (const Error& e) {
      return e.kind() == ErrorKind::NotApplicable;
    }
  };
  LinComb net = comb("nat", "a|~a", {{"1", "1-2"}});
  CHECK(not_applicable(net, WitnessKind::ScalarSum));
  CHECK(not_applicable(net, WitnessKind::Cycle));
  CHECK(not_applicable(net, WitnessKind::Uniqueness));
  CHECK(not_applicable(net, WitnessKind::MixUniqueness));
  CHECK(not_applicable(comb("nat", "a*~a", {{"1", "1-2"}}), WitnessKind::Disconnect));
  Witness w = forced_witness(comb("nat", "a*~a", {{"1", "1-2"}}), WitnessKind::MixCycle);
  CHECK(verifies(w));
}
