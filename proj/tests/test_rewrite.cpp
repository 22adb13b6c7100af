#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "corpus.hpp"
#include "mllg/error.hpp"
#include "mllg/rewrite.hpp"

using namespace mllg;

namespace {

std::string rewritten(const char* seq, Rule r, std::vector<int> path) {
  return to_string(apply_step(parse_sequent(seq), RewriteStep{r, std::move(path)}));
}

// The combination after the trace has the same denotation, read through the occurrence map.
void same_denotation(const LinComb& before, const LinComb& after, const RewriteTrace& trace) {
  const int L = before.sequent.literal_count();
  auto map = compose(trace, L);
  std::vector<std::string> old_names, new_names;
  for (int o = 1; o <= L; ++o) old_names.push_back("x" + std::to_string(map[o]));
  for (int o = 1; o <= L; ++o) new_names.push_back("x" + std::to_string(o));
  for (Index n = 1; n <= 2; ++n) {
    DeltaExpr a = to_tensor(before, n).renamed(old_names).reordered(new_names);
    DeltaExpr b = to_tensor(after, n).renamed(new_names);
    CHECK(equivalent(a, b));
  }
}

LinComb single(const char* seq, const char* links) {
  Sequent s = parse_sequent(seq);
  return make_lincomb(semiring("nat"), s, {LinTerm{1, parse_links(s, links)}});
}

}  // namespace

TEST_CASE("rule names round trip") {
  for (Rule r : {Rule::wLL, Rule::wLR, Rule::wRL, Rule::wRR, Rule::assocL, Rule::assocR, Rule::sym, Rule::mix, Rule::join})
    CHECK(parse_rule(rule_name(r)) == r);
  CHECK_THROWS_AS(parse_rule("distribute"), Error);
}

TEST_CASE("each rule on a small formula") {
  CHECK(rewritten("a*(b|c)", Rule::wLL, {0}) == "a*b|c");
  CHECK(rewritten("a*(b|c)", Rule::wLR, {0}) == "a*c|b");
  CHECK(rewritten("(a|b)*c", Rule::wRL, {0}) == "b|a*c");
  CHECK(rewritten("(a|b)*c", Rule::wRR, {0}) == "a|b*c");
  CHECK(rewritten("a|(b|c)", Rule::assocL, {0}) == "a|b|c");
  CHECK(rewritten("(a*b)*c", Rule::assocR, {0}) == "a*(b*c)");
  CHECK(rewritten("a*b", Rule::sym, {0}) == "b*a");
  CHECK(rewritten("a*b", Rule::mix, {0}) == "a|b");
  CHECK(rewritten("a, b*c", Rule::join, {0}) == "a|b*c");
  CHECK(rewritten("d*((a|b)*c)", Rule::wRR, {0, 1}) == "d*(a|b*c)");
}

TEST_CASE("rules refuse to apply where they do not match") {
  Sequent s = parse_sequent("a*b, c");
  CHECK(!matches(s, RewriteStep{Rule::wLL, {0}}));
  CHECK(!matches(s, RewriteStep{Rule::join, {1}}));
  CHECK(matches(s, RewriteStep{Rule::join, {0}}));
  CHECK_THROWS_AS(apply_step(s, RewriteStep{Rule::assocL, {0}}), Error);
  CHECK_THROWS_AS(apply_step(s, RewriteStep{Rule::sym, {0, 0}}), Error);
}

TEST_CASE("occurrence maps follow the literals") {
  std::vector<int> map;
  Sequent s = parse_sequent("(a|b)*c");
  Sequent t = apply_step(s, RewriteStep{Rule::wRL, {0}}, &map);
  auto before = s.occurrences(), after = t.occurrences();
  for (int o = 1; o <= 3; ++o) CHECK(after[map[o] - 1].atom == before[o - 1].atom);
  CHECK(map == std::vector<int>{0, 2, 1, 3});
}

TEST_CASE("weak distributivity keeps nets nets") {
  std::mt19937_64 rng(17);
  const Rule rules[] = {Rule::wLL, Rule::wLR, Rule::wRL, Rule::wRR, Rule::assocL, Rule::assocR, Rule::sym};
  int tried = 0;
  for (int trial = 0; trial < 400; ++trial) {
    Sequent s = corpus::random_balanced_sequent(rng, 6, 2, 1);
    auto ls = enumerate_linkings(s);
    for (Rule r : rules) {
      // first matching position in pre-order
      std::vector<std::vector<int>> todo{{0}};
      while (!todo.empty()) {
        auto p = todo.back();
        todo.pop_back();
        const Formula& f = subformula(s, p);
        if (f.is_lit()) continue;
        for (int k : {1, 0}) {
          auto q = p;
          q.push_back(k);
          todo.push_back(q);
        }
        RewriteStep step{r, p};
        if (!matches(s, step)) continue;
        std::vector<int> map;
        Sequent t = apply_step(s, step, &map);
        for (auto& l : ls) {
          Linking m = transport(l, map);
          if (is_mll_net(s, l)) CHECK(is_mll_net(t, m));
          if (is_mix_net(s, l)) CHECK(is_mix_net(t, m));
          if (r == Rule::assocL || r == Rule::assocR || r == Rule::sym) {
            CHECK(is_mll_net(s, l) == is_mll_net(t, m));
            CHECK(is_mix_net(s, l) == is_mix_net(t, m));
          }
          ++tried;
        }
        break;
      }
    }
  }
  CHECK(tried > 1000);
}

TEST_CASE("normalize_mdnf reaches MDNF and replays") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    int L = 2 + 2 * (trial % 4);
    Sequent s = corpus::random_balanced_sequent(rng, L, 2, std::min(L, 1 + trial % 3));
    LinComb c = corpus::random_lincomb(rng, semiring("nat"), s, 3, 3);
    Normalized nm = normalize_mdnf(c);
    CHECK(is_mdnf(nm.comb.sequent));
    CHECK(nm.comb.sequent.literal_count() == s.literal_count());
    LinComb again = replay(c, nm.trace);
    CHECK(again.sequent == nm.comb.sequent);
    for (std::size_t t = 0; t < c.terms.size(); ++t) {
      CHECK(again.terms[t].linking == nm.comb.terms[t].linking);
      CHECK(again.terms[t].coeff == c.terms[t].coeff);
    }
    same_denotation(c, nm.comb, nm.trace);
  }
}

TEST_CASE("plain MDNF can break a switching cycle; the guided variant keeps it") {
  LinComb c = single("a|(a|a*((~a|~a)*~a))", "1-4,2-5,3-6");
  REQUIRE(has_switching_cycle(c.sequent, c.terms[0].linking));
  // the cycle 3 -> 6 runs through ⊗ nodes only
  auto cyc = find_minimal_cycle(c.sequent, c.terms[0].linking);
  REQUIRE(cyc.has_value());

  LinComb step1 = apply_step(c, RewriteStep{Rule::wRR, {0, 1, 1, 1}});
  LinComb step2 = apply_step(step1, RewriteStep{Rule::wLL, {0, 1, 1}});
  CHECK(to_string(step2.sequent) == "a|(a|(a*~a|~a*~a))");
  auto oracle = corpus::danos_regnier(step2.sequent, step2.terms[0].linking);
  CHECK(oracle.acyclic);
  CHECK(oracle.connected);

  CycleNormalized kept = normalize_mdnf_keeping_cycle(c, 0, *cyc);
  CHECK(is_mdnf(kept.comb.sequent));
  CHECK(has_switching_cycle(kept.comb.sequent, kept.comb.terms[0].linking));
  CHECK(route_cycle(build_structure(kept.comb.sequent, kept.comb.terms[0].linking), kept.cycle.steps).has_value());
  same_denotation(c, kept.comb, kept.trace);
}

TEST_CASE("cycle-preserving normalization clears pars from the cycle") {
  std::mt19937_64 rng(29);
  int cyclic = 0;
  for (int trial = 0; trial < 200 && cyclic < 60; ++trial) {
    Sequent s = corpus::random_balanced_sequent(rng, 6, 1, 1);
    for (auto& l : enumerate_linkings(s)) {
      auto cyc = find_minimal_cycle(s, l);
      if (!cyc) continue;
      ++cyclic;
      LinComb c = make_lincomb(semiring("nat"), s, {LinTerm{1, l}});
      CycleNormalized cn = normalize_preserving_cycle(c, 0, *cyc);
      StructureGraph g = build_structure(cn.comb.sequent, cn.comb.terms[0].linking);
      CHECK(par_vertices(g, cn.cycle) == 0);
      CHECK(route_cycle(g, cn.cycle.steps).has_value());
      break;
    }
  }
  CHECK(cyclic > 0);
}

TEST_CASE("mix normal form") {
  LinComb c = single("a*~a", "1-2");
  MixNormalized m = mix_normal_form(c);
  int gamma = -1, delta = -1;
  CHECK(is_mix_normal_shape(m.comb.sequent, &gamma, &delta));
  CHECK(gamma == m.gamma);
  CHECK(delta == m.delta);
  CHECK(delta == 1);

  LinComb big = single("(a*~b)*(b*~a) | c | ~c", "1-4,3-2,5-6");
  MixNormalized mb = mix_normal_form(big);
  CHECK(is_mix_normal_shape(mb.comb.sequent));
  CHECK(has_switching_cycle(mb.comb.sequent, mb.comb.terms[0].linking));
  CHECK(mb.gamma + 2 * mb.delta == 6);
  same_denotation(big, mb.comb, mb.trace);
  CHECK_THROWS_AS(mix_normal_form(single("a|~a", "1-2")), Error);
}

TEST_CASE("trace json") {
  Normalized nm = normalize_mdnf(single("a*(~a|b)|~b", "1-2,3-4"));
  auto j = to_json(nm.trace, true);
  REQUIRE(j.is_array());
  CHECK(j.size() == nm.trace.size());
  CHECK(j[0].contains("rule"));
}
