#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <random>
#include <set>

#include "corpus.hpp"
#include "mllg/error.hpp"

using namespace mllg;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_sequent(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Input);
    return e.what();
  }
  return "";
}

// product over atoms of k! when an atom has k positive and k negative occurrences
std::uint64_t factorial_count(const Sequent& s) {
  std::map<std::string, std::pair<int, int>> pn;
  for (auto& o : s.occurrences()) (o.positive ? pn[o.atom].first : pn[o.atom].second)++;
  std::uint64_t out = 1;
  for (auto& [a, c] : pn) {
    if (c.first != c.second) return 0;
    for (int k = 2; k <= c.first; ++k) out *= k;
  }
  return out;
}

}  // namespace

TEST_CASE("parsing and printing") {
  Sequent s = parse_sequent("a * ~b | (c | ~d), e");
  REQUIRE(s.formulas.size() == 2);
  CHECK(s.formulas[0].kind == Formula::Kind::Par);
  CHECK(s.literal_count() == 5);
  CHECK(s.count(Formula::Kind::Tensor) == 1);
  CHECK(to_string(s) == "a*~b|(c|~d), e");
  CHECK(parse_sequent(to_string(s)) == s);
  // ⊗ binds tighter than ℘; both associate to the left
  CHECK(parse_sequent("a|b|c") == parse_sequent("(a|b)|c"));
  CHECK(parse_sequent("a*b|c") == parse_sequent("(a*b)|c"));
}

TEST_CASE("negation is pushed to the atoms") {
  CHECK(parse_sequent("~(a*~b)") == parse_sequent("~a|b"));
  CHECK(parse_sequent("~(a|b)") == parse_sequent("~a*~b"));
  CHECK(parse_sequent("~~a") == parse_sequent("a"));
}

TEST_CASE("syntax errors carry line and column") {
  CHECK(error_of("a | ") == "syntax error at line 1, column 5: unexpected end of input");
  CHECK(error_of("a\n| (b * )") == "syntax error at line 2, column 8: unexpected ')'");
  CHECK(error_of("(a | b") == "syntax error at line 1, column 7: expected ')'");
  CHECK(error_of("a b").find("column 3") != std::string::npos);
  CHECK(error_of("").find("empty sequent") != std::string::npos);
  CHECK(error_of("A").find("unexpected 'A'") != std::string::npos);
}

TEST_CASE("occurrences are numbered left to right across formulas") {
  auto occ = parse_sequent("a*~a, b|~b").occurrences();
  REQUIRE(occ.size() == 4);
  CHECK(occ[2].index == 3);
  CHECK(occ[2].atom == "b");
  CHECK(occ[3].path == std::vector<int>{1, 1});
  CHECK(index_names(parse_sequent("a*~a, b|~b")) == std::vector<std::string>{"i1", "j2", "i3", "j4"});
}

TEST_CASE("linking validation") {
  Sequent s = parse_sequent("a|~a|b|~b");
  CHECK(to_string(parse_links(s, "2-1, 3-4")) == "1-2,3-4");
  auto bad = [&](const char* t) { CHECK_THROWS_AS(parse_links(s, t), Error); };
  bad("1-2");          // 3 and 4 unlinked
  bad("1-4,3-2");      // different atoms
  bad("1-2,3-3");
  bad("1-2,3-5");
  bad("1-2,2-1,3-4");
  bad("1:2,3-4");
}

TEST_CASE("linking counts agree with the factorial formula and the enumeration") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    Sequent s = corpus::random_sequent(rng, 2 + trial % 7, 2);
    auto all = enumerate_linkings(s);
    std::set<Linking> uniq(all.begin(), all.end());
    CHECK(uniq.size() == all.size());
    CHECK(all.size() == factorial_count(s));
    CHECK(count_linkings(s) == factorial_count(s));
    for (auto& l : all) CHECK_NOTHROW(validate_linking(s, l));
  }
}

TEST_CASE("enumeration bound") {
  std::string big = "a";
  for (int k = 0; k < 9; ++k) big += "|a|~a";
  big += "|~a";
  try {
    enumerate_linkings(parse_sequent(big));
    FAIL("expected a limit error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Limit);
  }
}

TEST_CASE("MDNF recognition and blocks") {
  CHECK(is_mdnf(parse_sequent("a*~b | b | ~a*c*~c")));
  CHECK(!is_mdnf(parse_sequent("a*(b|~b)*~a")));
  auto b = blocks(parse_sequent("a*~b | b | ~a*c*~c"));
  CHECK(b == std::vector<std::vector<int>>{{1, 2}, {3}, {4, 5, 6}});
  CHECK_THROWS_AS(blocks(parse_sequent("a*(b|~b)*~a")), Error);
}

TEST_CASE("to_tensor agrees with the definition of the denotation") {
  std::mt19937_64 rng(4);
  for (const char* name : {"nat", "int", "bool"}) {
    const Semiring& sr = semiring(name);
    for (int trial = 0; trial < 60; ++trial) {
      Sequent s = corpus::random_balanced_sequent(rng, 2 + 2 * (trial % 3), 2, 1 + trial % 2);
      LinComb c = corpus::random_lincomb(rng, sr, s, 3, 2);
      for (Index n = 1; n <= 3; ++n) CHECK(to_tensor(c, n).densify() == corpus::dense_denotation(c, n));
    }
  }
}

TEST_CASE("combination json") {
  auto j = nlohmann::json::parse(R"({"semiring":"nat","sequent":"a|~a|a|~a",
    "terms":[{"coeff":2,"linking":[[1,2],[3,4]]},{"coeff":"1","linking":[[4,1],[3,2]]}]})");
  LinComb c = lincomb_from_json(j);
  CHECK(c.terms.size() == 2);
  CHECK(c.terms[1].linking.pairs == std::vector<std::pair<int, int>>{{1, 4}, {3, 2}});
  CHECK(lincomb_from_json(to_json(c)).terms[0].coeff == 2);
  auto dup = j;
  dup["terms"][1]["linking"] = {{1, 2}, {3, 4}};
  CHECK_THROWS_AS(lincomb_from_json(dup), Error);
  auto neg = j;
  neg["terms"][0]["coeff"] = -1;
  CHECK_THROWS_AS(lincomb_from_json(neg), Error);
  CHECK_THROWS_AS(lincomb_from_json(nlohmann::json::parse(R"({"semiring":"nat"})")), Error);
}
