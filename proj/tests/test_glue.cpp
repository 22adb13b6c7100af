#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "corpus.hpp"
#include "mllg/error.hpp"
#include "mllg/glue.hpp"
#include "mllg/proofnet.hpp"

using namespace mllg;

namespace {

const Semiring& nat() { return semiring("nat"); }

// 0/1 tensors with at most (exactly) one 1 in every fiber, found by listing all supports.
std::vector<DenseTensor> brute_perm(int order, Index n, bool full) {
  std::vector<MultiIndex> cells;
  for_each_index(order, n, [&](const MultiIndex& m) { cells.push_back(m); });
  std::vector<DenseTensor> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells.size()); ++mask) {
    DenseTensor t(nat(), order, n);
    for (std::size_t k = 0; k < cells.size(); ++k)
      if (mask >> k & 1) t.set(cells[k], 1);
    bool ok = true;
    for (int pos = 0; pos < order && ok; ++pos)
      for_each_index(order - 1, n, [&](const MultiIndex& rest) {
        int ones = 0;
        for (Index v = 1; v <= n; ++v) {
          MultiIndex at = rest;
          at.insert(at.begin() + pos, v);
          ones += t.at(at) != 0;
        }
        if (ones > 1 || (full && ones != 1)) ok = false;
      });
    if (ok) out.push_back(t);
  }
  return out;
}

}  // namespace

TEST_CASE("test objects") {
  auto a2 = test_object(nat(), Family::A, 2);
  CHECK(same_set(a2.values, {DenseTensor::delta(nat(), 2, {1}), DenseTensor::delta(nat(), 2, {2}), DenseTensor(nat(), 1, 2)}));
  CHECK(same_set(a2.covalues, a2.values));
  auto c1 = test_object(nat(), Family::C1, 1);
  CHECK(same_set(c1.values, {DenseTensor::scalar(nat(), 1, 1)}) == (c1.order == 0));
  auto s3 = test_object(nat(), Family::S, 3);
  CHECK(same_set(s3.covalues, {DenseTensor::ones(nat(), 1, 3)}));
  CHECK(s3.values.size() == 3);
  auto d = test_object(nat(), Family::D, 2);
  CHECK(same_set(d.values, {DenseTensor::delta(nat(), 2, {1})}));
  CHECK(same_set(d.covalues, d.values));
  CHECK_THROWS_AS(test_object(nat(), Family::D, 3), Error);
  CHECK_THROWS_AS(test_object(nat(), Family::C1, 2), Error);
  CHECK_THROWS_AS(test_object(nat(), Family::A, 0), Error);
}

TEST_CASE("focused families: every value meets every covalue in one") {
  for (auto [f, n] : {std::pair{Family::S, Index{3}}, std::pair{Family::D, Index{2}}, std::pair{Family::C1, Index{1}}}) {
    auto o = test_object(nat(), f, n);
    for (auto& u : o.values)
      for (auto& x : o.covalues) {
        std::vector<std::pair<int, int>> pairing;
        for (int k = 0; k < u.order(); ++k) pairing.push_back({k, k});
        CHECK(contract(u, x, pairing) == DenseTensor::scalar(nat(), n, 1));
      }
  }
}

TEST_CASE("permutation enumerations against brute force") {
  for (int order = 1; order <= 3; ++order)
    for (Index n = 1; n <= 2; ++n) {
      CHECK(same_set(enumerate_perm(nat(), order, n), brute_perm(order, n, true)));
      CHECK(same_set(enumerate_pperm(nat(), order, n), brute_perm(order, n, false)));
    }
  CHECK(enumerate_perm(nat(), 2, 2).size() == 2);
  CHECK(enumerate_pperm(nat(), 2, 2).size() == 7);
  CHECK(enumerate_perm(nat(), 3, 2).size() == 2);
  CHECK(enumerate_perm(nat(), 2, 3).size() == 6);
}

TEST_CASE("glued tensor, dual and par") {
  auto c2 = test_object(nat(), Family::C, 2);
  auto cc = glued_tensor(c2, c2);
  CHECK(same_set(cc.covalues, enumerate_perm(nat(), 2, 2)));
  CHECK(cc.values.size() == 4);
  auto a2 = test_object(nat(), Family::A, 2);
  CHECK(same_set(glued_tensor(a2, a2).covalues, enumerate_pperm(nat(), 2, 2)));
  auto dd = glued_dual(glued_dual(c2));
  CHECK(same_set(dd.values, c2.values));
  CHECK(same_set(dd.covalues, c2.covalues));
  auto p = glued_par(c2, c2);
  CHECK(same_set(p.values, enumerate_perm(nat(), 2, 2)));
}

TEST_CASE("membership examples") {
  for (Index n = 1; n <= 3; ++n) {
    Sequent s = parse_sequent("a|~a");
    auto shape = MdnfShape::pairs(s, {{1, 2}});
    CHECK(mdnf_value_membership(DenseTensor::identity(nat(), n), shape, Family::S, n).member);
    CHECK(!mdnf_value_membership(scale(2, DenseTensor::identity(nat(), n)), shape, Family::S, n).member);
  }
  Sequent t = parse_sequent("a*~a");
  auto m = mdnf_value_membership(DenseTensor::identity(nat(), 2), MdnfShape::from_sequent(t), Family::D, 2);
  CHECK(!m.member);
  CHECK(!m.certificate.is_null());
}

TEST_CASE("covalue enumeration counts") {
  auto count = [](const char* seq, Family f, Index n) {
    Sequent s = parse_sequent(seq);
    MdnfShape shape = (f == Family::S) ? MdnfShape::pairs(s, {{1, 2}, {3, 4}}) : MdnfShape::from_sequent(s);
    int k = 0;
    covalue_enumerate(nat(), shape, f, n, -1, [&](const std::vector<const DenseTensor*>&) {
      ++k;
      return true;
    });
    return k;
  };
  CHECK(count("a*~a", Family::C, 2) == 2);
  CHECK(count("a", Family::A, 2) == 3);
  CHECK(count("a|~a|b|~b", Family::S, 2) == 4);
  CHECK(count("a*~a|b*~b", Family::A, 2) == 49);
}

TEST_CASE("nets with coefficient one are values of A and C") {
  int nets = 0;
  corpus::for_each_sequent(4, [&](const Sequent& s) {
    if (!is_mdnf(s)) return;
    for (auto& l : enumerate_linkings(s)) {
      if (!is_mll_net(s, l)) continue;
      ++nets;
      LinComb c = make_lincomb(nat(), s, {LinTerm{1, l}});
      for (Index n = 1; n <= 3; ++n) {
        DenseTensor t = to_tensor(c, n).densify();
        CHECK(mdnf_value_membership(t, MdnfShape::from_sequent(s), Family::A, n).member);
        CHECK(mdnf_value_membership(t, MdnfShape::from_sequent(s), Family::C, n).member);
      }
    }
  });
  CHECK(nets > 0);
}

TEST_CASE("a non-net fails C membership") {
  Sequent s = parse_sequent("a*~a|b*~b");
  LinComb c = make_lincomb(nat(), s, {LinTerm{1, parse_links(s, "1-2,3-4")}});
  CHECK(!mdnf_value_membership(to_tensor(c, 2).densify(), MdnfShape::from_sequent(s), Family::C, 2).member);
}

TEST_CASE("contract_except leaves the chosen group open") {
  Sequent s = parse_sequent("a|~a");
  MdnfShape shape = MdnfShape::from_sequent(s);
  auto d2 = DenseTensor::delta(nat(), 2, {2});
  auto r = contract_except(DenseTensor::identity(nat(), 2), shape, 0, {nullptr, &d2});
  CHECK(r == DenseTensor::delta(nat(), 2, {2}));
}
