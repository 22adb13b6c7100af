#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mllg/delta.hpp"
#include "mllg/semiring.hpp"

namespace mllg {

struct Formula {
  enum class Kind { Lit, Tensor, Par };
  Kind kind = Kind::Lit;
  std::string atom;
  bool positive = true;
  std::vector<Formula> kids;  // empty for literals, two otherwise
  int tag = 0;                // scratch label carried by literals through rewrites

  static Formula lit(std::string atom, bool positive);
  static Formula tensor(Formula l, Formula r);
  static Formula par(Formula l, Formula r);

  bool is_lit() const { return kind == Kind::Lit; }
  const Formula& left() const { return kids[0]; }
  const Formula& right() const { return kids[1]; }
  int literal_count() const;
  int count(Kind k) const;
  bool operator==(const Formula& o) const;  // ignores tags
};

struct Occurrence {
  int index = 0;  // 1-based, left to right across the sequent
  std::string atom;
  bool positive = true;
  std::vector<int> path;  // formula index, then 0/1 child steps
};

struct Sequent {
  std::vector<Formula> formulas;

  int literal_count() const;
  int count(Formula::Kind k) const;
  std::vector<Occurrence> occurrences() const;
  bool operator==(const Sequent& o) const { return formulas == o.formulas; }
};

Sequent parse_sequent(std::string_view text);
std::string to_string(const Formula& f);
std::string to_string(const Sequent& s);

// Subformula at a path [formula, child, child, ...].
const Formula& subformula(const Sequent& s, const std::vector<int>& path);
Formula& subformula(Sequent& s, const std::vector<int>& path);

// Pairs (positive occurrence, negative occurrence), kept sorted.
struct Linking {
  std::vector<std::pair<int, int>> pairs;

  void normalize();
  int partner(int occ) const;  // 0 if absent
  auto operator<=>(const Linking& o) const = default;
};

// Throws Input on any violation of the linking invariants.
void validate_linking(const Sequent& s, const Linking& l);
// "1-2,3-4"; each pair may name the negative end first
Linking parse_links(const Sequent& s, std::string_view text);
std::string to_string(const Linking& l);

std::vector<Linking> enumerate_linkings(const Sequent& s, std::string* diagnostic = nullptr, int max_literals = 16);
// Number of perfect matchings, computed independently of the enumeration.
std::uint64_t count_linkings(const Sequent& s);

bool is_mdnf(const Sequent& s);
std::vector<std::vector<int>> blocks(const Sequent& s);  // throws Input on non-MDNF

struct LinTerm {
  Scalar coeff;
  Linking linking;
};

struct LinComb {
  const Semiring* sr = nullptr;
  Sequent sequent;
  std::vector<LinTerm> terms;
};

void validate(const LinComb& c);
LinComb make_lincomb(const Semiring& sr, const Sequent& s, std::vector<LinTerm> terms);
LinComb lincomb_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LinComb& c);
nlohmann::json to_json(const Linking& l);

std::string index_name(const Occurrence& o);
std::vector<std::string> index_names(const Sequent& s);
DeltaExpr to_tensor(const LinComb& c, Index n);

}  // namespace mllg
