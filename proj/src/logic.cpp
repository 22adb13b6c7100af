#include "mllg/logic.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "mllg/error.hpp"

namespace mllg {

Formula Formula::lit(std::string atom, bool positive) {
  Formula f;
  f.kind = Kind::Lit;
  f.atom = std::move(atom);
  f.positive = positive;
  return f;
}

Formula Formula::tensor(Formula l, Formula r) {
  Formula f;
  f.kind = Kind::Tensor;
  f.kids.push_back(std::move(l));
  f.kids.push_back(std::move(r));
  return f;
}

Formula Formula::par(Formula l, Formula r) {
  Formula f;
  f.kind = Kind::Par;
  f.kids.push_back(std::move(l));
  f.kids.push_back(std::move(r));
  return f;
}

int Formula::literal_count() const {
  if (is_lit()) return 1;
  return kids[0].literal_count() + kids[1].literal_count();
}

int Formula::count(Kind k) const {
  int c = kind == k ? 1 : 0;
  for (auto& x : kids) c += x.count(k);
  return c;
}

bool Formula::operator==(const Formula& o) const {
  if (kind != o.kind) return false;
  if (is_lit()) return atom == o.atom && positive == o.positive;
  return kids == o.kids;
}

int Sequent::literal_count() const {
  int c = 0;
  for (auto& f : formulas) c += f.literal_count();
  return c;
}

int Sequent::count(Formula::Kind k) const {
  int c = 0;
  for (auto& f : formulas) c += f.count(k);
  return c;
}

namespace {

void collect(const Formula& f, std::vector<int>& path, std::vector<Occurrence>& out) {
  if (f.is_lit()) {
    Occurrence o;
    o.index = static_cast<int>(out.size()) + 1;
    o.atom = f.atom;
    o.positive = f.positive;
    o.path = path;
    out.push_back(std::move(o));
    return;
  }
  for (int k = 0; k < 2; ++k) {
    path.push_back(k);
    collect(f.kids[k], path, out);
    path.pop_back();
  }
}

Formula negate(Formula f) {
  switch (f.kind) {
    case Formula::Kind::Lit:
      f.positive = !f.positive;
      return f;
    case Formula::Kind::Tensor:
      return Formula::par(negate(std::move(f.kids[0])), negate(std::move(f.kids[1])));
    case Formula::Kind::Par:
      return Formula::tensor(negate(std::move(f.kids[0])), negate(std::move(f.kids[1])));
  }
  return f;
}

class Parser {
public:
  explicit Parser(std::string_view t) : text_(t) {}

  Sequent sequent() {
    Sequent s;
    skip();
    if (pos_ == text_.size()) error("empty sequent");
    s.formulas.push_back(formula());
    while (peek() == ',') {
      ++pos_;
      s.formulas.push_back(formula());
    }
    if (pos_ != text_.size()) error(std::string("unexpected '") + text_[pos_] + "'");
    return s;
  }

private:
  [[noreturn]] void error(const std::string& msg) {
    // line/column of the current position
    int line = 1, col = 1;
    for (std::size_t k = 0; k < pos_ && k < text_.size(); ++k) {
      if (text_[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrorKind::Input, "syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
  }

  void skip() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
  }

  char peek() {
    skip();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Formula formula() {
    Formula f = term();
    while (peek() == '|') {
      ++pos_;
      f = Formula::par(std::move(f), term());
    }
    return f;
  }

  Formula term() {
    Formula f = factor();
    while (peek() == '*') {
      ++pos_;
      f = Formula::tensor(std::move(f), factor());
    }
    return f;
  }

  Formula factor() {
    char c = peek();
    if (c == '~') {
      ++pos_;
      return negate(factor());
    }
    if (c == '(') {
      ++pos_;
      Formula f = formula();
      if (peek() != ')') error("expected ')'");
      ++pos_;
      return f;
    }
    if (c >= 'a' && c <= 'z') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             ((text_[pos_] >= 'a' && text_[pos_] <= 'z') || (text_[pos_] >= '0' && text_[pos_] <= '9') || text_[pos_] == '_'))
        ++pos_;
      return Formula::lit(std::string(text_.substr(start, pos_ - start)), true);
    }
    if (c == '\0') error("unexpected end of input");
    error(std::string("unexpected '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print(const Formula& f, std::ostringstream& os) {
  if (f.is_lit()) {
    if (!f.positive) os << '~';
    os << f.atom;
    return;
  }
  const Formula& l = f.kids[0];
  const Formula& r = f.kids[1];
  bool lp = f.kind == Formula::Kind::Tensor && l.kind == Formula::Kind::Par;
  bool rp = !r.is_lit() && (f.kind == Formula::Kind::Tensor || r.kind == Formula::Kind::Par);
  if (lp) os << '(';
  print(l, os);
  if (lp) os << ')';
  os << (f.kind == Formula::Kind::Tensor ? "*" : "|");
  if (rp) os << '(';
  print(r, os);
  if (rp) os << ')';
}

}  // namespace

std::vector<Occurrence> Sequent::occurrences() const {
  std::vector<Occurrence> out;
  std::vector<int> path;
  for (std::size_t k = 0; k < formulas.size(); ++k) {
    path.assign(1, static_cast<int>(k));
    collect(formulas[k], path, out);
  }
  return out;
}

Sequent parse_sequent(std::string_view text) { return Parser(text).sequent(); }

std::string to_string(const Formula& f) {
  std::ostringstream os;
  print(f, os);
  return os.str();
}

std::string to_string(const Sequent& s) {
  std::string out;
  for (std::size_t k = 0; k < s.formulas.size(); ++k) {
    if (k) out += ", ";
    out += to_string(s.formulas[k]);
  }
  return out;
}

const Formula& subformula(const Sequent& s, const std::vector<int>& path) {
  return subformula(const_cast<Sequent&>(s), path);
}

Formula& subformula(Sequent& s, const std::vector<int>& path) {
  if (path.empty() || path[0] < 0 || path[0] >= static_cast<int>(s.formulas.size()))
    fail(ErrorKind::Input, "path does not name a formula");
  Formula* f = &s.formulas[path[0]];
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (f->is_lit() || (path[k] != 0 && path[k] != 1)) fail(ErrorKind::Input, "path leaves the formula tree");
    f = &f->kids[path[k]];
  }
  return *f;
}

// ---- linkings ----

void Linking::normalize() { std::sort(pairs.begin(), pairs.end()); }

int Linking::partner(int occ) const {
  for (auto [p, q] : pairs) {
    if (p == occ) return q;
    if (q == occ) return p;
  }
  return 0;
}

void validate_linking(const Sequent& s, const Linking& l) {
  auto occ = s.occurrences();
  const int N = static_cast<int>(occ.size());
  std::vector<int> seen(N + 1, 0);
  for (auto [p, q] : l.pairs) {
    for (int x : {p, q})
      if (x < 1 || x > N) fail(ErrorKind::Input, "linking: occurrence " + std::to_string(x) + " out of range");
    if (p == q) fail(ErrorKind::Input, "linking: occurrence " + std::to_string(p) + " linked to itself");
    if (seen[p]++ || seen[q]++) fail(ErrorKind::Input, "linking: an occurrence is linked twice");
    const auto &a = occ[p - 1], &b = occ[q - 1];
    if (!a.positive || b.positive)
      fail(ErrorKind::Input, "linking: pair " + std::to_string(p) + "-" + std::to_string(q) + " is not positive-negative");
    if (a.atom != b.atom)
      fail(ErrorKind::Input, "linking: pair " + std::to_string(p) + "-" + std::to_string(q) + " joins different atoms");
  }
  for (int x = 1; x <= N; ++x)
    if (!seen[x]) fail(ErrorKind::Input, "linking: occurrence " + std::to_string(x) + " is not linked");
}

Linking parse_links(const Sequent& s, std::string_view text) {
  auto occ = s.occurrences();
  Linking l;
  std::string t(text);
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](char c) { return c == ' ' || c == '\t'; }), item.end());
    if (item.empty()) continue;
    auto dash = item.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == item.size())
      fail(ErrorKind::Input, "links: expected 'p-q', got '" + item + "'");
    int a = 0, b = 0;
    try {
      std::size_t u = 0, v = 0;
      a = std::stoi(item.substr(0, dash), &u);
      b = std::stoi(item.substr(dash + 1), &v);
      if (u != dash || v != item.size() - dash - 1) throw std::invalid_argument("x");
    } catch (const std::exception&) {
      fail(ErrorKind::Input, "links: bad number in '" + item + "'");
    }
    if (a >= 1 && a <= static_cast<int>(occ.size()) && !occ[a - 1].positive) std::swap(a, b);
    l.pairs.emplace_back(a, b);
  }
  l.normalize();
  validate_linking(s, l);
  return l;
}

std::string to_string(const Linking& l) {
  std::string out;
  for (auto [p, q] : l.pairs) {
    if (!out.empty()) out += ",";
    out += std::to_string(p) + "-" + std::to_string(q);
  }
  return out;
}

namespace {

struct AtomGroups {
  std::vector<std::string> atoms;  // first-appearance order
  std::map<std::string, std::pair<std::vector<int>, std::vector<int>>> occ;
};

AtomGroups group_atoms(const Sequent& s) {
  AtomGroups g;
  for (auto& o : s.occurrences()) {
    if (!g.occ.count(o.atom)) g.atoms.push_back(o.atom);
    (o.positive ? g.occ[o.atom].first : g.occ[o.atom].second).push_back(o.index);
  }
  return g;
}

}  // namespace

std::vector<Linking> enumerate_linkings(const Sequent& s, std::string* diagnostic, int max_literals) {
  if (s.literal_count() > max_literals)
    fail(ErrorKind::Limit, "enumerate_linkings: " + std::to_string(s.literal_count()) + " literals exceed the bound " +
                               std::to_string(max_literals));
  AtomGroups g = group_atoms(s);
  for (auto& a : g.atoms) {
    auto& [pos, neg] = g.occ[a];
    if (pos.size() != neg.size()) {
      if (diagnostic)
        *diagnostic = "atom '" + a + "' has " + std::to_string(pos.size()) + " positive and " +
                      std::to_string(neg.size()) + " negative occurrences";
      return {};
    }
  }
  std::vector<Linking> out;
  std::vector<std::pair<int, int>> cur;
  std::function<void(std::size_t)> go = [&](std::size_t ai) {
    if (ai == g.atoms.size()) {
      Linking l{cur};
      l.normalize();
      out.push_back(std::move(l));
      return;
    }
    auto [pos, neg] = g.occ[g.atoms[ai]];
    std::sort(neg.begin(), neg.end());
    do {
      std::size_t mark = cur.size();
      for (std::size_t k = 0; k < pos.size(); ++k) cur.emplace_back(pos[k], neg[k]);
      go(ai + 1);
      cur.resize(mark);
    } while (std::next_permutation(neg.begin(), neg.end()));
  };
  go(0);
  if (diagnostic) diagnostic->clear();
  return out;
}

std::uint64_t count_linkings(const Sequent& s) {
  // bitmask dynamic programming over the negatives of each atom
  AtomGroups g = group_atoms(s);
  std::uint64_t total = 1;
  for (auto& a : g.atoms) {
    auto& [pos, neg] = g.occ[a];
    if (pos.size() != neg.size()) return 0;
    std::size_t k = neg.size();
    std::vector<std::uint64_t> dp(std::size_t(1) << k, 0);
    dp[0] = 1;
    for (std::size_t m = 0; m < dp.size(); ++m) {
      int used = __builtin_popcountll(m);
      if (used >= static_cast<int>(k)) continue;
      for (std::size_t b = 0; b < k; ++b)
        if (!(m >> b & 1)) dp[m | (std::size_t(1) << b)] += dp[m];
    }
    total *= dp.back();
  }
  return total;
}

namespace {

bool tensor_only(const Formula& f) {
  if (f.is_lit()) return true;
  return f.kind == Formula::Kind::Tensor && tensor_only(f.kids[0]) && tensor_only(f.kids[1]);
}

bool mdnf_formula(const Formula& f) {
  if (f.kind == Formula::Kind::Par) return mdnf_formula(f.kids[0]) && mdnf_formula(f.kids[1]);
  return tensor_only(f);
}

void block_walk(const Formula& f, int& next, std::vector<std::vector<int>>& out) {
  if (f.kind == Formula::Kind::Par) {
    block_walk(f.kids[0], next, out);
    block_walk(f.kids[1], next, out);
    return;
  }
  int n = f.literal_count();
  std::vector<int> b;
  for (int k = 0; k < n; ++k) b.push_back(next++);
  out.push_back(std::move(b));
}

}  // namespace

bool is_mdnf(const Sequent& s) {
  for (auto& f : s.formulas)
    if (!mdnf_formula(f)) return false;
  return true;
}

std::vector<std::vector<int>> blocks(const Sequent& s) {
  if (!is_mdnf(s)) fail(ErrorKind::Input, "blocks: sequent is not in multiplicative disjunctive normal form");
  std::vector<std::vector<int>> out;
  int next = 1;
  for (auto& f : s.formulas) block_walk(f, next, out);
  return out;
}

// ---- linear combinations ----

void validate(const LinComb& c) {
  if (!c.sr) fail(ErrorKind::Input, "linear combination without a semiring");
  if (c.sequent.formulas.empty()) fail(ErrorKind::Input, "empty sequent");
  std::set<Linking> seen;
  for (auto& t : c.terms) {
    if (!c.sr->contains(t.coeff)) fail(ErrorKind::Input, "coefficient " + format_scalar(t.coeff) + " outside " + c.sr->name);
    validate_linking(c.sequent, t.linking);
    if (!seen.insert(t.linking).second) fail(ErrorKind::Input, "linking " + to_string(t.linking) + " occurs twice");
  }
}

LinComb make_lincomb(const Semiring& sr, const Sequent& s, std::vector<LinTerm> terms) {
  LinComb c{&sr, s, std::move(terms)};
  for (auto& t : c.terms) t.linking.normalize();
  validate(c);
  return c;
}

LinComb lincomb_from_json(const nlohmann::json& j) {
  try {
    const Semiring& sr = semiring(j.at("semiring").get<std::string>());
    Sequent s = parse_sequent(j.at("sequent").get<std::string>());
    auto occ = s.occurrences();
    std::vector<LinTerm> terms;
    for (auto& tj : j.at("terms")) {
      LinTerm t;
      auto& cj = tj.at("coeff");
      t.coeff = parse_scalar(sr, cj.is_string() ? cj.get<std::string>() : cj.dump());
      for (auto& p : tj.at("linking")) {
        if (!p.is_array() || p.size() != 2) fail(ErrorKind::Input, "linking pairs must be [p, q]");
        int a = p[0].get<int>(), b = p[1].get<int>();
        if (a >= 1 && a <= static_cast<int>(occ.size()) && !occ[a - 1].positive) std::swap(a, b);
        t.linking.pairs.emplace_back(a, b);
      }
      terms.push_back(std::move(t));
    }
    return make_lincomb(sr, s, std::move(terms));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Input, std::string("combination json: ") + e.what());
  }
}

nlohmann::json to_json(const Linking& l) {
  nlohmann::json a = nlohmann::json::array();
  for (auto [p, q] : l.pairs) a.push_back({p, q});
  return a;
}

nlohmann::json to_json(const LinComb& c) {
  nlohmann::json terms = nlohmann::json::array();
  for (auto& t : c.terms) terms.push_back({{"coeff", format_scalar(t.coeff)}, {"linking", to_json(t.linking)}});
  return {{"semiring", c.sr->name}, {"sequent", to_string(c.sequent)}, {"terms", terms}};
}

std::string index_name(const Occurrence& o) { return (o.positive ? "i" : "j") + std::to_string(o.index); }

std::vector<std::string> index_names(const Sequent& s) {
  std::vector<std::string> out;
  for (auto& o : s.occurrences()) out.push_back(index_name(o));
  return out;
}

DeltaExpr to_tensor(const LinComb& c, Index n) {
  DeltaExpr e(*c.sr, n, index_names(c.sequent));
  for (auto& t : c.terms) {
    if (c.sr->is_zero(t.coeff)) continue;
    Term term{t.coeff, {}};
    for (auto [p, q] : t.linking.pairs)
      term.factors.push_back(Factor{Factor::Kind::Delta, {Arg::v(p - 1), Arg::v(q - 1)}, 0, {}});
    e.add_term(std::move(term));
  }
  return e;
}

}  // namespace mllg
