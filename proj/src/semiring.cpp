#include "mllg/semiring.hpp"

#include <deque>
#include <map>
#include <mutex>

#include "mllg/error.hpp"

namespace mllg {

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Input: return "input";
    case ErrorKind::Limit: return "limit";
    case ErrorKind::OutsideTheory: return "outside-theory";
    case ErrorKind::NotApplicable: return "not-applicable";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Internal: return "internal";
  }
  return "?";
}

Scalar Semiring::from_count(std::uint64_t k) const {
  return from_count(mpz_class(std::to_string(k)));
}

Scalar Semiring::from_count(const mpz_class& k) const {
  if (k == 0) return zero;
  if (name == "bool") return one;
  if (name == "nat" || name == "int" || name == "rat" || name == "nonneg_rat") return Scalar(k);
  // generic: double-and-add
  Scalar acc = zero, p = one;
  mpz_class r = k;
  while (r > 0) {
    if (mpz_odd_p(r.get_mpz_t())) acc = add(acc, p);
    p = add(p, p);
    r >>= 1;
  }
  return acc;
}

namespace {

Scalar plus(const Scalar& a, const Scalar& b) { return a + b; }
Scalar times(const Scalar& a, const Scalar& b) { return a * b; }
bool integral(const Scalar& a) { return a.get_den() == 1; }

Semiring make(std::string name, bool zsf, std::function<bool(const Scalar&)> contains, bool negatable) {
  Semiring s;
  s.name = std::move(name);
  s.add = plus;
  s.mul = times;
  s.zero = 0;
  s.one = 1;
  s.contains = std::move(contains);
  s.zero_sum_free = zsf;
  if (negatable)
    s.additive_inverse = [](const Scalar& a) -> std::optional<Scalar> { return Scalar(-a); };
  else
    s.additive_inverse = [](const Scalar& a) -> std::optional<Scalar> {
      if (a == 0) return Scalar(0);
      return std::nullopt;
    };
  return s;
}

struct Registry {
  std::mutex mu;
  std::deque<Semiring> store;
  std::map<std::string, const Semiring*, std::less<>> by_name;

  Registry() {
    Semiring b;
    b.name = "bool";
    b.add = [](const Scalar& x, const Scalar& y) { return Scalar(x != 0 || y != 0 ? 1 : 0); };
    b.mul = [](const Scalar& x, const Scalar& y) { return Scalar(x != 0 && y != 0 ? 1 : 0); };
    b.zero = 0;
    b.one = 1;
    b.contains = [](const Scalar& x) { return x == 0 || x == 1; };
    b.additive_inverse = [](const Scalar& x) -> std::optional<Scalar> {
      if (x == 0) return Scalar(0);
      return std::nullopt;
    };
    b.zero_sum_free = true;
    put(std::move(b));
    put(make("nat", true, [](const Scalar& x) { return integral(x) && x >= 0; }, false));
    put(make("int", false, integral, true));
    put(make("rat", false, [](const Scalar&) { return true; }, true));
    put(make("nonneg_rat", true, [](const Scalar& x) { return x >= 0; }, false));
  }

  const Semiring& put(Semiring s) {
    if (by_name.count(s.name)) fail(ErrorKind::Input, "semiring already registered: " + s.name);
    store.push_back(std::move(s));
    by_name[store.back().name] = &store.back();
    return store.back();
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

const Semiring& semiring(std::string_view name) {
  auto& r = registry();
  std::lock_guard<std::mutex> g(r.mu);
  auto it = r.by_name.find(name);
  if (it == r.by_name.end()) fail(ErrorKind::Input, "unknown semiring '" + std::string(name) + "'");
  return *it->second;
}

std::vector<std::string> semiring_names() {
  auto& r = registry();
  std::lock_guard<std::mutex> g(r.mu);
  std::vector<std::string> out;
  for (auto& [k, v] : r.by_name) out.push_back(k);
  return out;
}

const Semiring& register_semiring(Semiring s) {
  auto& r = registry();
  std::lock_guard<std::mutex> g(r.mu);
  if (!s.add || !s.mul || !s.contains) fail(ErrorKind::Input, "semiring '" + s.name + "' is missing operations");
  if (!s.additive_inverse)
    s.additive_inverse = [](const Scalar& a) -> std::optional<Scalar> {
      if (a == 0) return Scalar(0);
      return std::nullopt;
    };
  return r.put(std::move(s));
}

bool is_zero_sum_free(const Semiring& s) { return s.zero_sum_free; }

Scalar parse_scalar(const Semiring& s, std::string_view text) {
  std::string t(text);
  auto bad = [&](const std::string& why) {
    fail(ErrorKind::Input, "bad " + s.name + " value '" + t + "': " + why);
  };
  if (t.empty()) bad("empty");
  // mpq's parser accepts things like "0x10" or leading '+'; stay strict
  size_t i = 0;
  if (t[0] == '-') i = 1;
  bool seen_slash = false, digit = false;
  for (size_t k = i; k < t.size(); ++k) {
    char c = t[k];
    if (c >= '0' && c <= '9') {
      digit = true;
    } else if (c == '/' && !seen_slash && digit) {
      seen_slash = true;
      digit = false;
    } else {
      bad("not a decimal integer or p/q");
    }
  }
  if (!digit) bad("truncated");
  Scalar v;
  if (v.set_str(t, 10) != 0) bad("unparseable");
  if (v.get_den() == 0) bad("zero denominator");
  v.canonicalize();
  if (!s.contains(v)) bad("outside the carrier");
  return v;
}

std::string format_scalar(const Scalar& v) { return v.get_str(10); }

}  // namespace mllg
