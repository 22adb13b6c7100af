#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace mllg {

// Every built-in semiring carries its elements as exact rationals; the
// semiring decides which rationals are in its carrier and how to add.
using Scalar = mpq_class;

struct Semiring {
  std::string name;
  std::function<Scalar(const Scalar&, const Scalar&)> add;
  std::function<Scalar(const Scalar&, const Scalar&)> mul;
  Scalar zero;
  Scalar one;
  std::function<bool(const Scalar&)> contains;
  std::function<std::optional<Scalar>(const Scalar&)> additive_inverse;
  bool zero_sum_free = true;

  bool eq(const Scalar& a, const Scalar& b) const { return a == b; }
  bool is_zero(const Scalar& a) const { return a == zero; }
  // one + one + ... (k times)
  Scalar from_count(std::uint64_t k) const;
  Scalar from_count(const mpz_class& k) const;
};

const Semiring& semiring(std::string_view name);  // throws Input on unknown names
std::vector<std::string> semiring_names();
// Custom semirings live as long as the process.
const Semiring& register_semiring(Semiring s);

bool is_zero_sum_free(const Semiring& s);

Scalar parse_scalar(const Semiring& s, std::string_view text);
std::string format_scalar(const Scalar& v);

}  // namespace mllg
