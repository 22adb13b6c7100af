#pragma once

#include <stdexcept>
#include <string>

namespace mllg {

// CLI exit codes: Input and NotApplicable -> 2, Limit, OutsideTheory and Unsupported -> 3, Internal -> 4.
enum class ErrorKind { Input, Limit, OutsideTheory, NotApplicable, Unsupported, Internal };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(ErrorKind::Internal, msg);
}

const char* kind_name(ErrorKind k);

}  // namespace mllg
