#pragma once

#include <stdexcept>
#include <string>

namespace samsr {

enum class ErrorKind { Usage, Io, Numeric };

// All library failures derive from this; the CLI maps `kind` to its exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_usage(const std::string& what) { throw Error(ErrorKind::Usage, what); }
[[noreturn]] inline void fail_io(const std::string& what) { throw Error(ErrorKind::Io, what); }
[[noreturn]] inline void fail_numeric(const std::string& what) { throw Error(ErrorKind::Numeric, what); }

}  // namespace samsr
