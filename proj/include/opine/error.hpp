#pragma once

#include <stdexcept>
#include <string>

namespace opine {

enum class ErrorKind {
  Io,          // file missing or unreadable
  Parse,       // malformed input record
  Validation,  // well-formed but violates a domain invariant
  Config,      // bad spec/option/class configuration
  Numeric,     // numeric-domain failure (log of zero probability, ...)
  Runtime,     // everything else
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace opine
