#pragma once

#include <stdexcept>
#include <string>

namespace mmvib {

// Every recoverable failure in the library surfaces as this type. The
// message is the short, stable reason string ("input too short",
// "no target", ...) that callers and tests match on.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mmvib
