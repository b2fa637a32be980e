#pragma once

#include <stdexcept>
#include <string>

namespace qcap {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// bad schedule parameters (smallness, area split, index regime)
struct ScheduleError : Error {
  using Error::Error;
};

struct PackingError : Error {
  using Error::Error;
};

// (alpha, p, K) outside the admissible domain
struct IndexError : Error {
  using Error::Error;
};

// operation needs explicit disk centers / atoms that are not there
struct RealizationError : Error {
  using Error::Error;
};

// config rejected by schema validation; pointer is an RFC 6901 path
struct ConfigError : Error {
  ConfigError(std::string pointer, const std::string& what)
      : Error(pointer.empty() ? what : pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace qcap
