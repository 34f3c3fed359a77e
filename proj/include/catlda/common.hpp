#pragma once

#include <stdexcept>
#include <string>

namespace catlda {

inline constexpr int kSchemaVersion = 1;

// Bad input data or a violated precondition (CLI exit code 2).
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical procedure failed, e.g. an indefinite correlation matrix
// reached the eigensolver (CLI exit code 3).
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace catlda
