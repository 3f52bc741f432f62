#pragma once

#include <stdexcept>
#include <string>

namespace rift2 {

// Missing, unreadable or unwritable files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Files that exist but cannot be decoded (truncated, unknown format, bad
// JSON schema).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated preconditions on arguments or configuration.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Cross-references that do not resolve, e.g. a match naming a keypoint id
// outside the keypoint list.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RIFT2_CHECK_PARAM(cond, msg)                 \
  do {                                               \
    if (!(cond)) throw ::rift2::ParameterError(msg); \
  } while (0)

}  // namespace rift2
