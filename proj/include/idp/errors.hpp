#pragma once

#include <stdexcept>
#include <string>

namespace idp {

/// Input that is well-formed but violates a model constraint
/// (negative loss, degenerate wall, source on a corner, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed floorplan document. The message carries the line/column or the
/// offending field path.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace idp
