#pragma once

#include <stdexcept>
#include <string>

namespace perfhom {

enum class ErrorKind {
  InvalidParameter,
  Resolution,
  Geometry,
  Construction,
  Structural,
  Config,
  InsufficientData,
  // numerical failures below
  Evaluation,
  Solver,
  Extrapolation,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` selects the category.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures of a numerical procedure, as opposed to bad input.
  bool numerical() const noexcept {
    return kind_ == ErrorKind::Evaluation || kind_ == ErrorKind::Solver ||
           kind_ == ErrorKind::Extrapolation;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace perfhom
