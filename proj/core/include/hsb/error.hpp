#pragma once

#include <stdexcept>
#include <string>

namespace hsb {

enum class ErrorKind {
  validation,  // bad input parameters or configuration
  geometry,    // invalid curve, ambiguous surgery, point off curve
  solver,      // ill-conditioned solve, non-convergence, step underflow
  cusp,        // regulated run hit a boundary singularity
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error validation_error(const std::string& what) { return Error(ErrorKind::validation, what); }
inline Error geometry_error(const std::string& what) { return Error(ErrorKind::geometry, what); }
inline Error solver_error(const std::string& what) { return Error(ErrorKind::solver, what); }

}  // namespace hsb
