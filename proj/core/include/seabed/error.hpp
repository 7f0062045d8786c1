#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace seabed {

enum class ErrorKind {
  domain,       // argument outside the mathematical domain of an operation
  index,        // index out of range
  config,       // invalid or inconsistent configuration
  alignment,    // sensor not on a mesh node
  shape,        // mismatched vector/tensor dimensions
  singularity,  // degenerate mesh element
  convergence,  // iterative solver hit its iteration cap
  instability,  // time stepping blew up or produced non-finite values
  degenerate,   // statistically or geometrically degenerate input
  io,           // file could not be read or written
  usage,        // command line misuse
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; the kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Thrown by cg_solve when the iteration cap is reached.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(ErrorKind::convergence, what),
        residual_(residual),
        iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

/// Non-fatal diagnostics (e.g. the CFL guard) go through a replaceable sink;
/// the default writes to stderr.
using WarningSink = std::function<void(const std::string&)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace seabed
