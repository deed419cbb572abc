#pragma once

#include <stdexcept>
#include <string>

namespace hpf {

enum class ErrorKind {
  Structural,   // dimension or index-set mismatch
  Assembly,     // network admittance could not be built
  Reduction,    // singular block in Kron reduction
  Partition,    // no grid-forming node electrically present
  Model,        // singular closed-loop system
  Degenerate,   // reciprocal / normalisation of a near-zero quantity
  Solver,       // Newton-Raphson failure
  Windowing,    // DFT window does not cover whole periods
  Instability,  // time-domain simulation blew up
  Schema,       // scenario file rejected
  Io,           // artifact could not be written
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hpf
