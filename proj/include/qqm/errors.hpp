#pragma once

#include <stdexcept>
#include <string>

namespace qqm {

/// Invalid grid, parameter set or configuration key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time evolution produced a non-finite state.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double t, double last_norm)
      : std::runtime_error(what), t_(t), last_norm_(last_norm) {}
  double time() const { return t_; }
  double last_finite_norm() const { return last_norm_; }

 private:
  double t_;
  double last_norm_;
};

}  // namespace qqm
