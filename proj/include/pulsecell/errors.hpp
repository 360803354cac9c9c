#pragma once

#include <stdexcept>
#include <string>

#include "pulsecell/types.hpp"

namespace pulsecell {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration or violated spec invariant.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Temperature outside a property table's knot range in strict mode.
class TableRangeError : public Error {
 public:
  using Error::Error;
};

/// Adaptive halving drove the time step below the configured floor.
class TauFloorError : public Error {
 public:
  TauFloorError(Real tau, Real floor, Real t)
      : Error("time step " + std::to_string(tau) + " fell below floor " +
              std::to_string(floor) + " at t=" + std::to_string(t)),
        tau_(tau),
        floor_(floor),
        t_(t) {}
  Real tau() const { return tau_; }
  Real floor() const { return floor_; }
  Real time() const { return t_; }

 private:
  Real tau_, floor_, t_;
};

/// A parallel line body failed; carries the lowest failing line index.
class LineError : public Error {
 public:
  LineError(Index line, const std::string& what)
      : Error("line " + std::to_string(line) + " failed: " + what),
        line_(line) {}
  Index line() const { return line_; }

 private:
  Index line_;
};

}  // namespace pulsecell
