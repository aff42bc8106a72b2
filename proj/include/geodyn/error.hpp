#pragma once

#include <stdexcept>
#include <string>

namespace geodyn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Position too close to the force centre.
class SingularOriginError : public Error {
 public:
  using Error::Error;
};

// Orbit elements requested for an unbound state.
class NonnegativeEnergyError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class UnknownIdError : public Error {
 public:
  using Error::Error;
};

class TrajectoryTooShortError : public Error {
 public:
  using Error::Error;
};

class StabilityError : public Error {
 public:
  using Error::Error;
};

class CircularOrbitError : public Error {
 public:
  using Error::Error;
};

class SamplingDomainError : public Error {
 public:
  using Error::Error;
};

// Integrator failure with the index of the step that failed.
class StepError : public Error {
 public:
  StepError(long step, const std::string& what)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace geodyn
