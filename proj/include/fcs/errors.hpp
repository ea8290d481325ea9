#pragma once

#include <stdexcept>
#include <string>

namespace fcs {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or input contract was violated (bad dimensions, bad
/// parameters, malformed configuration). The CLI maps these to exit code 2.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Configuration field failed validation; carries the dotted field path.
class ConfigError : public ContractError {
 public:
  ConfigError(std::string path, const std::string& what)
      : ContractError(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// The chemical potential sits on (or within the gate distance of) a level.
class DegeneracyError : public ContractError {
 public:
  DegeneracyError(double level, double mu);
  double level() const noexcept { return level_; }

 private:
  double level_;
};

/// A numerical invariant failed. Carries the invariant's name so reports can
/// say what broke. The CLI maps these to exit code 3.
class IntegrityError : public Error {
 public:
  IntegrityError(std::string invariant, const std::string& what)
      : Error(invariant + ": " + what), invariant_(std::move(invariant)) {}
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

/// An iterative factorization did not converge.
class ConvergenceError : public IntegrityError {
 public:
  ConvergenceError(const std::string& routine, long iterations);
  long iterations() const noexcept { return iterations_; }

 private:
  long iterations_;
};

/// A discretization (time steps, quadrature) is too coarse for its error gate.
class AccuracyError : public IntegrityError {
 public:
  AccuracyError(const std::string& invariant, double estimate, double gate);
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

}  // namespace fcs
