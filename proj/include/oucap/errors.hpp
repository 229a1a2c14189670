#pragma once

#include <stdexcept>
#include <string>

namespace oucap {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates a documented precondition (kappa <= 0, P < 0, ...).
class InvalidParams : public Error {
 public:
  using Error::Error;
};

class InvalidArma : public Error {
 public:
  using Error::Error;
};

/// The bracket search could not find a sign change. The roots we look for
/// provably exist, so this always indicates an internal bug.
class RootNotBracketed : public Error {
 public:
  using Error::Error;
};

class StepSizeUnderflow : public Error {
 public:
  using Error::Error;
};

class NotConverged : public Error {
 public:
  using Error::Error;
};

class KernelDomainMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateKernel : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class FilterDivergence : public Error {
 public:
  using Error::Error;
};

class DegenerateNoise : public Error {
 public:
  using Error::Error;
};

}  // namespace oucap
