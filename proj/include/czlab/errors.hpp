#pragma once

#include <stdexcept>
#include <string>

namespace czlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scale or complexity that does not fit the finite scale window.
class WindowError : public Error {
 public:
  using Error::Error;
};

/// Points closer than the window's base resolution can resolve.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition on an argument (x = y, x outside Q, tau > 1/2, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace czlab
