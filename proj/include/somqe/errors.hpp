#pragma once

#include <stdexcept>
#include <string>

namespace somqe {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// File was readable but its content is not a supported image.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A precondition of a library operation was violated.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// User-supplied configuration is out of range or inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace somqe
