#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace photonbits {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or flag combination is invalid (tau <= 0, p >= 1, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A mathematical function was evaluated outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Not enough events or bits for the requested statistic.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// The requested operation does not support this configuration.
class UnsupportedConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or non-monotone input data. `record()` is 1-based, 0 if unknown.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t record = 0)
      : Error(what), record_(record) {}
  std::size_t record() const noexcept { return record_; }

 private:
  std::size_t record_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace photonbits
