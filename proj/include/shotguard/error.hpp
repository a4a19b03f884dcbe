#pragma once

#include <stdexcept>
#include <string>

namespace shotguard {

// Base for every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented precondition (bad dimensions, alpha >= 1, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Rule file, calibration artifact or option set is malformed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

// Manifest or image ingestion failed; the message lists every offender.
class IngestionError : public Error {
 public:
  using Error::Error;
};

}  // namespace shotguard
