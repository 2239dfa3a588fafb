#pragma once

#include <stdexcept>
#include <string>

namespace uf {

/// Base class for all errors the toolkit raises; the CLI maps these to exit 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (edge list, DOT, manifest, block list, JSON).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Source scanner failure (e.g. unbalanced braces at end of file).
class ScanError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration: bad map size, unknown target, mismatched block list.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input longer than the target's configured maximum. Distinct from a crash.
class InputTooLongError : public Error {
 public:
  using Error::Error;
};

}  // namespace uf
