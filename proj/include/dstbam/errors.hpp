#pragma once

#include <stdexcept>
#include <string>

namespace dstbam {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or malformed input (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A size or state-space budget was exceeded (CLI exit code 4).
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A finite threshold query needed weights beyond the sampled depth cap.
class DepthCapExceeded : public CapacityError {
 public:
  using CapacityError::CapacityError;
};

/// An item's finite digit prefix ran out before reaching an external node.
class RoutingError : public Error {
 public:
  using Error::Error;
};

class EmptySampleError : public Error {
 public:
  using Error::Error;
};

/// Observed data fell on a category the model gives zero mass.
class ModelMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace dstbam
