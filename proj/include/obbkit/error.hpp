// Copyright 2026 The obbkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace obbkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite fields or non-positive extents.
class InvalidBoxError : public Error {
 public:
  using Error::Error;
};

/// A sampling grid that places no sample inside either box.
class DegenerateRasterError : public Error {
 public:
  using Error::Error;
};

/// Loss requested over an empty positive set.
class EmptySetError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration (anchor spec, patch spec, scene config, ...).
class InvalidSpecError : public Error {
 public:
  using Error::Error;
};

/// Decoded log-extent residual large enough to overflow the extent.
class OverflowGuardError : public Error {
 public:
  using Error::Error;
};

class ChannelError : public Error {
 public:
  using Error::Error;
};

/// Scene generator could not place a box after its rejection budget.
class PlacementError : public Error {
 public:
  using Error::Error;
};

/// Non-finite gradient or parameter during optimization.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data: JSONL records, image files, unknown ids.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace obbkit
