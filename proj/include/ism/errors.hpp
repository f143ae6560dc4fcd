// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ism {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Two boundary elements with different field vectors both lie within the
/// membership tolerance of the queried point.
struct AmbiguousBoundaryError : Error {
  using Error::Error;
};

/// Two consecutive path points coincide within tolerance.
struct DegenerateSegmentError : Error {
  using Error::Error;
};

/// The two points meant to define a line coincide within tolerance.
struct DegenerateLineError : Error {
  using Error::Error;
};

/// Two lattice samples of a patch map to the same spatial point.
struct InjectivityViolationError : Error {
  using Error::Error;
};

/// An atom sits inside the exclusion ball around the receiver.
struct CollocatedAtomError : Error {
  using Error::Error;
};

/// Malformed scene text (syntax level).
struct ParseError : Error {
  using Error::Error;
};

/// Well-formed scene text that violates a documented invariant.
struct ValidationError : Error {
  using Error::Error;
};

/// A requested run configuration the engines refuse to execute.
struct ConfigError : Error {
  using Error::Error;
};

/// Filesystem failures, annotated with the offending path.
struct IoError : Error {
  using Error::Error;
};

}  // namespace ism
