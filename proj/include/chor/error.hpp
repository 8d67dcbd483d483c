#pragma once

#include <stdexcept>
#include <string>

namespace chor {

/// Base class for all library faults.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a membership/subset witness cannot be constructed.
class witness_error : public error {
 public:
  using error::error;
};

/// Raised when a choreography node references locations outside the
/// census it is being interpreted under.
class census_error : public error {
 public:
  using error::error;
};

/// Reading the payload of a Located/Faceted value at a non-owner.
/// This can only arise from a library bug; it is never recoverable.
class empty_read_error : public error {
 public:
  using error::error;
};

/// Serialization / deserialization failure.
class codec_error : public error {
 public:
  using error::error;
};

/// Transport-level failure (bind, connect, malformed frame, unknown peer).
class transport_error : public error {
 public:
  using error::error;
};

/// A blocking receive exceeded the configured timeout.
class timeout_error : public transport_error {
 public:
  using transport_error::transport_error;
};

/// A scripted local environment ran out of input lines.
class script_error : public error {
 public:
  using error::error;
};

/// A lottery server detected an opened value that does not match the
/// commitment it previously received.
class commitment_check_failed : public error {
 public:
  using error::error;
};

}  // namespace chor
