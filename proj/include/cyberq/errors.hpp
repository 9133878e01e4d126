#pragma once

#include <stdexcept>
#include <string>

namespace cyberq {

// Malformed input document: missing/unknown field or wrong type.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally well-formed config that violates a scenario invariant.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownHostError : std::runtime_error {
  explicit UnknownHostError(const std::string& id)
      : std::runtime_error("unknown host: " + id) {}
};

struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepAfterTerminalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyActionSetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed serialized Q-table or metrics document.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WindowTooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptySeriesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cyberq
