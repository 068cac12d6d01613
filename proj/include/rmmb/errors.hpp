#pragma once

#include <stdexcept>

namespace rmmb {

// Input data fails its schema: malformed JSON, unknown kind tag, missing or
// ill-typed field. CLI exit code 2.
struct schema_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A call breaks an operation contract: bid outside support, negative weight,
// index out of range, guard exceeded. CLI exit code 3.
struct contract_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rmmb
