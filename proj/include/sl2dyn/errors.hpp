#pragma once

#include <stdexcept>

namespace sl2dyn {

// An enumeration or operator would exceed its configured size bound.
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid argument at a public construction boundary: non-prime modulus,
// determinant != 1, wrong residue class, delta below metric resolution, ...
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace sl2dyn
