#pragma once

#include <stdexcept>
#include <string>

namespace dlsh {

// Base for every error thrown by the library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Points or queries whose length disagrees with the dataset dimension.
struct dimension_error : error {
  using error::error;
};

// Malformed or truncated dataset / index / edge-list files.
struct format_error : error {
  using error::error;
};

// Arguments outside an operation's precondition.
struct argument_error : error {
  using error::error;
};

// Mutually inconsistent numeric inputs, e.g. more near pairs than pairs.
struct inconsistent_input_error : error {
  using error::error;
};

// A rho model that cannot be inverted inside the search bracket.
struct solver_error : error {
  using error::error;
};

}  // namespace dlsh
