#pragma once

#include "mobo/types.hpp"

#include <string>

namespace mobo::harness {

/// Round-trip decimal form ("%.17g"); infinities print as "inf"/"-inf".
std::string format_double(double value);

/// Components joined with ';'.
std::string format_vector(const Vector& v);

}  // namespace mobo::harness
