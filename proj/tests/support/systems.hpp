// The three regression systems used across the suite.
#pragma once

#include "convlyap/vector_field.hpp"

namespace convlyap::testing {

inline VectorField cubic() { return parse_system("x1' = -x1^3"); }
inline VectorField linear() { return parse_system("x1' = -x1 + 1/2*x2; x2' = -1/2*x1 - x2"); }
inline VectorField vdp() { return parse_system("x1' = -x2; x2' = -(1 - x1^2)*x2 + x1"); }

inline Polynomial P(const char* text, std::size_t nvars) { return parse_polynomial(text, nvars); }

}  // namespace convlyap::testing
