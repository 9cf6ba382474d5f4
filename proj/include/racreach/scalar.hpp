#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace racreach {

/// Exact rational number used throughout the geometry kernel.
using Scalar = mpq_class;
using ScalarVector = std::vector<Scalar>;

/// Parses "3", "-2/3", "4.25", "1e-3", "-0.5E2". Throws std::invalid_argument.
Scalar parse_scalar(std::string_view text);

/// Canonical "p/q" (or "p" for integers) rendering.
std::string to_string(const Scalar& value);

/// Nearest double (ties toward zero).
double to_double(const Scalar& value);

/// Exact rational value of a finite double.
Scalar from_double(double value);

}  // namespace racreach
