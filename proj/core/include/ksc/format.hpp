#pragma once

#include <string>

namespace ksc {

// Shortest round-trip decimal form, locale independent. NaN prints as "nan",
// infinities as "inf"/"-inf", so emitted tables are byte-stable.
std::string fmt_double(double v);

// fixed significant digits (printf %g semantics), locale independent
std::string fmt_double(double v, int precision);

std::string fmt_int(long long v);

}  // namespace ksc
