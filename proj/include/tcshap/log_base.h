#pragma once

#include <string>
#include <string_view>

namespace tcshap {

// Logarithm base used for every entropy value. Rankings do not depend on it;
// epsilon thresholds do, since they are expressed in the same units.
enum class LogBase { kTwo, kE, kTen };

// Parses "2", "e" or "10".
LogBase ParseLogBase(std::string_view text);
std::string ToString(LogBase base);
// ln(base), the divisor that converts nats into the requested unit.
double LnOfBase(LogBase base);

}  // namespace tcshap
