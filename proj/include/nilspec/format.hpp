#pragma once

#include <string>

namespace nilspec {

/// Shortest decimal string that round-trips to the same double
/// ("inf", "-inf", "nan" for non-finite values).
std::string format_double(double x);

}  // namespace nilspec
