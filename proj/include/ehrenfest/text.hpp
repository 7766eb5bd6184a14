#ifndef EHRENFEST_TEXT_HPP
#define EHRENFEST_TEXT_HPP

#include <string>

namespace ehrenfest {

// Shortest decimal string that round-trips to the same double (to_chars),
// locale-independent, so CSV goldens are stable across runs and platforms.
std::string format_double(double value);

// Parses a double; throws std::invalid_argument on malformed input.
double parse_double(const std::string& text);

}  // namespace ehrenfest

#endif  // EHRENFEST_TEXT_HPP
