#include "ehrenfest/text.hpp"

#include <charconv>
#include <stdexcept>
#include <system_error>

namespace ehrenfest {

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc()) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc()) throw std::invalid_argument("parse_double: bad number '" + text + "'");
  return value;
}

}  // namespace ehrenfest
