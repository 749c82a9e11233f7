#include "ksc/format.hpp"

#include <charconv>
#include <cmath>

namespace ksc {

namespace {

std::string finish(char* first, std::to_chars_result res) {
  return std::string(first, res.ptr);
}

}  // namespace

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  return finish(buf, std::to_chars(buf, buf + sizeof(buf), v));
}

std::string fmt_double(double v, int precision) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  return finish(buf, std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general, precision));
}

std::string fmt_int(long long v) {
  char buf[32];
  return finish(buf, std::to_chars(buf, buf + sizeof(buf), v));
}

}  // namespace ksc
