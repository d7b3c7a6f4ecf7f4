#pragma once

#include <charconv>
#include <complex>
#include <string>
#include <system_error>

namespace kaontime {

// Shortest decimal representation that round-trips binary64; keeps CSV and
// JSON output byte-stable across runs.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) return "nan";
  return std::string(buf, res.ptr);
}

inline std::string format_complex(std::complex<double> z) {
  return format_double(z.real()) + (z.imag() < 0 ? "-" : "+") +
         format_double(std::abs(z.imag())) + "i";
}

}  // namespace kaontime
