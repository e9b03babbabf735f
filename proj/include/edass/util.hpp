#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace edass {

// Base for all domain errors so the CLI boundary can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fixed-decimal formatting. Trace and metrics output must be byte-stable
// across runs, so all floating-point printing funnels through snprintf
// instead of locale-sensitive iostreams.
inline std::string fmt_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

// Shortest decimal form that parses back to exactly the same double. Keeps
// serialized scenarios readable while making round-trips lossless.
inline std::string fmt_double(double v) {
  char buf[64];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline double l2_norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace edass
