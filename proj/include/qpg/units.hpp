#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace qpg {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

/// Vacuum wavelength [nm] -> angular frequency [rad/s].
inline double omega_from_nm(double wavelength_nm) {
  return 2.0 * kPi * kSpeedOfLight / (wavelength_nm * 1e-9);
}

/// Angular frequency [rad/s] -> vacuum wavelength [nm].
inline double nm_from_omega(double omega) {
  return 2.0 * kPi * kSpeedOfLight / omega * 1e9;
}

/// sin(x)/x with the removable singularity at 0.
inline double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

/// Shortest decimal string that round-trips to the same double; used for
/// human-readable, byte-reproducible data files.
inline std::string format_shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace qpg
