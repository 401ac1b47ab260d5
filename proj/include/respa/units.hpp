#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace respa {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline double ghz_to_rad(double f_ghz) { return two_pi * f_ghz * 1e9; }
inline double rad_to_ghz(double omega) { return omega / (two_pi * 1e9); }
inline double rad_to_mhz(double omega) { return omega / (two_pi * 1e6); }
inline double mhz_to_rad(double f_mhz) { return two_pi * f_mhz * 1e6; }

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Library error carrying a short machine-readable kind, e.g. "bracket", "config".
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

}  // namespace respa
