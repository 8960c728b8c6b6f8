#pragma once

#include <numbers>

// Unit helpers. Internally everything is SI: angular frequencies in rad/s,
// times in s, GVD in s^2.
namespace freqmux::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

inline constexpr double kPico = 1e-12;
inline constexpr double kNano = 1e-9;
inline constexpr double kGiga = 1e9;

constexpr double ghz_to_rad_per_s(double ghz) { return kTwoPi * ghz * kGiga; }
constexpr double rad_per_s_to_ghz(double w) { return w / (kTwoPi * kGiga); }
constexpr double hz_to_rad_per_s(double hz) { return kTwoPi * hz; }
constexpr double rad_per_s_to_hz(double w) { return w / kTwoPi; }
constexpr double ps_to_s(double ps) { return ps * kPico; }
constexpr double s_to_ps(double s) { return s / kPico; }

// Vacuum wavelength (m) to angular frequency (rad/s).
constexpr double wavelength_to_angular(double lambda_m) {
  return kTwoPi * kSpeedOfLight / lambda_m;
}

// Dispersion in ps/GHz (delay per ordinary frequency) to s per rad/s.
constexpr double ps_per_ghz_to_s_per_rad(double ps_per_ghz) {
  return ps_per_ghz * kPico / (kTwoPi * kGiga);
}

// FWHM of a Gaussian intensity profile to its standard deviation.
inline constexpr double kFwhmPerSigma = 2.3548200450309493;

}  // namespace freqmux::units
