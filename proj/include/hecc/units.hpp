#pragma once

// Unit conversions shared by config loading and channel generation.
// Everything downstream of config load works in SI (W, Hz, s, bits, cycles).

namespace hecc::units {

double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

// Noise density given as dBm/Hz, returned in W/Hz.
inline double dbm_per_hz_to_watt_per_hz(double dbm_per_hz) { return dbm_to_watt(dbm_per_hz); }

inline constexpr double kBitsPerByte = 8.0;
inline constexpr double kGiga = 1e9;

}  // namespace hecc::units
