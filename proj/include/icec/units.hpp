#pragma once

// Conversion constants. Everything inside the library is in Hartree atomic units.
namespace icec::units {

inline constexpr double hartree_ev = 27.211386;
inline constexpr double hartree_cm = 219474.6313632;
inline constexpr double bohr_angstrom = 0.52917721;
inline constexpr double bohr2_mb = 28.00285;
inline constexpr double boltzmann = 3.166812e-6;  // hartree / K
inline constexpr double speed_of_light = 137.035999084;
inline constexpr double amu = 1822.888486;  // electron masses
inline constexpr double pi = 3.14159265358979323846;

constexpr double from_ev(double e) { return e / hartree_ev; }
constexpr double to_ev(double e) { return e * hartree_ev; }
constexpr double from_cm(double e) { return e / hartree_cm; }
constexpr double to_cm(double e) { return e * hartree_cm; }
constexpr double from_angstrom(double r) { return r / bohr_angstrom; }
constexpr double to_angstrom(double r) { return r * bohr_angstrom; }
constexpr double from_mb(double s) { return s / bohr2_mb; }
constexpr double to_mb(double s) { return s * bohr2_mb; }

constexpr double reduced_mass_amu(double m1, double m2) { return m1 * m2 / (m1 + m2) * amu; }

}  // namespace icec::units
