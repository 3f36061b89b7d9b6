#pragma once

namespace invchar::units {

// Multiply to convert into SI, divide to convert out of it.
// Library internals are strictly SI; these factors are for the I/O
// boundaries (config files, CLI flags, report columns).
inline constexpr double nm = 1e-9;          // length
inline constexpr double um = 1e-6;          // length
inline constexpr double fF = 1e-15;         // capacitance
inline constexpr double ps = 1e-12;         // time
inline constexpr double cm2_per_vs = 1e-4;  // mobility (cm^2/Vs -> m^2/Vs)
inline constexpr double mA = 1e-3;          // current

}  // namespace invchar::units
