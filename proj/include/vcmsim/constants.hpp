#pragma once

// =============================================================================
// Universal physical constants (CODATA 2018 exact/recommended values)
// =============================================================================

namespace vcmsim::constants {

/// Elementary charge (C). Exact by SI definition.
inline constexpr double e = 1.602176634e-19;

/// Boltzmann constant (J/K). Exact by SI definition.
inline constexpr double k_B = 1.380649e-23;

/// Planck constant (J·s). Exact by SI definition.
inline constexpr double h = 6.62607015e-34;

/// Vacuum permittivity (F/m).
inline constexpr double eps0 = 8.8541878128e-12;

/// pi, to double precision.
inline constexpr double pi = 3.141592653589793238462643383279502884;

} // namespace vcmsim::constants
