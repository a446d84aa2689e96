#pragma once

// =============================================================================
// Per-device mutable state and solved operating point
// =============================================================================

#include <cmath>
#include <cstdint>
#include <limits>

#include "vcmsim/errors.hpp"
#include "vcmsim/params.hpp"

namespace vcmsim {

/// Switching polarity. SET (negative terminal voltage) grows the disc vacancy
/// concentration and the conductance; RESET (positive) shrinks both.
enum class Polarity { SET, RESET };

/// Polarity implied by a nonzero terminal voltage.
inline Polarity polarity_of(double V_M) {
    if (!(V_M != 0.0) || !std::isfinite(V_M))
        throw invalid_argument_error(
            "polarity_of: V_M must be finite and nonzero");
    return V_M < 0.0 ? Polarity::SET : Polarity::RESET;
}

/// Mutable state of one device: the disc vacancy concentration, this device's
/// frozen parameter realizations (equal to the nominals when noise is off),
/// and the position of its private random stream.
struct DeviceState {
    double N_d; ///< disc vacancy concentration (1/m^3)

    // Per-device realizations. r_d/l_d are drawn at initialization and may
    // random-walk cycle to cycle; N_d_min/N_d_max likewise; G_min/G_max are
    // the conductance bounds enforced by the range-control circuit.
    double r_d;     ///< filament radius (m)
    double l_d;     ///< disc length (m)
    double N_d_min; ///< lower disc concentration bound (1/m^3)
    double N_d_max; ///< upper disc concentration bound (1/m^3)
    double G_min = 0.0; ///< lower conductance control bound (S)
    double G_max = std::numeric_limits<double>::infinity(); ///< upper (S)

    std::uint64_t rng_stream_id = 0; ///< identifier of the private stream
    std::uint64_t rng_counter = 0;   ///< stream position (for checkpoints)

    /// Throw invalid_argument_error on the first violated invariant.
    void validate() const {
        auto pos = [](double v) { return v > 0.0 && !std::isnan(v); };
        if (!pos(r_d) || !pos(l_d) || !pos(N_d_min) || !pos(N_d_max))
            throw invalid_argument_error(
                "DeviceState: noisy parameters must be strictly positive");
        if (!(N_d_min <= N_d && N_d <= N_d_max))
            throw invalid_argument_error(
                "DeviceState: N_d outside [N_d_min, N_d_max]");
        if (!(G_min < G_max))
            throw invalid_argument_error("DeviceState: requires G_min < G_max");
    }
};

/// Noise-free device state at concentration `N_d` (defaults to the lower
/// bound, the high-resistive as-fabricated state).
inline DeviceState nominal_state(const PhysicalParams& p, double N_d = -1.0) {
    DeviceState s{};
    s.N_d = N_d < 0.0 ? p.N_d_min : N_d;
    s.r_d = p.r_d;
    s.l_d = p.l_d;
    s.N_d_min = p.N_d_min;
    s.N_d_max = p.N_d_max;
    s.validate();
    return s;
}

/// A solved electrical operating point: the terminal voltage split across the
/// series path (V_s), plug (V_p), disc (V_d) and Schottky barrier (V_Sch),
/// with the matching current and local filament temperature.
struct VoltagePartition {
    double V_M;   ///< terminal voltage (V)
    double V_s;   ///< series path drop (V)
    double V_p;   ///< plug drop (V)
    double V_d;   ///< disc drop (V)
    double V_Sch; ///< Schottky barrier drop (V)
    double I_M;   ///< device current (A)
    double T;     ///< local filament temperature (K)

    /// Closure defect |V_M - (V_s + V_p + V_d + V_Sch)| (V).
    [[nodiscard]] double closure() const {
        return std::abs(V_M - (V_s + V_p + V_d + V_Sch));
    }
};

} // namespace vcmsim
