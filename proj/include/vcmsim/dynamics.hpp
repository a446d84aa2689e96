#pragma once
// Vacancy-concentration dynamics: the ionic-hopping rate equation driving
// resistive switching, pulse-driven integration with adaptive substeps,
// switching-curve generation, and SET/RESET trajectory matching.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "vcmsim/errors.hpp"
#include "vcmsim/noise.hpp"
#include "vcmsim/params.hpp"
#include "vcmsim/physics.hpp"
#include "vcmsim/rng.hpp"
#include "vcmsim/state.hpp"
#include "vcmsim/surrogate.hpp"

namespace vcmsim {

// =============================================================================
// Pulse description
// =============================================================================

/// One programming pulse: a rectangular voltage of `amplitude` (negative
/// drives SET, positive RESET) held for `duration`, integrated with explicit
/// Euler substeps no longer than `max_substep` and adaptively shortened so a
/// single step never moves N_d by more than `max_dNd_fraction` of the
/// device's concentration range.
struct PulseSpec {
    double amplitude = 0.0;        ///< V, signed
    double duration = 0.0;         ///< s
    double max_substep = 1e-8;     ///< s
    double max_dNd_fraction = 0.01;

    [[nodiscard]] Polarity polarity() const { return polarity_of(amplitude); }

    void validate() const {
        if (!std::isfinite(amplitude) || amplitude == 0.0)
            throw invalid_argument_error(
                "PulseSpec: amplitude must be finite and nonzero (its sign "
                "selects the polarity)");
        if (!(duration > 0.0) || !std::isfinite(duration))
            throw invalid_argument_error("PulseSpec: requires duration > 0");
        if (!(max_substep > 0.0) || !std::isfinite(max_substep))
            throw invalid_argument_error(
                "PulseSpec: requires max_substep > 0");
        if (!(max_dNd_fraction > 0.0) || !(max_dNd_fraction <= 1.0))
            throw invalid_argument_error(
                "PulseSpec: requires 0 < max_dNd_fraction <= 1");
    }
};

/// Everything computed for one update evaluation, exposed for tracing and
/// analysis.
struct UpdateIntermediates {
    double I_M = 0.0;     ///< A, electrical (terminal) current
    double I_ion = 0.0;   ///< A
    double E_ion = 0.0;   ///< V/m
    double gamma = 0.0;   ///< dimensionless field-asymmetry parameter
    double dW_Af = 0.0;   ///< forward hopping barrier (eV)
    double dW_Ar = 0.0;   ///< reverse hopping barrier (eV)
    double c_VO = 0.0;    ///< average vacancy concentration (1/m^3)
    double F_limit = 0.0; ///< range-limiting window, in [0, 1]
    double T = 0.0;       ///< local temperature (K)
};

// =============================================================================
// Rate-equation pieces
// =============================================================================

/// Field driving ion hops. Under SET it is the disc drop per unit disc
/// length, V_d/l_d = I_M·R_d/l_d = I_M/(Z_VO·e·π·r_d²·N_d·μ_n), and so feels
/// the (noisy) filament radius; under RESET it is the drop across the whole
/// oxide, (V_p+V_d+V_Sch)/l_c = (V_M−V_s)/l_c, which touches no noisy
/// parameter at fixed current.
inline double ion_field(const VoltagePartition& part, const PhysicalParams& p,
                        const DeviceState& s, Polarity polarity) {
    if (part.V_M == 0.0) return 0.0;
    if (polarity == Polarity::SET) return part.V_d / s.l_d;
    return (part.V_M - part.V_s) / p.l_c;
}

struct HoppingBarriers {
    double dW_Af; ///< eV
    double dW_Ar; ///< eV
    double gamma;
};

/// Field-dependent hopping barriers
///   ΔW_{Af/r} = ΔW_A·(√(1−γ²) ∓ γπ/2 + γ·asin γ),
///   γ = e·Z_VO·α·E_ion/(ΔW_A·π).
/// The field tilts the hopping potential: γ > 0 lowers the forward barrier,
/// γ → −γ swaps the pair. Barriers are returned in eV.
inline HoppingBarriers hopping_barriers(const PhysicalParams& p,
                                        double E_ion) {
    if (!std::isfinite(E_ion))
        throw invalid_argument_error("hopping_barriers: non-finite E_ion");
    const double gamma =
        p.e * p.Z_VO * p.alpha_hop * E_ion / (p.dW_A * constants::pi);
    if (!(std::abs(gamma) < 1.0))
        throw domain_error(
            "hopping_barriers: |gamma| >= 1, the field is too strong for "
            "the harmonic barrier picture");
    const double dW_A_eV = p.dW_A / p.e;
    const double even =
        std::sqrt(1.0 - gamma * gamma) + gamma * std::asin(gamma);
    const double odd = gamma * constants::pi / 2.0;
    return {dW_A_eV * (even - odd), dW_A_eV * (even + odd), gamma};
}

/// Range-limiting window (uses the device's own, possibly walked, bounds):
/// 1−(N_d/N_d_max)^10 toward SET, 1−(N_d_min/N_d)^10 toward RESET.
inline double limit_window(const DeviceState& s, Polarity polarity) {
    if (polarity == Polarity::SET)
        return 1.0 - std::pow(s.N_d / s.N_d_max, 10);
    return 1.0 - std::pow(s.N_d_min / s.N_d, 10);
}

/// Ionic hopping current
///   I_ion = Z_VO·e·A·c_VO·α·ν₀·F_limit·(e^{−ΔW_Af/kT} − e^{−ΔW_Ar/kT})
/// with c_VO = (N_p+N_d)/2. Negative under SET (vacancies flow into the
/// disc), positive under RESET, zero at zero field or at the range boundary.
inline double ionic_current(const PhysicalParams& p, const DeviceState& s,
                            const HoppingBarriers& barriers, double T,
                            Polarity polarity) {
    if (!(T > 0.0) || !std::isfinite(T))
        throw invalid_argument_error("ionic_current: requires T > 0");
    const double c_VO = 0.5 * (p.N_p + s.N_d);
    const double F = limit_window(s, polarity);
    const double kT = p.k_B * T;
    return p.Z_VO * p.e * p.area(s.r_d) * c_VO * p.alpha_hop * p.nu_0 * F *
           (std::exp(-barriers.dW_Af * p.e / kT) -
            std::exp(-barriers.dW_Ar * p.e / kT));
}

/// Concentration rate dN_d/dt = −I_ion/(Z_VO·e·A·l_d).
inline double vacancy_rate(const PhysicalParams& p, const DeviceState& s,
                           double I_ion) {
    return -I_ion / (p.Z_VO * p.e * p.area(s.r_d) * s.l_d);
}

/// Evaluate the full update chain at one operating point: electrical
/// partition from the fitted current model, then field, barriers and ionic
/// current.
inline UpdateIntermediates update_intermediates(const FitCoefficients& c,
                                                const PhysicalParams& p,
                                                const DeviceState& s,
                                                double V_M) {
    UpdateIntermediates u;
    u.c_VO = 0.5 * (p.N_p + s.N_d);
    if (V_M == 0.0) {
        // Zero bias: no dissipation, no field, symmetric barriers, no drift.
        // F_limit is polarity-defined; report the SET-direction window.
        const HoppingBarriers b = hopping_barriers(p, 0.0);
        u.dW_Af = b.dW_Af;
        u.dW_Ar = b.dW_Ar;
        u.F_limit = limit_window(s, Polarity::SET);
        u.T = p.T_0;
        return u;
    }
    const VoltagePartition part = voltage_partition_from_surrogate(c, p, s, V_M);
    const Polarity pol = polarity_of(V_M);
    u.I_M = part.I_M;
    u.E_ion = ion_field(part, p, s, pol);
    const HoppingBarriers b = hopping_barriers(p, u.E_ion);
    u.gamma = b.gamma;
    u.dW_Af = b.dW_Af;
    u.dW_Ar = b.dW_Ar;
    u.F_limit = limit_window(s, pol);
    u.T = part.T;
    u.I_ion = ionic_current(p, s, b, part.T, pol);
    return u;
}

// =============================================================================
// Pulse integration
// =============================================================================

/// One row of the per-substep trace. N_d is the state at the end of the
/// substep; I_M, T and E_ion are the operating point the substep integrated
/// (evaluated at its start, as explicit Euler does).
struct TracePoint {
    double t;     ///< s, time since pulse start (end of the substep)
    double N_d;   ///< 1/m^3
    double I_M;   ///< A
    double T;     ///< K
    double E_ion; ///< V/m
};

struct PulseResult {
    DeviceState state;
    std::vector<TracePoint> trace; ///< empty unless requested
};

/// Integrate one pulse with explicit Euler. The substep is the smaller of
/// `max_substep` and the step that caps |ΔN_d| at `max_dNd_fraction` of the
/// device's concentration range; the electrical partition is recomputed
/// every substep. N_d is clamped into the device's bounds, and the
/// cycle-to-cycle walks fire once, at pulse end (bounds first, then r_d,
/// then l_d — a fixed draw order). A collapse of the adaptive step below
/// duration·1e-9 aborts with a stiffness error.
inline PulseResult apply_pulse(const FitCoefficients& c,
                               const PhysicalParams& p, DeviceState s,
                               const PulseSpec& pulse, const NoiseSpec& noise,
                               StreamRng& rng, bool want_trace = false) {
    pulse.validate();
    s.validate();
    noise.validate();
    const Polarity pol = pulse.polarity();
    const double N_d_start = s.N_d;
    const double range = s.N_d_max - s.N_d_min;
    const double min_step = pulse.duration * 1e-9;

    PulseResult out;
    double t = 0.0;
    while (t < pulse.duration * (1.0 - 1e-12)) {
        const UpdateIntermediates u =
            update_intermediates(c, p, s, pulse.amplitude);
        const double rate = vacancy_rate(p, s, u.I_ion);

        double h = std::min(pulse.max_substep, pulse.duration - t);
        if (rate != 0.0) {
            const double cap =
                pulse.max_dNd_fraction * range / std::abs(rate);
            if (cap < min_step)
                throw stiffness_error(
                    "apply_pulse: adaptive substep collapsed below "
                    "duration*1e-9; the rate equation is too stiff for "
                    "explicit integration at this amplitude");
            h = std::min(h, cap);
        }

        s.N_d = std::clamp(s.N_d + rate * h, s.N_d_min, s.N_d_max);
        t += h;
        if (want_trace)
            out.trace.push_back({t, s.N_d, u.I_M, u.T, u.E_ion});
    }

    // Cycle-to-cycle noise: one walk per enabled channel per pulse.
    if (noise.N_d_max.enabled)
        s.N_d_max = c2c_walk_bounds(s.N_d_max, noise.N_d_max.c2c_sigma,
                                    noise.N_d_max.trunc_lo,
                                    noise.N_d_max.trunc_hi, rng);
    if (noise.N_d_min.enabled)
        s.N_d_min = c2c_walk_bounds(s.N_d_min, noise.N_d_min.c2c_sigma,
                                    noise.N_d_min.trunc_lo,
                                    noise.N_d_min.trunc_hi, rng);
    if (!(s.N_d_min < s.N_d_max))
        throw sampling_error(
            "apply_pulse: walked concentration bounds crossed; tighten the "
            "truncation windows");
    if (noise.r_d.enabled)
        s.r_d = c2c_walk_geometry(s.r_d, noise.r_d.c2c_sigma_add,
                                  noise.r_d.c2c_sigma_mult, N_d_start, s.N_d,
                                  s.N_d_min, s.N_d_max, pol,
                                  noise.r_d.trunc_lo, noise.r_d.trunc_hi,
                                  rng);
    if (noise.l_d.enabled)
        s.l_d = c2c_walk_geometry(s.l_d, noise.l_d.c2c_sigma_add,
                                  noise.l_d.c2c_sigma_mult, N_d_start, s.N_d,
                                  s.N_d_min, s.N_d_max, pol,
                                  noise.l_d.trunc_lo, noise.l_d.trunc_hi,
                                  rng);
    // Walked bounds may have moved past the concentration; confine it.
    s.N_d = std::clamp(s.N_d, s.N_d_min, s.N_d_max);
    s.validate();
    out.state = s;
    return out;
}

// =============================================================================
// Switching curves
// =============================================================================

/// Low-voltage readout conductance G = I(V_read)/V_read from the fitted
/// current model. The read is non-destructive: it never touches N_d.
inline double read_conductance(const FitCoefficients& c,
                               const PhysicalParams& p, const DeviceState& s,
                               double V_read = -0.2) {
    if (V_read == 0.0)
        throw invalid_argument_error("read_conductance: V_read must be "
                                     "nonzero");
    return surrogate_current(c, p, s.N_d, V_read) / V_read;
}

struct CurvePoint {
    int pulse_index; ///< 0 = initial state, k = after pulse k
    double N_d;      ///< 1/m^3
    double G;        ///< S
};

/// Apply `n_pulses` identical pulses with noise disabled, recording N_d and
/// the readout conductance after each (index 0 holds the initial state).
inline std::vector<CurvePoint> switching_curve(const FitCoefficients& c,
                                               const PhysicalParams& p,
                                               DeviceState s,
                                               const PulseSpec& pulse,
                                               int n_pulses) {
    if (n_pulses < 1)
        throw invalid_argument_error("switching_curve: requires n_pulses >= 1");
    const NoiseSpec no_noise;
    StreamRng rng(0, 0); // never consumed: every channel is disabled
    std::vector<CurvePoint> curve;
    curve.reserve(static_cast<std::size_t>(n_pulses) + 1);
    curve.push_back({0, s.N_d, read_conductance(c, p, s)});
    for (int k = 1; k <= n_pulses; ++k) {
        s = apply_pulse(c, p, s, pulse, no_noise, rng).state;
        curve.push_back({k, s.N_d, read_conductance(c, p, s)});
    }
    return curve;
}

/// Root-mean-square gap between a SET curve and a RESET curve traversed
/// backwards — the score minimized when matching pulse pairs. Curves must
/// have equal length; index k of `set_curve` is compared against index
/// n−1−k of `reset_curve`.
inline double trajectory_mismatch(const std::vector<CurvePoint>& set_curve,
                                  const std::vector<CurvePoint>& reset_curve) {
    if (set_curve.size() != reset_curve.size() || set_curve.empty())
        throw invalid_argument_error(
            "trajectory_mismatch: curves must be non-empty and equally long");
    const std::size_t n = set_curve.size();
    double ss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double d = set_curve[k].G - reset_curve[n - 1 - k].G;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(n));
}

struct MatchResult {
    PulseSpec reset_pulse;
    double score;                     ///< RMS conductance gap (S)
    std::vector<CurvePoint> set_curve;
    std::vector<CurvePoint> reset_curve;
};

/// Find the RESET amplitude (same duration and stepping as the SET pulse)
/// whose conductance staircase, traversed backwards, best overlays the SET
/// staircase. The SET curve starts from `initial`; each candidate RESET
/// curve starts from the SET curve's final state. Deterministic
/// golden-section search over [reset_lo, reset_hi].
inline MatchResult match_set_reset(const FitCoefficients& c,
                                   const PhysicalParams& p,
                                   const DeviceState& initial,
                                   const PulseSpec& set_pulse,
                                   double reset_lo, double reset_hi,
                                   int n_pulses) {
    set_pulse.validate();
    if (set_pulse.amplitude >= 0.0)
        throw invalid_argument_error(
            "match_set_reset: the SET pulse must have negative amplitude");
    if (!(0.0 < reset_lo && reset_lo < reset_hi))
        throw invalid_argument_error(
            "match_set_reset: requires 0 < reset_lo < reset_hi");
    if (n_pulses < 2)
        throw invalid_argument_error("match_set_reset: requires n_pulses >= 2");

    const auto set_curve = switching_curve(c, p, initial, set_pulse, n_pulses);
    DeviceState top = initial;
    top.N_d = set_curve.back().N_d;

    auto score_of = [&](double amplitude) {
        PulseSpec reset = set_pulse;
        reset.amplitude = amplitude;
        return trajectory_mismatch(
            set_curve, switching_curve(c, p, top, reset, n_pulses));
    };

    // Golden-section search: unimodality holds in practice because the gap
    // grows monotonically as the RESET staircase under- or over-shoots.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = reset_lo, b = reset_hi;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = score_of(x1), f2 = score_of(x2);
    for (int it = 0; it < 80 && (b - a) > 1e-6 * (reset_hi - reset_lo);
         ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = score_of(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = score_of(x2);
        }
    }
    const double best = f1 <= f2 ? x1 : x2;

    MatchResult out;
    out.reset_pulse = set_pulse;
    out.reset_pulse.amplitude = best;
    out.set_curve = set_curve;
    out.reset_curve = switching_curve(c, p, top, out.reset_pulse, n_pulses);
    out.score = trajectory_mismatch(out.set_curve, out.reset_curve);
    return out;
}

} // namespace vcmsim
