#pragma once

// =============================================================================
// Full electrical model of the VCM cell
// =============================================================================
// The cell is a series stack: metal lines + TiOx layer (self-heating,
// current-dependent resistance), the filament plug and disc (ohmic layers
// whose resistance follows the local vacancy concentration), and a Schottky
// barrier at the disc/electrode interface that dominates the nonlinearity.
//
// Under negative terminal voltage (SET) the barrier is reverse-biased and
// conduction is tunneling-assisted; under positive voltage (RESET) it is
// forward-biased thermionic emission. The barrier height self-consistently
// depends on the barrier voltage (image-force lowering) and the local
// temperature follows Joule dissipation in the oxide. solve_full_model
// resolves the resulting nonlinear system by bracketed bisection on the
// device current and serves as the ground-truth oracle for the closed-form
// surrogate in surrogate.hpp.
// =============================================================================

#include <algorithm>
#include <cmath>

#include "vcmsim/constants.hpp"
#include "vcmsim/errors.hpp"
#include "vcmsim/params.hpp"
#include "vcmsim/state.hpp"

namespace vcmsim {

/// Series resistance of lines + TiOx at current I_M (ohm). The line term
/// grows with dissipated power (self-heating), so the dependence is on I_M²
/// and the function is even in I_M.
inline double series_resistance(const PhysicalParams& p, double I_M) {
    if (!std::isfinite(I_M))
        throw invalid_argument_error("series_resistance: non-finite I_M");
    return p.R_TiOx +
           p.R_0 * (1.0 + p.alpha_l * p.R_0 * I_M * I_M * p.R_th_line);
}

/// Ohmic resistance of a filament layer (plug or disc) of length
/// `region_length`, vacancy concentration `concentration`, and radius `r_d`:
/// R = l / (Z_VO·e·pi·r_d²·N·mu_n). Inversely proportional to N and to r_d².
inline double layer_resistance(const PhysicalParams& p, double region_length,
                               double concentration, double r_d) {
    if (!(region_length > 0.0) || !(concentration > 0.0) || !(r_d > 0.0) ||
        !std::isfinite(region_length) || !std::isfinite(concentration) ||
        !std::isfinite(r_d))
        throw invalid_argument_error(
            "layer_resistance: inputs must be positive and finite");
    const double A = constants::pi * r_d * r_d;
    return region_length / (p.Z_VO * p.e * A * concentration * p.mu_n);
}

/// Intermediate barrier quantities at one operating point.
struct SchottkyTerms {
    double W_00;      ///< characteristic tunneling energy (J)
    double W_0;       ///< W_00 / tanh(W_00 / k_B T) (J)
    double eps_prime; ///< W_00 / (W_00/(k_B T) - tanh(W_00/(k_B T))) (J)
    double phi_Bn;    ///< effective barrier height after lowering (V)
};

/// Evaluate the tunneling energies and the image-force-lowered barrier
/// height. The lowering saturates at flat band: for barrier voltages beyond
/// phi_Bn0 - phi_n the band bending term is clamped at zero, and a fully
/// collapsed barrier clamps at phi_Bn = 0.
inline SchottkyTerms schottky_terms(const PhysicalParams& p, double V_Sch,
                                    double N_d, double T) {
    SchottkyTerms t{};
    t.W_00 = (p.e * p.h / (4.0 * constants::pi)) *
             std::sqrt(p.Z_VO * N_d / (p.m_star * p.eps));
    const double x = t.W_00 / (p.k_B * T);
    t.W_0 = t.W_00 / std::tanh(x);
    t.eps_prime = t.W_00 / (x - std::tanh(x));
    const double psi = std::max(0.0, p.phi_Bn0 - p.phi_n - V_Sch);
    const double e3 = p.e * p.e * p.e;
    const double lowering =
        std::pow(e3 * p.Z_VO * N_d * psi /
                     (8.0 * constants::pi * constants::pi * p.eps_phiB *
                      p.eps_phiB * p.eps_phiB),
                 0.25);
    t.phi_Bn = std::max(0.0, p.phi_Bn0 - lowering);
    return t;
}

namespace detail {

inline void check_exp_arg(double arg, const char* where) {
    if (arg > 700.0)
        throw saturation_error(std::string(where) +
                               ": exponential overflow, exponent " +
                               std::to_string(arg));
}

} // namespace detail

/// Current through the Schottky barrier (A). The branch is chosen by the
/// polarity of the applied terminal voltage, not by sign(V_Sch): SET selects
/// the reverse tunneling-assisted branch, RESET the forward thermionic one.
/// The filament radius `r_d` sets the conducting area.
inline double schottky_current(const PhysicalParams& p, double V_Sch,
                               double N_d, double T, double r_d,
                               Polarity polarity) {
    if (!(T > 0.0) || !(N_d > 0.0) || !(r_d > 0.0) || !std::isfinite(V_Sch))
        throw invalid_argument_error(
            "schottky_current: requires T > 0, N_d > 0, r_d > 0, finite V_Sch");
    const double A = constants::pi * r_d * r_d;
    const SchottkyTerms t = schottky_terms(p, V_Sch, N_d, T);
    if (polarity == Polarity::RESET) {
        // Forward thermionic emission; vanishes at V_Sch = 0.
        const double barrier = -p.e * t.phi_Bn / (p.k_B * T);
        const double drive = p.e * V_Sch / (p.k_B * T);
        detail::check_exp_arg(drive, "schottky_current(forward)");
        return A * p.A_star * T * T * std::exp(barrier) *
               (std::exp(drive) - 1.0);
    }
    // Reverse tunneling-assisted branch. Inside the root: W_00 [J] times
    // e·(|V_Sch| + phi_Bn/cosh²(W_00/k_B T)) [J] gives J²; the prefactor
    // A·A*·T/k_B [A/J] restores amperes.
    const double x = t.W_00 / (p.k_B * T);
    const double cosh_x = std::cosh(x);
    const double root = std::sqrt(
        constants::pi * t.W_00 * p.e *
        (std::abs(V_Sch) + t.phi_Bn / (cosh_x * cosh_x)));
    const double drive = p.e * std::abs(V_Sch) / t.eps_prime;
    detail::check_exp_arg(drive, "schottky_current(reverse)");
    return -A * (p.A_star * T / p.k_B) * root *
           std::exp(-p.e * t.phi_Bn / t.W_0) * (std::exp(drive) - 1.0);
}

/// Local filament temperature (K) from Joule dissipation in the oxide:
/// T = I_M · V_internal · R_th(polarity) · (r_d / r_d_noisy)² + T_0, where
/// V_internal is the voltage across everything but the series path. The
/// (r_d/r_d_noisy)² factor rescales the thermal resistance for a device whose
/// realized radius differs from nominal; with r_d_noisy = r_d it drops out.
inline double local_temperature(const PhysicalParams& p, double I_M,
                                double V_internal, Polarity polarity,
                                double r_d_noisy) {
    if (!std::isfinite(I_M) || !std::isfinite(V_internal) || !(r_d_noisy > 0.0))
        throw invalid_argument_error(
            "local_temperature: non-finite inputs or r_d_noisy <= 0");
    const double R_th =
        polarity == Polarity::SET ? p.R_th_SET : p.R_th_RESET;
    const double scale = (p.r_d * p.r_d) / (r_d_noisy * r_d_noisy);
    const double T = I_M * V_internal * R_th * scale + p.T_0;
    if (T < p.T_0)
        throw internal_error(
            "local_temperature: negative dissipation (T < T_0) — sign bug "
            "upstream, I_M·V_internal = " +
            std::to_string(I_M * V_internal));
    return T;
}

/// Convergence settings of the full-model solve.
struct SolveOptions {
    int max_iterations = 200;
    double tolerance = 1e-9; ///< on the closure residual, in volts per
                             ///< max(1 V, |V_M|)
};

/// Self-consistently solve the full stack at terminal voltage V_M.
///
/// Given a current I, the series/plug/disc drops and the local temperature
/// are closed-form, and the barrier voltage follows from the partition; the
/// solution is the I at which the Schottky branch reproduces that same
/// current. That residual changes sign over [0, V_M/R_stack(0)], so
/// bracketed bisection on I converges unconditionally; the temperature is
/// re-evaluated from the current iterate at every step. Returns the solved
/// partition; throws convergence_error carrying the final residual (in
/// volts) if the tolerance is not met within the iteration cap.
inline VoltagePartition solve_full_model(const PhysicalParams& p,
                                         const DeviceState& s, double V_M,
                                         const SolveOptions& opt = {}) {
    if (!std::isfinite(V_M))
        throw invalid_argument_error("solve_full_model: non-finite V_M");
    s.validate();
    if (V_M == 0.0)
        return VoltagePartition{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, p.T_0};

    const Polarity polarity = polarity_of(V_M);
    const double R_p = layer_resistance(p, p.l_p, p.N_p, s.r_d);
    const double R_d = layer_resistance(p, s.l_d, s.N_d, s.r_d);

    // Temperature at current iterate I, clamped to ambient: transient
    // bracket-edge iterates can overshoot V_internal below zero, which is
    // unphysical but harmless mid-iteration.
    const auto T_of = [&](double I) {
        const double V_int = V_M - I * series_resistance(p, I);
        const double R_th =
            polarity == Polarity::SET ? p.R_th_SET : p.R_th_RESET;
        const double scale = (p.r_d * p.r_d) / (s.r_d * s.r_d);
        return std::max(p.T_0, I * V_int * R_th * scale + p.T_0);
    };

    // Residual h(I) = I_Schottky(V_Sch(I), T(I)) - I, with V_Sch kept on the
    // polarity's half-line (the clamp only binds at bracket edges).
    const auto residual = [&](double I) {
        double V_Sch = V_M - I * (series_resistance(p, I) + R_p + R_d);
        V_Sch = polarity == Polarity::SET ? std::min(V_Sch, 0.0)
                                          : std::max(V_Sch, 0.0);
        return schottky_current(p, V_Sch, s.N_d, T_of(I), s.r_d, polarity) - I;
    };

    const double R_stack0 = series_resistance(p, 0.0) + R_p + R_d;
    const double I_edge = V_M / R_stack0;

    // The residual can hold several roots: under forward bias the image-force
    // lowering makes the barrier height itself a function of V_Sch, which
    // folds the solution curve and leaves a barrier-collapsed (high-current)
    // and a barrier-restored (low-current) branch coexisting. A voltage ramp
    // from equilibrium tracks the collapsed branch, so we deterministically
    // select the root nearest the I_edge end of the bracket: scan fixed
    // panels from I_edge toward zero and bisect inside the first panel whose
    // endpoints change sign.
    constexpr int kScanPanels = 64;
    double lo = 0.0, hi = 0.0; // bracket with h(lo) > 0 >= h(hi)
    {
        double I_prev = I_edge;
        double h_prev = residual(I_prev);
        bool found = false;
        for (int k = 1; k <= kScanPanels; ++k) {
            const double I_k =
                I_edge * (1.0 - static_cast<double>(k) / kScanPanels);
            const double h_k = residual(I_k);
            if ((h_prev > 0.0) != (h_k > 0.0) || h_k == 0.0) {
                if (h_prev > 0.0) {
                    lo = I_prev;
                    hi = I_k;
                } else {
                    lo = I_k;
                    hi = I_prev;
                }
                found = true;
                break;
            }
            I_prev = I_k;
            h_prev = h_k;
        }
        if (!found)
            throw convergence_error(
                "solve_full_model: no sign change over the current bracket "
                "at V_M = " + std::to_string(V_M),
                std::abs(h_prev) * R_stack0);
    }

    const double tol_V = opt.tolerance * std::max(1.0, std::abs(V_M));
    double I = 0.5 * (lo + hi);
    double h_mid = residual(I);
    bool converged = false;
    for (int it = 0; it < opt.max_iterations; ++it) {
        if (std::abs(h_mid) * R_stack0 <= tol_V) {
            converged = true;
            break;
        }
        if (h_mid > 0.0)
            lo = I;
        else
            hi = I;
        const double next = 0.5 * (lo + hi);
        if (next == I) { // bracket exhausted at double precision
            converged = std::abs(h_mid) * R_stack0 <= tol_V;
            break;
        }
        I = next;
        h_mid = residual(I);
    }
    if (!converged)
        throw convergence_error(
            "solve_full_model: no convergence at V_M = " + std::to_string(V_M),
            std::abs(h_mid) * R_stack0);

    VoltagePartition out{};
    out.V_M = V_M;
    out.I_M = I;
    out.V_s = I * series_resistance(p, I);
    out.V_p = I * R_p;
    out.V_d = I * R_d;
    out.V_Sch = V_M - out.V_s - out.V_p - out.V_d;
    out.T = T_of(I);
    return out;
}

} // namespace vcmsim
