#pragma once

// =============================================================================
// Closed-form fitted current surrogate
// =============================================================================
// The full electrical model in physics.hpp couples the Schottky current, the
// resistive voltage divider, and Joule heating into a nonlinear system that
// must be solved iteratively — too slow, and too branchy, for the inner loop
// of array-level training. This header evaluates a closed-form surrogate
// I_M(N_d, V_M) — one expression per polarity, no iteration — whose
// coefficients are least-squares calibrated against the full model by
// calibrate.hpp. Knowing I_M directly, the voltage drop across every layer
// and the local temperature follow in closed form as well.
//
// The surrogate hides the physical parameters behind its fit coefficients:
// it is calibrated for the nominal device and takes no per-device geometry.
// Per-device variability enters only through N_d and through the partition
// step (voltage_partition_from_surrogate), which recomputes the resistive
// divider from the perturbed geometry.
// =============================================================================

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "vcmsim/constants.hpp"
#include "vcmsim/errors.hpp"
#include "vcmsim/params.hpp"
#include "vcmsim/physics.hpp"
#include "vcmsim/state.hpp"

namespace vcmsim {

// =============================================================================
// Coefficients
// =============================================================================

/// Fit coefficients of the two-branch current surrogate. The negative branch
/// (V_M < 0) uses a0..f3 with the vacancy concentration entering as
/// N_d·1e-26; the positive branch (V_M > 0) uses g0..k0 with N_d entering
/// as (N_d/N_d_min)^(-j0). All values are dimensionless fit constants in the
/// units the expressions imply (currents in A, voltages in V).
struct FitCoefficients {
    // negative branch: I = -a - b/(1+c^d)^f
    double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
    double b0 = 0, b1 = 0;
    double c0 = 0, c1 = 0, c2 = 0, c3 = 0;
    double d0 = 0, d1 = 0, d2 = 0, d3 = 0;
    double f0 = 0, f1 = 0, f2 = 0, f3 = 0;
    // positive branch: I = -g0(e^(-g1 V)-1)/(1+h(V)·(N/N_min)^(-j0))^(1/k0)
    double g0 = 0, g1 = 0;
    double h0 = 0, h1 = 0, h2 = 0, h3 = 0;
    double j0 = 0;
    double k0 = 0;

    void validate() const;
};

namespace detail {

/// Field table shared by the loader, the saver, and the calibrator's
/// parameter packing. Order is the canonical file order.
inline std::map<std::string, double FitCoefficients::*> coefficient_fields() {
    using F = FitCoefficients;
    return {
        {"a0", &F::a0}, {"a1", &F::a1}, {"a2", &F::a2}, {"a3", &F::a3},
        {"b0", &F::b0}, {"b1", &F::b1},
        {"c0", &F::c0}, {"c1", &F::c1}, {"c2", &F::c2}, {"c3", &F::c3},
        {"d0", &F::d0}, {"d1", &F::d1}, {"d2", &F::d2}, {"d3", &F::d3},
        {"f0", &F::f0}, {"f1", &F::f1}, {"f2", &F::f2}, {"f3", &F::f3},
        {"g0", &F::g0}, {"g1", &F::g1},
        {"h0", &F::h0}, {"h1", &F::h1}, {"h2", &F::h2}, {"h3", &F::h3},
        {"j0", &F::j0},
        {"k0", &F::k0},
    };
}

} // namespace detail

inline void FitCoefficients::validate() const {
    for (const auto& [key, member] : detail::coefficient_fields())
        if (!std::isfinite(this->*member))
            throw invalid_argument_error("FitCoefficients: " + key +
                                         " is not finite");
    if (k0 == 0.0)
        throw invalid_argument_error("FitCoefficients: k0 must be nonzero");
    if (!(f2 > 0.0))
        throw invalid_argument_error(
            "FitCoefficients: f2 must be > 0 (appears as a ratio base)");
}

/// Load a coefficient file (same `key = value` format as parameter files).
/// All 26 keys are required; unknown keys are rejected.
inline FitCoefficients load_coefficients(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw format_error("cannot open coefficient file: " + path);
    auto kv = detail::parse_kv_file(in, path);

    FitCoefficients c{};
    auto fields = detail::coefficient_fields();
    for (const auto& [key, value] : kv) {
        auto it = fields.find(key);
        if (it == fields.end())
            throw format_error(path + ": unknown coefficient `" + key + "`");
        c.*(it->second) = value;
    }
    for (const auto& [key, member] : fields)
        if (!kv.count(key))
            throw format_error(path + ": missing coefficient `" + key + "`");
    c.validate();
    return c;
}

/// Write a coefficient file readable by load_coefficients. Values are
/// round-trip exact (max_digits10).
inline void save_coefficients(const std::string& path,
                              const FitCoefficients& c,
                              const std::string& header_comment = {}) {
    c.validate();
    std::ofstream out(path);
    if (!out)
        throw format_error("cannot open coefficient file for write: " + path);
    if (!header_comment.empty()) {
        std::istringstream lines(header_comment);
        std::string line;
        while (std::getline(lines, line))
            out << "# " << line << "\n";
    }
    out.precision(17);
    for (const auto& [key, member] : detail::coefficient_fields())
        out << key << " = " << c.*member << "\n";
    if (!out)
        throw format_error("write failed: " + path);
}

// =============================================================================
// Evaluation
// =============================================================================

/// Closed-form surrogate current (A) at terminal voltage V_M and disc
/// vacancy concentration N_d. V_M = 0 returns exactly 0 by convention (both
/// physical branches vanish at zero bias). N_d must lie within a 4x headroom
/// envelope of the nominal [N_d_min, N_d_max] window — the calibrated
/// validity range plus room for device-to-device spread on the bounds.
inline double surrogate_current(const FitCoefficients& c,
                                const PhysicalParams& p, double N_d,
                                double V_M) {
    if (!std::isfinite(V_M))
        throw invalid_argument_error("surrogate_current: non-finite V_M");
    if (!std::isfinite(N_d) || N_d < 0.25 * p.N_d_min || N_d > 4.0 * p.N_d_max)
        throw invalid_argument_error(
            "surrogate_current: N_d outside the calibrated envelope: " +
            std::to_string(N_d));
    if (V_M == 0.0) return 0.0;

    double I = 0.0;
    if (V_M < 0.0) {
        const double a =
            (c.a1 + c.a0) / (1.0 + std::exp(-(V_M + c.a2) / c.a3)) - c.a0;
        const double b = c.b1 * (1.0 - std::exp(-V_M)) - c.b0 * V_M;
        const double cc =
            (c.c2 * std::exp(-V_M / c.c3) + c.c1 * V_M - c.c0) / (N_d * 1e-26);
        const double d = c.d2 * std::exp(-V_M / c.d3) + c.d1 * V_M - c.d0;
        const double f =
            c.f0 + (c.f1 - c.f0) / (1.0 + std::pow(-V_M / c.f2, c.f3));
        I = -a - b / std::pow(1.0 + std::pow(cc, d), f);
    } else {
        const double h = c.h0 + c.h1 * V_M + c.h2 * std::exp(-c.h3 * V_M);
        const double scale = std::pow(N_d / p.N_d_min, -c.j0);
        I = -c.g0 * (std::exp(-c.g1 * V_M) - 1.0) /
            std::pow(1.0 + h * scale, 1.0 / c.k0);
    }
    if (!std::isfinite(I))
        throw evaluation_error(
            "surrogate_current: non-finite result at V_M = " +
            std::to_string(V_M) + " V, N_d = " + std::to_string(N_d) +
            " 1/m^3 (check coefficient signs: fractional powers require "
            "positive bases)");
    return I;
}

/// Voltage partition and local temperature from the surrogate current: with
/// I_M known, every series drop is closed-form — V_s from the self-heated
/// line resistance, V_p and V_d from the ohmic layers (using the device's
/// perturbed geometry), and V_Sch as the remainder. T follows from the power
/// dissipated past the series resistance, referenced to the nominal radius.
inline VoltagePartition voltage_partition_from_surrogate(
    const FitCoefficients& c, const PhysicalParams& p, const DeviceState& s,
    double V_M) {
    s.validate();
    if (!std::isfinite(V_M))
        throw invalid_argument_error(
            "voltage_partition_from_surrogate: non-finite V_M");

    VoltagePartition part{};
    part.V_M = V_M;
    part.T = p.T_0;
    if (V_M == 0.0) return part;

    const double I = surrogate_current(c, p, s.N_d, V_M);
    part.I_M = I;
    part.V_s = I * series_resistance(p, I);
    part.V_p = I * layer_resistance(p, p.l_p, p.N_p, s.r_d);
    part.V_d = I * layer_resistance(p, s.l_d, s.N_d, s.r_d);
    part.V_Sch = V_M - part.V_s - part.V_p - part.V_d;
    if (std::abs(part.V_Sch) > std::abs(V_M))
        throw partition_error(
            "voltage_partition_from_surrogate: |V_Sch| = " +
            std::to_string(std::abs(part.V_Sch)) + " V exceeds |V_M| = " +
            std::to_string(std::abs(V_M)) +
            " V (surrogate current inconsistent with the series stack)");
    part.T = local_temperature(p, I, V_M - part.V_s, polarity_of(V_M), s.r_d);
    return part;
}

} // namespace vcmsim
