#pragma once

// =============================================================================
// Device parameter set
// =============================================================================
// All fixed material, geometry, and circuit parameters of a single valence-
// change-memory cell: the TiOx/line series path, the conductive filament
// (fixed-concentration plug + variable-concentration disc), the Schottky
// barrier at the disc/electrode interface, and the thermal and ion-hopping
// constants that drive switching.
//
// Units are SI throughout, with two conventions noted on the fields:
// barrier heights phi_Bn0/phi_n are potentials stored in volts (numerically
// equal to their electron-volt values), and the hopping activation energy
// dW_A is stored in joules. The on-disk parameter file carries dW_A in eV and
// converts exactly once at load.
// =============================================================================

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "vcmsim/constants.hpp"
#include "vcmsim/errors.hpp"

namespace vcmsim {

struct PhysicalParams {
    // --- series path (electrode lines + TiOx layer) ---
    double R_TiOx;    ///< TiOx layer series resistance (ohm)
    double R_0;       ///< line resistance at zero current (ohm)
    double alpha_l;   ///< line temperature coefficient (1/K)
    double R_th_line; ///< line thermal resistance (K/W)

    // --- filament geometry ---
    double l_p; ///< plug length (m)
    double l_d; ///< disc length (m)
    double l_c; ///< total oxide thickness, l_p + l_d (m)
    double r_d; ///< filament radius (m)

    // --- vacancy concentrations ---
    double N_p;     ///< plug vacancy concentration, fixed (1/m^3)
    double N_d_min; ///< lower disc concentration bound (1/m^3)
    double N_d_max; ///< upper disc concentration bound (1/m^3)

    // --- transport / interface ---
    double mu_n;     ///< electron mobility (m^2/(V s))
    double A_star;   ///< effective Richardson constant (A/(m^2 K^2))
    double m_star;   ///< tunneling effective electron mass (kg)
    double eps;      ///< static oxide permittivity (F/m)
    double eps_phiB; ///< permittivity governing image-force barrier lowering (F/m)
    double phi_Bn0;  ///< nominal Schottky barrier height (V)
    double phi_n;    ///< Fermi level to conduction band edge distance (V)

    // --- thermal ---
    double T_0;        ///< ambient temperature (K)
    double R_th_SET;   ///< effective oxide thermal resistance, SET polarity (K/W)
    double R_th_RESET; ///< effective oxide thermal resistance, RESET polarity (K/W)

    // --- ion hopping ---
    double dW_A;      ///< hopping activation energy (J)
    double alpha_hop; ///< ion hopping distance (m)
    double nu_0;      ///< attempt frequency (1/s)
    double Z_VO;      ///< oxygen vacancy charge number (dimensionless, = 2)

    // --- universal constants (overridable from file for reproducibility) ---
    double e = constants::e;     ///< elementary charge (C)
    double k_B = constants::k_B; ///< Boltzmann constant (J/K)
    double h = constants::h;     ///< Planck constant (J s)

    /// Filament cross-section area pi·r² for radius `r` (defaults to nominal).
    [[nodiscard]] double area(double r) const { return constants::pi * r * r; }
    [[nodiscard]] double area() const { return area(r_d); }

    /// Throw invalid_argument_error naming the first violated invariant.
    void validate() const;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw invalid_argument_error("PhysicalParams: " + what);
}

} // namespace detail

inline void PhysicalParams::validate() const {
    using detail::require;
    auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    require(pos(R_TiOx), "R_TiOx must be > 0");
    require(pos(R_0), "R_0 must be > 0");
    require(pos(alpha_l), "alpha_l must be > 0");
    require(pos(R_th_line), "R_th_line must be > 0");
    require(pos(l_p), "l_p must be > 0");
    require(pos(l_d), "l_d must be > 0");
    require(pos(l_c), "l_c must be > 0");
    require(pos(r_d), "r_d must be > 0");
    require(pos(N_p), "N_p must be > 0");
    require(pos(N_d_min), "N_d_min must be > 0");
    require(pos(N_d_max), "N_d_max must be > 0");
    require(N_d_min < N_d_max, "N_d_min must be < N_d_max");
    require(pos(mu_n), "mu_n must be > 0");
    require(pos(A_star), "A_star must be > 0");
    require(pos(m_star), "m_star must be > 0");
    require(pos(eps), "eps must be > 0");
    require(pos(eps_phiB), "eps_phiB must be > 0");
    require(pos(phi_Bn0), "phi_Bn0 must be > 0");
    require(pos(phi_n), "phi_n must be > 0");
    require(pos(T_0), "T_0 must be > 0");
    require(pos(R_th_SET), "R_th_SET must be > 0");
    require(pos(R_th_RESET), "R_th_RESET must be > 0");
    require(pos(dW_A), "dW_A must be > 0");
    require(pos(alpha_hop), "alpha_hop must be > 0");
    require(pos(nu_0), "nu_0 must be > 0");
    require(Z_VO == 2.0, "Z_VO must equal 2");
    require(pos(e), "e must be > 0");
    require(pos(k_B), "k_B must be > 0");
    require(pos(h), "h must be > 0");
    require(std::abs(l_c - (l_p + l_d)) <= 1e-12 * l_c,
            "l_c must equal l_p + l_d");
}

// =============================================================================
// Parameter file I/O
// =============================================================================
// Flat key-value text: one `key = value` per line, `#` starts a comment,
// blank lines ignored. Keys are exactly the PhysicalParams field names.
// Unknown keys are rejected (misspellings must not silently fall back to
// defaults). dW_A is given in eV in the file. l_c, e, k_B, h are optional:
// l_c defaults to l_p + l_d, the constants default to their CODATA values.
// =============================================================================

namespace detail {

/// Parse `key = value` pairs from a parameter-file stream.
inline std::map<std::string, double> parse_kv_file(std::istream& in,
                                                   const std::string& name) {
    std::map<std::string, double> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        // trim
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw format_error(name + ":" + std::to_string(lineno) +
                               ": expected `key = value`");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{}
                                          : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw format_error(name + ":" + std::to_string(lineno) +
                               ": empty key or value");
        if (kv.count(key))
            throw format_error(name + ":" + std::to_string(lineno) +
                               ": duplicate key `" + key + "`");
        std::size_t used = 0;
        double parsed = 0;
        try {
            parsed = std::stod(val, &used);
        } catch (const std::exception&) {
            throw format_error(name + ":" + std::to_string(lineno) +
                               ": unparseable value `" + val + "`");
        }
        if (used != val.size())
            throw format_error(name + ":" + std::to_string(lineno) +
                               ": trailing junk in value `" + val + "`");
        kv[key] = parsed;
    }
    return kv;
}

} // namespace detail

/// Load a parameter file. Unknown keys are an error; so are missing required
/// keys. Returns a validated PhysicalParams.
inline PhysicalParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw format_error("cannot open parameter file: " + path);
    auto kv = detail::parse_kv_file(in, path);

    PhysicalParams p{};
    p.e = constants::e;
    p.k_B = constants::k_B;
    p.h = constants::h;

    std::map<std::string, double*> fields = {
        {"R_TiOx", &p.R_TiOx},       {"R_0", &p.R_0},
        {"alpha_l", &p.alpha_l},     {"R_th_line", &p.R_th_line},
        {"l_p", &p.l_p},             {"l_d", &p.l_d},
        {"l_c", &p.l_c},             {"r_d", &p.r_d},
        {"N_p", &p.N_p},             {"N_d_min", &p.N_d_min},
        {"N_d_max", &p.N_d_max},     {"mu_n", &p.mu_n},
        {"A_star", &p.A_star},       {"m_star", &p.m_star},
        {"eps", &p.eps},             {"eps_phiB", &p.eps_phiB},
        {"phi_Bn0", &p.phi_Bn0},     {"phi_n", &p.phi_n},
        {"T_0", &p.T_0},             {"R_th_SET", &p.R_th_SET},
        {"R_th_RESET", &p.R_th_RESET},
        {"dW_A", &p.dW_A},           {"alpha_hop", &p.alpha_hop},
        {"nu_0", &p.nu_0},           {"Z_VO", &p.Z_VO},
        {"e", &p.e},                 {"k_B", &p.k_B},
        {"h", &p.h},
    };
    for (const auto& [key, value] : kv) {
        auto it = fields.find(key);
        if (it == fields.end())
            throw format_error(path + ": unknown parameter `" + key + "`");
        *it->second = value;
    }
    const char* optional[] = {"l_c", "e", "k_B", "h"};
    for (const auto& [key, ptr] : fields) {
        if (kv.count(key)) continue;
        bool is_optional = false;
        for (const char* o : optional)
            if (key == o) is_optional = true;
        if (!is_optional)
            throw format_error(path + ": missing parameter `" + key + "`");
    }
    if (!kv.count("l_c")) p.l_c = p.l_p + p.l_d;

    // File convention: dW_A arrives in eV.
    p.dW_A *= p.e;

    p.validate();
    return p;
}

} // namespace vcmsim
