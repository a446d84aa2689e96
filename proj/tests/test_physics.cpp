#include <catch2/catch_amalgamated.hpp>

#include "vcmsim/physics.hpp"

#include <cmath>
#include <vector>

using namespace vcmsim;
using Catch::Approx;

namespace {

PhysicalParams params() {
    static const PhysicalParams p =
        load_params(std::string(VCMSIM_CONFIG_DIR) + "/params_default.txt");
    return p;
}

// -----------------------------------------------------------------------------
// Independent re-transcriptions of the model formulas, written directly from
// the equations (not by calling the library), evaluated at double precision.
// They guard the library against transcription slips; the frozen golden
// numbers below additionally guard both against a shared misreading (they
// come from a 50-digit arbitrary-precision evaluation kept outside the
// repo).
// -----------------------------------------------------------------------------

double oracle_series_resistance(const PhysicalParams& p, double I) {
    return p.R_TiOx + p.R_0 * (1 + p.alpha_l * p.R_0 * I * I * p.R_th_line);
}

double oracle_layer_resistance(const PhysicalParams& p, double l, double N,
                               double r) {
    return l / (p.Z_VO * p.e * (constants::pi * r * r) * N * p.mu_n);
}

double oracle_phi_bn(const PhysicalParams& p, double V_Sch, double N_d) {
    double psi = p.phi_Bn0 - p.phi_n - V_Sch;
    if (psi < 0) psi = 0;
    const double arg = std::pow(p.e, 3) * p.Z_VO * N_d * psi /
                       (8 * std::pow(constants::pi, 2) * std::pow(p.eps_phiB, 3));
    const double phi = p.phi_Bn0 - std::pow(arg, 0.25);
    return phi < 0 ? 0 : phi;
}

double oracle_schottky_reverse(const PhysicalParams& p, double V_Sch,
                               double N_d, double T, double r) {
    const double A = constants::pi * r * r;
    const double W00 =
        p.e * p.h / (4 * constants::pi) * std::sqrt(p.Z_VO * N_d / (p.m_star * p.eps));
    const double W0 = W00 / std::tanh(W00 / (p.k_B * T));
    const double epsp = W00 / (W00 / (p.k_B * T) - std::tanh(W00 / (p.k_B * T)));
    const double phi = oracle_phi_bn(p, V_Sch, N_d);
    const double ch = std::cosh(W00 / (p.k_B * T));
    return -A * (p.A_star * T / p.k_B) *
           std::sqrt(constants::pi * W00 * p.e *
                     (std::abs(V_Sch) + phi / (ch * ch))) *
           std::exp(-p.e * phi / W0) *
           (std::exp(p.e * std::abs(V_Sch) / epsp) - 1);
}

double oracle_schottky_forward(const PhysicalParams& p, double V_Sch,
                               double N_d, double T, double r) {
    const double A = constants::pi * r * r;
    const double phi = oracle_phi_bn(p, V_Sch, N_d);
    return A * p.A_star * T * T * std::exp(-p.e * phi / (p.k_B * T)) *
           (std::exp(p.e * V_Sch / (p.k_B * T)) - 1);
}

} // namespace

// =============================================================================
// series_resistance
// =============================================================================

TEST_CASE("series resistance: zero-current value and golden grid",
          "[physics][series]") {
    const auto p = params();
    // I = 0 collapses to the cold stack.
    REQUIRE(series_resistance(p, 0.0) == p.R_TiOx + p.R_0);

    // Frozen 50-digit goldens.
    struct Row { double I, R; };
    const Row rows[] = {
        {0.0, 1369.2437},
        {1e-4, 1371.0783357285973},
        {5e-4, 1415.1095932149328},
        {1.234e-3, 1648.6139563535928},
        {3e-3, 3020.4158557375806},
    };
    for (const auto& row : rows)
        REQUIRE(series_resistance(p, row.I) ==
                Approx(row.R).epsilon(1e-14));
}

TEST_CASE("series resistance is even in current and floored at the cold value",
          "[physics][series]") {
    const auto p = params();
    for (double I : {1e-6, 3.3e-5, 1e-4, 7.7e-4, 2.5e-3}) {
        REQUIRE(series_resistance(p, I) == series_resistance(p, -I));
        REQUIRE(series_resistance(p, I) >= p.R_TiOx + p.R_0);
        REQUIRE(series_resistance(p, I) ==
                Approx(oracle_series_resistance(p, I)).epsilon(1e-15));
    }
    REQUIRE_THROWS_AS(series_resistance(p, std::nan("")),
                      invalid_argument_error);
}

// =============================================================================
// layer_resistance
// =============================================================================

TEST_CASE("layer resistance: golden values and scaling laws",
          "[physics][layers]") {
    const auto p = params();
    REQUIRE(layer_resistance(p, p.l_p, p.N_p, p.r_d) ==
            Approx(159.42927506411806).epsilon(1e-14));
    REQUIRE(layer_resistance(p, p.l_d, 1e26, p.r_d) ==
            Approx(490.55161558190173).epsilon(1e-14));
    REQUIRE(layer_resistance(p, p.l_d, p.N_d_min, p.r_d) ==
            Approx(61318.951947737716).epsilon(1e-14));
    REQUIRE(layer_resistance(p, p.l_d, p.N_d_max, 30e-9) ==
            Approx(55.187056752963944).epsilon(1e-14));

    const double base = layer_resistance(p, p.l_d, 1e26, p.r_d);
    // Doubling the concentration halves the resistance.
    REQUIRE(layer_resistance(p, p.l_d, 2e26, p.r_d) ==
            Approx(base / 2).epsilon(1e-15));
    // Doubling the radius quarters it.
    REQUIRE(layer_resistance(p, p.l_d, 1e26, 2 * p.r_d) ==
            Approx(base / 4).epsilon(1e-15));
    // Plug and disc are the same law.
    REQUIRE(layer_resistance(p, 1e-9, 5e26, p.r_d) ==
            layer_resistance(p, 1e-9, 5e26, p.r_d));

    REQUIRE_THROWS_AS(layer_resistance(p, 0.0, 1e26, p.r_d),
                      invalid_argument_error);
    REQUIRE_THROWS_AS(layer_resistance(p, p.l_d, -1e26, p.r_d),
                      invalid_argument_error);
}

// =============================================================================
// Schottky barrier terms
// =============================================================================

TEST_CASE("barrier terms match the high-precision goldens",
          "[physics][schottky]") {
    const auto p = params();

    SECTION("mid concentration, warm") {
        const auto t = schottky_terms(p, -0.3, 1e26, 400.0);
        CHECK(t.W_00 == Approx(1.0203010222321420e-20).epsilon(1e-14));
        CHECK(t.W_0 == Approx(1.0722964758635405e-20).epsilon(1e-14));
        CHECK(t.eps_prime == Approx(1.1387385209144289e-20).epsilon(1e-14));
        // At this concentration the image force collapses the barrier.
        CHECK(t.phi_Bn == 0.0);
        CHECK(schottky_terms(p, 0.05, 1e26, 400.0).phi_Bn == 0.0);
        // Past flat band the lowering argument clamps to zero.
        CHECK(schottky_terms(p, 0.5, 1e26, 400.0).phi_Bn ==
              Approx(0.18).epsilon(1e-15));
    }
    SECTION("low concentration: barrier survives") {
        const auto t = schottky_terms(p, -0.2, p.N_d_min, 293.0);
        CHECK(t.W_00 == Approx(9.1258497728943750e-22).epsilon(1e-14));
        CHECK(t.W_0 == Approx(4.1136936226976169e-21).epsilon(1e-14));
        CHECK(t.eps_prime == Approx(2.4331966382078653e-19).epsilon(1e-14));
        CHECK(t.phi_Bn == Approx(0.060773910110134638).epsilon(1e-13));
        CHECK(schottky_terms(p, 0.05, p.N_d_min, 293.0).phi_Bn ==
              Approx(0.11178779210525282).epsilon(1e-13));
    }
}

// =============================================================================
// schottky_current
// =============================================================================

TEST_CASE("Schottky current matches goldens on both branches",
          "[physics][schottky]") {
    const auto p = params();
    struct Row { double V, N, T, I; };

    const Row reverse_rows[] = {
        {-0.1, 1e26, 293.0, -0.018642269339902255},
        {-0.3, 5e26, 350.0, -14.449553178335362},
        {-0.6, 19e26, 500.0, -2062.5254895876820},
        {-0.05, 0.08e26, 293.0, -0.00019373559614549499},
        {-0.2, 0.008e26, 293.0, -1.1652862291780274e-5},
    };
    for (const auto& r : reverse_rows)
        REQUIRE(schottky_current(p, r.V, r.N, r.T, p.r_d, Polarity::SET) ==
                Approx(r.I).epsilon(1e-12));

    const Row forward_rows[] = {
        {0.1, 1e26, 293.0, 1.3545092483652280e-5},
        {0.3, 5e26, 350.0, 0.025031600213909394},
        {0.15, 19e26, 500.0, 0.00046177612264864404},
        {0.05, 0.008e26, 293.0, 2.4484418139568161e-5},
        {0.05, 0.008e26, 350.0, 4.8872559987969266e-5},
    };
    for (const auto& r : forward_rows)
        REQUIRE(schottky_current(p, r.V, r.N, r.T, p.r_d, Polarity::RESET) ==
                Approx(r.I).epsilon(1e-12));
}

TEST_CASE("forward branch vanishes at zero bias and grows with temperature",
          "[physics][schottky]") {
    const auto p = params();
    REQUIRE(schottky_current(p, 0.0, 1e26, 293.0, p.r_d, Polarity::RESET) ==
            0.0);
    const double cold =
        schottky_current(p, 0.05, 0.008e26, 293.0, p.r_d, Polarity::RESET);
    const double warm =
        schottky_current(p, 0.05, 0.008e26, 350.0, p.r_d, Polarity::RESET);
    REQUIRE(warm > cold);
}

TEST_CASE("both branches agree with the in-test transcription on a grid",
          "[physics][schottky][oracle]") {
    const auto p = params();
    for (double N : {0.008e26, 0.1e26, 1e26, 5e26, 20e26}) {
        for (double T : {293.0, 400.0, 800.0}) {
            for (double V : {0.01, 0.05, 0.12, 0.3, 0.6}) {
                REQUIRE(schottky_current(p, -V, N, T, p.r_d, Polarity::SET) ==
                        Approx(oracle_schottky_reverse(p, -V, N, T, p.r_d))
                            .epsilon(1e-10));
                REQUIRE(schottky_current(p, V, N, T, p.r_d, Polarity::RESET) ==
                        Approx(oracle_schottky_forward(p, V, N, T, p.r_d))
                            .epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("current magnitude scales with the filament area",
          "[physics][schottky]") {
    const auto p = params();
    const double half =
        schottky_current(p, -0.2, 1e26, 350.0, p.r_d / 2, Polarity::SET);
    const double full =
        schottky_current(p, -0.2, 1e26, 350.0, p.r_d, Polarity::SET);
    REQUIRE(full == Approx(4.0 * half).epsilon(1e-12));
}

TEST_CASE("overflowing exponentials raise saturation errors",
          "[physics][schottky]") {
    const auto p = params();
    REQUIRE_THROWS_AS(
        schottky_current(p, -1e6, 1e26, 293.0, p.r_d, Polarity::SET),
        saturation_error);
    REQUIRE_THROWS_AS(
        schottky_current(p, 1e3, 1e26, 293.0, p.r_d, Polarity::RESET),
        saturation_error);
    REQUIRE_THROWS_AS(
        schottky_current(p, 0.1, -1e26, 293.0, p.r_d, Polarity::RESET),
        invalid_argument_error);
}

// =============================================================================
// local_temperature
// =============================================================================

TEST_CASE("local temperature: goldens, noise-free reduction, radius scaling",
          "[physics][thermal]") {
    const auto p = params();
    REQUIRE(local_temperature(p, 0.0, 0.0, Polarity::SET, p.r_d) == p.T_0);
    REQUIRE(local_temperature(p, -1e-4, -0.8, Polarity::SET, p.r_d) ==
            Approx(1550.6).epsilon(1e-13));
    REQUIRE(local_temperature(p, 2e-4, 0.9, Polarity::RESET, p.r_d) ==
            Approx(1056.992).epsilon(1e-13));
    // Halving the realized radius quadruples the rise.
    REQUIRE(local_temperature(p, -1e-4, -0.8, Polarity::SET, 22.5e-9) ==
            Approx(5323.4).epsilon(1e-13));

    const double rise_nominal =
        local_temperature(p, -1e-4, -0.8, Polarity::SET, p.r_d) - p.T_0;
    const double rise_half =
        local_temperature(p, -1e-4, -0.8, Polarity::SET, p.r_d / 2) - p.T_0;
    REQUIRE(rise_half == Approx(4.0 * rise_nominal).epsilon(1e-12));

    // Negative dissipation signals an upstream sign bug.
    REQUIRE_THROWS_AS(local_temperature(p, 1e-4, -0.8, Polarity::SET, p.r_d),
                      internal_error);
}

// =============================================================================
// solve_full_model
// =============================================================================

TEST_CASE("full solve reproduces the high-precision goldens",
          "[physics][solve]") {
    const auto p = params();
    struct Row { double V_M, N_d, I, V_Sch, T; };
    const Row rows[] = {
        {-0.5, 1e26, -0.00023017509033200865, -0.032987494402498028,
         953.69995172349671},
        {-1.0, 10e26, -0.00059390154949330003, -0.024552794073244458,
         1678.2208545593069},
        {-0.2, 0.1e26, -2.8625494732847726e-5, -0.015813849552144861,
         365.35902680852059},
        {0.5, 1e26, 0.00024125509105940274, 0.010275589108110807,
         464.09404863368597},
        {1.0, 10e26, 0.00059784363929206096, 0.017562866266861615,
         653.84077851445450},
        {0.3, 19e26, 0.00018547324895524831, 0.010512854501333478,
         328.32375311743417},
        {-0.2, 20e26, -0.00012583490908286068, -0.0041875938156464063,
         347.07359946235011},
        {-1.5, 0.008e26, -1.8520605491240404e-5, -0.33602276723498815,
         722.33235478082124},
    };
    for (const auto& r : rows) {
        const auto sol = solve_full_model(p, nominal_state(p, r.N_d), r.V_M);
        INFO("V_M=" << r.V_M << " N_d=" << r.N_d);
        CHECK(sol.I_M == Approx(r.I).epsilon(1e-6));
        CHECK(sol.V_Sch == Approx(r.V_Sch).margin(1e-6));
        CHECK(sol.T == Approx(r.T).epsilon(1e-6));
    }
}

TEST_CASE("full solve with perturbed per-device geometry matches goldens",
          "[physics][solve][noise]") {
    const auto p = params();
    DeviceState s = nominal_state(p, 2e26);
    s.r_d = 31.5e-9;
    s.l_d = 0.52e-9;
    const auto a = solve_full_model(p, s, -0.6);
    CHECK(a.I_M == Approx(-0.00021675550339277728).epsilon(1e-6));
    CHECK(a.V_Sch == Approx(-0.089766006718428891).epsilon(1e-5));
    CHECK(a.T == Approx(2388.4830296285320).epsilon(1e-6));
    CHECK(a.V_d == Approx(-0.14104968478395292).epsilon(1e-5));

    DeviceState w = nominal_state(p, 5e26);
    w.r_d = 58.5e-9;
    const auto b = solve_full_model(p, w, 0.8);
    CHECK(b.I_M == Approx(0.00050165956407978581).epsilon(1e-6));
    CHECK(b.V_Sch == Approx(0.013495695946270903).epsilon(1e-5));
    CHECK(b.T == Approx(406.32080816180691).epsilon(1e-6));
}

TEST_CASE("zero bias is the exact equilibrium", "[physics][solve]") {
    const auto p = params();
    const auto sol = solve_full_model(p, nominal_state(p, 1e26), 0.0);
    REQUIRE(sol.I_M == 0.0);
    REQUIRE(sol.V_s == 0.0);
    REQUIRE(sol.V_p == 0.0);
    REQUIRE(sol.V_d == 0.0);
    REQUIRE(sol.V_Sch == 0.0);
    REQUIRE(sol.T == p.T_0);
}

TEST_CASE("every converged solve is self-consistent",
          "[physics][solve][property]") {
    const auto p = params();
    for (double N_d : {0.008e26, 0.05e26, 0.5e26, 2e26, 8e26, 20e26}) {
        for (double V_M :
             {-1.5, -1.0, -0.6, -0.3, -0.1, 0.1, 0.3, 0.6, 1.0, 1.5}) {
            const auto sol =
                solve_full_model(p, nominal_state(p, N_d), V_M);
            INFO("V_M=" << V_M << " N_d=" << N_d);
            const double tol = 1e-9 * std::max(1.0, std::abs(V_M));
            // Partition closure.
            REQUIRE(sol.closure() <= tol);
            // Temperature floor.
            REQUIRE(sol.T >= p.T_0);
            // Current polarity.
            REQUIRE(sol.I_M * V_M > 0.0);
            // Re-substitution: the Schottky branch reproduces the current.
            const double I_sch = schottky_current(
                p, sol.V_Sch, N_d, sol.T, p.r_d, polarity_of(V_M));
            REQUIRE(I_sch == Approx(sol.I_M).epsilon(1e-5));
            // Series drops re-derive from the component laws.
            REQUIRE(sol.V_s ==
                    Approx(sol.I_M * series_resistance(p, sol.I_M))
                        .epsilon(1e-12));
            REQUIRE(sol.V_p ==
                    Approx(sol.I_M *
                           layer_resistance(p, p.l_p, p.N_p, p.r_d))
                        .epsilon(1e-12));
            REQUIRE(sol.V_d ==
                    Approx(sol.I_M *
                           layer_resistance(p, p.l_d, N_d, p.r_d))
                        .epsilon(1e-12));
            // Temperature reproduces from the solved operating point.
            REQUIRE(sol.T == Approx(local_temperature(
                                 p, sol.I_M, sol.V_M - sol.V_s,
                                 polarity_of(V_M), p.r_d))
                                 .epsilon(1e-9));
        }
    }
}

TEST_CASE("|I| is non-decreasing in |V_M| at fixed state",
          "[physics][solve][property]") {
    const auto p = params();
    for (double N_d : {0.008e26, 1e26, 20e26}) {
        const auto s = nominal_state(p, N_d);
        double last_set = 0.0, last_reset = 0.0;
        for (double V = 0.05; V <= 1.5; V += 0.05) {
            const double I_set =
                std::abs(solve_full_model(p, s, -V).I_M);
            const double I_reset =
                std::abs(solve_full_model(p, s, V).I_M);
            REQUIRE(I_set >= last_set);
            REQUIRE(I_reset >= last_reset);
            last_set = I_set;
            last_reset = I_reset;
        }
    }
}

TEST_CASE("solver reports non-convergence with its residual",
          "[physics][solve]") {
    const auto p = params();
    SolveOptions opt;
    opt.max_iterations = 3;
    opt.tolerance = 1e-15;
    try {
        (void)solve_full_model(p, nominal_state(p, 1e26), -0.5, opt);
        FAIL("expected convergence_error");
    } catch (const convergence_error& e) {
        REQUIRE(e.residual > 0.0);
        REQUIRE(std::isfinite(e.residual));
    }
}

TEST_CASE("solve rejects invalid inputs", "[physics][solve]") {
    const auto p = params();
    REQUIRE_THROWS_AS(
        solve_full_model(p, nominal_state(p, 1e26),
                         std::numeric_limits<double>::infinity()),
        invalid_argument_error);
    DeviceState bad = nominal_state(p, 1e26);
    bad.N_d = p.N_d_max * 2;
    REQUIRE_THROWS_AS(solve_full_model(p, bad, 0.1), invalid_argument_error);
}
