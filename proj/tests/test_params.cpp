#include <catch2/catch_amalgamated.hpp>

#include "vcmsim/params.hpp"

#include <cstdio>
#include <fstream>
#include <string>

using namespace vcmsim;

namespace {

const std::string kDefaultParams =
    std::string(VCMSIM_CONFIG_DIR) + "/params_default.txt";

/// Write `content` to a scratch file and return its path.
std::string scratch_file(const std::string& tag, const std::string& content) {
    std::string path = "params_scratch_" + tag + ".txt";
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("default parameter file loads and validates", "[params]") {
    const PhysicalParams p = load_params(kDefaultParams);
    CHECK(p.R_TiOx == 650.0);
    CHECK(p.R_0 == 719.2437);
    CHECK(p.r_d == 45e-9);
    CHECK(p.l_d == 0.4e-9);
    CHECK(p.l_p == 2.6e-9);
    CHECK(p.l_c == 3.0e-9);
    CHECK(p.N_d_min == 0.008e26);
    CHECK(p.N_d_max == 20e26);
    CHECK(p.Z_VO == 2.0);
    CHECK(p.T_0 == 293.0);
    // dW_A arrives in eV and is stored in joules.
    CHECK(p.dW_A == Catch::Approx(1.35 * constants::e).epsilon(1e-15));
    // Barrier potentials stay in volts.
    CHECK(p.phi_Bn0 == 0.18);
    CHECK(p.phi_n == 0.1);
    // Constants default to CODATA.
    CHECK(p.e == constants::e);
    CHECK(p.k_B == constants::k_B);
    CHECK(p.h == constants::h);
}

TEST_CASE("parameter file round-trips through the kv parser", "[params]") {
    const std::string path = scratch_file("roundtrip",
                                          "alpha = 1.5\n"
                                          "beta=2e-3 # trailing comment\n"
                                          "  gamma  =  -4  \n"
                                          "# full-line comment\n"
                                          "\n");
    std::ifstream in(path);
    auto kv = detail::parse_kv_file(in, path);
    REQUIRE(kv.size() == 3);
    CHECK(kv.at("alpha") == 1.5);
    CHECK(kv.at("beta") == 2e-3);
    CHECK(kv.at("gamma") == -4.0);
    std::remove(path.c_str());
}

TEST_CASE("unknown keys are rejected", "[params]") {
    std::ifstream ref(kDefaultParams);
    std::string content((std::istreambuf_iterator<char>(ref)),
                        std::istreambuf_iterator<char>());
    const std::string path =
        scratch_file("unknown", content + "\nR_TiOx_typo = 1\n");
    REQUIRE_THROWS_AS(load_params(path), format_error);
    std::remove(path.c_str());
}

TEST_CASE("missing keys are rejected", "[params]") {
    const std::string path = scratch_file("missing", "R_TiOx = 650\n");
    REQUIRE_THROWS_AS(load_params(path), format_error);
    std::remove(path.c_str());
}

TEST_CASE("duplicate keys are rejected", "[params]") {
    const std::string path =
        scratch_file("duplicate", "R_TiOx = 650\nR_TiOx = 651\n");
    REQUIRE_THROWS_AS(load_params(path), format_error);
    std::remove(path.c_str());
}

TEST_CASE("malformed values are rejected", "[params]") {
    REQUIRE_THROWS_AS(
        [] {
            const std::string path =
                scratch_file("junk", "R_TiOx = 650 ohms\n");
            auto guard = path;
            try {
                load_params(path);
            } catch (...) {
                std::remove(guard.c_str());
                throw;
            }
        }(),
        format_error);
    const std::string path2 = scratch_file("noeq", "R_TiOx 650\n");
    REQUIRE_THROWS_AS(load_params(path2), format_error);
    std::remove(path2.c_str());
}

TEST_CASE("l_c is derived when omitted and checked when present", "[params]") {
    std::ifstream ref(kDefaultParams);
    std::string content, line;
    while (std::getline(ref, line))
        if (line.rfind("l_c", 0) != 0) content += line + "\n";

    SECTION("omitted: defaults to l_p + l_d") {
        const std::string path = scratch_file("lc_omitted", content);
        const PhysicalParams p = load_params(path);
        CHECK(p.l_c == p.l_p + p.l_d);
        std::remove(path.c_str());
    }
    SECTION("inconsistent: rejected") {
        const std::string path =
            scratch_file("lc_bad", content + "l_c = 3.5e-9\n");
        REQUIRE_THROWS_AS(load_params(path), invalid_argument_error);
        std::remove(path.c_str());
    }
}

TEST_CASE("validation enforces the structural invariants", "[params]") {
    PhysicalParams p = load_params(kDefaultParams);

    SECTION("Z_VO is pinned to 2") {
        p.Z_VO = 1.0;
        REQUIRE_THROWS_AS(p.validate(), invalid_argument_error);
    }
    SECTION("concentration bounds must be ordered") {
        p.N_d_min = p.N_d_max;
        REQUIRE_THROWS_AS(p.validate(), invalid_argument_error);
    }
    SECTION("lengths must be positive") {
        p.l_d = 0.0;
        REQUIRE_THROWS_AS(p.validate(), invalid_argument_error);
    }
    SECTION("oxide thickness must close") {
        p.l_c = p.l_p + 2.0 * p.l_d;
        REQUIRE_THROWS_AS(p.validate(), invalid_argument_error);
    }
}
