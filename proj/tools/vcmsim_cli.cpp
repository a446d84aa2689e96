// =============================================================================
// vcmsim — command-line front end
// =============================================================================
// Subcommands: sweep | match | calibrate | train. Every command is
// deterministic given its arguments (seeds are always arguments), and every
// output file embeds the fingerprints of the configuration files that
// produced it. Exit codes: 0 success, 2 usage error, 1 runtime error.
// =============================================================================

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vcmsim/calibrate.hpp"
#include "vcmsim/errors.hpp"
#include "vcmsim/fileio.hpp"
#include "vcmsim/params.hpp"
#include "vcmsim/surrogate.hpp"

namespace {

struct CalibrateArgs {
    std::string params_path = "config/params_default.txt";
    std::string out_dir = ".";
    std::uint64_t seed = 1;
};

int run_calibrate(const CalibrateArgs& a) {
    const vcmsim::PhysicalParams p = vcmsim::load_params(a.params_path);
    const std::string params_fp = vcmsim::file_fingerprint(a.params_path);

    const auto result = vcmsim::calibrate(p, {}, std::nullopt, a.seed);

    std::filesystem::create_directories(a.out_dir);
    const auto coeffs_path =
        (std::filesystem::path(a.out_dir) / "coefficients.txt").string();
    const auto report_path =
        (std::filesystem::path(a.out_dir) / "calibration_report.txt")
            .string();

    std::string header = "surrogate coefficients, least-squares fit against "
                         "the full electrical model\n";
    header += "params = " + a.params_path + " (fnv1a " + params_fp + ")\n";
    header += "seed = " + std::to_string(a.seed);
    vcmsim::save_coefficients(coeffs_path, result.coefficients, header);
    vcmsim::save_calibration_report(report_path, result.report);

    std::cout << "wrote " << coeffs_path << "\n";
    std::cout << "wrote " << report_path << "\n";
    std::cout << "negative branch: max " << result.report.negative.max_rel
              << ", mean " << result.report.negative.mean_rel << "\n";
    std::cout << "positive branch: max " << result.report.positive.max_rel
              << ", mean " << result.report.positive.mean_rel << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"physics-derived simulator for VCM memristive devices and "
                 "crossbar training"};
    app.require_subcommand(1);

    CalibrateArgs cal;
    auto* cal_cmd = app.add_subcommand(
        "calibrate", "fit the closed-form current surrogate against the "
                     "full model and write the coefficient deck");
    cal_cmd->add_option("--params", cal.params_path,
                        "physical parameter file")
        ->capture_default_str();
    cal_cmd->add_option("--out", cal.out_dir, "output directory")
        ->capture_default_str();
    cal_cmd->add_option("--seed", cal.seed, "multi-start RNG seed")
        ->capture_default_str();

    auto* sweep_cmd = app.add_subcommand(
        "sweep", "pulse-train switching curves over amplitude/duration "
                 "ranges");
    auto* match_cmd = app.add_subcommand(
        "match", "find a RESET pulse matching a SET pulse's trajectory");
    auto* train_cmd = app.add_subcommand(
        "train", "train the MLP on MNIST through the analog crossbar");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e); // help text, exit 0
        app.exit(e);
        return 2;
    }

    try {
        if (cal_cmd->parsed()) return run_calibrate(cal);
        if (sweep_cmd->parsed() || match_cmd->parsed() ||
            train_cmd->parsed()) {
            std::cerr << "vcmsim: this subcommand is not implemented yet\n";
            return 1;
        }
    } catch (const vcmsim::error& e) {
        std::cerr << "vcmsim: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "vcmsim: unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
