#pragma once
// Crossbar tile: a 2-D array of devices behind a linear weight<->conductance
// mapping, with conductance-range control (pulse skipping), cached reads for
// matrix-vector products, stochastically rounded pulsed updates, and
// bit-exact checkpointing.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vcmsim/dynamics.hpp"
#include "vcmsim/errors.hpp"
#include "vcmsim/noise.hpp"
#include "vcmsim/params.hpp"
#include "vcmsim/rng.hpp"
#include "vcmsim/state.hpp"
#include "vcmsim/surrogate.hpp"

namespace vcmsim {

/// The matched programming pulses a tile runs on: SET for weight increases,
/// RESET for decreases.
struct PulsePair {
    PulseSpec set;
    PulseSpec reset;

    void validate() const {
        set.validate();
        reset.validate();
        if (set.amplitude >= 0.0)
            throw invalid_argument_error(
                "PulsePair: the SET amplitude must be negative");
        if (reset.amplitude <= 0.0)
            throw invalid_argument_error(
                "PulsePair: the RESET amplitude must be positive");
    }
};

/// Static tile configuration: geometry, the controlled conductance window,
/// the symmetric weight range it maps onto, and the programming scheme.
struct TileConfig {
    int rows = 0;
    int cols = 0;
    double G_min = 0.0; ///< S, nominal lower control bound
    double G_max = 0.0; ///< S, nominal upper control bound
    double w_max = 1.0; ///< weights live in [-w_max, +w_max]
    double V_read = -0.2;
    PulsePair scheme;
    /// First device index of this tile; tiles sharing a master seed must use
    /// disjoint index ranges so their random streams never collide.
    std::uint32_t device_index_offset = 0;

    void validate() const {
        if (rows < 1 || cols < 1)
            throw invalid_argument_error("TileConfig: requires rows, cols >= 1");
        if (!(G_min > 0.0) || !(G_max > G_min) || !std::isfinite(G_max))
            throw invalid_argument_error(
                "TileConfig: requires 0 < G_min < G_max < inf");
        if (!(w_max > 0.0) || !std::isfinite(w_max))
            throw invalid_argument_error("TileConfig: requires w_max > 0");
        if (V_read == 0.0 || !std::isfinite(V_read))
            throw invalid_argument_error(
                "TileConfig: V_read must be finite and nonzero");
        scheme.validate();
    }
};

/// One out-of-bounds device found by the audit pass.
struct BoundViolation {
    int row = 0;
    int col = 0;
    double G = 0.0;     ///< S, the offending read conductance
    double G_min = 0.0; ///< S, the device's own control bounds
    double G_max = 0.0;
};

/// Concentration whose readout conductance at `V_read` equals `G_target`,
/// found by bisection (the readout is strictly increasing in N_d).
inline double concentration_for_conductance(const FitCoefficients& c,
                                            const PhysicalParams& p,
                                            double G_target, double V_read) {
    double lo = p.N_d_min, hi = p.N_d_max;
    const double G_lo = surrogate_current(c, p, lo, V_read) / V_read;
    const double G_hi = surrogate_current(c, p, hi, V_read) / V_read;
    if (!(G_lo <= G_target && G_target <= G_hi))
        throw invalid_argument_error(
            "concentration_for_conductance: target outside the device's "
            "conductance range");
    for (int i = 0; i < 200 && lo < hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (surrogate_current(c, p, mid, V_read) / V_read < G_target ? lo : hi) =
            mid;
    }
    return 0.5 * (lo + hi);
}

class CrossbarTile {
public:
    CrossbarTile(const TileConfig& config, const PhysicalParams& params,
                 const FitCoefficients& coeffs, const NoiseSpec& noise)
        : config_(config), params_(params), coeffs_(coeffs), noise_(noise) {
        config_.validate();
        params_.validate();
        coeffs_.validate();
        noise_.validate();

        N_window_lo_ = concentration_for_conductance(coeffs_, params_,
                                                     config_.G_min,
                                                     config_.V_read);
        N_window_hi_ = concentration_for_conductance(coeffs_, params_,
                                                     config_.G_max,
                                                     config_.V_read);
        delta_w_per_pulse_ = calibrate_pulse_quantum();

        const int n = config_.rows * config_.cols;
        devices_.reserve(static_cast<std::size_t>(n));
        weights_.resize(config_.rows, config_.cols);
        for (int i = 0; i < n; ++i) {
            const std::uint32_t index =
                config_.device_index_offset + static_cast<std::uint32_t>(i);
            DeviceState s = realize_device(params_, noise_, index,
                                           noise_.master_seed, config_.G_min,
                                           config_.G_max, N_window_lo_,
                                           N_window_hi_);
            if (!noise_.any_enabled()) {
                // Weight initialization is uniform over the controlled range
                // whether or not the device parameters are noisy; with noise
                // enabled realize_device already drew from this same stream,
                // so every ablation sharing a master seed starts from
                // identical weights.
                StreamRng rng = device_rng(noise_.master_seed, index,
                                           NoiseSlot::init_N_d);
                s.N_d = rng.uniform(N_window_lo_, N_window_hi_);
            }
            devices_.push_back(s);
            weights_(i / config_.cols, i % config_.cols) =
                weight_of(read_device(s));
        }
    }

    [[nodiscard]] int rows() const { return config_.rows; }
    [[nodiscard]] int cols() const { return config_.cols; }
    [[nodiscard]] const TileConfig& config() const { return config_; }
    [[nodiscard]] double delta_w_per_pulse() const {
        return delta_w_per_pulse_;
    }

    /// Linear conductance->weight mapping over the nominal control bounds.
    [[nodiscard]] double weight_of(double G) const {
        return -config_.w_max + 2.0 * config_.w_max * (G - config_.G_min) /
                                    (config_.G_max - config_.G_min);
    }

    /// Per-device conductance read at the configured voltage, mapped to
    /// weights. No read noise: repeated reads are identical.
    [[nodiscard]] const Eigen::MatrixXd& read_weights() const {
        return weights_;
    }

    /// Ideal analog matrix-vector product with the read weights.
    [[nodiscard]] Eigen::VectorXd forward(const Eigen::VectorXd& input) const {
        if (input.size() != config_.cols)
            throw invalid_argument_error(
                "CrossbarTile::forward: input length != cols");
        return weights_ * input;
    }

    /// Pulsed weight update. Each requested change maps to an expected pulse
    /// count n* = |dw|/delta_w_per_pulse, stochastically rounded (floor plus
    /// one with probability frac) on the device's private stream; SET pulses
    /// for dw > 0, RESET for dw < 0. Before each pulse the range-control
    /// circuit applies it virtually (noise-free) and skips it — and the rest
    /// of that device's train — if the result would leave the device's own
    /// control bounds. Cycle-to-cycle noise evolves once per applied pulse;
    /// skipped pulses consume no randomness.
    void pulsed_update(const Eigen::MatrixXd& delta_w) {
        if (delta_w.rows() != config_.rows || delta_w.cols() != config_.cols)
            throw invalid_argument_error(
                "CrossbarTile::pulsed_update: delta_w shape mismatch");
        const NoiseSpec quiet;
        StreamRng null_rng(0, 0);
        for (int r = 0; r < config_.rows; ++r) {
            for (int col = 0; col < config_.cols; ++col) {
                const double dw = delta_w(r, col);
                if (dw == 0.0) continue;
                DeviceState& s = device_ref(r, col);
                StreamRng rng(noise_.master_seed, s.rng_stream_id,
                              s.rng_counter);

                const double n_star = std::abs(dw) / delta_w_per_pulse_;
                long pulses = static_cast<long>(std::floor(n_star));
                const double frac = n_star - static_cast<double>(pulses);
                if (frac > 0.0 && rng.bernoulli(frac)) ++pulses;

                const PulseSpec& pulse =
                    dw > 0.0 ? config_.scheme.set : config_.scheme.reset;
                bool touched = false;
                for (long k = 0; k < pulses; ++k) {
                    // Virtual apply: would this pulse leave the window?
                    const DeviceState trial =
                        apply_pulse(coeffs_, params_, s, pulse, quiet,
                                    null_rng)
                            .state;
                    const double G_after = read_device(trial);
                    if (G_after > s.G_max || G_after < s.G_min) break;
                    if (c2c_active()) {
                        s = apply_pulse(coeffs_, params_, s, pulse, noise_,
                                        rng)
                                .state;
                    } else {
                        const std::uint64_t id = s.rng_stream_id;
                        const std::uint64_t counter = s.rng_counter;
                        s = trial;
                        s.rng_stream_id = id;
                        s.rng_counter = counter;
                    }
                    touched = true;
                }
                s.rng_counter = rng.counter();
                if (touched)
                    weights_(r, col) = weight_of(read_device(s));
            }
        }
    }

    /// Audit pass: every device whose read conductance sits outside its own
    /// control bounds. Programming can never cause a violation (the virtual
    /// pre-pulse check); an entry here means either an external state edit
    /// or cycle-to-cycle drift, which the control circuit cannot prevent.
    [[nodiscard]] std::vector<BoundViolation> enforce_conductance_bounds()
        const {
        std::vector<BoundViolation> out;
        for (int r = 0; r < config_.rows; ++r)
            for (int col = 0; col < config_.cols; ++col) {
                const DeviceState& s = device(r, col);
                const double G = read_device(s);
                if (G < s.G_min || G > s.G_max)
                    out.push_back({r, col, G, s.G_min, s.G_max});
            }
        return out;
    }

    [[nodiscard]] const DeviceState& device(int r, int col) const {
        return devices_[device_index(r, col)];
    }

    /// Replace one device's state (testing and external programming); the
    /// cached weight is refreshed from the new state.
    void set_device(int r, int col, const DeviceState& s) {
        s.validate();
        devices_[device_index(r, col)] = s;
        weights_(r, col) = weight_of(read_device(s));
    }

    /// Readout conductance of one device.
    [[nodiscard]] double read_device(const DeviceState& s) const {
        return read_conductance(coeffs_, params_, s, config_.V_read);
    }

    [[nodiscard]] double N_window_lo() const { return N_window_lo_; }
    [[nodiscard]] double N_window_hi() const { return N_window_hi_; }

    // -------------------------------------------------------------------------
    // Checkpointing: structured text with hex-float fields, bit-exact.
    // -------------------------------------------------------------------------

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out)
            throw format_error("CrossbarTile::save: cannot open " + path);
        out << "vcmsim-tile 1\n";
        char line[512];
        std::snprintf(line, sizeof line, "shape %d %d\n", config_.rows,
                      config_.cols);
        out << line;
        std::snprintf(line, sizeof line, "window %a %a %a %a\n", config_.G_min,
                      config_.G_max, config_.w_max, config_.V_read);
        out << line;
        std::snprintf(line, sizeof line, "set %a %a %a %a\n",
                      config_.scheme.set.amplitude, config_.scheme.set.duration,
                      config_.scheme.set.max_substep,
                      config_.scheme.set.max_dNd_fraction);
        out << line;
        std::snprintf(line, sizeof line, "reset %a %a %a %a\n",
                      config_.scheme.reset.amplitude,
                      config_.scheme.reset.duration,
                      config_.scheme.reset.max_substep,
                      config_.scheme.reset.max_dNd_fraction);
        out << line;
        std::snprintf(line, sizeof line, "offset %llu\n",
                      static_cast<unsigned long long>(
                          config_.device_index_offset));
        out << line;
        for (const DeviceState& s : devices_) {
            std::snprintf(line, sizeof line,
                          "device %a %a %a %a %a %a %a %llu %llu\n", s.N_d,
                          s.r_d, s.l_d, s.N_d_min, s.N_d_max, s.G_min, s.G_max,
                          static_cast<unsigned long long>(s.rng_stream_id),
                          static_cast<unsigned long long>(s.rng_counter));
            out << line;
        }
        if (!out)
            throw format_error("CrossbarTile::save: write failed for " + path);
    }

    /// Restore a checkpoint written by save(). The caller supplies the same
    /// physics, coefficients and noise spec the tile was built with.
    static CrossbarTile load(const std::string& path,
                             const PhysicalParams& params,
                             const FitCoefficients& coeffs,
                             const NoiseSpec& noise) {
        std::ifstream in(path);
        if (!in)
            throw format_error("CrossbarTile::load: cannot open " + path);
        std::string magic;
        int version = 0;
        in >> magic >> version;
        if (magic != "vcmsim-tile" || version != 1)
            throw format_error("CrossbarTile::load: bad header in " + path);

        TileConfig config;
        auto expect = [&](const char* tag) {
            std::string got;
            in >> got;
            if (got != tag)
                throw format_error(std::string("CrossbarTile::load: expected '") +
                                   tag + "' in " + path);
        };
        expect("shape");
        in >> config.rows >> config.cols;
        expect("window");
        in >> config.G_min >> config.G_max >> config.w_max >> config.V_read;
        auto read_pulse = [&](const char* tag, PulseSpec& pulse) {
            expect(tag);
            in >> pulse.amplitude >> pulse.duration >> pulse.max_substep >>
                pulse.max_dNd_fraction;
        };
        read_pulse("set", config.scheme.set);
        read_pulse("reset", config.scheme.reset);
        expect("offset");
        unsigned long long offset = 0;
        in >> offset;
        config.device_index_offset = static_cast<std::uint32_t>(offset);
        if (!in)
            throw format_error("CrossbarTile::load: truncated header in " +
                               path);

        CrossbarTile tile(config, params, coeffs, noise);
        for (DeviceState& s : tile.devices_) {
            expect("device");
            unsigned long long stream = 0, counter = 0;
            in >> s.N_d >> s.r_d >> s.l_d >> s.N_d_min >> s.N_d_max >>
                s.G_min >> s.G_max >> stream >> counter;
            if (!in)
                throw format_error("CrossbarTile::load: truncated device "
                                   "table in " +
                                   path);
            s.rng_stream_id = stream;
            s.rng_counter = counter;
            s.validate();
        }
        for (int r = 0; r < config.rows; ++r)
            for (int col = 0; col < config.cols; ++col)
                tile.weights_(r, col) =
                    tile.weight_of(tile.read_device(tile.device(r, col)));
        return tile;
    }

private:
    [[nodiscard]] std::size_t device_index(int r, int col) const {
        if (r < 0 || r >= config_.rows || col < 0 || col >= config_.cols)
            throw invalid_argument_error("CrossbarTile: device index out of "
                                         "range");
        return static_cast<std::size_t>(r) *
                   static_cast<std::size_t>(config_.cols) +
               static_cast<std::size_t>(col);
    }

    [[nodiscard]] DeviceState& device_ref(int r, int col) {
        return devices_[device_index(r, col)];
    }

    [[nodiscard]] bool c2c_active() const {
        auto walks = [](const ParameterNoise& ch) {
            return ch.enabled && (ch.c2c_sigma > 0.0 ||
                                  ch.c2c_sigma_add > 0.0 ||
                                  ch.c2c_sigma_mult > 0.0);
        };
        return walks(noise_.N_d_max) || walks(noise_.N_d_min) ||
               walks(noise_.r_d) || walks(noise_.l_d);
    }

    /// One SET and one RESET pulse on a nominal mid-window device give the
    /// tile's weight quantum: the average |dG| mapped through the window.
    [[nodiscard]] double calibrate_pulse_quantum() const {
        const double G_mid = 0.5 * (config_.G_min + config_.G_max);
        const double N_mid = concentration_for_conductance(coeffs_, params_,
                                                           G_mid,
                                                           config_.V_read);
        const NoiseSpec quiet;
        StreamRng rng(0, 0);
        const DeviceState mid = nominal_state(params_, N_mid);
        const DeviceState after_set =
            apply_pulse(coeffs_, params_, mid, config_.scheme.set, quiet, rng)
                .state;
        const DeviceState after_reset =
            apply_pulse(coeffs_, params_, mid, config_.scheme.reset, quiet,
                        rng)
                .state;
        const double dG_set = read_device(after_set) - read_device(mid);
        const double dG_reset = read_device(mid) - read_device(after_reset);
        if (!(dG_set > 0.0) || !(dG_reset > 0.0))
            throw invalid_argument_error(
                "CrossbarTile: the pulse scheme does not move a mid-window "
                "device in the programmed direction");
        const double dG = 0.5 * (dG_set + dG_reset);
        return dG * 2.0 * config_.w_max / (config_.G_max - config_.G_min);
    }

    TileConfig config_;
    PhysicalParams params_;
    FitCoefficients coeffs_;
    NoiseSpec noise_;
    double N_window_lo_ = 0.0;
    double N_window_hi_ = 0.0;
    double delta_w_per_pulse_ = 0.0;
    std::vector<DeviceState> devices_;
    Eigen::MatrixXd weights_;
};

} // namespace vcmsim
