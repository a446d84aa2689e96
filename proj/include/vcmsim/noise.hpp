#pragma once
// Stochastic device variability: device-to-device initialization spread,
// cycle-to-cycle random walks (direct on the concentration bounds,
// update-scaled plus additive on the filament geometry), and optional
// absolute truncation windows.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <string>

#include "vcmsim/errors.hpp"
#include "vcmsim/params.hpp"
#include "vcmsim/rng.hpp"
#include "vcmsim/state.hpp"

namespace vcmsim {

// =============================================================================
// Specification
// =============================================================================

/// Noise channels for one physical parameter. A disabled parameter stays at
/// its nominal value and never consumes random numbers, whatever the sigmas
/// say — ablation runs toggle the flag and leave the magnitudes in place.
struct ParameterNoise {
    bool enabled = false;
    double d2d_sigma = 0.0;      ///< relative std of the initialization draw
    double c2c_sigma = 0.0;      ///< direct walk scale (concentration bounds)
    double c2c_sigma_add = 0.0;  ///< additive walk scale (geometry)
    double c2c_sigma_mult = 0.0; ///< update-scaled walk scale (geometry)
    double trunc_lo = -std::numeric_limits<double>::infinity();
    double trunc_hi = std::numeric_limits<double>::infinity();

    [[nodiscard]] bool truncated() const {
        return std::isfinite(trunc_lo) || std::isfinite(trunc_hi);
    }

    void validate(const char* who) const {
        auto ok_sigma = [](double s) { return s >= 0.0 && std::isfinite(s); };
        if (!ok_sigma(d2d_sigma) || !ok_sigma(c2c_sigma) ||
            !ok_sigma(c2c_sigma_add) || !ok_sigma(c2c_sigma_mult))
            throw invalid_argument_error(std::string("ParameterNoise(") + who +
                                         "): sigmas must be finite and >= 0");
        if (!(trunc_lo < trunc_hi))
            throw invalid_argument_error(std::string("ParameterNoise(") + who +
                                         "): requires trunc_lo < trunc_hi");
    }
};

/// Full noise configuration: one channel block per noisy parameter plus the
/// master seed all per-device streams derive from.
struct NoiseSpec {
    ParameterNoise N_d_max, N_d_min, r_d, l_d, G_max, G_min;
    std::uint64_t master_seed = 0;

    [[nodiscard]] bool any_enabled() const {
        return N_d_max.enabled || N_d_min.enabled || r_d.enabled ||
               l_d.enabled || G_max.enabled || G_min.enabled;
    }

    void validate() const {
        N_d_max.validate("N_d_max");
        N_d_min.validate("N_d_min");
        r_d.validate("r_d");
        l_d.validate("l_d");
        G_max.validate("G_max");
        G_min.validate("G_min");
    }
};

// =============================================================================
// Per-device stream layout
// =============================================================================
// Every random quantity of device `i` comes from a counter-based stream whose
// id encodes (device index, purpose slot), so realizations are a pure
// function of (master seed, device index, cycle index) and independent of
// evaluation order.

enum class NoiseSlot : std::uint64_t {
    d2d_N_d_max = 0,
    d2d_N_d_min = 1,
    d2d_r_d = 2,
    d2d_l_d = 3,
    d2d_G_max = 4,
    d2d_G_min = 5,
    init_N_d = 6,
    cycle = 7, ///< c2c walks + stochastic rounding during training
};

[[nodiscard]] inline std::uint64_t device_stream_id(std::uint32_t device_index,
                                                    NoiseSlot slot) {
    return (static_cast<std::uint64_t>(device_index) << 4) |
           static_cast<std::uint64_t>(slot);
}

[[nodiscard]] inline StreamRng device_rng(std::uint64_t master_seed,
                                          std::uint32_t device_index,
                                          NoiseSlot slot,
                                          std::uint64_t counter = 0) {
    return StreamRng(master_seed, device_stream_id(device_index, slot),
                     counter);
}

// =============================================================================
// Samplers
// =============================================================================

/// Device-to-device draw: Normal(nominal, nominal·sigma), rejected until it
/// falls inside [lo, hi]. sigma = 0 returns the nominal exactly.
inline double sample_d2d(double nominal, double sigma, double lo, double hi,
                         StreamRng& rng) {
    if (sigma < 0.0 || !std::isfinite(sigma))
        throw invalid_argument_error("sample_d2d: sigma must be >= 0");
    if (!(lo < hi))
        throw invalid_argument_error("sample_d2d: requires lo < hi");
    if (sigma == 0.0) return nominal;

    // A window further than 6 standard deviations from the mean would make
    // rejection sampling effectively loop forever.
    const double sd = std::abs(nominal) * sigma;
    const double gap = nominal < lo ? lo - nominal
                       : nominal > hi ? nominal - hi
                                      : 0.0;
    if (gap > 6.0 * sd)
        throw sampling_error(
            "sample_d2d: truncation window excludes the mean by more than "
            "6 sigma; the draw is practically unsatisfiable");

    for (long i = 0; i < 1000000; ++i) {
        const double x = nominal + sd * rng.normal();
        if (lo <= x && x <= hi) return x;
    }
    throw sampling_error("sample_d2d: rejection sampling did not terminate");
}

/// Direct cycle-to-cycle walk for the concentration bounds:
/// X_{t+1} = X_t + Ω·X_t·σ, Ω ~ U(-1,1), clamped into [lo, hi].
/// sigma = 0 returns X_t without consuming randomness.
inline double c2c_walk_bounds(double X_t, double sigma, double lo, double hi,
                              StreamRng& rng) {
    if (sigma < 0.0 || !std::isfinite(sigma))
        throw invalid_argument_error("c2c_walk_bounds: sigma must be >= 0");
    if (!(lo < hi))
        throw invalid_argument_error("c2c_walk_bounds: requires lo < hi");
    if (sigma == 0.0) return X_t;
    const double omega = rng.uniform_sym();
    return std::clamp(X_t + omega * X_t * sigma, lo, hi);
}

/// Fraction of the available concentration range the last update covered:
/// (N_d - N_d_old)/(N_d_max - N_d_old) for SET,
/// (N_d_old - N_d)/(N_d_old - N_d_min) for RESET.
/// When the device already sat at the relevant bound no update was possible
/// and the fraction is defined as 0.
[[nodiscard]] inline double update_fraction(double N_d_new, double N_d_old,
                                            double N_d_min_dev,
                                            double N_d_max_dev,
                                            Polarity polarity) {
    const double den = polarity == Polarity::SET ? N_d_max_dev - N_d_old
                                                 : N_d_old - N_d_min_dev;
    if (den == 0.0) return 0.0;
    const double num = polarity == Polarity::SET ? N_d_new - N_d_old
                                                 : N_d_old - N_d_new;
    return num / den;
}

/// Cycle-to-cycle walk for the filament geometry:
/// X_{t+1} = X_t·(1 + Ω₁·σ_add + Ω₂·σ_mult·u) with u = update_fraction,
/// clamped into [lo, hi]. Consumes exactly two random numbers whenever either
/// sigma is nonzero, none otherwise.
inline double c2c_walk_geometry(double X_t, double sigma_add,
                                double sigma_mult, double N_d_old,
                                double N_d_new, double N_d_min_dev,
                                double N_d_max_dev, Polarity polarity,
                                double lo, double hi, StreamRng& rng) {
    if (sigma_add < 0.0 || sigma_mult < 0.0 || !std::isfinite(sigma_add) ||
        !std::isfinite(sigma_mult))
        throw invalid_argument_error("c2c_walk_geometry: sigmas must be >= 0");
    if (!(lo < hi))
        throw invalid_argument_error("c2c_walk_geometry: requires lo < hi");
    if (sigma_add == 0.0 && sigma_mult == 0.0) return X_t;
    const double omega1 = rng.uniform_sym();
    const double omega2 = rng.uniform_sym();
    const double u = update_fraction(N_d_new, N_d_old, N_d_min_dev,
                                     N_d_max_dev, polarity);
    return std::clamp(
        X_t * (1.0 + omega1 * sigma_add + omega2 * sigma_mult * u), lo, hi);
}

// =============================================================================
// Device realization
// =============================================================================

/// Initialize one device from its private streams: draw every enabled
/// parameter, seed the walks at the drawn values, and (when anything at all
/// is stochastic) place N_d uniformly inside [N_init_lo, N_init_hi] — by
/// default the realized [N_d_min, N_d_max]. With every channel disabled the
/// result is exactly the nominal device. G bounds are sampled only when
/// finite nominals are supplied (the range-control circuit's setpoints).
inline DeviceState realize_device(
    const PhysicalParams& p, const NoiseSpec& noise,
    std::uint32_t device_index, std::uint64_t master_seed,
    double G_min_nominal = 0.0,
    double G_max_nominal = std::numeric_limits<double>::infinity(),
    double N_init_lo = -1.0, double N_init_hi = -1.0) {
    noise.validate();
    DeviceState s = nominal_state(p);
    s.G_min = G_min_nominal;
    s.G_max = G_max_nominal;
    s.rng_stream_id =
        device_stream_id(device_index, NoiseSlot::cycle);
    s.rng_counter = 0;

    auto draw = [&](const ParameterNoise& ch, NoiseSlot slot,
                    double nominal) -> double {
        if (!ch.enabled) return nominal;
        StreamRng rng = device_rng(master_seed, device_index, slot);
        return sample_d2d(nominal, ch.d2d_sigma, ch.trunc_lo, ch.trunc_hi,
                          rng);
    };
    s.N_d_max = draw(noise.N_d_max, NoiseSlot::d2d_N_d_max, p.N_d_max);
    s.N_d_min = draw(noise.N_d_min, NoiseSlot::d2d_N_d_min, p.N_d_min);
    s.r_d = draw(noise.r_d, NoiseSlot::d2d_r_d, p.r_d);
    s.l_d = draw(noise.l_d, NoiseSlot::d2d_l_d, p.l_d);
    if (std::isfinite(G_max_nominal)) {
        s.G_max = draw(noise.G_max, NoiseSlot::d2d_G_max, G_max_nominal);
        s.G_min = draw(noise.G_min, NoiseSlot::d2d_G_min, G_min_nominal);
        if (!(s.G_min < s.G_max))
            throw sampling_error(
                "realize_device: drawn conductance control bounds crossed; "
                "tighten the truncation windows");
    }
    if (!(s.N_d_min < s.N_d_max))
        throw sampling_error(
            "realize_device: drawn concentration bounds crossed; tighten "
            "the truncation windows");

    if (noise.any_enabled()) {
        double lo = N_init_lo >= 0.0 ? N_init_lo : s.N_d_min;
        double hi = N_init_hi >= 0.0 ? N_init_hi : s.N_d_max;
        lo = std::max(lo, s.N_d_min);
        hi = std::min(hi, s.N_d_max);
        if (!(lo <= hi))
            throw sampling_error(
                "realize_device: initial concentration window is empty");
        StreamRng rng =
            device_rng(master_seed, device_index, NoiseSlot::init_N_d);
        s.N_d = rng.uniform(lo, hi);
    } else {
        s.N_d = s.N_d_min; // as-fabricated high-resistive state
    }
    s.validate();
    return s;
}

inline DeviceState realize_device(const PhysicalParams& p,
                                  const NoiseSpec& noise,
                                  std::uint32_t device_index) {
    return realize_device(p, noise, device_index, noise.master_seed);
}

// =============================================================================
// File format
// =============================================================================
// Flat key-value text: `master_seed = ...` plus `<param>.<channel> = ...`
// with param in {N_d_max, N_d_min, r_d, l_d, G_max, G_min} and channel in
// {enabled, d2d_sigma, c2c_sigma, c2c_sigma_add, c2c_sigma_mult, trunc_lo,
// trunc_hi}. Every key is optional (defaults above); unknown keys are
// rejected.

inline NoiseSpec parse_noise_spec(std::map<std::string, double> kv,
                                  const std::string& name) {
    NoiseSpec ns;
    auto take = [&](const std::string& key, double& dst) {
        auto it = kv.find(key);
        if (it != kv.end()) {
            dst = it->second;
            kv.erase(it);
        }
    };
    auto take_flag = [&](const std::string& key, bool& dst) {
        auto it = kv.find(key);
        if (it != kv.end()) {
            if (it->second != 0.0 && it->second != 1.0)
                throw format_error(name + ": " + key + " must be 0 or 1");
            dst = it->second != 0.0;
            kv.erase(it);
        }
    };
    const std::pair<const char*, ParameterNoise*> blocks[] = {
        {"N_d_max", &ns.N_d_max}, {"N_d_min", &ns.N_d_min},
        {"r_d", &ns.r_d},         {"l_d", &ns.l_d},
        {"G_max", &ns.G_max},     {"G_min", &ns.G_min},
    };
    for (const auto& [prefix, ch] : blocks) {
        const std::string base = std::string(prefix) + ".";
        take_flag(base + "enabled", ch->enabled);
        take(base + "d2d_sigma", ch->d2d_sigma);
        take(base + "c2c_sigma", ch->c2c_sigma);
        take(base + "c2c_sigma_add", ch->c2c_sigma_add);
        take(base + "c2c_sigma_mult", ch->c2c_sigma_mult);
        take(base + "trunc_lo", ch->trunc_lo);
        take(base + "trunc_hi", ch->trunc_hi);
    }
    double seed = 0.0;
    take("master_seed", seed);
    if (seed < 0.0 || seed != std::floor(seed))
        throw format_error(name + ": master_seed must be a non-negative "
                           "integer");
    ns.master_seed = static_cast<std::uint64_t>(seed);
    if (!kv.empty())
        throw format_error(name + ": unknown key '" + kv.begin()->first +
                           "'");
    ns.validate();
    return ns;
}

inline NoiseSpec load_noise_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw format_error("cannot open noise file: " + path);
    return parse_noise_spec(detail::parse_kv_file(in, path), path);
}

} // namespace vcmsim
