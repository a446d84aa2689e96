#pragma once

// =============================================================================
// Error hierarchy
// =============================================================================
// Every failure mode in the library throws a subclass of vcmsim::error, so
// callers can catch the whole family or a specific condition. Messages carry
// the offending values; solver errors additionally carry their last residual.
// =============================================================================

#include <stdexcept>
#include <string>

namespace vcmsim {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An argument was non-finite, out of range, or otherwise unusable.
struct invalid_argument_error : error {
    using error::error;
};

/// A mathematical domain was violated (e.g. drift field strong enough to tilt
/// the hopping potential past the model's validity, |gamma| >= 1).
struct domain_error : error {
    using error::error;
};

/// An exponential overflowed double range; the operating point is outside the
/// representable regime.
struct saturation_error : error {
    using error::error;
};

/// An iterative solve exhausted its iteration budget.
struct convergence_error : error {
    convergence_error(const std::string& what, double last_residual)
        : error(what), residual(last_residual) {}
    double residual; ///< residual at the final iterate (V)
};

/// The adaptive ODE substep collapsed below the resolvable fraction of the
/// pulse duration (the dynamics are too stiff for the configured caps).
struct stiffness_error : error {
    using error::error;
};

/// A closed-form evaluation produced a non-finite intermediate (e.g. a
/// fractional power of a negative base); message carries the inputs.
struct evaluation_error : error {
    using error::error;
};

/// A configuration or data file failed to parse; message names file and line.
struct format_error : error {
    using error::error;
};

/// Least-squares calibration failed; message carries the best-so-far summary.
struct calibration_error : error {
    using error::error;
};

/// A computed voltage partition is inconsistent with its terminal voltage.
struct partition_error : error {
    using error::error;
};

/// The training loop diverged (non-finite loss); message names the epoch.
struct training_error : error {
    using error::error;
};

/// Requested noise realization cannot satisfy its truncation bounds.
struct sampling_error : error {
    using error::error;
};

/// An internal invariant broke; indicates a library bug, not a usage error.
struct internal_error : error {
    using error::error;
};

} // namespace vcmsim
