#pragma once

// =============================================================================
// Surrogate calibration
// =============================================================================
// Least-squares fit of the closed-form surrogate (surrogate.hpp) against the
// full electrical model (physics.hpp). The two polarity branches share no
// coefficients, so each is fit independently:
//
//   negative branch (18 coefficients)     positive branch (8 coefficients)
//   ----------------------------------    --------------------------------
//   A. sigmoid floor a(V) on the lowest-  A. exponential drive (g0, g1) on
//      concentration row                     the highest-concentration row
//   B. drive term (b0, b1) by linear      B. concentration gate (h0..k0)
//      least squares on the highest row      with (g0, g1) frozen
//   C. concentration gate (c, d, f) with  C. joint polish of all 8
//      (a, b) frozen
//   D. joint polish of all 18
//
// The staged passes only manufacture a good starting point; the joint polish
// is the fit. A seed-deterministic multi-start (8 starts) around that point
// guards against local minima. Residuals live on an asinh-compressed current
// scale: log-like across decades, yet smooth through sign errors, which the
// optimizer would otherwise see as a cliff.
// =============================================================================

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vcmsim/errors.hpp"
#include "vcmsim/params.hpp"
#include "vcmsim/physics.hpp"
#include "vcmsim/rng.hpp"
#include "vcmsim/state.hpp"
#include "vcmsim/surrogate.hpp"

namespace vcmsim {

// =============================================================================
// Grid and report types
// =============================================================================

/// Sample layout for calibration: uniform in voltage per branch, log-uniform
/// in concentration. N_lo/N_hi of 0 mean "use the parameter bounds".
struct CalibrationGrid {
    double V_neg_lo = -1.5, V_neg_hi = -0.05;
    int n_V_neg = 40;
    double V_pos_lo = 0.05, V_pos_hi = 1.5;
    int n_V_pos = 40;
    double N_lo = 0.0, N_hi = 0.0;
    int n_N = 30;

    /// Resolve defaults against `p` and check the spec: both polarities
    /// present, the full [N_d_min, N_d_max] window covered.
    [[nodiscard]] CalibrationGrid resolved(const PhysicalParams& p) const {
        CalibrationGrid g = *this;
        if (g.N_lo == 0.0) g.N_lo = p.N_d_min;
        if (g.N_hi == 0.0) g.N_hi = p.N_d_max;
        if (!(g.V_neg_lo < g.V_neg_hi) || !(g.V_neg_hi < 0.0) ||
            !(g.V_pos_lo > 0.0) || !(g.V_pos_lo < g.V_pos_hi))
            throw invalid_argument_error(
                "CalibrationGrid: voltage ranges must satisfy "
                "V_neg_lo < V_neg_hi < 0 < V_pos_lo < V_pos_hi");
        if (g.n_V_neg < 2 || g.n_V_pos < 2 || g.n_N < 2)
            throw invalid_argument_error(
                "CalibrationGrid: need at least 2 samples per axis");
        if (!(g.N_lo <= p.N_d_min) || !(g.N_hi >= p.N_d_max))
            throw invalid_argument_error(
                "CalibrationGrid: concentration range must cover "
                "[N_d_min, N_d_max]");
        return g;
    }

    [[nodiscard]] std::vector<double> voltages(Polarity pol) const {
        const bool neg = pol == Polarity::SET;
        const double lo = neg ? V_neg_lo : V_pos_lo;
        const double hi = neg ? V_neg_hi : V_pos_hi;
        const int n = neg ? n_V_neg : n_V_pos;
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i)
            v[i] = lo + (hi - lo) * i / (n - 1);
        return v;
    }

    [[nodiscard]] std::vector<double> concentrations() const {
        std::vector<double> out(n_N);
        const double l0 = std::log(N_lo), l1 = std::log(N_hi);
        for (int i = 0; i < n_N; ++i)
            out[i] = std::exp(l0 + (l1 - l0) * i / (n_N - 1));
        out.front() = N_lo; // exact endpoints (exp/log round-trip drifts ulps)
        out.back() = N_hi;
        return out;
    }
};

/// Relative-current-error summary of one branch over a grid.
struct BranchError {
    double max_rel = 0.0;
    double mean_rel = 0.0;
};

/// Everything needed to audit a fit: the errors it achieves, the grid it was
/// fit on, and the coefficients themselves.
struct CalibrationReport {
    BranchError negative, positive;
    CalibrationGrid grid;
    FitCoefficients coefficients;
    double final_cost_neg = 0.0, final_cost_pos = 0.0;
    int winning_start_neg = 0, winning_start_pos = 0;
};

struct CalibrationResult {
    FitCoefficients coefficients;
    CalibrationReport report;
};

// =============================================================================
// Damped least squares
// =============================================================================

namespace detail {

/// One tabulated observation: oracle current at a grid node.
struct FitPoint {
    double V_M;
    double N_d;
    double I_oracle;
};

/// asinh-compressed residual of a surrogate current against its oracle
/// value: behaves as the log of the current ratio across decades but stays
/// smooth through zero crossings and penalizes sign errors. Non-finite
/// evaluations map to a large flat penalty.
inline double compressed_residual(double I_sur, double I_oracle) {
    if (!std::isfinite(I_sur)) return 1.0e3;
    const double sgn = I_oracle < 0.0 ? -1.0 : 1.0;
    return std::asinh(2.0 * I_sur / std::abs(I_oracle)) -
           std::asinh(2.0 * sgn);
}

using ResidualFn =
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct LmOptions {
    int max_iterations = 400;
    double lambda0 = 1e-3;
    double rel_decrease_tol = 1e-14;
    double lambda_max = 1e14;
};

struct LmResult {
    Eigen::VectorXd theta;
    double cost = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Levenberg-Marquardt with central-difference Jacobian and Marquardt
/// (diagonal) damping. Deterministic: fixed evaluation order, no threading.
inline LmResult levenberg_marquardt(const ResidualFn& fn,
                                    const Eigen::VectorXd& theta0,
                                    int n_residuals, LmOptions opt = {}) {
    const int n = static_cast<int>(theta0.size());
    Eigen::VectorXd theta = theta0;
    Eigen::VectorXd r(n_residuals), r_trial(n_residuals);
    Eigen::MatrixXd J(n_residuals, n);

    fn(theta, r);
    double cost = 0.5 * r.squaredNorm();
    if (!std::isfinite(cost))
        throw calibration_error(
            "levenberg_marquardt: non-finite cost at the initial point");

    double lambda = opt.lambda0;
    int stall = 0;
    LmResult res;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        // central-difference Jacobian
        Eigen::VectorXd rp(n_residuals), rm(n_residuals);
        for (int j = 0; j < n; ++j) {
            const double h = 1e-6 * std::abs(theta[j]) + 1e-10;
            Eigen::VectorXd t = theta;
            t[j] = theta[j] + h;
            fn(t, rp);
            t[j] = theta[j] - h;
            fn(t, rm);
            J.col(j) = (rp - rm) / (2.0 * h);
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        const double diag_floor = 1e-12 * JtJ.diagonal().maxCoeff();

        bool accepted = false;
        for (int rej = 0; rej < 40; ++rej) {
            Eigen::MatrixXd A = JtJ;
            for (int j = 0; j < n; ++j)
                A(j, j) += lambda * std::max(JtJ(j, j), diag_floor);
            const Eigen::VectorXd step = A.ldlt().solve(-g);
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            const Eigen::VectorXd trial = theta + step;
            fn(trial, r_trial);
            const double trial_cost = 0.5 * r_trial.squaredNorm();
            if (std::isfinite(trial_cost) && trial_cost < cost) {
                const double rel = (cost - trial_cost) / std::max(cost, 1e-300);
                theta = trial;
                r = r_trial;
                cost = trial_cost;
                lambda = std::max(lambda / 3.0, 1e-12);
                stall = rel < opt.rel_decrease_tol ? stall + 1 : 0;
                accepted = true;
                break;
            }
            lambda *= 10.0;
            if (lambda > opt.lambda_max) break;
        }
        if (!accepted || stall >= 2 || lambda > opt.lambda_max) {
            res.converged = accepted || stall >= 2 || it > 0;
            ++it;
            break;
        }
    }
    res.theta = theta;
    res.cost = cost;
    res.iterations = it;
    return res;
}

// =============================================================================
// Coefficient packing (per branch)
// =============================================================================

inline const std::vector<double FitCoefficients::*>& neg_members() {
    using F = FitCoefficients;
    static const std::vector<double F::*> m = {
        &F::a0, &F::a1, &F::a2, &F::a3, &F::b0, &F::b1,
        &F::c0, &F::c1, &F::c2, &F::c3, &F::d0, &F::d1,
        &F::d2, &F::d3, &F::f0, &F::f1, &F::f2, &F::f3};
    return m;
}

inline const std::vector<double FitCoefficients::*>& pos_members() {
    using F = FitCoefficients;
    static const std::vector<double F::*> m = {&F::g0, &F::g1, &F::h0, &F::h1,
                                               &F::h2, &F::h3, &F::j0, &F::k0};
    return m;
}

inline Eigen::VectorXd pack(const FitCoefficients& c,
                            const std::vector<double FitCoefficients::*>& m) {
    Eigen::VectorXd v(static_cast<int>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        v[static_cast<int>(i)] = c.*m[i];
    return v;
}

inline void unpack(const Eigen::VectorXd& v,
                   const std::vector<double FitCoefficients::*>& m,
                   FitCoefficients& c) {
    for (std::size_t i = 0; i < m.size(); ++i)
        c.*m[i] = v[static_cast<int>(i)];
}

/// Hand-tuned seed deck: order-of-magnitude plausible shapes for both
/// branches. Only a starting point — every value is refit.
inline FitCoefficients seed_coefficients() {
    FitCoefficients c{};
    c.a0 = 1e-5;
    c.a2 = 0.5;
    c.a3 = 0.25;
    c.a1 = c.a0 * std::exp(-c.a2 / c.a3); // starts the sigmoid at a(0) = 0
    c.b0 = -2e-4;
    c.b1 = -5e-4;
    c.c0 = -1.0;
    c.c1 = 0.2;
    c.c2 = 0.6;
    c.c3 = 0.4;
    c.d0 = -0.5;
    c.d1 = 0.1;
    c.d2 = 0.4;
    c.d3 = 0.5;
    c.f0 = 0.7;
    c.f1 = 1.5;
    c.f2 = 0.6;
    c.f3 = 2.0;
    c.g0 = 2e-4;
    c.g1 = 1.2;
    c.h0 = 0.3;
    c.h1 = 0.5;
    c.h2 = 2.0;
    c.h3 = 3.0;
    c.j0 = 0.5;
    c.k0 = 2.0;
    return c;
}

/// Surrogate evaluation that reports failures as NaN instead of throwing —
/// the optimizer treats NaN as a flat penalty and steps elsewhere.
inline double eval_or_nan(const FitCoefficients& c, const PhysicalParams& p,
                          double N_d, double V_M) {
    try {
        return surrogate_current(c, p, N_d, V_M);
    } catch (const error&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

/// Residual functor over `points` varying the sub-vector `members` of a base
/// deck. `sqrt_weights`, when present, scales each residual (weighted least
/// squares; entries are the square roots of the weights).
inline ResidualFn branch_residual_fn(
    const PhysicalParams& p, const std::vector<FitPoint>& points,
    const std::vector<double FitCoefficients::*>& members,
    FitCoefficients base,
    const std::vector<double>* sqrt_weights = nullptr) {
    return [&p, &points, &members, base,
            sqrt_weights](const Eigen::VectorXd& theta,
                          Eigen::VectorXd& r) mutable {
        unpack(theta, members, base);
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto& pt = points[i];
            const double w = sqrt_weights ? (*sqrt_weights)[i] : 1.0;
            r[static_cast<int>(i)] =
                w * compressed_residual(eval_or_nan(base, p, pt.N_d, pt.V_M),
                                        pt.I_oracle);
        }
    };
}

/// Tabulate the oracle over one branch of the grid (nominal, noise-free
/// device — the surrogate is calibrated for the unperturbed cell).
inline std::vector<FitPoint> tabulate_oracle(const PhysicalParams& p,
                                             const CalibrationGrid& grid,
                                             Polarity pol) {
    std::vector<FitPoint> pts;
    const auto Vs = grid.voltages(pol);
    const auto Ns = grid.concentrations();
    pts.reserve(Vs.size() * Ns.size());
    for (double N : Ns) {
        DeviceState s = nominal_state(p);
        // an evaluation grid may probe marginally outside the nominal window
        s.N_d = N;
        s.N_d_min = std::min(p.N_d_min, N);
        s.N_d_max = std::max(p.N_d_max, N);
        for (double V : Vs)
            pts.push_back({V, N, solve_full_model(p, s, V).I_M});
    }
    return pts;
}

inline BranchError branch_errors(const FitCoefficients& c,
                                 const PhysicalParams& p,
                                 const std::vector<FitPoint>& points) {
    BranchError e;
    for (const auto& pt : points) {
        const double I = eval_or_nan(c, p, pt.N_d, pt.V_M);
        const double rel = std::isfinite(I)
                               ? std::abs(I - pt.I_oracle) /
                                     std::abs(pt.I_oracle)
                               : std::numeric_limits<double>::infinity();
        e.max_rel = std::max(e.max_rel, rel);
        e.mean_rel += rel;
    }
    if (!points.empty()) e.mean_rel /= static_cast<double>(points.size());
    return e;
}

} // namespace detail

// =============================================================================
// Calibration driver
// =============================================================================

/// Fit the surrogate to the full model over `grid`. When `init` is given the
/// staged construction and multi-start are skipped and the deck is polished
/// directly — refitting from a previous result reproduces it (fixed point).
/// Deterministic for a fixed (params, grid, init, seed).
inline CalibrationResult calibrate(
    const PhysicalParams& p, const CalibrationGrid& grid_in = {},
    const std::optional<FitCoefficients>& init = std::nullopt,
    std::uint64_t seed = 0xca11b8a7e5ULL) {
    using namespace detail;
    const CalibrationGrid grid = grid_in.resolved(p);
    const auto neg_pts = tabulate_oracle(p, grid, Polarity::SET);
    const auto pos_pts = tabulate_oracle(p, grid, Polarity::RESET);
    const int n_neg = static_cast<int>(neg_pts.size());
    const int n_pos = static_cast<int>(pos_pts.size());

    FitCoefficients deck = init ? *init : seed_coefficients();

    if (!init) {
        // --- negative branch staging -----------------------------------
        // A: sigmoid floor on the lowest-concentration row, where the
        // concentration gate suppresses the drive term.
        std::vector<FitPoint> hrs, lrs;
        for (const auto& pt : neg_pts) {
            if (pt.N_d == neg_pts.front().N_d) hrs.push_back(pt);
            if (pt.N_d == neg_pts.back().N_d) lrs.push_back(pt);
        }
        {
            using F = FitCoefficients;
            const std::vector<double F::*> m = {&F::a0, &F::a1, &F::a2,
                                                &F::a3};
            auto fn = [&](const Eigen::VectorXd& th, Eigen::VectorXd& r) {
                for (std::size_t i = 0; i < hrs.size(); ++i) {
                    const double V = hrs[i].V_M;
                    const double a =
                        (th[1] + th[0]) /
                            (1.0 + std::exp(-(V + th[2]) / th[3])) -
                        th[0];
                    r[static_cast<int>(i)] =
                        compressed_residual(-a, hrs[i].I_oracle);
                }
            };
            auto lm = levenberg_marquardt(
                fn, pack(deck, m), static_cast<int>(hrs.size()));
            unpack(lm.theta, m, deck);
        }
        // B: drive term on the highest-concentration row, where the gate is
        // open: -I ~= a(V) + b(V), and b is linear in (b0, b1).
        {
            Eigen::MatrixXd X(static_cast<int>(lrs.size()), 2);
            Eigen::VectorXd y(static_cast<int>(lrs.size()));
            for (std::size_t i = 0; i < lrs.size(); ++i) {
                const double V = lrs[i].V_M;
                const double a =
                    (deck.a1 + deck.a0) /
                        (1.0 + std::exp(-(V + deck.a2) / deck.a3)) -
                    deck.a0;
                X(static_cast<int>(i), 0) = -V;                     // b0
                X(static_cast<int>(i), 1) = 1.0 - std::exp(-V);     // b1
                y[static_cast<int>(i)] = -lrs[i].I_oracle - a;
            }
            const Eigen::Vector2d b =
                (X.transpose() * X).ldlt().solve(X.transpose() * y);
            deck.b0 = b[0];
            deck.b1 = b[1];
        }
        // C: concentration gate with floor and drive frozen.
        {
            using F = FitCoefficients;
            const std::vector<double F::*> m = {&F::c0, &F::c1, &F::c2,
                                                &F::c3, &F::d0, &F::d1,
                                                &F::d2, &F::d3, &F::f0,
                                                &F::f1, &F::f2, &F::f3};
            auto lm = levenberg_marquardt(
                branch_residual_fn(p, neg_pts, m, deck), pack(deck, m),
                n_neg);
            unpack(lm.theta, m, deck);
        }
    }

    // --- joint polish with multi-start (negative branch) ---------------
    auto polish = [&](const std::vector<FitPoint>& pts,
                      const std::vector<double FitCoefficients::*>& members,
                      int n_res, std::uint64_t stream,
                      int& winner) -> double {
        if (!init) {
            // Exploration: unweighted multi-start around the staged point.
            const Eigen::VectorXd theta0 = pack(deck, members);
            Eigen::VectorXd best_theta = theta0;
            double best_cost = std::numeric_limits<double>::infinity();
            winner = -1;
            for (int s = 0; s < 8; ++s) {
                Eigen::VectorXd th = theta0;
                if (s > 0) { // start 0 is the staged point itself
                    StreamRng rng(seed,
                                  stream * 97 + static_cast<unsigned>(s));
                    for (int j = 0; j < th.size(); ++j)
                        th[j] *= std::exp(0.10 * rng.normal());
                }
                LmResult lm;
                try {
                    lm = levenberg_marquardt(
                        branch_residual_fn(p, pts, members, deck), th,
                        n_res);
                } catch (const calibration_error&) {
                    continue; // a start may open on a penalty plateau
                }
                if (lm.cost < best_cost) {
                    best_cost = lm.cost;
                    best_theta = lm.theta;
                    winner = s;
                }
            }
            if (winner < 0)
                throw calibration_error(
                    "calibrate: every start failed to take a single step");
            unpack(best_theta, members, deck);
        } else {
            winner = 0; // polish the caller's deck directly
        }

        // Reweighted polish rounds: plain least squares leaves isolated
        // hot spots; upweighting points in proportion to their squared
        // relative error flattens the profile toward the 5% band. Iterated
        // until the (deck, weights) pair is self-consistent — from an
        // already-converged deck the weights reproduce themselves and the
        // optimizer cannot move, so re-calibrating from a previous result
        // returns it unchanged (fixed point). Each round doubles as a
        // fresh-damping restart for the optimizer.
        std::vector<double> sqrt_w(pts.size(), 1.0);
        Eigen::VectorXd prev = pack(deck, members);
        for (int round = 0; round < 30; ++round) {
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const double I = eval_or_nan(deck, p, pts[i].N_d, pts[i].V_M);
                const double rel =
                    std::isfinite(I)
                        ? std::abs(I - pts[i].I_oracle) /
                              std::abs(pts[i].I_oracle)
                        : 1.0;
                const double w =
                    std::min(1.0 + (rel / 0.05) * (rel / 0.05), 50.0);
                sqrt_w[i] = std::sqrt(w);
            }
            auto lm = levenberg_marquardt(
                branch_residual_fn(p, pts, members, deck, &sqrt_w),
                pack(deck, members), n_res);
            unpack(lm.theta, members, deck);
            const double delta =
                (lm.theta - prev).norm() / (prev.norm() + 1e-300);
            prev = lm.theta;
            if (delta < 1e-10) break;
        }
        // final unweighted cost for the report
        Eigen::VectorXd r_final(n_res);
        branch_residual_fn(p, pts, members, deck)(pack(deck, members),
                                                  r_final);
        return 0.5 * r_final.squaredNorm();
    };

    CalibrationReport report;
    report.grid = grid;
    double cost_neg =
        polish(neg_pts, neg_members(), n_neg, 1, report.winning_start_neg);

    if (!init) {
        // --- positive branch staging ------------------------------------
        // A: exponential drive on the highest-concentration row, where the
        // concentration gate is fully open.
        std::vector<FitPoint> lrs_pos;
        for (const auto& pt : pos_pts)
            if (pt.N_d == pos_pts.back().N_d) lrs_pos.push_back(pt);
        {
            auto fn = [&](const Eigen::VectorXd& th, Eigen::VectorXd& r) {
                for (std::size_t i = 0; i < lrs_pos.size(); ++i) {
                    const double I =
                        -th[0] * (std::exp(-th[1] * lrs_pos[i].V_M) - 1.0);
                    r[static_cast<int>(i)] =
                        compressed_residual(I, lrs_pos[i].I_oracle);
                }
            };
            using F = FitCoefficients;
            const std::vector<double F::*> m = {&F::g0, &F::g1};
            auto lm = levenberg_marquardt(
                fn, pack(deck, m), static_cast<int>(lrs_pos.size()));
            unpack(lm.theta, m, deck);
        }
        // B: concentration gate with the drive frozen.
        {
            using F = FitCoefficients;
            const std::vector<double F::*> m = {&F::h0, &F::h1, &F::h2,
                                                &F::h3, &F::j0, &F::k0};
            auto lm = levenberg_marquardt(
                branch_residual_fn(p, pos_pts, m, deck), pack(deck, m),
                n_pos);
            unpack(lm.theta, m, deck);
        }
    }
    double cost_pos =
        polish(pos_pts, pos_members(), n_pos, 2, report.winning_start_pos);

    try {
        deck.validate();
    } catch (const error& e) {
        throw calibration_error(std::string("calibrate: fit left the valid "
                                            "coefficient domain: ") +
                                e.what());
    }

    report.coefficients = deck;
    report.final_cost_neg = cost_neg;
    report.final_cost_pos = cost_pos;
    report.negative = detail::branch_errors(deck, p, neg_pts);
    report.positive = detail::branch_errors(deck, p, pos_pts);
    return {deck, report};
}

/// Relative-error summary of an existing deck over a grid (used for held-out
/// evaluation; the grid need not equal the training grid).
inline std::pair<BranchError, BranchError> fit_errors(
    const FitCoefficients& c, const PhysicalParams& p,
    const CalibrationGrid& grid_in) {
    const CalibrationGrid grid = grid_in.resolved(p);
    const auto neg = detail::tabulate_oracle(p, grid, Polarity::SET);
    const auto pos = detail::tabulate_oracle(p, grid, Polarity::RESET);
    return {detail::branch_errors(c, p, neg),
            detail::branch_errors(c, p, pos)};
}

/// Serialize a report as annotated text next to the coefficient file.
inline void save_calibration_report(const std::string& path,
                                    const CalibrationReport& r) {
    std::ofstream out(path);
    if (!out)
        throw format_error("cannot open report file for write: " + path);
    out.precision(17);
    out << "# surrogate calibration report\n";
    out << "negative.max_rel_error = " << r.negative.max_rel << "\n";
    out << "negative.mean_rel_error = " << r.negative.mean_rel << "\n";
    out << "positive.max_rel_error = " << r.positive.max_rel << "\n";
    out << "positive.mean_rel_error = " << r.positive.mean_rel << "\n";
    out << "grid.V_neg_lo = " << r.grid.V_neg_lo << "\n";
    out << "grid.V_neg_hi = " << r.grid.V_neg_hi << "\n";
    out << "grid.n_V_neg = " << r.grid.n_V_neg << "\n";
    out << "grid.V_pos_lo = " << r.grid.V_pos_lo << "\n";
    out << "grid.V_pos_hi = " << r.grid.V_pos_hi << "\n";
    out << "grid.n_V_pos = " << r.grid.n_V_pos << "\n";
    out << "grid.N_lo = " << r.grid.N_lo << "\n";
    out << "grid.N_hi = " << r.grid.N_hi << "\n";
    out << "grid.n_N = " << r.grid.n_N << "\n";
    out << "fit.final_cost_negative = " << r.final_cost_neg << "\n";
    out << "fit.final_cost_positive = " << r.final_cost_pos << "\n";
    out << "fit.winning_start_negative = " << r.winning_start_neg << "\n";
    out << "fit.winning_start_positive = " << r.winning_start_pos << "\n";
    for (const auto& [key, member] : detail::coefficient_fields())
        out << key << " = " << r.coefficients.*member << "\n";
    if (!out)
        throw format_error("write failed: " + path);
}

} // namespace vcmsim
