#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bjj/model.hpp"

namespace bjj {

// Common stationary phase of both species.
enum class PhaseMode { Zero, Pi };

// Sign pattern of a stationary imbalance pair.
enum class Branch { Trivial, PlusMinus, MinusPlus, PlusPlus, MinusMinus };

struct FixedPoint {
    PhaseMode phi_star = PhaseMode::Zero;
    double Z_a_star = 0.0;
    double Z_b_star = 0.0;
    Branch branch = Branch::Trivial;
    bool stable = false;
    // Normal-mode frequencies (ascending) when the linearization is a
    // center; empty for saddles.
    std::optional<std::array<double, 2>> frequencies;
    double residual = 0.0;  // max-norm of eval_rhs at the point

    State state() const {
        const double phi = phi_star == PhaseMode::Zero ? 0.0 : 3.14159265358979323846;
        return {Z_a_star, Z_b_star, phi, phi};
    }
};

// Small-oscillation analysis of the trivial fixed point of a mode.
struct StabilityReport {
    double omega2_plus = 0.0;   // larger squared frequency
    double omega2_minus = 0.0;  // smaller squared frequency
    // Real frequencies, present iff both squared frequencies are >= 0.
    std::optional<double> omega_plus;
    std::optional<double> omega_minus;
    bool mqst = false;  // f_a f_b Lambda_ab^2 >= Lambda*_a Lambda*_b
    double lambda_star_a = 0.0;
    double lambda_star_b = 0.0;
};

// Closed-form fixed points for the symmetric case K_a = K_b, and
// Lambda_a = Lambda_b, f_a = f_b = 1/2. Always contains the trivial point;
// the nontrivial +/- pair is appended when it exists (Zero mode:
// Lambda_ab - Lambda > 2K, Pi mode: Lambda_ab + Lambda > 2K). Each point
// carries a Jacobian-based stability verdict.
// Throws SymmetryViolation when the parameters are not symmetric.
std::vector<FixedPoint> symmetric_fixed_points(const ModelParams& p,
                                               PhaseMode mode);

struct RootSearchResult {
    std::vector<FixedPoint> roots;   // deduplicated, sorted by (Z_a, Z_b)
    std::size_t failed_seeds = 0;    // seeds whose Newton iteration gave up
};

// Damped-Newton solutions of the stationarity conditions
//   (-1)^p K_l Z_l / sqrt(1-Z_l^2) + f_l Lambda_l Z_l + f_l' Lambda_ab Z_l' = 0
// from the given seeds, deduplicated to distinct roots. Works for
// asymmetric parameters, where the tunneling ratio R = K_a/K_b matters.
RootSearchResult numeric_fixed_points(
    const ModelParams& p, PhaseMode mode,
    const std::vector<std::pair<double, double>>& seeds);

// n x n seed grid over (-0.95, 0.95)^2.
std::vector<std::pair<double, double>> default_seed_grid(int n = 9);

// Frequencies of small oscillations about the trivial fixed point:
//   omega^2 = (-1)^p [ (K_a L*_a + K_b L*_b)
//                      +/- sqrt((K_a L*_a - K_b L*_b)^2
//                               + 4 K_a K_b f_a f_b Lambda_ab^2) ] / 2
// with L*_l = (-1)^p K_l + f_l Lambda_l, sorted so omega2_minus is the
// smaller root. The mqst flag evaluates f_a f_b Lambda_ab^2 >= L*_a L*_b.
StabilityReport normal_mode_frequencies(const ModelParams& p, PhaseMode mode);

// Smallest Lambda > 0 where omega2_minus of the given mode crosses zero
// along the ray Lambda_ab = ratio * Lambda, located by bisection to 1e-10.
// The template must be symmetric. Throws NoTransition when no crossing
// exists in (0, lambda_max].
double critical_lambda(const ModelParams& p_template, PhaseMode mode,
                       double ratio, double lambda_max = 50.0);

// Axis values for a rectangular (Lambda_a, Lambda_b) scan.
struct ParamGrid {
    std::vector<double> lambda_a;
    std::vector<double> lambda_b;
};

// Per-node trivial-fixed-point stability (both omega^2 > 0) for the given
// mode, with K_a = R * K_b taken from the template's K_b. Row-major over
// lambda_a (rows) then lambda_b (columns).
std::vector<std::uint8_t> stability_region(const ModelParams& p_template,
                                           const ParamGrid& grid, double R,
                                           PhaseMode mode);

}  // namespace bjj
