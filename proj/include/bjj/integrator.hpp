#pragma once

#include <vector>

#include "bjj/model.hpp"

namespace bjj {

// A sampled solution of the two-mode flow. All three sequences have equal
// length; times are strictly increasing; energies hold the conserved H at
// each sample.
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<double> energies;
    ModelParams params;

    double duration() const { return times.empty() ? 0.0 : times.back(); }
};

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double max_step = 1.0;
    double sample_interval = 0.05;  // output spacing, decoupled from stepping
    double t_end = 200.0;
    double pole_margin = 1e-9;      // error out once |Z| > 1 - pole_margin

    // Throws ConfigError unless everything is positive and the tolerances
    // are at most 1e-6.
    void validate() const;
};

// Integrates the flow from s0 over [0, t_end] with an adaptive embedded
// Runge-Kutta scheme of order 8(5,3) and seventh-order dense output;
// samples are emitted at multiples of sample_interval (plus t_end when not
// commensurate) without perturbing the step sequence.
// Throws PoleApproach if the solution reaches |Z| > 1 - pole_margin,
// StepFailure if the step size underflows.
Trajectory integrate(const ModelParams& p, const State& s0,
                     const IntegratorConfig& cfg);

// Classical fixed-step fourth-order Runge-Kutta solution, used as an
// independent cross-check. Requires step <= 1e-4. Samples are recorded
// every round(sample_interval/step) steps (every step if the default 0
// is passed).
Trajectory reference_integrate(const ModelParams& p, const State& s0,
                               double step, double t_end,
                               double sample_interval = 0.0,
                               double pole_margin = 1e-9);

}  // namespace bjj
