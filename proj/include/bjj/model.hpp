#pragma once

#include <array>

#include "bjj/errors.hpp"

namespace bjj {

// Whether the tunneling amplitudes are dressed by the mode-overlap
// corrections C_l, D_ab (state dependent) or kept at their bare values.
enum class TunnelingVariant { Constant, Variable };

// All constants of the two-mode model for a binary mixture in a double
// well. Time is measured in units of the bare tunneling rate (hbar = 1),
// so every field is dimensionless.
struct ModelParams {
    double f_a = 0.5;        // population fraction of species a
    double f_b = 0.5;        // population fraction of species b, f_a + f_b = 1
    double K_a = 1.0;        // bare tunneling amplitude, species a
    double K_b = 1.0;        // bare tunneling amplitude, species b
    double Lambda_a = 0.0;   // intra-species interaction, species a
    double Lambda_b = 0.0;   // intra-species interaction, species b
    double Lambda_ab = 0.0;  // inter-species interaction
    double C_a = 0.0;        // overlap-induced interaction correction
    double C_b = 0.0;
    double D_ab = 0.0;       // overlap-induced cross-tunneling correction
    TunnelingVariant tunneling = TunnelingVariant::Constant;

    // Throws ConfigError unless f_l > 0, f_a + f_b = 1, K_l > 0.
    void validate() const;
};

// A point of the four-dimensional phase space. Phases are stored
// unwrapped; reduction to (-pi, pi] is a display concern only.
struct State {
    double Z_a = 0.0;    // scaled population imbalance z_a / f_a
    double Z_b = 0.0;
    double phi_a = 0.0;  // relative phase between the wells, species a
    double phi_b = 0.0;

    // Throws ConfigError unless |Z_l| < 1.
    void validate() const;
};

struct StateDerivative {
    double dZ_a = 0.0;
    double dZ_b = 0.0;
    double dphi_a = 0.0;
    double dphi_b = 0.0;
};

struct Spin {
    double x = 0.0, y = 0.0, z = 0.0;
};

// Unit spins representing each species on the Bloch sphere.
struct SpinPair {
    Spin a, b;
};

struct DressedCoefficients {
    double K_a, K_b, Lambda_a, Lambda_b;
};

// Effective tunneling and interaction coefficients at the given state.
// Under the Constant variant these are exactly the bare parameters; under
// the Variable variant the K_l pick up the overlap corrections
//   Kbar_a = K_a - 2 f_a C_a sqrt(1-Z_a^2) cos(phi_a)
//                + f_b D_ab sqrt(1-Z_b^2) cos(phi_b)
// (mirrored for b) and Lambdabar_l = Lambda_l + C_l.
// Throws std::domain_error if |Z_l| >= 1.
DressedCoefficients dressed_coefficients(const ModelParams& p, const State& s);

// Right-hand side of the two-mode equations of motion:
//   dZ_l/dt   = -Kbar_l sqrt(1-Z_l^2) sin(phi_l)
//   dphi_a/dt = Lambdabar_a f_a Z_a + Lambda_ab f_b Z_b
//                + Kbar_a Z_a cos(phi_a) / sqrt(1-Z_a^2)
// (mirrored for b). Throws std::domain_error if |Z_l| >= 1.
StateDerivative eval_rhs(const ModelParams& p, const State& s);

// First integral of the constant-tunneling flow,
//   H = sum_l f_l [ f_l Lambdabar_l Z_l^2 - 2 Kbar_l sqrt(1-Z_l^2) cos(phi_l) ]
//       + 2 Lambda_ab f_a f_b Z_a Z_b,
// the f-weighted form whose gradient reproduces eval_rhs through the
// canonical equations in (z_l, phi_l) = (f_l Z_l, phi_l). Exactly conserved
// for the Constant variant at any population split; with Variable tunneling
// the coefficients are state dependent and no conservation is claimed.
// Throws std::domain_error if |Z_l| >= 1.
double hamiltonian(const ModelParams& p, const State& s);

// Bloch-sphere image of a state: S = (sqrt(1-Z^2) cos phi,
// sqrt(1-Z^2) sin phi, Z) per species. Requires |Z_l| <= 1.
SpinPair spin_map(const State& s);

// Spin energy in bare variables,
//   H = sum_l [ (Lambda_l + C_l)/2 (S_z^l)^2 + C_l (S_x^l)^2 - K_l S_x^l ]
//       + Lambda_ab S_z^a S_z^b - D_ab S_x^a S_x^b.
double spin_hamiltonian(const ModelParams& p, const SpinPair& sp);

// 4x4 Jacobian of eval_rhs in the variable order (Z_a, Z_b, phi_a, phi_b).
// Analytic for the Constant variant, fourth-order central differences for
// Variable. Throws std::domain_error if |Z_l| >= 1.
std::array<std::array<double, 4>, 4> rhs_jacobian(const ModelParams& p,
                                                  const State& s);

}  // namespace bjj
