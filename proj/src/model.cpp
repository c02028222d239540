#include "bjj/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bjj {

namespace {

void require_inside_pole(const State& s) {
    if (!(std::abs(s.Z_a) < 1.0))
        throw std::domain_error("|Z_a| >= 1: phase velocity diverges");
    if (!(std::abs(s.Z_b) < 1.0))
        throw std::domain_error("|Z_b| >= 1: phase velocity diverges");
}

}  // namespace

void ModelParams::validate() const {
    if (!(f_a > 0.0) || !(f_b > 0.0))
        throw ConfigError("population fractions must be positive");
    if (std::abs(f_a + f_b - 1.0) > 1e-12)
        throw ConfigError("population fractions must sum to 1, got " +
                          std::to_string(f_a + f_b));
    if (!(K_a > 0.0) || !(K_b > 0.0))
        throw ConfigError("tunneling amplitudes must be positive");
}

void State::validate() const {
    if (!(std::abs(Z_a) < 1.0) || !(std::abs(Z_b) < 1.0))
        throw ConfigError("population imbalances must satisfy |Z| < 1");
}

DressedCoefficients dressed_coefficients(const ModelParams& p, const State& s) {
    require_inside_pole(s);
    if (p.tunneling == TunnelingVariant::Constant)
        return {p.K_a, p.K_b, p.Lambda_a, p.Lambda_b};

    const double wa = std::sqrt(1.0 - s.Z_a * s.Z_a) * std::cos(s.phi_a);
    const double wb = std::sqrt(1.0 - s.Z_b * s.Z_b) * std::cos(s.phi_b);
    return {p.K_a - 2.0 * p.f_a * p.C_a * wa + p.f_b * p.D_ab * wb,
            p.K_b - 2.0 * p.f_b * p.C_b * wb + p.f_a * p.D_ab * wa,
            p.Lambda_a + p.C_a, p.Lambda_b + p.C_b};
}

StateDerivative eval_rhs(const ModelParams& p, const State& s) {
    require_inside_pole(s);
    const auto c = dressed_coefficients(p, s);
    const double sa = std::sqrt(1.0 - s.Z_a * s.Z_a);
    const double sb = std::sqrt(1.0 - s.Z_b * s.Z_b);

    StateDerivative d;
    d.dZ_a = -c.K_a * sa * std::sin(s.phi_a);
    d.dZ_b = -c.K_b * sb * std::sin(s.phi_b);
    d.dphi_a = c.Lambda_a * p.f_a * s.Z_a + p.Lambda_ab * p.f_b * s.Z_b +
               c.K_a * (s.Z_a / sa) * std::cos(s.phi_a);
    d.dphi_b = c.Lambda_b * p.f_b * s.Z_b + p.Lambda_ab * p.f_a * s.Z_a +
               c.K_b * (s.Z_b / sb) * std::cos(s.phi_b);
    return d;
}

double hamiltonian(const ModelParams& p, const State& s) {
    require_inside_pole(s);
    const auto c = dressed_coefficients(p, s);
    const double sa = std::sqrt(1.0 - s.Z_a * s.Z_a);
    const double sb = std::sqrt(1.0 - s.Z_b * s.Z_b);
    return p.f_a * p.f_a * c.Lambda_a * s.Z_a * s.Z_a +
           p.f_b * p.f_b * c.Lambda_b * s.Z_b * s.Z_b +
           2.0 * p.Lambda_ab * p.f_a * p.f_b * s.Z_a * s.Z_b -
           2.0 * p.f_a * c.K_a * sa * std::cos(s.phi_a) -
           2.0 * p.f_b * c.K_b * sb * std::cos(s.phi_b);
}

SpinPair spin_map(const State& s) {
    if (!(std::abs(s.Z_a) <= 1.0) || !(std::abs(s.Z_b) <= 1.0))
        throw std::domain_error("spin_map requires |Z| <= 1");
    const double sa = std::sqrt(1.0 - s.Z_a * s.Z_a);
    const double sb = std::sqrt(1.0 - s.Z_b * s.Z_b);
    return {{sa * std::cos(s.phi_a), sa * std::sin(s.phi_a), s.Z_a},
            {sb * std::cos(s.phi_b), sb * std::sin(s.phi_b), s.Z_b}};
}

double spin_hamiltonian(const ModelParams& p, const SpinPair& sp) {
    return 0.5 * (p.Lambda_a + p.C_a) * sp.a.z * sp.a.z +
           0.5 * (p.Lambda_b + p.C_b) * sp.b.z * sp.b.z +
           p.C_a * sp.a.x * sp.a.x + p.C_b * sp.b.x * sp.b.x -
           p.K_a * sp.a.x - p.K_b * sp.b.x + p.Lambda_ab * sp.a.z * sp.b.z -
           p.D_ab * sp.a.x * sp.b.x;
}

namespace {

std::array<std::array<double, 4>, 4> jacobian_constant(const ModelParams& p,
                                                       const State& s) {
    const double sa = std::sqrt(1.0 - s.Z_a * s.Z_a);
    const double sb = std::sqrt(1.0 - s.Z_b * s.Z_b);
    const double ca = std::cos(s.phi_a), na = std::sin(s.phi_a);
    const double cb = std::cos(s.phi_b), nb = std::sin(s.phi_b);

    std::array<std::array<double, 4>, 4> J{};
    J[0][0] = p.K_a * s.Z_a * na / sa;
    J[0][2] = -p.K_a * sa * ca;
    J[1][1] = p.K_b * s.Z_b * nb / sb;
    J[1][3] = -p.K_b * sb * cb;
    J[2][0] = p.f_a * p.Lambda_a + p.K_a * ca / (sa * sa * sa);
    J[2][1] = p.f_b * p.Lambda_ab;
    J[2][2] = -p.K_a * (s.Z_a / sa) * na;
    J[3][0] = p.f_a * p.Lambda_ab;
    J[3][1] = p.f_b * p.Lambda_b + p.K_b * cb / (sb * sb * sb);
    J[3][3] = -p.K_b * (s.Z_b / sb) * nb;
    return J;
}

std::array<std::array<double, 4>, 4> jacobian_numeric(const ModelParams& p,
                                                      const State& s) {
    auto pack = [](const StateDerivative& d) {
        return std::array<double, 4>{d.dZ_a, d.dZ_b, d.dphi_a, d.dphi_b};
    };
    auto shift = [&s](int j, double h) {
        State t = s;
        switch (j) {
            case 0: t.Z_a += h; break;
            case 1: t.Z_b += h; break;
            case 2: t.phi_a += h; break;
            default: t.phi_b += h; break;
        }
        return t;
    };

    std::array<std::array<double, 4>, 4> J{};
    const double h = 1e-5;
    for (int j = 0; j < 4; ++j) {
        const auto fp2 = pack(eval_rhs(p, shift(j, 2 * h)));
        const auto fp1 = pack(eval_rhs(p, shift(j, h)));
        const auto fm1 = pack(eval_rhs(p, shift(j, -h)));
        const auto fm2 = pack(eval_rhs(p, shift(j, -2 * h)));
        for (int i = 0; i < 4; ++i)
            J[i][j] = (-fp2[i] + 8.0 * fp1[i] - 8.0 * fm1[i] + fm2[i]) / (12.0 * h);
    }
    return J;
}

}  // namespace

std::array<std::array<double, 4>, 4> rhs_jacobian(const ModelParams& p,
                                                  const State& s) {
    require_inside_pole(s);
    return p.tunneling == TunnelingVariant::Constant ? jacobian_constant(p, s)
                                                     : jacobian_numeric(p, s);
}

}  // namespace bjj
