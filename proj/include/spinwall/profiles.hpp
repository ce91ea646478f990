#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace spinwall {

// Staggered order-parameter wall: alpha(k - k0) as a periodic image sum.
struct WallParams {
    double a0 = 1.0;
    double k0 = 0.0;  // wall center, site units, may be non-integer
    double w = 2.0;   // width, > 0
    int nc = 0;
};

struct DisorderParams {
    bool enabled = false;
    double fraction = 0.0;
    std::uint64_t seed = 0;
};

enum class ProfileKind { exp_wall, additive_sin, three_spin, epr_pair, explicit_list };

// Declarative coupling profile {J_k(t)}, bond k between sites k and k+1.
struct ExchangeSpec {
    ProfileKind kind = ProfileKind::explicit_list;
    int nc = 0;

    double J0 = 1.0;   // exp_wall / additive_sin baseline
    WallParams wall;   // exp_wall

    double a0 = 0.0;   // additive_sin amplitude
    double k0 = 0.0;   // additive_sin wall center at t = 0
    double omega = 0.0;  // drive rate; 0 means static

    double jt0 = 0.0, jt1 = 0.0, phi = 0.0;  // three_spin

    double s = 0.0;          // epr_pair wall separation
    WallParams wall_a, wall_b;

    std::vector<double> explicit_j;

    DisorderParams disorder;
};

ExchangeSpec make_exp_wall(int nc, double J0, double a0, double k0, double w);
// Driven wall: J_k(t) = J0 + (-1)^k a0 sin(pi (k - k0)/nc + omega t). The
// drive sign is chosen so the wall retreats by 2 sites per 2*pi/(nc*omega),
// matching the +2 translation used by the cycle operator.
ExchangeSpec make_additive_sin(int nc, double J0, double a0, double k0, double omega);
// J_k = jt0 + jt1 cos(2 pi (k-1)/3 - phi(t)), phi(t) = phi - omega t.
ExchangeSpec make_three_spin(double jt0, double jt1, double phi, double omega = 0.0);
ExchangeSpec make_epr_pair(int nc, double s, double a0 = 1.0, double w = 2.0);
ExchangeSpec make_explicit(std::vector<double> j);

// Image sum a0 * sum_r (-1)^r tanh((k - k0 - r*nc)/w), symmetric truncation
// over even r-windows until |change| < 1e-12; throws past R = 64.
double alpha_tanh(double k, const WallParams& p);

// Couplings at time t; disorder (if configured) is applied last.
std::vector<double> evaluate_exchange(const ExchangeSpec& spec, double t);

// J_k -> J_k * (1 + fraction * u_k), u_k iid uniform on [-1, 1] from a
// deterministic seeded generator.
std::vector<double> apply_disorder(const std::vector<double>& j, double fraction,
                                   std::uint64_t seed);

}  // namespace spinwall
