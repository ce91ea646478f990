#include "spinwall/profiles.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace spinwall {

namespace {

double sign_k(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }  // (-1)^k, k 1-based

void require_positive(const std::vector<double>& j) {
    for (std::size_t b = 0; b < j.size(); ++b)
        if (!(j[b] > 0.0))
            throw std::runtime_error("coupling J_" + std::to_string(b + 1) +
                                     " is not positive: " + std::to_string(j[b]));
}

}  // namespace

ExchangeSpec make_exp_wall(int nc, double J0, double a0, double k0, double w) {
    ExchangeSpec s;
    s.kind = ProfileKind::exp_wall;
    s.nc = nc;
    s.J0 = J0;
    s.wall = {a0, k0, w, nc};
    return s;
}

ExchangeSpec make_additive_sin(int nc, double J0, double a0, double k0, double omega) {
    ExchangeSpec s;
    s.kind = ProfileKind::additive_sin;
    s.nc = nc;
    s.J0 = J0;
    s.a0 = a0;
    s.k0 = k0;
    s.omega = omega;
    return s;
}

ExchangeSpec make_three_spin(double jt0, double jt1, double phi, double omega) {
    ExchangeSpec s;
    s.kind = ProfileKind::three_spin;
    s.nc = 3;
    s.jt0 = jt0;
    s.jt1 = jt1;
    s.phi = phi;
    s.omega = omega;
    return s;
}

ExchangeSpec make_epr_pair(int nc, double sep, double a0, double w) {
    ExchangeSpec s;
    s.kind = ProfileKind::epr_pair;
    s.nc = nc;
    s.s = sep;
    s.wall_a = {a0, (nc + sep) / 2.0, w, nc};
    s.wall_b = {a0, (nc - sep) / 2.0, w, nc};
    return s;
}

ExchangeSpec make_explicit(std::vector<double> j) {
    ExchangeSpec s;
    s.kind = ProfileKind::explicit_list;
    s.nc = static_cast<int>(j.size());
    s.explicit_j = std::move(j);
    return s;
}

double alpha_tanh(double k, const WallParams& p) {
    if (!(p.w > 0.0)) throw std::invalid_argument("wall width must be positive");
    if (p.a0 == 0.0) return 0.0;
    // Terms pair-cancel at large |r|, so even-R symmetric partial sums
    // converge even though the raw alternating sum does not.
    auto partial = [&](int R) {
        double s = 0.0;
        for (int r = -R; r <= R; ++r) {
            double term = std::tanh((k - p.k0 - static_cast<double>(r) * p.nc) / p.w);
            s += (r % 2 == 0) ? term : -term;
        }
        return p.a0 * s;
    };
    double prev = partial(16);
    for (int R = 18; R <= 64; R += 2) {
        double cur = partial(R);
        if (std::abs(cur - prev) < 1e-12) return cur;
        prev = cur;
    }
    throw std::runtime_error("alpha image sum did not converge by R = 64 (w too large)");
}

std::vector<double> evaluate_exchange(const ExchangeSpec& spec, double t) {
    std::vector<double> j(spec.nc, 0.0);
    switch (spec.kind) {
        case ProfileKind::exp_wall:
            for (int k = 1; k <= spec.nc; ++k)
                j[k - 1] = spec.J0 * std::exp(sign_k(k) * alpha_tanh(k, spec.wall));
            break;
        case ProfileKind::additive_sin:
            for (int k = 1; k <= spec.nc; ++k) {
                double a = spec.a0 *
                           std::sin(M_PI * (k - spec.k0) / spec.nc + spec.omega * t);
                j[k - 1] = spec.J0 + sign_k(k) * a;
            }
            break;
        case ProfileKind::three_spin: {
            double ph = spec.phi - spec.omega * t;
            for (int k = 1; k <= 3; ++k)
                j[k - 1] = spec.jt0 + spec.jt1 * std::cos(2.0 * M_PI * (k - 1) / 3.0 - ph);
            break;
        }
        case ProfileKind::epr_pair:
            for (int k = 1; k <= spec.nc; ++k) {
                double bracket = 1.0 + alpha_tanh(k, spec.wall_a) - alpha_tanh(k, spec.wall_b);
                j[k - 1] = 0.55 - 0.45 * sign_k(k) * bracket;
            }
            break;
        case ProfileKind::explicit_list:
            j = spec.explicit_j;
            break;
    }
    if (spec.disorder.enabled)
        j = apply_disorder(j, spec.disorder.fraction, spec.disorder.seed);
    // explicit lists are the caller's responsibility (zeroed bonds are a
    // legitimate probe); the parameterized forms must stay antiferromagnetic
    if (spec.kind != ProfileKind::explicit_list) require_positive(j);
    return j;
}

std::vector<double> apply_disorder(const std::vector<double>& j, double fraction,
                                   std::uint64_t seed) {
    if (fraction < 0.0 || fraction >= 1.0)
        throw std::invalid_argument("disorder fraction must be in [0, 1)");
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> out(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) out[k] = j[k] * (1.0 + fraction * u(gen));
    return out;
}

}  // namespace spinwall
