#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "spinwall/profiles.hpp"

using namespace spinwall;

TEST_CASE("alpha_tanh basics") {
    WallParams p;
    p.a0 = 1.0;
    p.k0 = 15.0;
    p.w = 2.0;
    p.nc = 29;

    CHECK(alpha_tanh(15.0, p) == 0.0);

    // saturates to +a0 a few widths past the center
    CHECK(std::abs(alpha_tanh(22.0, p) - 1.0) < 1e-2);

    // antisymmetric about the center
    for (double d : {0.5, 1.0, 3.0, 7.0})
        CHECK(std::abs(alpha_tanh(15.0 + d, p) + alpha_tanh(15.0 - d, p)) < 1e-12);

    WallParams flat = p;
    flat.a0 = 0.0;
    for (int k = 1; k <= 29; ++k) CHECK(alpha_tanh(double(k), flat) == 0.0);
}

TEST_CASE("alpha_tanh image sum fails to converge for oversized widths") {
    WallParams p;
    p.a0 = 1.0;
    p.k0 = 5.0;
    p.w = 2000.0;
    p.nc = 9;
    CHECK_THROWS_AS(alpha_tanh(3.0, p), std::runtime_error);
}

TEST_CASE("exp_wall with zero amplitude is uniform") {
    ExchangeSpec spec = make_exp_wall(11, 0.7, 0.0, 6.0, 2.0);
    for (double j : evaluate_exchange(spec, 0.0)) CHECK(j == 0.7);
}

TEST_CASE("three_spin static couplings") {
    ExchangeSpec spec = make_three_spin(1.0, 0.5, 0.0);
    std::vector<double> j = evaluate_exchange(spec, 0.0);
    REQUIRE(j.size() == 3);
    CHECK(j[0] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(j[1] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(j[2] == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("epr_pair with coincident walls is the pure dimer pattern") {
    ExchangeSpec spec = make_epr_pair(18, 0.0);
    std::vector<double> j = evaluate_exchange(spec, 0.0);
    for (int k = 1; k <= 18; ++k) {
        double want = (k % 2 == 1) ? 1.0 : 0.1;
        CHECK(std::abs(j[k - 1] - want) < 1e-15);
    }
}

TEST_CASE("epr_pair reverses the dimer pattern between the walls") {
    ExchangeSpec spec = make_epr_pair(18, 8.0);
    std::vector<double> j = evaluate_exchange(spec, 0.0);
    // walls at (nc +- s)/2 = 13 and 5; midway between them the strong bond
    // sits on even k, outside it sits on odd k
    CHECK(j[8 - 1] > j[9 - 1]);    // k = 8 between the walls
    CHECK(j[1 - 1] > j[2 - 1]);    // k = 1 outside
    CHECK(j[17 - 1] > j[16 - 1]);  // far side outside
    for (double v : j) CHECK(v > 0.0);
}

TEST_CASE("parameterized profiles reject nonpositive couplings") {
    ExchangeSpec spec = make_additive_sin(9, 1.0, 2.0, 0.0, 0.0);
    CHECK_THROWS_AS(evaluate_exchange(spec, 0.0), std::runtime_error);
}

TEST_CASE("explicit lists pass through untouched, zeros included") {
    ExchangeSpec spec = make_explicit({0.0, 0.0, 0.0, 0.0});
    std::vector<double> j = evaluate_exchange(spec, 123.0);
    for (double v : j) CHECK(v == 0.0);

    ExchangeSpec mixed = make_explicit({1.0, 2.5, 0.25});
    CHECK(evaluate_exchange(mixed, 0.0) == std::vector<double>{1.0, 2.5, 0.25});
}

TEST_CASE("additive_sin staggered modulation crosses zero at the wall center") {
    const int nc = 29;
    ExchangeSpec spec = make_additive_sin(nc, 1.0, 0.5, 15.0, 0.0);
    std::vector<double> j = evaluate_exchange(spec, 0.0);
    auto stag = [&](int k) { return (k % 2 == 0 ? 1.0 : -1.0) * (j[k - 1] - 1.0); };
    CHECK(std::abs(stag(15)) < 1e-12);
    CHECK(stag(16) * stag(14) < 0.0);
}

TEST_CASE("wide exponential wall agrees with the additive form at the crossings") {
    const int nc = 29;
    ExchangeSpec ew = make_exp_wall(nc, 1.0, 0.5, 15.0, 25.0);
    ExchangeSpec as = make_additive_sin(nc, 1.0, 0.5, 15.0, 0.0);
    std::vector<double> je = evaluate_exchange(ew, 0.0);
    std::vector<double> ja = evaluate_exchange(as, 0.0);
    // staggered modulations share their sign at every site away from the
    // center, so the zero crossings coincide to within half a site
    for (int k = 1; k <= nc; ++k) {
        if (k == 15) continue;
        double me = (k % 2 == 0 ? 1.0 : -1.0) * std::log(je[k - 1]);
        double ma = (k % 2 == 0 ? 1.0 : -1.0) * (ja[k - 1] - 1.0);
        CHECK(me * ma > 0.0);
    }
}

TEST_CASE("driven profiles advance by one two-site shift per fractional period") {
    const double omega = 0.37;

    ExchangeSpec ring = make_additive_sin(9, 1.0, 0.6, 4.0, omega);
    const double tf9 = 2.0 * M_PI / (9 * omega);
    for (double t : {0.0, 0.31, 1.7}) {
        std::vector<double> now = evaluate_exchange(ring, t);
        std::vector<double> later = evaluate_exchange(ring, t + tf9);
        for (int k = 1; k <= 9; ++k) {
            int kp = (k + 1) % 9 + 1;  // bond k+2, cyclic
            CHECK(later[k - 1] == doctest::Approx(now[kp - 1]).epsilon(1e-12));
        }
    }

    ExchangeSpec tri = make_three_spin(1.0, 0.8, 0.0, omega);
    const double tf3 = 4.0 * M_PI / (3 * omega);
    std::vector<double> now = evaluate_exchange(tri, 0.2);
    std::vector<double> later = evaluate_exchange(tri, 0.2 + tf3);
    for (int k = 1; k <= 3; ++k) {
        int kp = (k + 1) % 3 + 1;
        CHECK(later[k - 1] == doctest::Approx(now[kp - 1]).epsilon(1e-12));
    }
}

TEST_CASE("drive is periodic in time") {
    const double omega = 0.9;
    ExchangeSpec ring = make_additive_sin(7, 1.0, 0.4, 3.0, omega);
    std::vector<double> a = evaluate_exchange(ring, 0.4);
    std::vector<double> b = evaluate_exchange(ring, 0.4 + 2.0 * M_PI / omega);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("apply_disorder") {
    std::vector<double> j(12, 2.0);

    SUBCASE("zero fraction is the identity") {
        CHECK(apply_disorder(j, 0.0, 99) == j);
    }

    SUBCASE("bounded multiplicative range") {
        std::vector<double> d = apply_disorder(j, 0.5, 7);
        for (double v : d) {
            CHECK(v >= 1.0);
            CHECK(v <= 3.0);
        }
    }

    SUBCASE("deterministic per seed") {
        CHECK(apply_disorder(j, 0.5, 42) == apply_disorder(j, 0.5, 42));
        CHECK(apply_disorder(j, 0.5, 42) != apply_disorder(j, 0.5, 43));
    }

    SUBCASE("mean-one modulation") {
        double acc = 0.0;
        const int nseeds = 2000;
        for (int s = 0; s < nseeds; ++s) {
            std::vector<double> d = apply_disorder(j, 0.5, 1000 + s);
            for (double v : d) acc += v / 2.0;
        }
        CHECK(std::abs(acc / (nseeds * j.size()) - 1.0) < 0.01);
    }

    SUBCASE("fraction outside [0, 1) rejected") {
        CHECK_THROWS_AS(apply_disorder(j, 1.0, 1), std::invalid_argument);
        CHECK_THROWS_AS(apply_disorder(j, -0.1, 1), std::invalid_argument);
    }
}

TEST_CASE("disordered profile evaluation stays positive and reproducible") {
    ExchangeSpec spec = make_exp_wall(17, 1.0, 1.0, 9.0, 2.0);
    spec.disorder.enabled = true;
    spec.disorder.fraction = 0.5;
    spec.disorder.seed = 31;
    std::vector<double> a = evaluate_exchange(spec, 0.0);
    std::vector<double> b = evaluate_exchange(spec, 0.0);
    CHECK(a == b);
    for (double v : a) CHECK(v > 0.0);
}
