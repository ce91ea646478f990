#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "spinwall/analytic3.hpp"
#include "spinwall/dynamics.hpp"
#include "spinwall/eigensolve.hpp"
#include "spinwall/profiles.hpp"

using namespace spinwall;

namespace {

StateVector random_state(const SpinBasis& b, unsigned seed) {
    StateVector v(b);
    std::uint64_t x = seed + 29;
    for (auto& a : v.amp) {
        x = x * 6364136223846793005ull + 1442695040888963407ull;
        double re = double(x >> 11) / double(1ull << 53) - 0.5;
        x = x * 6364136223846793005ull + 1442695040888963407ull;
        double im = double(x >> 11) / double(1ull << 53) - 0.5;
        a = cplx(re, im);
    }
    v.normalize();
    return v;
}

Eigen::MatrixXcd translation_matrix(const SpinBasis& b, int shift) {
    const std::size_t d = b.dim();
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t i = 0; i < d; ++i)
        p(b.index_of(rotate_config(b.states[i], shift, b.nc)), i) = 1.0;
    return p;
}

// reference cycle operator straight from the uniform-step integrator
Eigen::MatrixXcd manual_cycle(const ExchangeSpec& spec, const SpinBasis& b, double omega,
                              int steps, Convention conv) {
    const double period = floquet_period(spec, omega);
    return translation_matrix(b, 2) * propagator_dense(spec, b, 0.0, period, steps, conv);
}

}  // namespace

TEST_CASE("static propagation equals the spectral exponential") {
    SpinBasis b(5, 2);
    ExchangeSpec spec = make_explicit({1.0, 0.4, 1.3, 0.8, 1.9});
    HamiltonianView h(b, spec.explicit_j, Convention::pauli);
    Eigen::MatrixXd hm = materialize_dense(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hm);

    const double t = 0.8;
    PropagationPolicy pol;
    pol.step_count = 16;
    StateVector v = random_state(b, 1);
    StateVector got = propagate(spec, b, 0.0, t, pol, v, Convention::pauli);

    Eigen::VectorXcd x(b.dim());
    for (std::size_t i = 0; i < b.dim(); ++i) x(i) = v.amp[i];
    Eigen::VectorXcd want = es.eigenvectors().cast<cplx>() *
                            (cplx(0.0, -t) * es.eigenvalues().cast<cplx>().array())
                                .exp()
                                .matrix()
                                .asDiagonal() *
                            (es.eigenvectors().transpose().cast<cplx>() * x);
    for (std::size_t i = 0; i < b.dim(); ++i) CHECK(std::abs(got.amp[i] - want(i)) < 1e-10);
}

TEST_CASE("trivial propagations return the input") {
    SpinBasis b(5, 2);
    StateVector v = random_state(b, 2);
    PropagationPolicy pol;

    ExchangeSpec zero = make_explicit(std::vector<double>(5, 0.0));
    StateVector u = propagate(zero, b, 0.0, 3.7, pol, v);
    for (std::size_t i = 0; i < b.dim(); ++i) CHECK(std::abs(u.amp[i] - v.amp[i]) < 1e-14);

    ExchangeSpec some = make_explicit({1.0, 0.5, 1.5, 0.7, 1.2});
    StateVector w = propagate(some, b, 1.5, 1.5, pol, v);
    for (std::size_t i = 0; i < b.dim(); ++i) CHECK(w.amp[i] == v.amp[i]);
}

TEST_CASE("propagation is unitary") {
    SpinBasis b(5, 3);
    ExchangeSpec spec = make_additive_sin(5, 1.0, 0.5, 3.0, 0.9);
    Eigen::MatrixXcd u = propagator_dense(spec, b, 0.0, 2.0, 512, Convention::pauli);
    Eigen::MatrixXcd dev = u.adjoint() * u - Eigen::MatrixXcd::Identity(b.dim(), b.dim());
    CHECK(dev.cwiseAbs().maxCoeff() < 1e-10);

    PropagationPolicy pol;
    pol.step_count = 128;
    StateVector v = random_state(b, 3);
    StateVector w = propagate(spec, b, 0.0, 2.0, pol, v);
    CHECK(std::abs(w.norm() - 1.0) < 1e-12);
}

TEST_CASE("propagate agrees with the dense propagator on the same grid") {
    SpinBasis b(5, 3);
    ExchangeSpec spec = make_additive_sin(5, 1.0, 0.6, 3.0, 0.7);
    const int steps = 256;
    PropagationPolicy pol;
    pol.step_count = steps;
    StateVector v = random_state(b, 4);
    StateVector got = propagate(spec, b, 0.3, 1.9, pol, v);
    Eigen::MatrixXcd u = propagator_dense(spec, b, 0.3, 1.9, steps, Convention::pauli);
    for (std::size_t i = 0; i < b.dim(); ++i) {
        cplx want = 0.0;
        for (std::size_t k = 0; k < b.dim(); ++k) want += u(i, k) * v.amp[k];
        CHECK(std::abs(got.amp[i] - want) < 1e-12);
    }
}

TEST_CASE("propagation errors") {
    SpinBasis big(17, 9);  // dim 24310, over the dense cap
    ExchangeSpec spec = make_additive_sin(17, 1.0, 0.5, 9.0, 0.5);
    StateVector v(big);
    v.amp[0] = 1.0;
    PropagationPolicy pol;
    CHECK_THROWS_AS(propagate(spec, big, 0.0, 1.0, pol, v), std::invalid_argument);

    SpinBasis b(5, 2);
    SpinBasis other(5, 3);
    StateVector w(other);
    w.amp[0] = 1.0;
    ExchangeSpec small = make_explicit(std::vector<double>(5, 1.0));
    CHECK_THROWS_AS(propagate(small, b, 0.0, 1.0, pol, w), std::invalid_argument);
}

TEST_CASE("cycle period formulas") {
    ExchangeSpec tri = make_three_spin(1.0, 0.8, 0.0, 0.5);
    CHECK(floquet_period(tri, 0.5) == doctest::Approx(4.0 * M_PI / 1.5).epsilon(1e-15));

    ExchangeSpec ring = make_additive_sin(9, 1.0, 0.5, 4.0, 0.25);
    CHECK(floquet_period(ring, 0.25) == doctest::Approx(2.0 * M_PI / 2.25).epsilon(1e-15));

    CHECK_THROWS_AS(floquet_period(ring, 0.0), std::invalid_argument);
    ExchangeSpec fixed = make_explicit(std::vector<double>(5, 1.0));
    CHECK_THROWS_AS(floquet_period(fixed, 0.5), std::invalid_argument);
}

TEST_CASE("cycle eigenpairs diagonalize the reference cycle operator") {
    struct Case {
        ExchangeSpec spec;
        int nc, nup;
        double omega;
        int steps;
    };
    std::vector<Case> cases;
    cases.push_back({make_three_spin(1.0, 0.8, 0.0, 0.6), 3, 2, 0.6, 8192});
    cases.push_back({make_additive_sin(5, 1.0, 0.5, 3.0, 0.9), 5, 3, 0.9, 65536});

    for (const auto& c : cases) {
        SpinBasis b(c.nc, c.nup);
        PropagationPolicy pol;
        FloquetSpectrum fs = floquet_operator(c.spec, b, c.omega, pol, Convention::spin_half);
        Eigen::MatrixXcd f = manual_cycle(c.spec, b, c.omega, c.steps, Convention::spin_half);

        // reference operator is unitary and its spectrum matches
        Eigen::MatrixXcd dev =
            f.adjoint() * f - Eigen::MatrixXcd::Identity(b.dim(), b.dim());
        CHECK(dev.cwiseAbs().maxCoeff() < 1e-10);

        REQUIRE(fs.eigenphases.size() == b.dim());
        for (std::size_t j = 0; j < b.dim(); ++j) {
            Eigen::VectorXcd v(b.dim());
            for (std::size_t i = 0; i < b.dim(); ++i) v(i) = fs.eigenvectors[j].amp[i];
            Eigen::VectorXcd fv = f * v;
            cplx lambda = std::polar(1.0, fs.eigenphases[j]);
            CHECK((fv - lambda * v).cwiseAbs().maxCoeff() < 1e-6);
        }

        // orthonormal eigenvectors
        for (std::size_t a = 0; a < b.dim(); ++a)
            for (std::size_t bb = 0; bb <= a; ++bb) {
                double want = a == bb ? 1.0 : 0.0;
                CHECK(std::abs(std::abs(inner(fs.eigenvectors[a], fs.eigenvectors[bb])) -
                               want) < 1e-9);
            }

        CHECK(std::is_sorted(fs.static_energies.begin(), fs.static_energies.end()));
        CHECK(fs.steps_used <= pol.max_steps);
    }
}

TEST_CASE("the cubed cycle operator closes the full double revolution") {
    SpinBasis b(3, 2);
    ExchangeSpec spec = make_three_spin(1.0, 0.8, 0.0, 0.6);
    const int n = 4096;
    const double period = floquet_period(spec, 0.6);
    Eigen::MatrixXcd f = manual_cycle(spec, b, 0.6, n, Convention::spin_half);
    Eigen::MatrixXcd full =
        propagator_dense(spec, b, 0.0, 3.0 * period, 3 * n, Convention::spin_half);
    CHECK((f * f * f - full).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("slow driving pins the cycle state to the resting singlet") {
    SpinBasis b(3, 2);
    const double gap = doublet_gap(0.8, Convention::spin_half);
    const double omega = 1e-3 * gap;
    ExchangeSpec spec = make_three_spin(1.0, 0.8, 0.0, omega);
    PropagationPolicy pol;
    pol.step_count = 1 << 18;
    pol.max_steps = 1 << 22;
    pol.phase_tol = 1e-7;
    FloquetSpectrum fs = floquet_operator(spec, b, omega, pol, Convention::spin_half);
    int g = ground_paired(fs);
    double ov = std::abs(inner(singlet_12(b), fs.eigenvectors[g]));
    CHECK(ov >= 0.999999);
}

TEST_CASE("cycle-state overlap never drops below the two-level floor") {
    SpinBasis b(3, 2);
    const double gap = doublet_gap(0.8, Convention::spin_half);
    PropagationPolicy pol;
    pol.phase_tol = 1e-7;
    pol.max_steps = 1 << 20;
    for (double x : {0.1, 0.5, 1.0}) {
        ExchangeSpec spec = make_three_spin(1.0, 0.8, 0.0, x * gap);
        FloquetSpectrum fs = floquet_operator(spec, b, x * gap, pol, Convention::spin_half);
        int g = ground_paired(fs);
        CHECK(fs.pairing_overlap[g] >= 1.0 / std::sqrt(1.0 + x * x) - 1e-3);
    }
}

TEST_CASE("geometric phase tracks the closed form") {
    SpinBasis b(3, 2);
    const double gap = doublet_gap(0.8, Convention::spin_half);
    PropagationPolicy pol;
    pol.phase_tol = 1e-7;
    pol.max_steps = 1 << 20;

    for (double x : {1.0, 100.0}) {
        const double omega = x * gap;
        ExchangeSpec spec = make_three_spin(1.0, 0.8, 0.0, omega);
        FloquetSpectrum fs = floquet_operator(spec, b, omega, pol, Convention::spin_half);
        double num = berry_phase_numeric(fs, spec, b);
        double exact = berry_phase_exact(omega, gap);
        CHECK(std::abs(num - exact) < 1e-4);
    }
    // fast driving freezes the state: the loop encloses no solid angle
    CHECK(berry_phase_exact(100.0 * gap, gap) < 1e-3);
}

TEST_CASE("symmetric-sector state rides along unmixed") {
    SpinBasis b(3, 2);
    ExchangeSpec spec = make_three_spin(1.0, 0.8, 0.0, 0.6);
    PropagationPolicy pol;
    FloquetSpectrum fs = floquet_operator(spec, b, 0.6, pol, Convention::spin_half);
    StateVector sym(b);
    for (auto& a : sym.amp) a = 1.0 / std::sqrt(3.0);
    int riding = 0, orthogonal = 0;
    for (const auto& v : fs.eigenvectors) {
        double ov = std::abs(inner(sym, v));
        if (ov > 1.0 - 1e-10) ++riding;
        if (ov < 1e-10) ++orthogonal;
    }
    CHECK(riding == 1);
    CHECK(orthogonal == 2);
}

TEST_CASE("undriven degenerate doublet makes the ground pairing ambiguous") {
    SpinBasis b(5, 3);
    ExchangeSpec spec = make_additive_sin(5, 1.0, 0.0, 3.0, 0.5);
    PropagationPolicy pol;
    FloquetSpectrum fs = floquet_operator(spec, b, 0.5, pol, Convention::pauli);
    CHECK(fs.pairing_ambiguous[0]);
    CHECK_THROWS_AS(ground_paired(fs), std::runtime_error);
}

TEST_CASE("step ladder reports non-convergence at the cap") {
    SpinBasis b(3, 2);
    ExchangeSpec spec = make_three_spin(1.0, 0.8, 0.0, 0.12);
    PropagationPolicy pol;
    pol.step_count = 4;
    pol.max_steps = 8;
    pol.phase_tol = 1e-15;
    CHECK_THROWS_AS(floquet_operator(spec, b, 0.12, pol, Convention::spin_half),
                    std::runtime_error);
}
