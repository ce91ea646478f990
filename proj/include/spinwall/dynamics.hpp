#pragma once
#include <Eigen/Dense>

#include "spinwall/hamiltonian.hpp"
#include "spinwall/profiles.hpp"

namespace spinwall {

struct PropagationPolicy {
    int step_count = 256;       // initial steps per period (or per interval)
    double phase_tol = 1e-9;    // eigenphase convergence target under step doubling
    int max_steps = 16384;      // hard cap on steps per period
};

struct FloquetSpectrum {
    double omega = 0.0;
    double period = 0.0;  // time span of U before the translation
    int shift = 2;
    Convention conv = Convention::pauli;
    std::vector<double> eigenphases;        // arg of the unitary eigenvalues
    std::vector<StateVector> eigenvectors;  // canonical gauge, orthonormal
    // pairing[i]: Floquet column matched to static eigenstate i of H(t=0),
    // with its |overlap| and an ambiguity flag (runner-up within 1e-3)
    std::vector<int> pairing;
    std::vector<double> pairing_overlap;
    std::vector<bool> pairing_ambiguous;
    std::vector<double> static_energies;
    int steps_used = 0;
};

// U(t1, t0) by midpoint-exponential stepping over `steps` uniform slices.
Eigen::MatrixXcd propagator_dense(const ExchangeSpec& spec, const SpinBasis& basis,
                                  double t0, double t1, int steps, Convention conv);

// Propagate one state; steps taken from policy.step_count.
StateVector propagate(const ExchangeSpec& spec, const SpinBasis& basis, double t0,
                      double t1, const PropagationPolicy& policy, const StateVector& v,
                      Convention conv = Convention::pauli);

// Fractional period advanced before the two-site translation: 4pi/(3 omega)
// for the three-site cosine drive, 2pi/(nc omega) for the additive wall drive.
double floquet_period(const ExchangeSpec& spec, double omega);

// F = translate(+2) o U(period), diagonalized; steps doubled until every
// eigenphase moves by less than phase_tol.
FloquetSpectrum floquet_operator(const ExchangeSpec& spec, const SpinBasis& basis,
                                 double omega, const PropagationPolicy& policy,
                                 Convention conv = Convention::pauli);

// Index of the Floquet state paired with the static ground state; throws if
// that pairing was ambiguous.
int ground_paired(const FloquetSpectrum& fs);

// Geometric phase over the full cycle nc*period along the ground-paired
// Floquet state: total phase minus the accumulated dynamical phase, in [0,2pi).
double berry_phase_numeric(const FloquetSpectrum& fs, const ExchangeSpec& spec,
                           const SpinBasis& basis, int steps_per_period = 0);

}  // namespace spinwall
