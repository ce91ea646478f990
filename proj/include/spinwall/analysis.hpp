#pragma once
#include <vector>

#include "spinwall/basis.hpp"

namespace spinwall {

struct SpinDensity {
    std::vector<double> values;  // entry k-1 = <Z_k> (Pauli Z, in [-1, 1])
};

// Diagonal accumulation of per-site <Z_k>; sums to 2*S_z of the sector.
SpinDensity spin_density(const StateVector& v);

struct GapSeries {
    std::vector<double> grid;  // sweep parameter (delta-k or separation s)
    std::vector<double> e0, e1, e2;
};

// (max(E1-E0) - min(E1-E0)) / min(E1-E0) over the grid.
double gap_ratio(const GapSeries& s);

struct HybridResult {
    StateVector state;  // normalized (psi0 - sign*psi1)/norm
    int sign = 1;       // relative sign applied to psi1 before subtracting
};

// Difference state with the relative sign chosen to maximize the density
// contrast sum_k |<Z_k>|; errors out when the inputs are the same ray.
HybridResult hybridize(const StateVector& psi0, const StateVector& psi1);

struct ExpFit {
    double amplitude = 0.0;
    double decay_length = 0.0;  // -1/slope; infinity when constant
    double rms = 0.0;           // residual of ln y over the retained points
    bool constant = false;
    int points_used = 0;
};

// Least-squares line through (s, ln y). Values below 1e-12 are floored for
// the fit and excluded from the residual statistic.
ExpFit fit_exponential(const std::vector<double>& s, const std::vector<double>& y);

struct CapacityParams {
    double j0_ev = 0.0;        // exchange energy, eV
    double spacing = 1.0;      // domain-wall spacing, sites
    double dot_spacing_m = 0;  // informational
    double wall_width = 0;     // informational
};

// Q = J0 / (hbar * D) in qubits per second.
double channel_capacity(const CapacityParams& p);

struct Localization {
    int peak_site = 0;  // 1-based
    double participation_ratio = 0.0;
};

// Peak and participation ratio of the positive part of the density.
Localization localization_measure(const SpinDensity& d);

// <S_total^2> in spin-1/2 units, i.e. S(S+1): ||S+ v||^2 + sz(sz+1).
double total_spin_expectation(const StateVector& v);

}  // namespace spinwall
