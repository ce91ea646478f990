#pragma once
#include <Eigen/Dense>

#include "spinwall/hamiltonian.hpp"

namespace spinwall {

// Closed-form results for the three-site ring in the (n_up = 2) sector, whose
// low doublet carries the moving-singlet states.

struct Reparameterization {
    double jt0 = 0.0;
    double jt1 = 0.0;
    double phi = 0.0;
    bool degenerate = false;  // jt1 = 0, phi meaningless
};

// Inverse of the cosine parameterization: J_k = jt0 + jt1*cos(2pi(k-1)/3 - phi).
Reparameterization reparameterize(const std::vector<double>& j);

struct SigmaOperators {
    Eigen::Matrix2cd x, y, z;               // restricted to span{|+>, |->}
    Eigen::Matrix3cd x_full, y_full, z_full; // over the full 3-dim sector
};

// Sigma_{X+-iY} = (4/3) sum_k e^{+-2pi i(k-1)/3} (S_k . S_{k+1}); Z from the
// commutator. The su(2)-like closure holds only under spin_half.
SigmaOperators sigma_operators(Convention conv);

// The coefficient D in  P[H3(phi) - uniform part]P = D (Sx cos phi + Sy sin phi)
// with the same-convention Sigma operators: 3*jt1/4 under either convention.
double sigma_coefficient(double jt1);

// Doublet splitting E1 - E0 of the three-site ring: the Sigma operators square
// to 1 (spin_half) or 16 (pauli), so the gap is 2D or 8D respectively.
double doublet_gap(double jt1, Convention conv);

// Doublet basis: amplitudes over configurations {0b011, 0b101, 0b110}.
StateVector plus_state(const SpinBasis& b3);
StateVector minus_state(const SpinBasis& b3);
StateVector singlet_12(const SpinBasis& b3);  // |SS0>
StateVector singlet_23(const SpinBasis& b3);  // |0SS>
StateVector singlet_31(const SpinBasis& b3);  // |S0S>

// Ground state of H3(phi): (|+> - e^{i phi}|->)/sqrt(2).
StateVector ground_state_phi(const SpinBasis& b3, double phi);

// Literal moving-singlet ansatz |SS0> + (omega/delta)|+-> (normalized);
// branch = +1 picks |+>, -1 picks |->.
StateVector floquet_state_ansatz(const SpinBasis& b3, double omega, double delta,
                                 int branch);

// Closed form actually attained by the ground-paired Floquet eigenvector of
// F = D2 U_T for this drive: |SS0> + i q |+>, q = (1 + x - sqrt(1+x^2))/sqrt(2),
// x = omega / (full doublet gap), omega > 0.
StateVector floquet_ground_closed_form(const SpinBasis& b3, double x);

// Omega = 2pi (1 - 1/sqrt(1 + (delta/omega)^2)), reduced to [0, 2pi).
double berry_phase_exact(double omega, double delta);

}  // namespace spinwall
