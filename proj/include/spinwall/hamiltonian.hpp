#pragma once
#include <Eigen/Dense>

#include "spinwall/basis.hpp"

namespace spinwall {

// pauli: H = sum_k J_k (X_k X_{k+1} + Y_k Y_{k+1} + Z_k Z_{k+1}) with Pauli
// matrices; spin_half: same with S = sigma/2, i.e. exactly 1/4 of pauli.
enum class Convention { pauli, spin_half };

struct HamiltonianView {
    const SpinBasis* basis = nullptr;
    std::vector<double> j;
    Convention conv = Convention::pauli;

    HamiltonianView(const SpinBasis& b, std::vector<double> couplings,
                    Convention c = Convention::pauli);
};

// out = H*in, gather form: each output index is produced by one worker.
void apply(const HamiltonianView& h, const double* in, double* out);
void apply(const HamiltonianView& h, const cplx* in, cplx* out);
StateVector apply(const HamiltonianView& h, const StateVector& v);

// Dense materialization, sector dimension <= 4096 (test oracle and dynamics).
Eigen::MatrixXd materialize_dense(const HamiltonianView& h);

}  // namespace spinwall
