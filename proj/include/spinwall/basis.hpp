#pragma once
#include <complex>
#include <cstdint>
#include <vector>

namespace spinwall {

using cplx = std::complex<double>;

std::uint64_t binomial(int n, int k);

// Fixed-S_z basis of an n_c-site spin-1/2 ring. Site k (1-based in all
// formulas) lives on bit k-1; a set bit is spin up. States are stored in
// increasing integer order, which is colex order over the up-spin positions,
// so index_of is a closed-form combinatorial rank, not a hash lookup.
struct SpinBasis {
    int nc = 0;
    int nup = 0;
    std::vector<std::uint32_t> states;

    SpinBasis(int nc_, int nup_);
    std::size_t dim() const { return states.size(); }
    std::size_t index_of(std::uint32_t config) const;
};

struct StateVector {
    const SpinBasis* basis = nullptr;
    std::vector<cplx> amp;

    StateVector() = default;
    explicit StateVector(const SpinBasis& b) : basis(&b), amp(b.dim(), cplx(0.0)) {}

    double norm() const;
    void normalize();
};

cplx inner(const StateVector& a, const StateVector& b);

// Cyclic rotation of a configuration: bit b -> bit (b + shift) mod nc.
std::uint32_t rotate_config(std::uint32_t c, int shift, int nc);

// Moves every configuration's site-k occupation to site k+shift (cyclic).
StateVector translate(const StateVector& v, int shift);

// Complements every configuration; target must be the (nc, nc-nup) sector.
StateVector spin_flip(const StateVector& v, const SpinBasis& target);

}  // namespace spinwall
