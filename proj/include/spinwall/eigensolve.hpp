#pragma once
#include <cstdint>

#include "spinwall/hamiltonian.hpp"

namespace spinwall {

struct EigenResult {
    std::vector<double> values;          // ascending
    std::vector<StateVector> vectors;    // orthonormal, canonical sign
    std::vector<double> residuals;       // ||H v - lambda v|| per pair
    long matvecs = 0;
};

struct LanczosOptions {
    double tol = 1e-10;
    std::uint64_t seed = 12345;
    int window = 0;        // 0: picked from dimension and memory budget
    long max_matvecs = 0;  // 0: 10*m*sqrt(dim) + 1000
};

// Full dense diagonalization, lowest m pairs. Dimension <= 4096.
EigenResult dense_lowest(const HamiltonianView& h, int m);

// Thick-restart Lanczos with full reorthogonalization inside the active
// window and sequential locking of converged pairs. Matrix-free.
EigenResult lanczos_lowest(const HamiltonianView& h, int m,
                           const LanczosOptions& opts = {});

// Dense for small sectors, Lanczos otherwise.
EigenResult lowest(const HamiltonianView& h, int m, const LanczosOptions& opts = {});

}  // namespace spinwall
