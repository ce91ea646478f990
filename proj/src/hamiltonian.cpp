#include "spinwall/hamiltonian.hpp"

#include <stdexcept>

#include "spinwall/threads.hpp"

namespace spinwall {

HamiltonianView::HamiltonianView(const SpinBasis& b, std::vector<double> couplings,
                                 Convention c)
    : basis(&b), j(std::move(couplings)), conv(c) {
    if (static_cast<int>(j.size()) != b.nc)
        throw std::invalid_argument("coupling list length must equal ring size");
}

namespace {

// Diagonal bond term for equal/opposite z-projections is +/- zf*J; a bond with
// opposite projections also connects to the flipped configuration with
// amplitude xf*J. Flipping two adjacent bits b,b+1 (one set, one clear) moves a
// set bit by one position, so the colex rank shifts by C(b+1,i)-C(b,i) where i
// is the ordinal of that bit among all set bits. The wrap bond moves a bit
// between positions 0 and nc-1 and is re-ranked from scratch.
template <typename Scalar>
void apply_impl(const HamiltonianView& h, const Scalar* in, Scalar* out) {
    const SpinBasis& basis = *h.basis;
    const int nc = basis.nc;
    const double zf = h.conv == Convention::pauli ? 1.0 : 0.25;
    const double xf = h.conv == Convention::pauli ? 2.0 : 0.5;
    const double* j = h.j.data();
    const uint32_t* states = basis.states.data();
    const uint32_t wrap_mask = 1u | (1u << (nc - 1));

    parallel_for(basis.dim(), [&](std::size_t i) {
        const uint32_t c = states[i];
        double diag = 0.0;
        Scalar off{};
        int pc = 0;  // set bits at positions <= k
        for (int k = 0; k + 1 < nc; ++k) {
            const int s1 = (c >> k) & 1u;
            const int s2 = (c >> (k + 1)) & 1u;
            pc += s1;
            if (s1 == s2) {
                diag += zf * j[k];
            } else {
                diag -= zf * j[k];
                std::int64_t r = static_cast<std::int64_t>(i);
                if (s1)
                    r += binomial(k + 1, pc) - binomial(k, pc);
                else
                    r += binomial(k, pc + 1) - binomial(k + 1, pc + 1);
                off += xf * j[k] * in[r];
            }
        }
        const int s1 = (c >> (nc - 1)) & 1u;
        const int s2 = c & 1u;
        if (s1 == s2) {
            diag += zf * j[nc - 1];
        } else {
            diag -= zf * j[nc - 1];
            off += xf * j[nc - 1] * in[basis.index_of(c ^ wrap_mask)];
        }
        out[i] = diag * in[i] + off;
    });
}

}  // namespace

void apply(const HamiltonianView& h, const double* in, double* out) {
    apply_impl(h, in, out);
}

void apply(const HamiltonianView& h, const cplx* in, cplx* out) {
    apply_impl(h, in, out);
}

StateVector apply(const HamiltonianView& h, const StateVector& v) {
    if (v.basis != h.basis) throw std::invalid_argument("basis mismatch in apply");
    StateVector out(*h.basis);
    apply_impl(h, v.amp.data(), out.amp.data());
    return out;
}

Eigen::MatrixXd materialize_dense(const HamiltonianView& h) {
    const std::size_t dim = h.basis->dim();
    if (dim > 4096)
        throw std::invalid_argument("dense materialization limited to dimension 4096");
    Eigen::MatrixXd m(dim, dim);
    std::vector<double> col(dim), out(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        std::fill(col.begin(), col.end(), 0.0);
        col[c] = 1.0;
        apply(h, col.data(), out.data());
        for (std::size_t r = 0; r < dim; ++r) m(r, c) = out[r];
    }
    return m;
}

}  // namespace spinwall
