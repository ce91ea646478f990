#include "spinwall/basis.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace spinwall {

namespace {

constexpr int kMaxSites = 32;

std::array<std::array<std::uint64_t, kMaxSites + 2>, kMaxSites + 2> make_binomials() {
    std::array<std::array<std::uint64_t, kMaxSites + 2>, kMaxSites + 2> c{};
    for (int n = 0; n <= kMaxSites + 1; ++n) {
        c[n][0] = 1;
        for (int k = 1; k <= n; ++k)
            c[n][k] = c[n - 1][k - 1] + (k <= n - 1 ? c[n - 1][k] : 0);
    }
    return c;
}

const auto kBinom = make_binomials();

std::uint32_t rotate_bits(std::uint32_t c, int shift, int nc) {
    shift %= nc;
    if (shift < 0) shift += nc;
    const std::uint32_t mask = (nc == 32) ? 0xffffffffu : ((1u << nc) - 1u);
    return ((c << shift) | (c >> (nc - shift))) & mask;
}

}  // namespace

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n || n < 0 || n > kMaxSites + 1) return 0;
    return kBinom[n][k];
}

SpinBasis::SpinBasis(int nc_, int nup_) : nc(nc_), nup(nup_) {
    if (nc < 3 || nc > kMaxSites) throw std::invalid_argument("ring size must be in [3, 32]");
    if (nup < 0 || nup > nc) throw std::invalid_argument("up-spin count out of range");
    const std::uint64_t d = binomial(nc, nup);
    states.reserve(d);
    if (nup == 0) {
        states.push_back(0);
        return;
    }
    // Gosper's hack walks same-popcount configurations in increasing order.
    std::uint32_t c = (nup == 32) ? 0xffffffffu : ((1u << nup) - 1u);
    const std::uint64_t limit = (nc == 32) ? 0x100000000ull : (1ull << nc);
    while (c < limit) {
        states.push_back(c);
        std::uint32_t lo = c & (~c + 1u);
        std::uint32_t left = c + lo;
        if (left >= limit || left == 0) break;
        std::uint32_t changed = c ^ left;
        c = left | ((changed / lo) >> 2);
    }
    if (states.size() != d) throw std::logic_error("sector enumeration mismatch");
}

std::size_t SpinBasis::index_of(std::uint32_t config) const {
    // Colex rank: sum C(b_i, i) over set-bit positions b_1 < b_2 < ...
    std::uint64_t r = 0;
    int i = 0;
    std::uint32_t c = config;
    while (c) {
        int b = __builtin_ctz(c);
        r += kBinom[b][++i];
        c &= c - 1;
    }
    return static_cast<std::size_t>(r);
}

double StateVector::norm() const {
    double s = 0.0;
    for (const cplx& a : amp) s += std::norm(a);
    return std::sqrt(s);
}

void StateVector::normalize() {
    double n = norm();
    if (n == 0.0) throw std::runtime_error("cannot normalize zero vector");
    for (cplx& a : amp) a /= n;
}

std::uint32_t rotate_config(std::uint32_t c, int shift, int nc) {
    return rotate_bits(c, shift, nc);
}

cplx inner(const StateVector& a, const StateVector& b) {
    cplx s(0.0);
    for (std::size_t i = 0; i < a.amp.size(); ++i) s += std::conj(a.amp[i]) * b.amp[i];
    return s;
}

StateVector translate(const StateVector& v, int shift) {
    const SpinBasis& b = *v.basis;
    StateVector out(b);
    for (std::size_t i = 0; i < b.dim(); ++i) {
        std::uint32_t moved = rotate_bits(b.states[i], shift, b.nc);
        out.amp[b.index_of(moved)] = v.amp[i];
    }
    return out;
}

StateVector spin_flip(const StateVector& v, const SpinBasis& target) {
    const SpinBasis& b = *v.basis;
    if (target.nc != b.nc || target.nup != b.nc - b.nup)
        throw std::invalid_argument("spin_flip target must be the complementary sector");
    const std::uint32_t mask = (b.nc == 32) ? 0xffffffffu : ((1u << b.nc) - 1u);
    StateVector out(target);
    for (std::size_t i = 0; i < b.dim(); ++i)
        out.amp[target.index_of(b.states[i] ^ mask)] = v.amp[i];
    return out;
}

}  // namespace spinwall
