#include "spinwall/analytic3.hpp"

#include <cmath>
#include <stdexcept>

namespace spinwall {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void require_doublet_basis(const SpinBasis& b) {
    if (b.nc != 3 || b.nup != 2)
        throw std::invalid_argument("three-site doublet requires the (nc=3, nup=2) sector");
}

StateVector from_amplitudes(const SpinBasis& b3, cplx a0, cplx a1, cplx a2) {
    require_doublet_basis(b3);
    StateVector v(b3);
    v.amp = {a0, a1, a2};
    v.normalize();
    return v;
}

// Bond operator S_k.S_{k+1} over the 3-dim sector, built from the Hamiltonian
// itself so the matrix elements can never drift from the apply() definition.
Eigen::Matrix3cd bond_matrix(const SpinBasis& b3, int bond, Convention conv) {
    std::vector<double> j(3, 0.0);
    j[bond] = 1.0;
    HamiltonianView h(b3, j, conv);
    return materialize_dense(h).cast<cplx>();
}

}  // namespace

Reparameterization reparameterize(const std::vector<double>& j) {
    if (j.size() != 3) throw std::invalid_argument("reparameterize needs exactly 3 couplings");
    for (double v : j)
        if (!(v > 0.0)) throw std::invalid_argument("reparameterize needs positive couplings");
    Reparameterization r;
    r.jt0 = (j[0] + j[1] + j[2]) / 3.0;
    cplx f = 0.0;
    for (int k = 0; k < 3; ++k) f += j[k] * std::exp(cplx(0.0, kTwoPi * k / 3.0));
    f *= 2.0 / 3.0;
    r.jt1 = std::abs(f);
    const double scale = std::abs(j[0]) + std::abs(j[1]) + std::abs(j[2]);
    if (r.jt1 < 1e-14 * scale) {
        r.jt1 = 0.0;
        r.phi = 0.0;
        r.degenerate = true;
    } else {
        r.phi = std::arg(f);
    }
    return r;
}

SigmaOperators sigma_operators(Convention conv) {
    SpinBasis b3(3, 2);
    Eigen::Matrix3cd raise = Eigen::Matrix3cd::Zero();
    for (int k = 0; k < 3; ++k)
        raise += std::exp(cplx(0.0, kTwoPi * k / 3.0)) * bond_matrix(b3, k, conv);
    raise *= 4.0 / 3.0;
    const Eigen::Matrix3cd lower = raise.adjoint();

    SigmaOperators s;
    s.x_full = 0.5 * (raise + lower);
    s.y_full = cplx(0.0, -0.5) * (raise - lower);
    s.z_full = cplx(0.0, -0.5) * (s.x_full * s.y_full - s.y_full * s.x_full);

    const StateVector p = plus_state(b3);
    const StateVector m = minus_state(b3);
    Eigen::Matrix<cplx, 3, 2> basis;
    for (int i = 0; i < 3; ++i) {
        basis(i, 0) = p.amp[i];
        basis(i, 1) = m.amp[i];
    }
    s.x = basis.adjoint() * s.x_full * basis;
    s.y = basis.adjoint() * s.y_full * basis;
    s.z = basis.adjoint() * s.z_full * basis;
    return s;
}

double sigma_coefficient(double jt1) { return 0.75 * jt1; }

double doublet_gap(double jt1, Convention conv) {
    const double factor = conv == Convention::spin_half ? 2.0 : 8.0;
    return factor * sigma_coefficient(jt1);
}

StateVector plus_state(const SpinBasis& b3) {
    const cplx z = std::exp(cplx(0.0, kTwoPi / 3.0));
    return from_amplitudes(b3, 1.0, z, z * z);
}

StateVector minus_state(const SpinBasis& b3) {
    const cplx z = std::exp(cplx(0.0, -kTwoPi / 3.0));
    return from_amplitudes(b3, 1.0, z, z * z);
}

StateVector singlet_12(const SpinBasis& b3) { return from_amplitudes(b3, 0.0, 1.0, -1.0); }
StateVector singlet_23(const SpinBasis& b3) { return from_amplitudes(b3, 1.0, -1.0, 0.0); }
StateVector singlet_31(const SpinBasis& b3) { return from_amplitudes(b3, 1.0, 0.0, -1.0); }

StateVector ground_state_phi(const SpinBasis& b3, double phi) {
    const StateVector p = plus_state(b3);
    const StateVector m = minus_state(b3);
    const cplx e = std::exp(cplx(0.0, phi));
    StateVector v(b3);
    for (int i = 0; i < 3; ++i) v.amp[i] = p.amp[i] - e * m.amp[i];
    v.normalize();
    return v;
}

StateVector floquet_state_ansatz(const SpinBasis& b3, double omega, double delta,
                                 int branch) {
    if (!(omega > 0.0)) throw std::invalid_argument("ansatz defined for omega > 0");
    if (!(delta > 0.0)) throw std::invalid_argument("ansatz needs delta > 0");
    if (branch != 1 && branch != -1) throw std::invalid_argument("branch must be +-1");
    const StateVector s = singlet_12(b3);
    const StateVector b = branch == 1 ? plus_state(b3) : minus_state(b3);
    StateVector v(b3);
    const double r = omega / delta;
    for (int i = 0; i < 3; ++i) v.amp[i] = s.amp[i] + r * b.amp[i];
    v.normalize();
    return v;
}

StateVector floquet_ground_closed_form(const SpinBasis& b3, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("closed form defined for x > 0");
    const double q = (1.0 + x - std::sqrt(1.0 + x * x)) / std::sqrt(2.0);
    const StateVector s = singlet_12(b3);
    const StateVector p = plus_state(b3);
    StateVector v(b3);
    for (int i = 0; i < 3; ++i) v.amp[i] = s.amp[i] + cplx(0.0, q) * p.amp[i];
    v.normalize();
    return v;
}

double berry_phase_exact(double omega, double delta) {
    if (omega == 0.0) throw std::invalid_argument("berry phase formula needs omega != 0");
    if (!(delta > 0.0)) throw std::invalid_argument("berry phase formula needs delta > 0");
    const double r = delta / omega;
    double v = kTwoPi * (1.0 - 1.0 / std::sqrt(1.0 + r * r));
    v = std::fmod(v, kTwoPi);
    if (v < 0.0) v += kTwoPi;
    return v;
}

}  // namespace spinwall
