#include "spinwall/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace spinwall {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

Eigen::MatrixXd hamiltonian_at(const ExchangeSpec& spec, const SpinBasis& basis,
                               double t, Convention conv) {
    HamiltonianView h(basis, evaluate_exchange(spec, t), conv);
    return materialize_dense(h);
}

void check_dim(const SpinBasis& basis) {
    if (basis.dim() > 4096)
        throw std::invalid_argument("dense propagation limited to dimension 4096");
}

// exp(-i H dt) V for symmetric H via its eigendecomposition
Eigen::MatrixXcd step_apply(const Eigen::MatrixXd& h, double dt,
                            const Eigen::MatrixXcd& v) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed during propagation");
    const auto& w = es.eigenvalues();
    const auto& p = es.eigenvectors();
    Eigen::VectorXcd phases(w.size());
    for (int i = 0; i < w.size(); ++i) phases(i) = std::exp(cplx(0.0, -w(i) * dt));
    return p.cast<cplx>() * (phases.asDiagonal() * (p.transpose().cast<cplx>() * v));
}

void canonical_gauge(Eigen::VectorXcd& v) {
    int best = 0;
    double mag = 0.0;
    for (int i = 0; i < v.size(); ++i) {
        const double m = std::abs(v(i));
        if (m > mag * (1.0 + 1e-12)) {
            mag = m;
            best = i;
        }
    }
    if (mag > 0.0) v *= std::conj(v(best)) / std::abs(v(best));
}

struct FloquetDiag {
    std::vector<double> phases;
    Eigen::MatrixXcd vectors;
};

FloquetDiag diagonalize_floquet(const Eigen::MatrixXcd& f) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(f);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("Floquet operator diagonalization failed");
    const int n = static_cast<int>(f.rows());
    FloquetDiag out;
    out.vectors = es.eigenvectors();
    out.phases.resize(n);
    for (int i = 0; i < n; ++i) {
        const cplx lam = es.eigenvalues()(i);
        if (std::abs(std::abs(lam) - 1.0) > 1e-8)
            throw std::runtime_error("Floquet eigenvalue off the unit circle");
        out.phases[i] = std::arg(lam);
    }
    // re-orthonormalize inside near-degenerate eigenphase groups, where a
    // general eigensolver need not return orthogonal columns
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return out.phases[a] < out.phases[b]; });
    for (int s = 0; s < n;) {
        int e = s + 1;
        while (e < n && out.phases[order[e]] - out.phases[order[e - 1]] < 1e-8) ++e;
        for (int i = s + 1; i < e; ++i) {
            auto vi = out.vectors.col(order[i]);
            for (int j = s; j < i; ++j) {
                const auto vj = out.vectors.col(order[j]);
                vi -= (vj.adjoint() * vi)(0) * vj;
            }
            const double nn = vi.norm();
            if (nn > 1e-10) vi /= nn;
        }
        s = e;
    }
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXcd c = out.vectors.col(i);
        c /= c.norm();
        canonical_gauge(c);
        out.vectors.col(i) = c;
    }
    return out;
}

double phase_distance(double a, double b) {
    const double d = std::remainder(a - b, 2.0 * kPi);
    return std::abs(d);
}

// Both driven profile kinds modulate every bond with one harmonic of the
// drive rate, so H(t) = H0 + cos(wt) A + sin(wt) B exactly. Recover the three
// matrices from samples and accept only if probe times reconstruct H(t).
struct HarmonicSplit {
    bool ok = false;
    double w = 0.0;
    Eigen::MatrixXd h0, a, b;
};

HarmonicSplit harmonic_split(const ExchangeSpec& spec, const SpinBasis& basis,
                             Convention conv) {
    HarmonicSplit hs;
    if (spec.kind != ProfileKind::additive_sin && spec.kind != ProfileKind::three_spin)
        return hs;
    if (spec.omega == 0.0) return hs;
    const double w = spec.omega;
    const Eigen::MatrixXd m0 = hamiltonian_at(spec, basis, 0.0, conv);
    const Eigen::MatrixXd mq = hamiltonian_at(spec, basis, 0.5 * kPi / w, conv);
    const Eigen::MatrixXd mh = hamiltonian_at(spec, basis, kPi / w, conv);
    hs.w = w;
    hs.h0 = 0.5 * (m0 + mh);
    hs.a = 0.5 * (m0 - mh);
    hs.b = mq - hs.h0;
    const double scale = 1.0 + m0.cwiseAbs().maxCoeff();
    for (double frac : {0.2371, 0.5713, 0.8937}) {
        const double t = frac * 2.0 * kPi / w;
        const Eigen::MatrixXd probe =
            hs.h0 + std::cos(w * t) * hs.a + std::sin(w * t) * hs.b;
        if ((probe - hamiltonian_at(spec, basis, t, conv)).cwiseAbs().maxCoeff() >
            1e-10 * scale)
            return hs;
    }
    hs.ok = true;
    return hs;
}

// Total-spin blocks of the magnetization sector. Every isotropic bond term
// commutes with S^2, so time evolution never mixes the blocks and the
// propagator factors into pieces of dimension 42 + 48 + 27 + 8 + 1 instead
// of 126 for the nine-site sector.
struct SpinBlocks {
    bool ok = false;
    Eigen::MatrixXd q;                        // orthonormal, blocks contiguous
    std::vector<std::pair<int, int>> range;   // [begin, end) per block
};

SpinBlocks spin_blocks(const SpinBasis& basis) {
    SpinBlocks sb;
    const int dim = static_cast<int>(basis.dim());
    const double sz = basis.nup - 0.5 * basis.nc;
    Eigen::MatrixXd s2 =
        (sz * sz + sz) * Eigen::MatrixXd::Identity(dim, dim);
    if (basis.nup < basis.nc) {
        const SpinBasis upper(basis.nc, basis.nup + 1);
        Eigen::MatrixXd r = Eigen::MatrixXd::Zero(upper.dim(), dim);
        for (int i = 0; i < dim; ++i) {
            const std::uint32_t c = basis.states[i];
            for (int k = 0; k < basis.nc; ++k)
                if (!(c >> k & 1u))
                    r(static_cast<int>(upper.index_of(c | (1u << k))), i) += 1.0;
        }
        s2.noalias() += r.transpose() * r;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s2);
    if (es.info() != Eigen::Success) return sb;
    double s = std::abs(sz);
    int begin = 0;
    for (int i = 0; i < dim; ++i) {
        while (std::abs(es.eigenvalues()(i) - s * (s + 1.0)) > 1e-7 * (1.0 + s * (s + 1.0))) {
            if (begin != i) sb.range.emplace_back(begin, i);
            begin = i;
            s += 1.0;
            if (s > 0.5 * basis.nc + 0.25) return sb;
        }
    }
    sb.range.emplace_back(begin, dim);
    sb.q = es.eigenvectors();
    sb.ok = true;
    return sb;
}

double max_off_block(const Eigen::MatrixXd& m,
                     const std::vector<std::pair<int, int>>& range) {
    double worst = 0.0;
    for (const auto& [lo, hi] : range) {
        if (lo > 0)
            worst = std::max(worst, m.block(lo, 0, hi - lo, lo).cwiseAbs().maxCoeff());
        const int tail = static_cast<int>(m.cols()) - hi;
        if (tail > 0)
            worst = std::max(worst, m.block(lo, hi, hi - lo, tail).cwiseAbs().maxCoeff());
    }
    return worst;
}

// Blockwise Floquet construction: rotate the harmonic pieces into the
// total-spin eigenbasis, time-step each block with a fourth-order
// commutator-free integrator (two exponentials per step, Gauss nodes), and
// reassemble. Returns nothing if any piece fails to respect the blocks, in
// which case the caller falls back to the generic dense path.
std::optional<FloquetSpectrum> floquet_blockwise(
    const SpinBasis& basis, const std::vector<std::size_t>& perm,
    const HarmonicSplit& hs, const SpinBlocks& sb, const PropagationPolicy& policy,
    double period, double omega, Convention conv) {
    const int dim = static_cast<int>(basis.dim());
    const int nb = static_cast<int>(sb.range.size());
    const Eigen::MatrixXd& q = sb.q;

    Eigen::MatrixXd pq(dim, dim);
    for (int i = 0; i < dim; ++i) pq.row(static_cast<int>(perm[i])) = q.row(i);
    const Eigen::MatrixXd h0r = q.transpose() * hs.h0 * q;
    const Eigen::MatrixXd ar = q.transpose() * hs.a * q;
    const Eigen::MatrixXd br = q.transpose() * hs.b * q;
    const Eigen::MatrixXd pr = q.transpose() * pq;
    const double scale = 1.0 + h0r.cwiseAbs().maxCoeff() + ar.cwiseAbs().maxCoeff() +
                         br.cwiseAbs().maxCoeff();
    if (max_off_block(h0r, sb.range) > 1e-10 * scale) return std::nullopt;
    if (max_off_block(ar, sb.range) > 1e-10 * scale) return std::nullopt;
    if (max_off_block(br, sb.range) > 1e-10 * scale) return std::nullopt;
    if (max_off_block(pr, sb.range) > 1e-10) return std::nullopt;

    const double rt3 = std::sqrt(3.0);
    const double c1 = 0.5 - rt3 / 6.0, c2 = 0.5 + rt3 / 6.0;
    const double a1 = 0.25 + rt3 / 6.0, a2 = 0.25 - rt3 / 6.0;

    auto build = [&](int steps) {
        std::vector<FloquetDiag> parts;
        parts.reserve(nb);
        const double dt = period / steps;
        for (const auto& [lo, hi] : sb.range) {
            const int n = hi - lo;
            const Eigen::MatrixXd h0b = h0r.block(lo, lo, n, n);
            const Eigen::MatrixXd ab = ar.block(lo, lo, n, n);
            const Eigen::MatrixXd bb = br.block(lo, lo, n, n);
            Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(n, n);
            for (int s = 0; s < steps; ++s) {
                const double t0 = s * dt;
                const double ta = t0 + c1 * dt, tb = t0 + c2 * dt;
                const Eigen::MatrixXd m1 =
                    h0b + std::cos(hs.w * ta) * ab + std::sin(hs.w * ta) * bb;
                const Eigen::MatrixXd m2 =
                    h0b + std::cos(hs.w * tb) * ab + std::sin(hs.w * tb) * bb;
                u = step_apply(a2 * m1 + a1 * m2, dt,
                               step_apply(a1 * m1 + a2 * m2, dt, u));
            }
            const Eigen::MatrixXcd f = pr.block(lo, lo, n, n).cast<cplx>() * u;
            parts.push_back(diagonalize_floquet(f));
        }
        return parts;
    };

    int steps = std::max(2, policy.step_count);
    std::vector<FloquetDiag> cur = build(steps);
    for (;;) {
        if (2 * steps > policy.max_steps)
            throw std::runtime_error("Floquet eigenphases failed to converge within the step cap");
        std::vector<FloquetDiag> fine = build(2 * steps);
        double worst = 0.0;
        for (int b = 0; b < nb; ++b) {
            const int n = sb.range[b].second - sb.range[b].first;
            for (int i = 0; i < n; ++i) {
                int best = 0;
                double bo = -1.0;
                for (int j = 0; j < n; ++j) {
                    const double o = std::abs(
                        (fine[b].vectors.col(j).adjoint() * cur[b].vectors.col(i))(0));
                    if (o > bo) {
                        bo = o;
                        best = j;
                    }
                }
                worst = std::max(worst, phase_distance(cur[b].phases[i],
                                                       fine[b].phases[best]));
            }
        }
        cur = std::move(fine);
        steps *= 2;
        if (worst < policy.phase_tol) break;
    }

    FloquetSpectrum fs;
    fs.omega = omega;
    fs.period = period;
    fs.shift = 2;
    fs.conv = conv;
    fs.steps_used = steps;
    std::vector<int> offset(nb, 0);
    for (int b = 0; b < nb; ++b) {
        offset[b] = static_cast<int>(fs.eigenphases.size());
        const auto [lo, hi] = sb.range[b];
        const int n = hi - lo;
        const Eigen::MatrixXcd cols = q.block(0, lo, dim, n).cast<cplx>() * cur[b].vectors;
        for (int j = 0; j < n; ++j) {
            fs.eigenphases.push_back(cur[b].phases[j]);
            StateVector v(basis);
            for (int k = 0; k < dim; ++k) v.amp[k] = cols(k, j);
            fs.eigenvectors.push_back(std::move(v));
        }
    }

    // static spectrum of H(0) = H0 + A, block by block, merged in energy order
    struct Ent {
        double e;
        int b, j;
    };
    std::vector<Ent> ents;
    ents.reserve(dim);
    std::vector<Eigen::MatrixXd> svecs(nb);
    for (int b = 0; b < nb; ++b) {
        const auto [lo, hi] = sb.range[b];
        const int n = hi - lo;
        const Eigen::MatrixXd hb = h0r.block(lo, lo, n, n) + ar.block(lo, lo, n, n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hb);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("static eigendecomposition failed");
        svecs[b] = es.eigenvectors();
        for (int j = 0; j < n; ++j) ents.push_back({es.eigenvalues()(j), b, j});
    }
    std::sort(ents.begin(), ents.end(), [](const Ent& x, const Ent& y) { return x.e < y.e; });

    fs.pairing.resize(dim);
    fs.pairing_overlap.resize(dim);
    fs.pairing_ambiguous.resize(dim);
    fs.static_energies.resize(dim);
    for (int i = 0; i < dim; ++i) {
        const Ent& en = ents[i];
        fs.static_energies[i] = en.e;
        const Eigen::VectorXcd si = svecs[en.b].col(en.j).cast<cplx>();
        const int n = sb.range[en.b].second - sb.range[en.b].first;
        double best = -1.0, second = -1.0;
        int arg = 0;
        for (int j = 0; j < n; ++j) {
            const double o = std::abs((cur[en.b].vectors.col(j).adjoint() * si)(0));
            if (o > best) {
                second = best;
                best = o;
                arg = j;
            } else if (o > second) {
                second = o;
            }
        }
        fs.pairing[i] = offset[en.b] + arg;
        fs.pairing_overlap[i] = best;
        fs.pairing_ambiguous[i] = (best - second) < 1e-3;
    }
    return fs;
}

}  // namespace

Eigen::MatrixXcd propagator_dense(const ExchangeSpec& spec, const SpinBasis& basis,
                                  double t0, double t1, int steps, Convention conv) {
    check_dim(basis);
    if (steps < 1) throw std::invalid_argument("propagation needs at least one step");
    const std::size_t dim = basis.dim();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    if (t1 == t0) return u;
    const double dt = (t1 - t0) / steps;
    for (int s = 0; s < steps; ++s) {
        const double tm = t0 + (s + 0.5) * dt;
        u = step_apply(hamiltonian_at(spec, basis, tm, conv), dt, u);
    }
    return u;
}

StateVector propagate(const ExchangeSpec& spec, const SpinBasis& basis, double t0,
                      double t1, const PropagationPolicy& policy, const StateVector& v,
                      Convention conv) {
    check_dim(basis);
    if (v.basis != &basis) throw std::invalid_argument("state not over the given basis");
    if (t1 == t0) return v;
    const std::size_t dim = basis.dim();
    Eigen::VectorXcd x(dim);
    for (std::size_t i = 0; i < dim; ++i) x(i) = v.amp[i];
    const int steps = std::max(1, policy.step_count);
    const double dt = (t1 - t0) / steps;
    Eigen::MatrixXcd col = x;
    for (int s = 0; s < steps; ++s) {
        const double tm = t0 + (s + 0.5) * dt;
        col = step_apply(hamiltonian_at(spec, basis, tm, conv), dt, col);
    }
    StateVector out(basis);
    for (std::size_t i = 0; i < dim; ++i) out.amp[i] = col(i, 0);
    return out;
}

double floquet_period(const ExchangeSpec& spec, double omega) {
    if (omega == 0.0) throw std::invalid_argument("Floquet construction needs omega != 0");
    switch (spec.kind) {
        case ProfileKind::three_spin:
            return 4.0 * kPi / (3.0 * std::abs(omega));
        case ProfileKind::additive_sin:
            return 2.0 * kPi / (spec.nc * std::abs(omega));
        default:
            throw std::invalid_argument("Floquet construction needs a driven profile kind");
    }
}

FloquetSpectrum floquet_operator(const ExchangeSpec& spec, const SpinBasis& basis,
                                 double omega, const PropagationPolicy& policy,
                                 Convention conv) {
    check_dim(basis);
    ExchangeSpec driven = spec;
    driven.omega = omega;
    const double period = floquet_period(driven, omega);
    const std::size_t dim = basis.dim();

    // translation permutation: configuration c -> rotate(c, +2)
    std::vector<std::size_t> perm(dim);
    for (std::size_t i = 0; i < dim; ++i)
        perm[i] = basis.index_of(rotate_config(basis.states[i], 2, basis.nc));

    const HarmonicSplit hs = harmonic_split(driven, basis, conv);
    if (hs.ok) {
        const SpinBlocks sb = spin_blocks(basis);
        if (sb.ok) {
            auto fast = floquet_blockwise(basis, perm, hs, sb, policy, period, omega, conv);
            if (fast) return std::move(*fast);
        }
    }

    auto build = [&](int steps) {
        Eigen::MatrixXcd u = propagator_dense(driven, basis, 0.0, period, steps, conv);
        Eigen::MatrixXcd f(dim, dim);
        for (std::size_t i = 0; i < dim; ++i) f.row(perm[i]) = u.row(i);
        return diagonalize_floquet(f);
    };

    int steps = std::max(2, policy.step_count);
    FloquetDiag cur = build(steps);
    for (;;) {
        if (2 * steps > policy.max_steps)
            throw std::runtime_error("Floquet eigenphases failed to converge within the step cap");
        FloquetDiag fine = build(2 * steps);
        // match coarse states to fine states by overlap, compare phases
        double worst = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            int best = 0;
            double bo = -1.0;
            for (std::size_t j = 0; j < dim; ++j) {
                const double o = std::abs((fine.vectors.col(j).adjoint() * cur.vectors.col(i))(0));
                if (o > bo) {
                    bo = o;
                    best = static_cast<int>(j);
                }
            }
            worst = std::max(worst, phase_distance(cur.phases[i], fine.phases[best]));
        }
        cur = std::move(fine);
        steps *= 2;
        if (worst < policy.phase_tol) break;
    }

    FloquetSpectrum fs;
    fs.omega = omega;
    fs.period = period;
    fs.shift = 2;
    fs.conv = conv;
    fs.steps_used = steps;
    fs.eigenphases = cur.phases;
    fs.eigenvectors.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        StateVector v(basis);
        for (std::size_t k = 0; k < dim; ++k) v.amp[k] = cur.vectors(k, i);
        fs.eigenvectors.push_back(std::move(v));
    }

    // pair static eigenstates of H(0) with Floquet states by maximal overlap
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        hamiltonian_at(driven, basis, 0.0, conv));
    fs.pairing.resize(dim);
    fs.pairing_overlap.resize(dim);
    fs.pairing_ambiguous.resize(dim);
    fs.static_energies.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        fs.static_energies[i] = es.eigenvalues()(i);
        const Eigen::VectorXcd si = es.eigenvectors().col(i).cast<cplx>();
        double best = -1.0, second = -1.0;
        int arg = 0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double o = std::abs((cur.vectors.col(j).adjoint() * si)(0));
            if (o > best) {
                second = best;
                best = o;
                arg = static_cast<int>(j);
            } else if (o > second) {
                second = o;
            }
        }
        fs.pairing[i] = arg;
        fs.pairing_overlap[i] = best;
        fs.pairing_ambiguous[i] = (best - second) < 1e-3;
    }
    return fs;
}

int ground_paired(const FloquetSpectrum& fs) {
    if (fs.pairing.empty()) throw std::logic_error("empty Floquet spectrum");
    if (fs.pairing_ambiguous[0])
        throw std::runtime_error("ground-state Floquet pairing is ambiguous (runner-up within 1e-3)");
    return fs.pairing[0];
}

double berry_phase_numeric(const FloquetSpectrum& fs, const ExchangeSpec& spec,
                           const SpinBasis& basis, int steps_per_period) {
    check_dim(basis);
    ExchangeSpec driven = spec;
    driven.omega = fs.omega;
    const int nc = basis.nc;
    const double cycle = nc * fs.period;
    int spp = steps_per_period > 0 ? steps_per_period : std::max(fs.steps_used, 6000);
    const long total = static_cast<long>(spp) * nc;
    const double dt = cycle / static_cast<double>(total);

    const StateVector& start = fs.eigenvectors[ground_paired(fs)];
    const std::size_t dim = basis.dim();
    Eigen::VectorXcd psi0(dim);
    for (std::size_t i = 0; i < dim; ++i) psi0(i) = start.amp[i];
    Eigen::VectorXcd psi = psi0;

    double dynamical = 0.0;
    for (long s = 0; s < total; ++s) {
        const double tm = (s + 0.5) * dt;
        const Eigen::MatrixXd h = hamiltonian_at(driven, basis, tm, fs.conv);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("eigendecomposition failed during phase accumulation");
        // the state a half step later has the same H expectation: H commutes
        // with its own exponential, so sample before updating
        dynamical += (psi.adjoint() * (h.cast<cplx>() * psi))(0).real() * dt;
        const auto& w = es.eigenvalues();
        const auto& p = es.eigenvectors();
        Eigen::VectorXcd ph(w.size());
        for (int i = 0; i < w.size(); ++i) ph(i) = std::exp(cplx(0.0, -w(i) * dt));
        psi = p.cast<cplx>() * (ph.asDiagonal() * (p.transpose().cast<cplx>() * psi));
    }
    const double total_phase = std::arg((psi0.adjoint() * psi)(0));
    double omega_geo = std::fmod(-(total_phase + dynamical), 2.0 * kPi);
    if (omega_geo < 0.0) omega_geo += 2.0 * kPi;
    return omega_geo;
}

}  // namespace spinwall
