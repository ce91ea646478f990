#include "spinwall/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spinwall/threads.hpp"

namespace spinwall {

namespace {

constexpr double kHbarEvS = 6.582119569e-16;
constexpr std::size_t kChunks = 64;

}  // namespace

SpinDensity spin_density(const StateVector& v) {
    const SpinBasis& b = *v.basis;
    const int nc = b.nc;
    const std::size_t dim = b.dim();
    SpinDensity d;
    d.values.assign(nc, 0.0);
    if (dim < 65536) {
        for (std::size_t i = 0; i < dim; ++i) {
            const double p = std::norm(v.amp[i]);
            const std::uint32_t c = b.states[i];
            for (int k = 0; k < nc; ++k)
                d.values[k] += ((c >> k) & 1u) ? p : -p;
        }
        return d;
    }
    // fixed chunk partials combined in order: thread-count-independent sums
    std::vector<std::vector<double>> partial(kChunks, std::vector<double>(nc, 0.0));
    const std::size_t chunk = (dim + kChunks - 1) / kChunks;
    parallel_tasks(kChunks, [&](std::size_t cidx) {
        const std::size_t lo = cidx * chunk;
        const std::size_t hi = std::min(dim, lo + chunk);
        auto& acc = partial[cidx];
        for (std::size_t i = lo; i < hi; ++i) {
            const double p = std::norm(v.amp[i]);
            const std::uint32_t c = b.states[i];
            for (int k = 0; k < nc; ++k) acc[k] += ((c >> k) & 1u) ? p : -p;
        }
    });
    for (std::size_t cidx = 0; cidx < kChunks; ++cidx)
        for (int k = 0; k < nc; ++k) d.values[k] += partial[cidx][k];
    return d;
}

double gap_ratio(const GapSeries& s) {
    if (s.e0.empty() || s.e0.size() != s.e1.size())
        throw std::invalid_argument("gap ratio needs a non-empty E0/E1 series");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < s.e0.size(); ++i) {
        const double g = s.e1[i] - s.e0[i];
        lo = std::min(lo, g);
        hi = std::max(hi, g);
    }
    if (!(lo > 0.0)) throw std::runtime_error("degenerate ground state in gap series");
    return (hi - lo) / lo;
}

HybridResult hybridize(const StateVector& psi0, const StateVector& psi1) {
    if (psi0.basis != psi1.basis) throw std::invalid_argument("hybridize basis mismatch");
    const std::size_t dim = psi0.basis->dim();
    if (std::abs(inner(psi0, psi1)) > 1.0 - 1e-10)
        throw std::invalid_argument("hybridize inputs are the same ray");
    HybridResult best;
    double best_contrast = -1.0;
    for (int sign : {+1, -1}) {
        StateVector h(*psi0.basis);
        for (std::size_t i = 0; i < dim; ++i)
            h.amp[i] = psi0.amp[i] - static_cast<double>(sign) * psi1.amp[i];
        h.normalize();
        const SpinDensity d = spin_density(h);
        double contrast = 0.0;
        for (double x : d.values) contrast += std::abs(x);
        if (contrast > best_contrast) {
            best_contrast = contrast;
            best.state = std::move(h);
            best.sign = sign;
        }
    }
    return best;
}

ExpFit fit_exponential(const std::vector<double>& s, const std::vector<double>& y) {
    if (s.size() != y.size() || s.size() < 3)
        throw std::invalid_argument("exponential fit needs at least 3 (s, y) points");
    std::vector<double> ly(y.size());
    std::vector<bool> in_rms(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0)) throw std::invalid_argument("exponential fit needs positive y");
        const double v = std::max(y[i], 1e-12);
        ly[i] = std::log(v);
        in_rms[i] = y[i] >= 1e-12;
    }
    const double n = static_cast<double>(s.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        sx += s[i];
        sy += ly[i];
        sxx += s[i] * s[i];
        sxy += s[i] * ly[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0.0) throw std::invalid_argument("exponential fit grid is degenerate");
    const double slope = (n * sxy - sx * sy) / det;
    const double intercept = (sy * sxx - sx * sxy) / det;

    ExpFit f;
    f.amplitude = std::exp(intercept);
    if (std::abs(slope) < 1e-14) {
        f.constant = true;
        f.decay_length = std::numeric_limits<double>::infinity();
    } else {
        f.decay_length = -1.0 / slope;
    }
    double ss = 0.0;
    int used = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!in_rms[i]) continue;
        const double r = ly[i] - (intercept + slope * s[i]);
        ss += r * r;
        ++used;
    }
    f.points_used = used;
    f.rms = used > 0 ? std::sqrt(ss / used) : 0.0;
    return f;
}

double channel_capacity(const CapacityParams& p) {
    if (p.j0_ev < 0.0) throw std::invalid_argument("capacity needs J0 >= 0");
    if (!(p.spacing >= 1.0)) throw std::invalid_argument("capacity needs spacing >= 1");
    return p.j0_ev / (kHbarEvS * p.spacing);
}

Localization localization_measure(const SpinDensity& d) {
    double total = 0.0;
    for (double v : d.values) total += std::max(v, 0.0);
    if (!(total > 0.0)) throw std::invalid_argument("density has no positive part");
    Localization l;
    double best = -1.0, sq = 0.0;
    for (std::size_t k = 0; k < d.values.size(); ++k) {
        const double p = std::max(d.values[k], 0.0) / total;
        sq += p * p;
        if (p > best) {
            best = p;
            l.peak_site = static_cast<int>(k) + 1;
        }
    }
    l.participation_ratio = 1.0 / sq;
    return l;
}

double total_spin_expectation(const StateVector& v) {
    const SpinBasis& b = *v.basis;
    if (b.nup == b.nc) {  // S+ annihilates the top sector
        const double sz = b.nup - 0.5 * b.nc;
        return sz * (sz + 1.0);
    }
    const SpinBasis raised(b.nc, b.nup + 1);
    std::vector<cplx> acc(raised.dim(), cplx(0.0));
    for (std::size_t i = 0; i < b.dim(); ++i) {
        const cplx a = v.amp[i];
        if (a == cplx(0.0)) continue;
        const std::uint32_t c = b.states[i];
        for (int k = 0; k < b.nc; ++k) {
            if ((c >> k) & 1u) continue;
            acc[raised.index_of(c | (1u << k))] += a;
        }
    }
    double splus = 0.0;
    for (const cplx& x : acc) splus += std::norm(x);
    const double sz = b.nup - 0.5 * b.nc;
    return splus + sz * (sz + 1.0);
}

}  // namespace spinwall
