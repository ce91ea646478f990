#include "spinwall/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "spinwall/threads.hpp"

namespace spinwall {

namespace {

constexpr std::size_t kChunks = 64;  // fixed partition => thread-count-independent sums

double det_dot(const double* a, const double* b, std::size_t n) {
    if (n < 8192) {
        Eigen::Map<const Eigen::VectorXd> va(a, n), vb(b, n);
        return va.dot(vb);
    }
    double partial[kChunks];
    const std::size_t chunk = (n + kChunks - 1) / kChunks;
    parallel_tasks(kChunks, [&](std::size_t c) {
        const std::size_t lo = c * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) {
            partial[c] = 0.0;
            return;
        }
        Eigen::Map<const Eigen::VectorXd> va(a + lo, hi - lo), vb(b + lo, hi - lo);
        partial[c] = va.dot(vb);
    });
    double s = 0.0;
    for (std::size_t c = 0; c < kChunks; ++c) s += partial[c];
    return s;
}

double det_norm(const double* a, std::size_t n) { return std::sqrt(det_dot(a, a, n)); }

// coeffs = Q(:,0:cols)^T w, chunk partials combined in fixed order.
void projections(const Eigen::MatrixXd& q, int cols, const Eigen::VectorXd& w,
                 Eigen::VectorXd& coeffs) {
    const std::size_t n = static_cast<std::size_t>(q.rows());
    coeffs.setZero(cols);
    if (cols == 0) return;
    const std::size_t chunk = (n + kChunks - 1) / kChunks;
    Eigen::MatrixXd partial = Eigen::MatrixXd::Zero(cols, kChunks);
    parallel_tasks(kChunks, [&](std::size_t c) {
        const std::size_t lo = c * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) return;
        partial.col(c).noalias() =
            q.block(lo, 0, hi - lo, cols).transpose() * w.segment(lo, hi - lo);
    });
    for (std::size_t c = 0; c < kChunks; ++c) coeffs += partial.col(c);
}

// w -= Q(:,0:cols) coeffs, each row written once.
void subtract_combination(const Eigen::MatrixXd& q, int cols,
                          const Eigen::VectorXd& coeffs, Eigen::VectorXd& w) {
    if (cols == 0) return;
    const std::size_t n = static_cast<std::size_t>(q.rows());
    const std::size_t chunk = (n + kChunks - 1) / kChunks;
    parallel_tasks(kChunks, [&](std::size_t c) {
        const std::size_t lo = c * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) return;
        w.segment(lo, hi - lo).noalias() -=
            q.block(lo, 0, hi - lo, cols) * coeffs;
    });
}

StateVector to_state(const SpinBasis& basis, const Eigen::VectorXd& v) {
    StateVector s(basis);
    for (std::size_t i = 0; i < basis.dim(); ++i) s.amp[i] = v(i);
    return s;
}

// Sign gauge: entry of largest magnitude (lowest index on ties) positive.
void canonical_sign(Eigen::VectorXd& v) {
    int best = 0;
    double mag = 0.0;
    for (int i = 0; i < v.size(); ++i) {
        const double m = std::abs(v(i));
        if (m > mag * (1.0 + 1e-12)) {
            mag = m;
            best = i;
        }
    }
    if (v(best) < 0.0) v = -v;
}

int clamp_count(const HamiltonianView& h, int m) {
    if (m < 1 || m > 16) throw std::invalid_argument("eigenpair count must be in 1..16");
    return std::min<int>(m, static_cast<int>(h.basis->dim()));
}

}  // namespace

EigenResult dense_lowest(const HamiltonianView& h, int m) {
    m = clamp_count(h, m);
    Eigen::MatrixXd mat = materialize_dense(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolve failed");
    EigenResult out;
    out.matvecs = 0;
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXd v = es.eigenvectors().col(i);
        canonical_sign(v);
        const double lambda = es.eigenvalues()(i);
        out.values.push_back(lambda);
        out.residuals.push_back((mat * v - lambda * v).norm());
        out.vectors.push_back(to_state(*h.basis, v));
    }
    return out;
}

EigenResult lanczos_lowest(const HamiltonianView& h, int m, const LanczosOptions& opts) {
    m = clamp_count(h, m);
    const SpinBasis& basis = *h.basis;
    const std::size_t dim = basis.dim();
    const double tol = opts.tol;

    int window = opts.window;
    if (window <= 0) {
        // memory budget ~600 MB for the active window
        const long budget = static_cast<long>(6e8 / (8.0 * static_cast<double>(dim)));
        window = static_cast<int>(std::min<long>(128, std::max<long>(2L * m + 10, budget)));
    }
    window = static_cast<int>(std::min<std::size_t>(window, dim));
    window = std::max(window, std::min<int>(static_cast<int>(dim), m + 2));
    long max_matvecs = opts.max_matvecs > 0
                           ? opts.max_matvecs
                           : static_cast<long>(10.0 * m * std::sqrt(static_cast<double>(dim))) + 1000;

    Eigen::MatrixXd q(dim, window + 1);
    Eigen::MatrixXd tmat = Eigen::MatrixXd::Zero(window + 1, window + 1);
    Eigen::MatrixXd locked(dim, m);
    std::vector<double> locked_vals;
    std::vector<double> locked_res;
    int nlocked = 0;
    long matvecs = 0;

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Eigen::VectorXd w(dim), coeffs, c2;

    auto orth_against_locked = [&](Eigen::VectorXd& v) {
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXd lc;
            projections(locked, nlocked, v, lc);
            subtract_combination(locked, nlocked, lc, v);
        }
    };

    auto fresh_start = [&](int col) {
        for (;;) {
            for (std::size_t i = 0; i < dim; ++i) w(i) = gauss(rng);
            orth_against_locked(w);
            if (col > 0) {
                Eigen::VectorXd lc;
                projections(q, col, w, lc);
                subtract_combination(q, col, lc, w);
            }
            const double nn = det_norm(w.data(), dim);
            if (nn > 1e-8) {
                q.col(col) = w / nn;
                return;
            }
        }
    };

    fresh_start(0);
    int jq = 1;  // active orthonormal vectors in q

    auto rayleigh_ritz = [&](Eigen::VectorXd& theta, Eigen::MatrixXd& s) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tmat.topLeftCorner(jq, jq));
        theta = es.eigenvalues();
        s = es.eigenvectors();
    };

    // Keep the k lowest Ritz vectors starting at index `from`, place them in q,
    // reset tmat to their Rayleigh quotients. Returns new active count (k).
    auto compress = [&](const Eigen::VectorXd& theta, const Eigen::MatrixXd& s, int from,
                        int k) {
        Eigen::MatrixXd y(dim, k);
        const std::size_t chunk = (dim + kChunks - 1) / kChunks;
        parallel_tasks(kChunks, [&](std::size_t c) {
            const std::size_t lo = c * chunk;
            const std::size_t hi = std::min(dim, lo + chunk);
            if (lo >= hi) return;
            y.middleRows(lo, hi - lo).noalias() =
                q.middleRows(lo, hi - lo).leftCols(jq) * s.block(0, from, jq, k);
        });
        tmat.setZero();
        int kept = 0;
        for (int i = 0; i < k; ++i) {
            Eigen::VectorXd v = y.col(i);
            orth_against_locked(v);
            if (kept > 0) {
                Eigen::VectorXd lc;
                projections(q, kept, v, lc);
                subtract_combination(q, kept, lc, v);
            }
            const double nn = det_norm(v.data(), dim);
            if (nn < 1e-8) continue;  // swallowed by deflation, drop
            q.col(kept) = v / nn;
            tmat(kept, kept) = theta(from + i);
            ++kept;
        }
        return kept;
    };

    while (nlocked < m) {
        if (matvecs >= max_matvecs)
            throw std::runtime_error("iterative eigensolver exceeded its matvec budget");

        const int j = jq - 1;
        apply(h, q.col(j).data(), w.data());
        ++matvecs;
        projections(q, jq, w, coeffs);
        subtract_combination(q, jq, coeffs, w);
        projections(q, jq, w, c2);
        subtract_combination(q, jq, c2, w);
        coeffs += c2;
        orth_against_locked(w);
        tmat.block(0, j, jq, 1) = coeffs;
        tmat.block(j, 0, 1, jq) = coeffs.transpose();

        const double beta = det_norm(w.data(), dim);

        Eigen::VectorXd theta;
        Eigen::MatrixXd s;
        rayleigh_ritz(theta, s);

        const double scale = std::max(1.0, theta.cwiseAbs().maxCoeff());
        const bool exhausted = beta < 1e-13 * scale || nlocked + jq >= static_cast<int>(dim);
        const double bound = beta * std::abs(s(j, 0));

        if (bound < 0.5 * tol * scale || exhausted) {
            // candidate lowest Ritz pair: verify explicitly, then lock
            Eigen::VectorXd v(dim);
            const std::size_t chunk = (dim + kChunks - 1) / kChunks;
            parallel_tasks(kChunks, [&](std::size_t c) {
                const std::size_t lo = c * chunk;
                const std::size_t hi = std::min(dim, lo + chunk);
                if (lo >= hi) return;
                v.segment(lo, hi - lo).noalias() =
                    q.middleRows(lo, hi - lo).leftCols(jq) * s.col(0);
            });
            orth_against_locked(v);
            const double nn = det_norm(v.data(), dim);
            if (nn > 1e-8) {
                v /= nn;
                Eigen::VectorXd hv(dim);
                apply(h, v.data(), hv.data());
                ++matvecs;
                const double rq = det_dot(v.data(), hv.data(), dim);
                hv -= rq * v;
                const double res = det_norm(hv.data(), dim);
                if (res < tol * scale || exhausted) {
                    locked.col(nlocked) = v;
                    locked_vals.push_back(rq);
                    locked_res.push_back(res);
                    ++nlocked;
                    if (nlocked == m) break;
                    const int k = std::min({2 * m + 6, jq - 1, window - 2});
                    if (k >= 1) {
                        jq = compress(theta, s, 1, k);
                    } else {
                        jq = 0;
                    }
                    if (jq == 0) {
                        fresh_start(0);
                        jq = 1;
                    } else if (beta > 1e-13 * scale) {
                        Eigen::VectorXd nv = w / beta;
                        orth_against_locked(nv);
                        Eigen::VectorXd lc;
                        projections(q, jq, nv, lc);
                        subtract_combination(q, jq, lc, nv);
                        const double n2 = det_norm(nv.data(), dim);
                        if (n2 > 1e-8) {
                            q.col(jq) = nv / n2;
                            ++jq;
                        }
                    }
                    continue;
                }
            }
            if (exhausted) {
                // nothing verifiable left in the spanned space, start over
                fresh_start(0);
                jq = 1;
                tmat.setZero();
                continue;
            }
        }

        if (jq == window) {
            const int k = std::max(1, std::min({2 * m + 6, jq - 1, window - 2}));
            jq = compress(theta, s, 0, k);
            if (jq == 0) {
                fresh_start(0);
                jq = 1;
            } else if (beta > 1e-13 * scale) {
                Eigen::VectorXd nv = w / beta;
                orth_against_locked(nv);
                Eigen::VectorXd lc;
                projections(q, jq, nv, lc);
                subtract_combination(q, jq, lc, nv);
                const double n2 = det_norm(nv.data(), dim);
                if (n2 > 1e-8) {
                    q.col(jq) = nv / n2;
                    ++jq;
                }
            }
            if (jq == 0) {
                fresh_start(0);
                jq = 1;
            }
        } else if (beta > 1e-13 * scale) {
            q.col(jq) = w / beta;
            ++jq;
        } else {
            fresh_start(jq);
            ++jq;
        }
    }

    // locking proceeds lowest-first, but deflation can occasionally reorder
    // near-degenerate pairs; sort for a clean contract
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return locked_vals[a] < locked_vals[b]; });

    EigenResult out;
    out.matvecs = matvecs;
    for (int i = 0; i < m; ++i) {
        Eigen::VectorXd v = locked.col(order[i]);
        canonical_sign(v);
        out.values.push_back(locked_vals[order[i]]);
        out.residuals.push_back(locked_res[order[i]]);
        out.vectors.push_back(to_state(basis, v));
    }
    return out;
}

EigenResult lowest(const HamiltonianView& h, int m, const LanczosOptions& opts) {
    if (h.basis->dim() <= 512) return dense_lowest(h, m);
    return lanczos_lowest(h, m, opts);
}

}  // namespace spinwall
