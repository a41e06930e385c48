#include "cpsis/eigen_small.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpsis/errors.hpp"

namespace cpsis {

namespace {

using cdouble = std::complex<double>;

// Parlett-Reinsch balancing with radix-2 scaling (exact in floating point).
void balance(Matrix& a) {
    const std::size_t n = a.rows();
    constexpr double radix = 2.0, radix_sq = 4.0;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                r += std::abs(a(i, j));
                c += std::abs(a(j, i));
            }
            if (r == 0.0 || c == 0.0) continue;
            const double s = c + r;
            double f = 1.0;
            double g = r / radix;
            while (c < g) {
                f *= radix;
                c *= radix_sq;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix_sq;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                const double inv = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

// Householder similarity reduction to upper Hessenberg form.
void hessenberg(Matrix& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    std::vector<double> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) norm += a(i, k) * a(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        const double alpha = a(k + 1, k) >= 0.0 ? -norm : norm;
        double vtv = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = a(i, k);
            if (i == k + 1) v[i] -= alpha;
            vtv += v[i] * v[i];
        }
        if (vtv == 0.0) continue;
        const double scale = 2.0 / vtv;
        // A <- (I - 2 v v^T / v^T v) A
        for (std::size_t j = k; j < n; ++j) {
            double w = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) w += v[i] * a(i, j);
            w *= scale;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= w * v[i];
        }
        // A <- A (I - 2 v v^T / v^T v)
        for (std::size_t i = 0; i < n; ++i) {
            double w = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) w += a(i, j) * v[j];
            w *= scale;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= w * v[j];
        }
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
        a(k + 1, k) = alpha;
    }
}

struct Givens {
    double c;   // real cosine
    cdouble s;  // complex sine, c^2 + |s|^2 = 1
};

// Rotation with G^H [f; g] = [r; 0].
Givens make_givens(cdouble f, cdouble g) {
    if (g == cdouble(0.0)) return {1.0, 0.0};
    if (f == cdouble(0.0)) return {0.0, -1.0};
    const double af = std::abs(f);
    const double d = std::hypot(af, std::abs(g));
    return {af / d, -f * std::conj(g) / (d * af)};
}

// Shifted QR with complex Wilkinson shifts on an upper Hessenberg matrix.
std::vector<cdouble> hessenberg_qr(std::vector<cdouble>& h, std::size_t n) {
    auto at = [&](std::size_t i, std::size_t j) -> cdouble& { return h[i * n + j]; };

    double anorm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = (i == 0 ? 0 : i - 1); j < n; ++j) anorm += std::abs(at(i, j));
    if (anorm == 0.0) return std::vector<cdouble>(n, 0.0);
    const double eps = std::numeric_limits<double>::epsilon();

    std::vector<cdouble> eig(n);
    std::size_t hi = n - 1;
    int its = 0;
    while (true) {
        // Deflate converged trailing eigenvalues.
        std::size_t lo = hi;
        while (lo > 0) {
            double small = std::abs(at(lo - 1, lo - 1)) + std::abs(at(lo, lo));
            if (small == 0.0) small = anorm;
            if (std::abs(at(lo, lo - 1)) <= eps * small) {
                at(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }
        if (lo == hi) {
            eig[hi] = at(hi, hi);
            if (hi == 0) break;
            --hi;
            its = 0;
            continue;
        }

        if (++its > 60) throw NoConvergence("QR iteration failed to converge");

        // Wilkinson shift from the trailing 2x2 block (exceptional shift
        // every 15 sweeps to break symmetric stalls).
        cdouble shift;
        const cdouble p = at(hi - 1, hi - 1), q = at(hi - 1, hi), r = at(hi, hi - 1),
                      w = at(hi, hi);
        if (its % 15 == 0) {
            shift = w + 0.75 * std::abs(at(hi, hi - 1));
        } else {
            const cdouble tr_half = 0.5 * (p + w);
            const cdouble det = p * w - q * r;
            const cdouble disc = std::sqrt(tr_half * tr_half - det);
            const cdouble mu1 = tr_half + disc, mu2 = tr_half - disc;
            shift = std::abs(mu1 - w) < std::abs(mu2 - w) ? mu1 : mu2;
        }

        // Implicit single-shift sweep over the active window [lo, hi].
        cdouble x = at(lo, lo) - shift;
        cdouble z = at(lo + 1, lo);
        for (std::size_t k = lo; k < hi; ++k) {
            const Givens giv = make_givens(x, z);
            const std::size_t col_from = k == lo ? lo : k - 1;
            for (std::size_t j = col_from; j < n; ++j) {
                const cdouble t1 = at(k, j), t2 = at(k + 1, j);
                at(k, j) = giv.c * t1 - giv.s * t2;
                at(k + 1, j) = std::conj(giv.s) * t1 + giv.c * t2;
            }
            const std::size_t row_to = std::min(k + 2, hi);
            for (std::size_t i = 0; i <= row_to; ++i) {
                const cdouble t1 = at(i, k), t2 = at(i, k + 1);
                at(i, k) = giv.c * t1 - std::conj(giv.s) * t2;
                at(i, k + 1) = giv.s * t1 + giv.c * t2;
            }
            if (k + 1 < hi) {
                x = at(k + 1, k);
                z = at(k + 2, k);
            }
        }
    }
    return eig;
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
    if (a.rows() != a.cols()) throw OutOfDomain("eigenvalues: matrix must be square");
    const std::size_t n = a.rows();
    if (n == 0) return {};
    if (n == 1) return {cdouble(a(0, 0))};

    Matrix work = a;
    balance(work);
    hessenberg(work);

    std::vector<cdouble> h(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h[i * n + j] = work(i, j);
    return hessenberg_qr(h, n);
}

std::complex<double> leading_eigenvalue(const Matrix& a) {
    const auto eigs = eigenvalues(a);
    if (eigs.empty()) throw OutOfDomain("leading_eigenvalue: empty matrix");
    std::complex<double> best = eigs.front();
    for (const auto& e : eigs) {
        if (e.real() > best.real() ||
            (e.real() == best.real() && std::abs(e.imag()) > std::abs(best.imag())))
            best = e;
    }
    return best;
}

}  // namespace cpsis
