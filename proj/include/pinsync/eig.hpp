#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "pinsync/matrix.hpp"

namespace pinsync {

namespace detail {

inline double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

/// Parlett-Reinsch balancing: diagonal similarity scaling by powers of the
/// radix to equalize row and column norms.
inline void balance(DenseMatrix& a) {
    const std::size_t n = a.rows();
    const double radix = 2.0;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            if (c != 0.0 && r != 0.0) {
                double g = r / radix;
                double f = 1.0;
                const double s = c + r;
                while (c < g) {
                    f *= radix;
                    c *= radix * radix;
                }
                g = r * radix;
                while (c > g) {
                    f /= radix;
                    c /= radix * radix;
                }
                if ((c + r) / f < 0.95 * s) {
                    done = false;
                    g = 1.0 / f;
                    for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
                    for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
                }
            }
        }
    }
}

/// Reduction to upper Hessenberg form by stabilized elementary similarity
/// transformations. Entries below the subdiagonal are zeroed on exit.
inline void to_hessenberg(DenseMatrix& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    for (std::size_t m = 1; m + 1 < n; ++m) {
        double x = 0.0;
        std::size_t piv = m;
        for (std::size_t j = m; j < n; ++j)
            if (std::abs(a(j, m - 1)) > std::abs(x)) {
                x = a(j, m - 1);
                piv = j;
            }
        if (piv != m) {
            for (std::size_t j = m - 1; j < n; ++j) std::swap(a(piv, j), a(m, j));
            for (std::size_t j = 0; j < n; ++j) std::swap(a(j, piv), a(j, m));
        }
        if (x != 0.0) {
            for (std::size_t i = m + 1; i < n; ++i) {
                double y = a(i, m - 1);
                if (y != 0.0) {
                    y /= x;
                    a(i, m - 1) = y;
                    for (std::size_t j = m; j < n; ++j) a(i, j) -= y * a(m, j);
                    for (std::size_t j = 0; j < n; ++j) a(j, m) += y * a(j, i);
                }
            }
        }
    }
    for (std::size_t i = 2; i < n; ++i)
        for (std::size_t j = 0; j + 1 < i; ++j) a(i, j) = 0.0;
}

/**
 * @brief Francis double-shift QR iteration on an upper Hessenberg matrix.
 *
 * Destroys `a` and returns all eigenvalues with multiplicity; complex
 * eigenvalues appear in conjugate pairs. Throws convergence_error after
 * 40*n sweeps without full deflation.
 */
inline std::vector<Complex> hqr(DenseMatrix& a) {
    const int n = static_cast<int>(a.rows());
    std::vector<double> wr(n, 0.0), wi(n, 0.0);
    const double deflate_tol = 1e-14;
    const double eps = std::numeric_limits<double>::epsilon();

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
    if (anorm == 0.0) anorm = 1.0;

    int total_sweeps = 0;
    const int max_sweeps = 40 * n;
    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= deflate_tol * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            if (l < 0) l = 0;
            double x = a(nn, nn);
            if (l == nn) {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                --nn;
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_of(z, p);
                        wr[nn - 1] = wr[nn] = x + z;
                        if (z != 0.0) wr[nn] = x - w / z;
                        wi[nn - 1] = wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = wr[nn] = x + p;
                        wi[nn] = z;
                        wi[nn - 1] = -z;
                    }
                    nn -= 2;
                } else {
                    if (++total_sweeps > max_sweeps)
                        throw convergence_error(
                            "eigenvalue iteration exceeded 40*n QR sweeps (deflated " +
                            std::to_string(n - 1 - nn) + " of " + std::to_string(n) + ")");
                    if (its == 10 || its == 20 || its == 30) {
                        // exceptional shift
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        double rr = x - z;
                        double ss = y - z;
                        p = (rr * ss - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - rr - ss;
                        r = a(m + 2, m + 1);
                        double sc = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= sc;
                        q /= sc;
                        r /= sc;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v =
                            std::abs(p) *
                            (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = (k != nn - 1) ? a(k + 2, k - 1) : 0.0;
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
                        if (s != 0.0) {
                            if (k == m) {
                                if (l != m) a(k, k - 1) = -a(k, k - 1);
                            } else {
                                a(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {
                                p = a(k, j) + q * a(k + 1, j);
                                if (k != nn - 1) {
                                    p += r * a(k + 2, j);
                                    a(k + 2, j) -= p * z;
                                }
                                a(k + 1, j) -= p * y;
                                a(k, j) -= p * x;
                            }
                            const int mmin = std::min(nn, k + 3);
                            for (int i = l; i <= mmin; ++i) {
                                p = x * a(i, k) + y * a(i, k + 1);
                                if (k != nn - 1) {
                                    p += z * a(i, k + 2);
                                    a(i, k + 2) -= p * r;
                                }
                                a(i, k + 1) -= p * q;
                                a(i, k) -= p;
                            }
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    std::vector<Complex> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = Complex(wr[i], wi[i]);
    return ev;
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix (values only).
inline std::vector<double> jacobi_symmetric_eigenvalues(DenseMatrix s) {
    const std::size_t n = s.rows();
    const double frob = s.frobenius_norm();
    if (frob == 0.0) return std::vector<double>(n, 0.0);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += s(p, q) * s(p, q);
        if (std::sqrt(2.0 * off) <= 1e-15 * frob) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(s(p, q)) <= 1e-300) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
                const double tt = sign_of(1.0, theta) /
                                  (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + tt * tt);
                const double sn = tt * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double skp = s(k, p), skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double spk = s(p, k), sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
            }
    }
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = s(i, i);
    return d;
}

} // namespace detail

/// All eigenvalues of a general real square matrix, with multiplicity.
inline std::vector<Complex> eigenvalues(const DenseMatrix& m) {
    if (!m.square())
        throw dimension_error("eigenvalues requires a square matrix");
    if (m.rows() == 1) return {Complex(m(0, 0), 0.0)};
    DenseMatrix a = m;
    detail::balance(a);
    detail::to_hessenberg(a);
    return detail::hqr(a);
}

/// max |lambda| over all eigenvalues.
inline double spectral_radius(const DenseMatrix& m) {
    double r = 0.0;
    for (const Complex& ev : eigenvalues(m)) r = std::max(r, std::abs(ev));
    return r;
}

/// max Re(lambda) over all eigenvalues.
inline double spectral_abscissa(const DenseMatrix& m) {
    double r = -std::numeric_limits<double>::infinity();
    for (const Complex& ev : eigenvalues(m)) r = std::max(r, ev.real());
    return r;
}

/// Largest singular value (operator 2-norm).
inline double spectral_norm(const DenseMatrix& m) {
    const DenseMatrix s =
        m.rows() <= m.cols() ? m * m.transpose() : m.transpose() * m;
    double top = 0.0;
    for (double d : detail::jacobi_symmetric_eigenvalues(s)) top = std::max(top, d);
    return std::sqrt(std::max(top, 0.0));
}

} // namespace pinsync
