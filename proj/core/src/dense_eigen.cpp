#include "amodelay/dense_eigen.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include "amodelay/errors.hpp"

namespace amodelay {

void hessenberg_reduce(Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    for (Eigen::Index k = 0; k + 2 < n; ++k) {
        const Eigen::Index m = n - k - 1;
        Eigen::VectorXd v = a.col(k).tail(m);
        const double tail = v.tail(m - 1).norm();
        if (tail == 0.0) continue;
        const double alpha = std::hypot(v(0), tail);
        v(0) += v(0) >= 0.0 ? alpha : -alpha;
        v /= v.norm();
        a.bottomRows(m) -= 2.0 * v * (v.transpose() * a.bottomRows(m));
        a.rightCols(m) -= 2.0 * (a.rightCols(m) * v) * v.transpose();
        a.col(k).tail(m - 1).setZero();
    }
}

namespace {

double sign(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Francis double-shift QR on an upper Hessenberg matrix (1-based indexing in
// the algorithm body). Eigenvalues are written to wr/wi in deflation order.
bool hqr(Eigen::MatrixXd& h, std::vector<double>& wr, std::vector<double>& wi, int max_its) {
    const int n = static_cast<int>(h.rows());
    auto a = [&](int i, int j) -> double& { return h(i - 1, j - 1); };
    wr.assign(n + 1, 0.0);
    wi.assign(n + 1, 0.0);

    double anorm = 0.0;
    for (int i = 1; i <= n; ++i)
        for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(a(i, j));

    int nn = n;
    double t = 0.0;
    double p = 0, q = 0, r = 0, s = 0, w = 0, x = 0, y = 0, z = 0;
    while (nn >= 1) {
        int its = 0;
        int l;
        do {
            for (l = nn; l >= 2; --l) {
                s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= DBL_EPSILON * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            x = a(nn, nn);
            if (l == nn) {
                wr[nn] = x + t;
                wi[nn--] = 0.0;
            } else {
                y = a(nn - 1, nn - 1);
                w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign(z, p);
                        wr[nn - 1] = wr[nn] = x + z;
                        if (z != 0.0) wr[nn] = x - w / z;
                        wi[nn - 1] = wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = wr[nn] = x + p;
                        wi[nn - 1] = -(wi[nn] = z);
                    }
                    nn -= 2;
                } else {
                    if (its == max_its) {
                        // Unfinished values are reported as NaN.
                        for (int i = 1; i <= nn; ++i) wr[i] = wi[i] = std::numeric_limits<double>::quiet_NaN();
                        return false;
                    }
                    if (its > 0 && its % 10 == 0) {
                        t += x;
                        for (int i = 1; i <= nn; ++i) a(i, i) -= x;
                        s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                                                        std::abs(a(m + 1, m + 1)));
                        if (u <= DBL_EPSILON * v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k != nn - 1) r = a(k + 2, k - 1);
                            if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        if ((s = sign(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
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
                            const int mmin = nn < k + 3 ? nn : k + 3;
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
    return true;
}

}  // namespace

Eigen::VectorXcd inverse_iteration(const Eigen::MatrixXd& M, Complex lambda, int iterations) {
    const Eigen::Index n = M.rows();
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    // A tiny offset keeps the shifted matrix numerically invertible.
    const Complex shift = lambda + Complex(1e-10 * scale, 1e-10 * scale);
    Eigen::MatrixXcd B = M.cast<Complex>();
    B.diagonal().array() -= shift;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(B);
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(1.0 + 0.1 * static_cast<double>(i % 7), 0.3);
    v.normalize();
    for (int it = 0; it < iterations; ++it) {
        v = lu.solve(v);
        const double nv = v.norm();
        if (!(nv > 0.0) || !std::isfinite(nv)) break;
        v /= nv;
    }
    return v;
}

EigenSet dense_eigensolver(const Eigen::MatrixXd& M, const DenseEigenOptions& opts,
                           const std::string& label) {
    if (M.rows() != M.cols()) throw ConfigError("dense_eigensolver needs a square matrix");
    if (M.rows() > 1024) throw ConfigError("dense_eigensolver supports dimension <= 1024");
    if (!M.allFinite()) throw NumericalError("dense_eigensolver: matrix has non-finite entries");
    EigenSet out;
    out.label = label;
    const int n = static_cast<int>(M.rows());
    if (n == 0) return out;

    Eigen::MatrixXd h = M;
    hessenberg_reduce(h);
    std::vector<double> wr, wi;
    out.converged = hqr(h, wr, wi, opts.max_iterations_per_value);
    for (int i = 1; i <= n; ++i) {
        if (std::isnan(wr[i])) continue;
        out.values.emplace_back(wr[i], wi[i]);
    }
    if (opts.residuals) {
        for (const Complex& lam : out.values) {
            Eigen::VectorXcd v = inverse_iteration(M, lam);
            const double res = (M.cast<Complex>() * v - lam * v).norm() / v.norm();
            out.vectors.push_back(std::move(v));
            out.residuals.push_back(res);
        }
    }
    return out;
}

double multiset_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    std::vector<char> used(b.size(), 0);
    double worst = 0.0;
    for (const Complex& x : a) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(x - b[j]);
            if (d < best) {
                best = d;
                bi = j;
            }
        }
        used[bi] = 1;
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace amodelay
