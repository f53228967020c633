#include "gbmlap/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "gbmlap/core.hpp"

namespace gbmlap::poly {

double evaluate(const std::vector<double>& c, double x) {
    double s = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) s = s * x + c[k];
    return s;
}

cplx evaluate(const std::vector<double>& c, cplx x) {
    cplx s = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) s = s * x + c[k];
    return s;
}

std::vector<double> derivative(const std::vector<double>& c) {
    if (c.size() <= 1) return {0.0};
    std::vector<double> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
    return d;
}

double magnitude_scale(const std::vector<double>& c, cplx x) {
    double s = 0.0, p = 1.0;
    const double ax = std::abs(x);
    for (double ck : c) {
        s += std::abs(ck) * p;
        p *= ax;
    }
    return s;
}

int degree(const std::vector<double>& c) {
    for (std::size_t k = c.size(); k-- > 0;) {
        if (c[k] != 0.0) return static_cast<int>(k);
    }
    return -1;
}

namespace {

using Mat = std::vector<std::vector<double>>;

void balance(Mat& a) {
    const double radix = 2.0, sqrdx = radix * radix;
    const std::size_t n = a.size();
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) {
                    c += std::abs(a[j][i]);
                    r += std::abs(a[i][j]);
                }
            }
            if (c != 0.0 && r != 0.0) {
                double g = r / radix, f = 1.0;
                const double s = c + r;
                while (c < g) {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while (c > g) {
                    f /= radix;
                    c /= sqrdx;
                }
                if ((c + r) / f < 0.95 * s) {
                    done = false;
                    g = 1.0 / f;
                    for (std::size_t j = 0; j < n; ++j) a[i][j] *= g;
                    for (std::size_t j = 0; j < n; ++j) a[j][i] *= f;
                }
            }
        }
    }
}

double sign(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Eigenvalues of an upper Hessenberg matrix (Francis double-shift QR with
// exceptional shifts), following the classic EISPACK hqr organisation.
std::vector<cplx> hessenberg_eigenvalues(Mat a) {
    const int n = static_cast<int>(a.size());
    std::vector<double> wr(n), wi(n);
    double anorm = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a[i][j]);
    }
    int nn = n - 1;
    double t = 0.0;
    double p = 0, q = 0, r = 0, s = 0, w = 0, x = 0, y = 0, z = 0;
    while (nn >= 0) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l >= 1; --l) {
                s = std::abs(a[l - 1][l - 1]) + std::abs(a[l][l]);
                if (s == 0.0) s = anorm;
                if (std::abs(a[l][l - 1]) + s == s) {
                    a[l][l - 1] = 0.0;
                    break;
                }
            }
            x = a[nn][nn];
            if (l == nn) {
                wr[nn] = x + t;
                wi[nn--] = 0.0;
            } else {
                y = a[nn - 1][nn - 1];
                w = a[nn][nn - 1] * a[nn - 1][nn];
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
                    if (its == 60) throw Error(ErrorCode::Numeric, "QR iteration did not converge for polynomial roots");
                    if (its == 10 || its == 20 || its == 40) {
                        t += x;
                        for (int i = 0; i <= nn; ++i) a[i][i] -= x;
                        s = std::abs(a[nn][nn - 1]) + std::abs(a[nn - 1][nn - 2]);
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m = nn - 2;
                    for (; m >= l; --m) {
                        z = a[m][m];
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r - s;
                        r = a[m + 2][m + 1];
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a[m][m - 1]) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a[m - 1][m - 1]) + std::abs(z) + std::abs(a[m + 1][m + 1]));
                        if (u + v == v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a[i][i - 2] = 0.0;
                        if (i != m + 2) a[i][i - 3] = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = 0.0;
                            if (k != nn - 1) r = a[k + 2][k - 1];
                            if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        if ((s = sign(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
                            if (k == m) {
                                if (l != m) a[k][k - 1] = -a[k][k - 1];
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {
                                p = a[k][j] + q * a[k + 1][j];
                                if (k != nn - 1) {
                                    p += r * a[k + 2][j];
                                    a[k + 2][j] -= p * z;
                                }
                                a[k + 1][j] -= p * y;
                                a[k][j] -= p * x;
                            }
                            const int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i <= mmin; ++i) {
                                p = x * a[i][k] + y * a[i][k + 1];
                                if (k != nn - 1) {
                                    p += z * a[i][k + 2];
                                    a[i][k + 2] -= p * r;
                                }
                                a[i][k + 1] -= p * q;
                                a[i][k] -= p;
                            }
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    std::vector<cplx> out(n);
    for (int i = 0; i < n; ++i) out[i] = {wr[i], wi[i]};
    return out;
}

cplx newton_polish(const std::vector<double>& c, cplx z, int iterations) {
    const auto dc = derivative(c);
    double best = std::abs(evaluate(c, z));
    for (int it = 0; it < iterations && best > 0.0; ++it) {
        const cplx d = evaluate(dc, z);
        if (d == 0.0) break;
        const cplx zn = z - evaluate(c, z) / d;
        const double fn = std::abs(evaluate(c, zn));
        if (!(fn < best)) break;
        z = zn;
        best = fn;
    }
    return z;
}

void conjugate_symmetrise(std::vector<Root>& rs) {
    for (auto& r : rs) {
        if (std::abs(r.value.imag()) <= 1e-12 * std::max(1.0, std::abs(r.value))) r.value = {r.value.real(), 0.0};
    }
    std::vector<bool> used(rs.size(), false);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (used[i] || rs[i].value.imag() <= 0.0) continue;
        std::size_t best = rs.size();
        double bd = 1e300;
        for (std::size_t j = 0; j < rs.size(); ++j) {
            if (j == i || used[j] || rs[j].value.imag() >= 0.0 || rs[j].multiplicity != rs[i].multiplicity) continue;
            const double d = std::abs(rs[j].value - std::conj(rs[i].value));
            if (d < bd) {
                bd = d;
                best = j;
            }
        }
        if (best < rs.size()) {
            const cplx avg = 0.5 * (rs[i].value + std::conj(rs[best].value));
            rs[i].value = avg;
            rs[best].value = std::conj(avg);
            used[i] = used[best] = true;
        }
    }
}

}  // namespace

std::vector<cplx> roots(const std::vector<double>& c_in) {
    const int n = degree(c_in);
    if (n <= 0) return {};
    std::vector<double> c(c_in.begin(), c_in.begin() + n + 1);
    // Roots at the origin are split off exactly.
    std::size_t zeros = 0;
    while (zeros < c.size() && c[zeros] == 0.0) ++zeros;
    std::vector<double> reduced(c.begin() + static_cast<long>(zeros), c.end());
    const int m = static_cast<int>(reduced.size()) - 1;
    std::vector<cplx> out(zeros, cplx(0.0, 0.0));
    if (m == 0) return out;
    Mat a(m, std::vector<double>(m, 0.0));
    const double lead = reduced[m];
    for (int j = 0; j < m; ++j) a[0][j] = -reduced[m - 1 - j] / lead;
    for (int i = 1; i < m; ++i) a[i][i - 1] = 1.0;
    balance(a);
    auto ev = hessenberg_eigenvalues(a);
    for (auto& z : ev) out.push_back(newton_polish(c, z, 8));
    return out;
}

std::vector<Root> clustered_roots(const std::vector<double>& c, double cluster_tol, bool force_merge) {
    auto raw = roots(c);
    std::sort(raw.begin(), raw.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    std::vector<Root> out;
    std::vector<bool> used(raw.size(), false);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (used[i]) continue;
        const double loose = 1e-3 * std::max(1.0, std::abs(raw[i]));
        std::vector<std::size_t> members{i};
        for (std::size_t j = i + 1; j < raw.size(); ++j) {
            if (!used[j] && std::abs(raw[j] - raw[i]) <= loose) members.push_back(j);
        }
        bool merged = false;
        const int m = static_cast<int>(members.size());
        if (m >= 2) {
            cplx z0 = 0.0;
            for (auto k : members) z0 += raw[k];
            z0 /= static_cast<double>(m);
            // Newton on the (m-1)-th derivative, where an m-fold root is simple.
            std::vector<std::vector<double>> ders{c};
            for (int k = 1; k < m; ++k) ders.push_back(derivative(ders.back()));
            const cplx zs = newton_polish(ders[static_cast<std::size_t>(m - 1)], z0, 50);
            bool ok = std::abs(zs - z0) <= loose;
            for (int k = 0; k < m - 1 && ok && !force_merge; ++k) {
                const auto& dk = ders[static_cast<std::size_t>(k)];
                ok = std::abs(evaluate(dk, zs)) <= 1e-10 * magnitude_scale(dk, zs);
            }
            if (ok) {
                out.push_back({zs, m, 0.0});
                for (auto k : members) used[k] = true;
                merged = true;
            }
        }
        if (!merged) {
            // Only numerically coincident roots share an entry.
            const double tight = cluster_tol * std::max(1.0, std::abs(raw[i]));
            int mult = 0;
            for (std::size_t j = i; j < raw.size(); ++j) {
                if (!used[j] && std::abs(raw[j] - raw[i]) <= tight) {
                    used[j] = true;
                    ++mult;
                }
            }
            out.push_back({raw[i], mult, 0.0});
        }
    }
    conjugate_symmetrise(out);
    for (auto& r : out) {
        const double sc = magnitude_scale(c, r.value);
        r.residual = sc > 0 ? std::abs(evaluate(c, r.value)) / sc : 0.0;
    }
    return out;
}

}  // namespace gbmlap::poly
