#include "gbmlap/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gbmlap/core.hpp"

namespace gbmlap::linalg {

int sturm_count(const SymTridiag& t, double x) {
    const std::size_t n = t.size();
    int count = 0;
    double d = t.diag[0] - x;
    const double tiny = std::numeric_limits<double>::min();
    for (std::size_t i = 0;; ++i) {
        if (d == 0.0) d = -tiny;
        if (d < 0.0) ++count;
        if (i + 1 == n) break;
        d = (t.diag[i + 1] - x) - t.off[i] * t.off[i] / d;
    }
    return count;
}

std::pair<double, double> gershgorin(const SymTridiag& t) {
    const std::size_t n = t.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(t.off[i - 1]);
        if (i + 1 < n) radius += std::abs(t.off[i]);
        lo = std::min(lo, t.diag[i] - radius);
        hi = std::max(hi, t.diag[i] + radius);
    }
    return {lo, hi};
}

std::vector<double> bisect_eigenvalues(const std::function<int(double)>& count, double lo,
                                       double hi, int k, int max_iterations) {
    if (k <= 0) return {};
    std::vector<double> lower(k, lo), upper(k, hi);
    const double eps = std::numeric_limits<double>::epsilon();
    const double abs_floor = 4.0 * std::numeric_limits<double>::min();
    std::vector<double> out(k);
    for (int j = 0; j < k; ++j) {
        if (j > 0) lower[j] = std::max(lower[j], lower[j - 1]);
        int it = 0;
        while (true) {
            const double a = lower[j], b = upper[j];
            const double width = b - a;
            const double scale = std::max(std::abs(a), std::abs(b));
            if (width <= 2.0 * eps * scale + abs_floor) break;
            const double mid = a + 0.5 * width;
            if (mid <= a || mid >= b) break;
            if (++it > max_iterations) {
                throw Error(ErrorCode::Solver, "bisection did not converge for eigenvalue " +
                                                   std::to_string(j));
            }
            const int c = count(mid);
            for (int m = j; m < k; ++m) {
                if (c > m) {
                    upper[m] = std::min(upper[m], mid);
                } else {
                    lower[m] = std::max(lower[m], mid);
                }
            }
        }
        out[j] = 0.5 * (lower[j] + upper[j]);
    }
    return out;
}

std::vector<double> lowest_eigenvalues(const SymTridiag& t, int k) {
    if (t.size() == 0) return {};
    k = std::min<int>(k, static_cast<int>(t.size()));
    auto [lo, hi] = gershgorin(t);
    const double pad = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    return bisect_eigenvalues([&t](double x) { return sturm_count(t, x); }, lo - pad, hi + pad, k);
}

std::vector<double> solve_tridiagonal(std::vector<double> dl, std::vector<double> d,
                                      std::vector<double> du, std::vector<double> b) {
    const std::size_t n = d.size();
    if (n == 0) return {};
    if (n == 1) return {b[0] / (d[0] != 0.0 ? d[0] : std::numeric_limits<double>::min())};
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm = std::max(norm, std::abs(d[i]));
    for (std::size_t i = 0; i + 1 < n; ++i) norm = std::max({norm, std::abs(dl[i]), std::abs(du[i])});
    const double tiny = std::max(norm, 1.0) * std::numeric_limits<double>::epsilon();

    std::vector<double> du2(n, 0.0);  // second superdiagonal created by pivoting
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            if (d[i] == 0.0) d[i] = tiny;
            const double fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
            du2[i] = 0.0;
        } else {
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            const double temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            const double tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - fact * b[i + 1];
        }
    }
    if (d[n - 1] == 0.0) d[n - 1] = tiny;
    b[n - 1] /= d[n - 1];
    b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t ii = n - 2; ii-- > 0;) {
        b[ii] = (b[ii] - du[ii] * b[ii + 1] - du2[ii] * b[ii + 2]) / d[ii];
    }
    return b;
}

std::vector<double> inverse_iteration(const SymTridiag& t, double lambda, int iterations) {
    const std::size_t n = t.size();
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = t.diag[i] - lambda;
    // A deterministic, slowly varying start vector that is not orthogonal to
    // low-lying smooth modes.
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.1 * std::sin(0.7 * static_cast<double>(i));
    for (int it = 0; it < iterations; ++it) {
        x = solve_tridiagonal(t.off, diag, t.off, x);
        double s = 0.0;
        for (double v : x) s += v * v;
        s = std::sqrt(s);
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw Error(ErrorCode::Solver, "inverse iteration produced a degenerate vector");
        }
        for (double& v : x) v /= s;
    }
    return x;
}

DenseSolve solve_dense(const Matrix& a_in, const std::vector<double>& b_in) {
    const std::size_t n = b_in.size();
    Matrix a = a_in;
    std::vector<double> b = b_in;
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    DenseSolve out;
    double pmax = 0.0, pmin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
        }
        std::swap(a[k], a[piv]);
        std::swap(perm[k], perm[piv]);
        const double p = a[k][k];
        pmax = std::max(pmax, std::abs(p));
        pmin = std::min(pmin, std::abs(p));
        if (p == 0.0) {
            out.singular = true;
            out.pivot_ratio = std::numeric_limits<double>::infinity();
            return out;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i][k] / p;
            a[i][k] = f;
            for (std::size_t j = k + 1; j < n; ++j) a[i][j] -= f * a[k][j];
        }
    }
    out.pivot_ratio = n == 0 ? 1.0 : pmax / pmin;

    auto lu_solve = [&](const std::vector<double>& rhs) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = rhs[perm[i]];
            for (std::size_t j = 0; j < i; ++j) s -= a[i][j] * y[j];
            y[i] = s;
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double s = y[ii];
            for (std::size_t j = ii + 1; j < n; ++j) s -= a[ii][j] * y[j];
            y[ii] = s / a[ii][ii];
        }
        return y;
    };

    out.x = lu_solve(b);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        long double s = b_in[i];
        for (std::size_t j = 0; j < n; ++j) s -= static_cast<long double>(a_in[i][j]) * out.x[j];
        r[i] = static_cast<double>(s);
    }
    const auto dx = lu_solve(r);
    for (std::size_t i = 0; i < n; ++i) out.x[i] += dx[i];
    return out;
}

std::vector<double> least_squares(const Matrix& a_in, const std::vector<double>& b_in) {
    const std::size_t m = a_in.size();
    if (m == 0) return {};
    const std::size_t n = a_in[0].size();
    if (m < n) throw Error(ErrorCode::Numeric, "least squares needs at least as many rows as columns");
    Matrix a = a_in;
    std::vector<double> b = b_in;
    for (std::size_t k = 0; k < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm += a[i][k] * a[i][k];
        norm = std::sqrt(norm);
        if (norm == 0.0) throw Error(ErrorCode::Numeric, "rank-deficient least-squares system");
        const double alpha = a[k][k] > 0 ? -norm : norm;
        std::vector<double> v(m - k);
        for (std::size_t i = k; i < m; ++i) v[i - k] = a[i][k];
        v[0] -= alpha;
        double vnorm2 = 0.0;
        for (double x : v) vnorm2 += x * x;
        if (vnorm2 == 0.0) continue;
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += v[i - k] * a[i][j];
            s = 2.0 * s / vnorm2;
            for (std::size_t i = k; i < m; ++i) a[i][j] -= s * v[i - k];
        }
        double s = 0.0;
        for (std::size_t i = k; i < m; ++i) s += v[i - k] * b[i];
        s = 2.0 * s / vnorm2;
        for (std::size_t i = k; i < m; ++i) b[i] -= s * v[i - k];
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a[ii][j] * x[j];
        if (a[ii][ii] == 0.0) throw Error(ErrorCode::Numeric, "rank-deficient least-squares system");
        x[ii] = s / a[ii][ii];
    }
    return x;
}

}  // namespace gbmlap::linalg
