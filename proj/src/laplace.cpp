#include "gbmlap/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace gbmlap::laplace {

namespace {

using CPoly = std::vector<cplx>;  // ascending powers

CPoly multiply(const CPoly& a, const CPoly& b) {
    CPoly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

// Coefficients of P(p + t) in powers of t (Horner-style Taylor shift).
CPoly taylor_shift(const std::vector<double>& c, cplx p) {
    CPoly b(c.begin(), c.end());
    const std::size_t n = b.size();
    for (std::size_t k = 0; k + 1 < n; ++k) {
        for (std::size_t j = n - 1; j-- > k;) b[j] += p * b[j + 1];
    }
    return b;
}

// First `count` coefficients of num / den as power series (den[0] != 0).
CPoly series_divide(const CPoly& num, const CPoly& den, std::size_t count) {
    CPoly q(count, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
        cplx s = k < num.size() ? num[k] : cplx(0.0);
        for (std::size_t j = 1; j <= k && j < den.size(); ++j) s -= den[j] * q[k - j];
        q[k] = s / den[0];
    }
    return q;
}

struct PoleSite {
    cplx value;
    int multiplicity;
};

std::vector<PoleTerm> decompose(const pade::RationalApproximant& r, const std::vector<PoleSite>& sites) {
    const int dd = poly::degree(r.den);
    const double lead = r.den[static_cast<std::size_t>(dd)];
    std::vector<PoleTerm> out;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const cplx p = sites[i].value;
        const auto m = static_cast<std::size_t>(sites[i].multiplicity);
        // Remaining denominator factor lead * prod_k (t + p - p_k)^{m_k}.
        CPoly g{cplx(lead)};
        for (std::size_t k = 0; k < sites.size(); ++k) {
            if (k == i) continue;
            const CPoly lin{p - sites[k].value, 1.0};
            for (int e = 0; e < sites[k].multiplicity; ++e) g = multiply(g, lin);
        }
        const auto h = series_divide(taylor_shift(r.num, p), g, m);
        PoleTerm term;
        term.pole = p;
        term.A.resize(m);
        for (std::size_t j = 1; j <= m; ++j) term.A[j - 1] = h[m - j];
        out.push_back(std::move(term));
    }
    return out;
}

}  // namespace

std::vector<PoleTerm> partial_fractions(const pade::RationalApproximant& r, bool merge_clusters) {
    if (!r.constructible) throw Error(ErrorCode::Domain, "cannot decompose an unconstructible approximant");
    if (!r.proper()) throw Error(ErrorCode::Domain, "residue inversion needs a proper rational (N < D)");
    std::vector<PoleSite> sites;
    if (merge_clusters) {
        for (const auto& root : poly::clustered_roots(r.den, 1e-7, true)) sites.push_back({root.value, root.multiplicity});
    } else if (r.analysed) {
        for (const auto& p : r.poles) sites.push_back({p.value, p.multiplicity});
    } else {
        for (const auto& root : poly::clustered_roots(r.den)) sites.push_back({root.value, root.multiplicity});
    }
    int total = 0;
    for (const auto& s : sites) total += s.multiplicity;
    if (total != poly::degree(r.den)) throw Error(ErrorCode::Numeric, "pole multiplicities do not match the denominator degree");
    return decompose(r, sites);
}

cplx ExponentialSum::evaluate_complex(double r) const {
    cplx s = 0.0;
    for (const auto& t : terms) {
        cplx pw = 0.0;
        for (std::size_t k = t.coeffs.size(); k-- > 0;) pw = pw * r + t.coeffs[k];
        s += pw * std::exp(t.pole * r);
    }
    return s;
}

cplx ExponentialSum::laplace(cplx q) const {
    cplx s = 0.0;
    for (const auto& t : terms) {
        const cplx inv = 1.0 / (q - t.pole);
        cplx pw = inv;
        double fact = 1.0;
        for (std::size_t k = 0; k < t.coeffs.size(); ++k) {
            if (k > 0) fact *= static_cast<double>(k);
            s += t.coeffs[k] * fact * pw;
            pw *= inv;
        }
    }
    return s;
}

double ExponentialSum::max_pole_real() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms) m = std::max(m, t.pole.real());
    return m;
}

ExponentialSum to_exponential_sum(const std::vector<PoleTerm>& pf) {
    ExponentialSum s;
    for (const auto& t : pf) {
        ExponentialSum::Term term;
        term.pole = t.pole;
        double fact = 1.0;
        for (std::size_t j = 0; j < t.A.size(); ++j) {
            if (j > 0) fact *= static_cast<double>(j);
            term.coeffs.push_back(t.A[j] / fact);
        }
        s.terms.push_back(std::move(term));
    }
    return s;
}

double round_trip_error(const ExponentialSum& s, const pade::RationalApproximant& r, int count, double q_max) {
    // Measured against the largest |L| sampled: a pointwise ratio is
    // meaningless where a numerator zero makes L cross the axis.
    double scale = 0.0, worst = 0.0;
    for (int i = 0; i < count; ++i) {
        const double q = count > 1 ? q_max * i / (count - 1) : 0.0;
        const double v = r.evaluate(q);
        scale = std::max(scale, std::abs(v));
        worst = std::max(worst, std::abs(s.laplace(cplx(q, 0.0)) - v));
    }
    return scale > 0.0 ? worst / scale : worst;
}

ExponentialSum residue_invert(const pade::RationalApproximant& r, bool* merged) {
    constexpr double tol = 1e-9;
    auto first = to_exponential_sum(partial_fractions(r, false));
    const double e1 = round_trip_error(first, r);
    if (e1 <= tol) {
        if (merged) *merged = false;
        return first;
    }
    double e2 = std::numeric_limits<double>::infinity();
    try {
        auto second = to_exponential_sum(partial_fractions(r, true));
        e2 = round_trip_error(second, r);
        if (e2 <= tol) {
            if (merged) *merged = true;
            return second;
        }
    } catch (const Error&) {
    }
    std::ostringstream msg;
    msg << "partial-fraction round trip failed for P(" << r.N << "," << r.D << "): residual " << e1
        << " (separate roots), " << e2 << " (merged clusters)";
    throw Error(ErrorCode::Numeric, msg.str());
}

double numeric_invert_at(const std::function<cplx(cplx)>& L, double r, const InversionConfig& cfg,
                         double abscissa_floor, double* gap) {
    if (!(r > 0.0)) throw Error(ErrorCode::Domain, "numeric inversion needs r > 0");
    if (cfg.terms < 5 || cfg.terms % 2 == 0) throw Error(ErrorCode::Config, "inversion terms must be odd and >= 5");
    if (!(cfg.tolerance > 0.0 && cfg.tolerance < 1.0)) throw Error(ErrorCode::Config, "inversion tolerance must lie in (0,1)");
    if (!(cfg.period_factor > 1.0)) throw Error(ErrorCode::Config, "period factor must exceed 1");

    const int M = (cfg.terms - 1) / 2;
    const int n = cfg.terms;
    const double T = cfg.period_factor * r;
    const double gamma = abscissa_floor - std::log(cfg.tolerance) / (2.0 * T);
    const double pi = std::numbers::pi;

    std::vector<cplx> a(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) a[static_cast<std::size_t>(k)] = L(cplx(gamma, pi * k / T));
    a[0] *= 0.5;

    // Quotient-difference table.
    std::vector<std::vector<cplx>> e(static_cast<std::size_t>(M + 1), std::vector<cplx>(static_cast<std::size_t>(n), 0.0));
    std::vector<std::vector<cplx>> q(static_cast<std::size_t>(M + 1), std::vector<cplx>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n - 1; ++i) q[1][static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i + 1)] / a[static_cast<std::size_t>(i)];
    for (int rr = 1; rr <= M; ++rr) {
        const int mr = n - 2 * rr;
        auto& er = e[static_cast<std::size_t>(rr)];
        const auto& ep = e[static_cast<std::size_t>(rr - 1)];
        const auto& qr = q[static_cast<std::size_t>(rr)];
        for (int i = 0; i < mr; ++i) er[static_cast<std::size_t>(i)] = qr[static_cast<std::size_t>(i + 1)] - qr[static_cast<std::size_t>(i)] + ep[static_cast<std::size_t>(i + 1)];
        if (rr < M) {
            auto& qn = q[static_cast<std::size_t>(rr + 1)];
            for (int i = 0; i < mr - 1; ++i) {
                qn[static_cast<std::size_t>(i)] = qr[static_cast<std::size_t>(i + 1)] * er[static_cast<std::size_t>(i + 1)] / er[static_cast<std::size_t>(i)];
            }
        }
    }
    std::vector<cplx> d(static_cast<std::size_t>(2 * M + 1));
    d[0] = a[0];
    for (int rr = 1; rr <= M; ++rr) {
        d[static_cast<std::size_t>(2 * rr - 1)] = -q[static_cast<std::size_t>(rr)][0];
        d[static_cast<std::size_t>(2 * rr)] = -e[static_cast<std::size_t>(rr)][0];
    }

    const cplx z = std::exp(cplx(0.0, pi * r / T));
    std::vector<cplx> A{0.0, d[0]}, B{1.0, 1.0};
    for (int k = 1; k < 2 * M; ++k) {
        A.push_back(A.back() + d[static_cast<std::size_t>(k)] * z * A[A.size() - 2]);
        B.push_back(B.back() + d[static_cast<std::size_t>(k)] * z * B[B.size() - 2]);
    }
    // Remainder estimate for the tail of the continued fraction.
    const cplx h2M = 0.5 * (1.0 + (d[static_cast<std::size_t>(2 * M - 1)] - d[static_cast<std::size_t>(2 * M)]) * z);
    const cplx R = -h2M * (1.0 - std::sqrt(1.0 + d[static_cast<std::size_t>(2 * M)] * z / (h2M * h2M)));
    A.push_back(A.back() + R * A[A.size() - 2]);
    B.push_back(B.back() + R * B[B.size() - 2]);

    const double pref = std::exp(gamma * r) / T;
    const double value = pref * (A.back() / B.back()).real();
    const double prev = pref * (A[A.size() - 2] / B[B.size() - 2]).real();
    const double g = std::abs(value - prev);
    if (gap) *gap = g;
    if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << "numeric inversion diverged at r=" << r;
        throw Error(ErrorCode::Inversion, msg.str());
    }
    return value;
}

RadialFunction numeric_invert(const std::function<cplx(cplx)>& L, const RadialGrid& grid, const InversionConfig& cfg,
                              double abscissa_floor, NumericDiagnostics* diag) {
    grid.validate();
    std::vector<double> vals(grid.points.size());
    NumericDiagnostics nd;
    double scale = 0.0;
    std::vector<double> gaps(grid.points.size());
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        double g = 0.0;
        vals[i] = numeric_invert_at(L, grid.points[i], cfg, abscissa_floor, &g);
        gaps[i] = g;
        scale = std::max(scale, std::abs(vals[i]));
        nd.evaluations += cfg.terms;
    }
    // A gap comparable to the function itself means the acceleration did
    // not settle; report it as divergence rather than returning noise.
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        nd.max_gap = std::max(nd.max_gap, gaps[i]);
        if (gaps[i] > 1e-2 * std::max(scale, 1e-300)) {
            std::ostringstream msg;
            msg << "series acceleration did not settle at r=" << grid.points[i] << " (gap " << gaps[i]
                << ", scale " << scale << ")";
            if (diag) *diag = nd;
            throw Error(ErrorCode::Inversion, msg.str());
        }
    }
    if (diag) *diag = nd;
    return RadialFunction(grid, std::move(vals), RadialRole::ChiSquared);
}

RadialFunction density_postprocess(const RadialFunction& chi2, DensityDiagnostics* diag, double clip_rel,
                                   double reject_rel) {
    chi2.grid.validate();
    if (chi2.values.size() != chi2.grid.points.size()) throw Error(ErrorCode::Domain, "density values do not match the grid");
    RadialFunction out = chi2;
    out.role = RadialRole::ChiSquared;
    double vmax = 0.0, vmin = 0.0;
    for (double v : out.values) {
        if (!std::isfinite(v)) throw Error(ErrorCode::ReconstructionInvalid, "density contains non-finite values");
        vmax = std::max(vmax, v);
        vmin = std::min(vmin, v);
    }
    if (!(vmax > 0.0)) throw Error(ErrorCode::ReconstructionInvalid, "density has no positive values");
    DensityDiagnostics d;
    d.most_negative = vmin / vmax;
    if (-vmin > reject_rel * vmax) {
        std::ostringstream msg;
        msg << "negative lobe of depth " << -vmin / vmax << " relative to the maximum";
        throw Error(ErrorCode::ReconstructionInvalid, msg.str());
    }
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        double& v = out.values[i];
        if (v >= 0.0) continue;
        out.valid[i] = false;
        if (-v <= clip_rel * vmax) {
            v = 0.0;
            ++d.clipped;
        } else {
            ++d.masked;
        }
    }
    // Trapezoid on [0, r_last] with chi^2(0) = 0.
    const auto& r = out.grid.points;
    double s = 0.5 * r[0] * out.values[0];
    for (std::size_t i = 1; i < r.size(); ++i) s += 0.5 * (r[i] - r[i - 1]) * (out.values[i] + out.values[i - 1]);
    d.integral = s;
    d.normalization_deviation = std::abs(s - 1.0);
    if (diag) *diag = d;
    return out;
}

}  // namespace gbmlap::laplace
