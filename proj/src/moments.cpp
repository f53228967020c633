#include "gbmlap/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gbmlap/interp.hpp"
#include "gbmlap/laplace.hpp"
#include "gbmlap/linalg.hpp"

namespace gbmlap::moments {

const char* to_string(OddFamilyKind k) {
    switch (k) {
        case OddFamilyKind::MonotoneLogInterp: return "monotone-log-interp";
        case OddFamilyKind::ConstrainedFit: return "constrained-fit";
        case OddFamilyKind::MaxentClosure: return "maxent-closure";
        case OddFamilyKind::ExactOracle: return "exact-oracle";
    }
    return "unknown";
}

OddFamilyKind odd_family_from_string(const std::string& s) {
    for (auto k : {OddFamilyKind::MonotoneLogInterp, OddFamilyKind::ConstrainedFit, OddFamilyKind::MaxentClosure,
                   OddFamilyKind::ExactOracle}) {
        if (s == to_string(k)) return k;
    }
    throw Error(ErrorCode::Config, "unknown odd-moment family '" + s + "'");
}

void OddFamily::validate() const {
    if (fit_degree < 1 || fit_degree > 6) throw Error(ErrorCode::Config, "fit_degree must lie in 1..6");
    if (maxent_terms < 1 || maxent_terms > 6) throw Error(ErrorCode::Config, "maxent_terms must lie in 1..6");
    if (kind == OddFamilyKind::ExactOracle && !oracle) {
        throw Error(ErrorCode::Config, "exact-oracle family needs an oracle moment table");
    }
}

namespace {

std::vector<int> even_orders(const MomentTable& t, int max_order) {
    std::vector<int> ev;
    for (int n = 0; n <= max_order; n += 2) {
        if (!t.has(n)) {
            throw Error(ErrorCode::InputIncomplete, "even moment mu_" + std::to_string(n) + " is missing");
        }
        ev.push_back(n);
    }
    return ev;
}

void check_evens(const MomentTable& t, const std::vector<int>& ev) {
    for (int n : ev) {
        const double v = t.value(n);
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(ErrorCode::Domain, "even moment mu_" + std::to_string(n) + " is not positive");
        }
    }
    for (std::size_t i = 1; i + 1 < ev.size(); ++i) {
        const double a = t.value(ev[i - 1]), b = t.value(ev[i]), c = t.value(ev[i + 1]);
        if (b * b > a * c * (1.0 + 1e-9)) {
            std::ostringstream msg;
            msg << "even moments are not log-convex at order " << ev[i] << " (mu^2 / product = " << b * b / (a * c)
                << "); odd completion is undefined";
            throw Error(ErrorCode::Domain, msg.str());
        }
    }
}

std::vector<double> odd_monotone(const MomentTable& t, const std::vector<int>& ev, int max_order) {
    std::vector<double> x, y;
    for (int n : ev) {
        x.push_back(n);
        y.push_back(std::log(t.value(n)));
    }
    const Pchip p(x, y);
    std::vector<double> out;
    for (int n = 1; n <= max_order; n += 2) out.push_back(std::exp(p(n)));
    return out;
}

std::vector<double> odd_constrained_fit(const MomentTable& t, const std::vector<int>& ev, int max_order, int degree) {
    const double y0 = std::log(t.value(0));
    const int deg = std::min<int>(degree, static_cast<int>(ev.size()) - 1);
    linalg::Matrix a;
    std::vector<double> b;
    for (std::size_t i = 1; i < ev.size(); ++i) {
        std::vector<double> row;
        for (int j = 1; j <= deg; ++j) row.push_back(std::pow(static_cast<double>(ev[i]), j));
        a.push_back(row);
        b.push_back(std::log(t.value(ev[i])) - y0);
    }
    const auto c = linalg::least_squares(a, b);
    std::vector<double> out;
    for (int n = 1; n <= max_order; n += 2) {
        double s = y0;
        for (int j = 1; j <= deg; ++j) s += c[static_cast<std::size_t>(j - 1)] * std::pow(static_cast<double>(n), j);
        out.push_back(std::exp(s));
    }
    return out;
}

// Composite Simpson moments of w(x) = x^2 exp(sum c_j x^j) on [0, 60].
struct MaxentQuadrature {
    static constexpr int intervals = 6000;
    static constexpr double x_max = 60.0;
    std::vector<double> x, wts;
    MaxentQuadrature() {
        const double h = x_max / intervals;
        for (int i = 0; i <= intervals; ++i) {
            x.push_back(i * h);
            const double s = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            wts.push_back(s * h / 3.0);
        }
    }
    std::vector<double> density(const std::vector<double>& c) const {
        std::vector<double> w(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            double e = 0.0;
            for (std::size_t j = c.size(); j-- > 0;) e = e * x[i] + c[j];
            w[i] = x[i] * x[i] * std::exp(std::min(e, 700.0));
        }
        return w;
    }
    double moment(const std::vector<double>& w, int k) const {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += wts[i] * std::pow(x[i], k) * w[i];
        return s;
    }
};

struct MaxentOutcome {
    bool ok = false;
    std::string why;
    std::vector<double> odd;
};

MaxentOutcome odd_maxent(const MomentTable& t, int max_order, int J) {
    MaxentOutcome out;
    if (!t.has(2 * J)) {
        out.why = "maxent closure with J=" + std::to_string(J) + " needs mu_" + std::to_string(2 * J);
        return out;
    }
    // Work in x = r / sqrt(mu_2) so the constraints are of order one.
    const double s = std::sqrt(t.value(2));
    std::vector<double> target;
    for (int j = 0; j <= J; ++j) target.push_back(t.value(2 * j) / std::pow(s, 2 * j));

    const MaxentQuadrature quad;
    const double b = std::sqrt(12.0);  // start from x^2 exp(-b x), whose second moment is 1
    std::vector<double> c(static_cast<std::size_t>(J) + 1, 0.0);
    c[0] = std::log(b * b * b / 2.0);
    c[1] = -b;

    auto log_misfit = [&](const std::vector<double>& m) {
        double n2 = 0.0;
        for (std::size_t k = 0; k < m.size(); ++k) {
            if (!(m[k] > 0.0) || !std::isfinite(m[k])) return std::numeric_limits<double>::infinity();
            const double d = std::log(m[k]) - std::log(target[k]);
            n2 += d * d;
        }
        return std::sqrt(n2);
    };
    auto moments_of = [&](const std::vector<double>& w) {
        std::vector<double> m;
        for (int j = 0; j <= J; ++j) m.push_back(quad.moment(w, 2 * j));
        return m;
    };

    bool converged = false;
    for (int it = 0; it < 100 && !converged; ++it) {
        const auto w = quad.density(c);
        const auto m = moments_of(w);
        double worst = 0.0;
        for (std::size_t k = 0; k < m.size(); ++k) worst = std::max(worst, std::abs(m[k] / target[k] - 1.0));
        if (worst < 1e-12) {
            converged = true;
            break;
        }
        // Newton on log moments: d log m_k / d c_j = int x^{2k+j} w / m_k.
        linalg::Matrix jac(static_cast<std::size_t>(J) + 1, std::vector<double>(static_cast<std::size_t>(J) + 1));
        std::vector<double> rhs(static_cast<std::size_t>(J) + 1);
        for (int k = 0; k <= J; ++k) {
            for (int j = 0; j <= J; ++j) {
                jac[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = quad.moment(w, 2 * k + j) / m[static_cast<std::size_t>(k)];
            }
            rhs[static_cast<std::size_t>(k)] = -(std::log(m[static_cast<std::size_t>(k)]) - std::log(target[static_cast<std::size_t>(k)]));
        }
        const auto step = linalg::solve_dense(jac, rhs);
        if (step.singular) {
            out.why = "maxent Newton system became singular";
            return out;
        }
        const double f0 = log_misfit(m);
        double lam = 1.0;
        std::vector<double> trial;
        bool accepted = false;
        while (lam > 1e-4) {
            trial = c;
            for (std::size_t j = 0; j < c.size(); ++j) trial[j] += lam * step.x[j];
            if (log_misfit(moments_of(quad.density(trial))) < f0) {
                accepted = true;
                break;
            }
            lam *= 0.5;
        }
        if (!accepted) {
            out.why = "maxent line search stalled";
            return out;
        }
        c = trial;
    }
    if (!converged) {
        out.why = "maxent Newton iteration did not converge in 100 steps";
        return out;
    }
    // The surrogate must be negligible at the end of the quadrature range,
    // measured against the highest moment it has to reproduce. A vanishing
    // (or marginally positive) leading coefficient is allowed when the lower
    // terms already make it decay there.
    const auto w = quad.density(c);
    const double tail = w[w.size() - 1] * std::pow(MaxentQuadrature::x_max, max_order + 1);
    if (!(tail < 1e-10 * quad.moment(w, max_order))) {
        out.why = "maxent surrogate is not negligible at the end of the quadrature range";
        return out;
    }
    for (int n = 1; n <= max_order; n += 2) out.odd.push_back(quad.moment(w, n) * std::pow(s, n));
    out.ok = true;
    return out;
}

}  // namespace

OddBracket odd_bracket(const MomentTable& t, int n) {
    OddBracket b;
    b.upper = std::numeric_limits<double>::infinity();
    if (t.has(n - 1) && t.has(n + 1)) b.upper = std::sqrt(t.value(n - 1) * t.value(n + 1));
    if (n >= 2 && t.has(n - 1) && t.has(n - 2)) b.lower = std::max(b.lower, t.value(n - 1) * t.value(n - 1) / t.value(n - 2));
    if (t.has(n + 1) && t.has(n + 2)) b.lower = std::max(b.lower, t.value(n + 1) * t.value(n + 1) / t.value(n + 2));
    return b;
}

Completion complete_odd(const MomentTable& evens, const OddFamily& family, int max_order) {
    family.validate();
    if (max_order < 1) throw Error(ErrorCode::Config, "completion needs max_order >= 1");
    const int even_top = max_order % 2 ? max_order - 1 : max_order;
    const auto ev = even_orders(evens, even_top);
    check_evens(evens, ev);

    Completion c;
    c.used = family.kind;
    std::vector<double> odd;
    MomentProvenance prov = MomentProvenance::InterpolatedOdd;
    switch (family.kind) {
        case OddFamilyKind::MonotoneLogInterp:
            odd = odd_monotone(evens, ev, max_order);
            break;
        case OddFamilyKind::ConstrainedFit:
            odd = odd_constrained_fit(evens, ev, max_order, family.fit_degree);
            break;
        case OddFamilyKind::MaxentClosure: {
            auto m = odd_maxent(evens, max_order, family.maxent_terms);
            if (m.ok) {
                odd = std::move(m.odd);
            } else {
                c.fell_back = true;
                c.used = OddFamilyKind::MonotoneLogInterp;
                c.notes.push_back(m.why + "; fell back to monotone-log-interp");
                odd = odd_monotone(evens, ev, max_order);
            }
            break;
        }
        case OddFamilyKind::ExactOracle:
            for (int n = 1; n <= max_order; n += 2) odd.push_back(family.oracle->value(n));
            prov = MomentProvenance::ExactOracle;
            break;
    }

    for (int n : ev) c.table.set(n, evens.value(n), evens.entry(n).provenance);
    for (int n = 1, i = 0; n <= max_order; n += 2, ++i) c.table.set(n, odd[static_cast<std::size_t>(i)], prov);

    // Nudge odd values that sit marginally outside their convexity bracket.
    // Two sweeps settle the coupling between neighbouring odd entries.
    for (int sweep = 0; sweep < 2; ++sweep) {
        for (int n = 1; n <= max_order; n += 2) {
            const double v = c.table.value(n);
            const auto b = odd_bracket(c.table, n);
            double target = v;
            if (v > b.upper) target = b.upper;
            if (v < b.lower) target = b.lower;
            if (target == v) continue;
            const double rel = std::abs(v / target - 1.0);
            if (b.lower > b.upper * (1.0 + 1e-12) || rel >= 1e-6) {
                std::ostringstream msg;
                msg << "completed mu_" << n << " = " << v << " lies outside its log-convexity bracket [" << b.lower
                    << ", " << b.upper << "] by a relative " << rel << " (" << to_string(c.used) << ")";
                throw Error(ErrorCode::Numeric, msg.str());
            }
            c.table.set(n, target, c.table.entry(n).provenance);
            ++c.repaired;
            std::ostringstream note;
            note << "mu_" << n << " projected onto its log-convexity bound (relative shift " << rel << ")";
            c.notes.push_back(note.str());
        }
    }
    for (const auto& v : validate_moment_table(c.table, std::numeric_limits<double>::infinity(), 1e-9)) {
        throw Error(ErrorCode::Numeric, "completed table fails validation: " + v.message);
    }
    return c;
}

NegativeMoments negative_moments(const pade::RationalApproximant& L) {
    if (!L.constructible || !L.proper()) {
        throw Error(ErrorCode::DivergentIntegral, "negative moments need a proper rational image");
    }
    pade::RationalApproximant r = L;
    if (!r.analysed) pade::pole_analysis(r);
    for (const auto& p : r.poles) {
        if (p.value.real() >= 0.0) {
            throw Error(ErrorCode::DivergentIntegral, "a pole in the closed right half-plane makes the integral diverge");
        }
    }
    const int gap = poly::degree(r.den) - poly::degree(r.num);
    if (gap < 2) {
        throw Error(ErrorCode::DivergentIntegral,
                    "int_0^inf L dq diverges when L decays no faster than 1/q (denominator degree exceeds numerator by " +
                        std::to_string(gap) + ")");
    }
    using cplx = std::complex<double>;
    const auto pf = laplace::partial_fractions(r, false);
    // I_j = int_0^inf (q - p)^{-j} dq = (-p)^{1-j} / (j - 1), j >= 2.
    auto I = [](cplx p, int j) { return std::pow(-p, 1 - j) / static_cast<double>(j - 1); };
    cplx m1 = 0.0, m2 = 0.0;
    for (const auto& t : pf) {
        const cplx p = t.pole;
        const cplx lg = std::log(-p);
        const int m = static_cast<int>(t.A.size());
        m1 -= t.A[0] * lg;
        for (int j = 2; j <= m; ++j) m1 += t.A[static_cast<std::size_t>(j - 1)] * I(p, j);
        // q / (q - p)^j = (q - p)^{1-j} + p (q - p)^{-j}
        m2 -= t.A[0] * p * lg;
        if (m >= 2) m2 -= t.A[1] * lg;
        for (int j = 2; j <= m; ++j) m2 += t.A[static_cast<std::size_t>(j - 1)] * p * I(p, j);
        for (int j = 3; j <= m; ++j) m2 += t.A[static_cast<std::size_t>(j - 1)] * I(p, j - 1);
    }
    NegativeMoments out;
    out.mu_m1 = m1.real();
    if (gap >= 3) out.mu_m2 = m2.real();
    return out;
}

void store_negative(MomentTable& t, const NegativeMoments& nm) {
    t.set(-1, nm.mu_m1, MomentProvenance::StieltjesNegative);
    if (nm.mu_m2) t.set(-2, *nm.mu_m2, MomentProvenance::StieltjesNegative);
}

}  // namespace gbmlap::moments
