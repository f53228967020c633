#include "gbmlap/pade.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "gbmlap/linalg.hpp"

namespace gbmlap::pade {

SeriesCoefficients series_coefficients(const MomentTable& m, int order) {
    if (order < 0) throw Error(ErrorCode::Config, "series order must be >= 0");
    SeriesCoefficients s;
    s.a.resize(static_cast<std::size_t>(order) + 1);
    double fact = 1.0;
    for (int n = 0; n <= order; ++n) {
        if (n > 0) fact *= n;
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        s.a[static_cast<std::size_t>(n)] = sgn * m.value(n) / fact;
    }
    return s;
}

double RationalApproximant::evaluate(double q) const {
    return poly::evaluate(num, q) / poly::evaluate(den, q);
}

cplx RationalApproximant::evaluate(cplx q) const {
    return poly::evaluate(num, q) / poly::evaluate(den, q);
}

namespace {

std::vector<double> expand(const std::vector<double>& num, const std::vector<double>& den, std::size_t count) {
    std::vector<double> c(count, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
        double s = k < num.size() ? num[k] : 0.0;
        for (std::size_t j = 1; j < den.size() && j <= k; ++j) s -= den[j] * c[k - j];
        c[k] = s / den[0];
    }
    return c;
}

}  // namespace

RationalApproximant pade(const SeriesCoefficients& coeffs, int N, int D) {
    if (N < 0 || D < 0) throw Error(ErrorCode::Config, "Pade degrees must be nonnegative");
    const auto& a = coeffs.a;
    const std::size_t K = static_cast<std::size_t>(N + D);
    if (a.size() < K + 1) {
        throw Error(ErrorCode::InputIncomplete, "P(" + std::to_string(N) + "," + std::to_string(D) + ") needs " +
                                                    std::to_string(K + 1) + " coefficients");
    }
    RationalApproximant r;
    r.N = N;
    r.D = D;

    // Work in t = q / rho so that the coefficients are of comparable size;
    // the approximant itself does not depend on this rescaling.
    double rho = 1.0;
    if (K > 0 && a[0] != 0.0 && a[K] != 0.0) {
        rho = std::pow(std::abs(a[0]) / std::abs(a[K]), 1.0 / static_cast<double>(K));
        if (!std::isfinite(rho) || rho <= 0.0) rho = 1.0;
    }
    std::vector<double> as(K + 1);
    for (std::size_t n = 0; n <= K; ++n) as[n] = a[n] * std::pow(rho, static_cast<double>(n));

    std::vector<double> den(static_cast<std::size_t>(D) + 1, 0.0);
    den[0] = 1.0;
    if (D > 0) {
        linalg::Matrix m(static_cast<std::size_t>(D), std::vector<double>(static_cast<std::size_t>(D), 0.0));
        std::vector<double> rhs(static_cast<std::size_t>(D));
        for (int row = 0; row < D; ++row) {
            const int k = N + 1 + row;
            for (int j = 1; j <= D; ++j) {
                const int idx = k - j;
                m[static_cast<std::size_t>(row)][static_cast<std::size_t>(j - 1)] = idx >= 0 ? as[static_cast<std::size_t>(idx)] : 0.0;
            }
            rhs[static_cast<std::size_t>(row)] = -as[static_cast<std::size_t>(k)];
        }
        const auto sol = linalg::solve_dense(m, rhs);
        r.condition_estimate = sol.pivot_ratio;
        if (sol.singular || !(sol.pivot_ratio <= 1e12)) {
            r.constructible = false;
            std::ostringstream msg;
            msg << "Pade system singular or ill-conditioned (pivot ratio " << sol.pivot_ratio << ")";
            r.construction_note = msg.str();
            return r;
        }
        for (int j = 1; j <= D; ++j) den[static_cast<std::size_t>(j)] = sol.x[static_cast<std::size_t>(j - 1)];
    }
    std::vector<double> num(static_cast<std::size_t>(N) + 1, 0.0);
    for (int k = 0; k <= N; ++k) {
        double s = 0.0;
        for (int j = 0; j <= std::min(k, D); ++j) s += den[static_cast<std::size_t>(j)] * as[static_cast<std::size_t>(k - j)];
        num[static_cast<std::size_t>(k)] = s;
    }

    // Expansion match, measured in the balanced variable.
    const auto c = expand(num, den, K + 1);
    double amax = 0.0;
    for (double v : as) amax = std::max(amax, std::abs(v));
    for (std::size_t k = 0; k <= K; ++k) {
        const double ref = std::max(std::abs(as[k]), 1e-14 * amax);
        r.expansion_mismatch = std::max(r.expansion_mismatch, std::abs(c[k] - as[k]) / ref);
    }

    for (std::size_t j = 0; j < den.size(); ++j) den[j] /= std::pow(rho, static_cast<double>(j));
    for (std::size_t k = 0; k < num.size(); ++k) num[k] /= std::pow(rho, static_cast<double>(k));
    r.num = std::move(num);
    r.den = std::move(den);

    if (r.expansion_mismatch > 1e-9) {
        r.constructible = false;
        std::ostringstream msg;
        msg << "series re-expansion deviates by " << r.expansion_mismatch << " (defective approximant)";
        r.construction_note = msg.str();
    }

    // Residual against coefficients beyond those used in the construction.
    if (a.size() > K + 1) {
        const auto full = expand(r.num, r.den, a.size());
        double s = 0.0;
        std::size_t cnt = 0;
        for (std::size_t k = K + 1; k < a.size(); ++k) {
            if (a[k] == 0.0) continue;
            const double e = (full[k] - a[k]) / a[k];
            s += e * e;
            ++cnt;
        }
        r.tail_residual = cnt ? std::sqrt(s / static_cast<double>(cnt)) : std::numeric_limits<double>::quiet_NaN();
    } else {
        r.tail_residual = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

void pole_analysis(RationalApproximant& r) {
    if (!r.constructible) return;
    if (poly::degree(r.den) < 1) throw Error(ErrorCode::Domain, "pole analysis needs a denominator of degree >= 1");
    r.poles.clear();
    r.zeros = poly::roots(r.num);
    for (const auto& root : poly::clustered_roots(r.den)) {
        Pole p;
        p.value = root.value;
        p.multiplicity = root.multiplicity;
        p.nearest_zero_distance = std::numeric_limits<double>::infinity();
        for (const auto& z : r.zeros) p.nearest_zero_distance = std::min(p.nearest_zero_distance, std::abs(z - p.value));
        r.poles.push_back(p);
    }
    r.analysed = true;
}

FilterResult admissibility_filter(std::vector<RationalApproximant> cands, const FilterConfig& cfg) {
    FilterResult out;
    for (auto& c : cands) {
        auto reject = [&](const std::string& code, const std::string& detail) {
            out.rejections.push_back({c.N, c.D, code, detail});
        };
        if (!c.constructible) {
            reject("unconstructible", c.construction_note);
            continue;
        }
        if (!c.proper()) {
            reject("improper", "numerator degree >= denominator degree");
            continue;
        }
        if (!c.analysed) pole_analysis(c);
        bool ok = true;
        for (const auto& p : c.poles) {
            if (p.value.real() >= -cfg.delta) {
                std::ostringstream msg;
                msg << "pole at " << p.value.real() << (p.value.imag() >= 0 ? "+" : "") << p.value.imag() << "i";
                reject("right-half-plane", msg.str());
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        for (const auto& p : c.poles) {
            if (p.nearest_zero_distance < cfg.froissart_rel * std::max(1.0, std::abs(p.value))) {
                std::ostringstream msg;
                msg << "pole " << p.value.real() << (p.value.imag() >= 0 ? "+" : "") << p.value.imag()
                    << "i within " << p.nearest_zero_distance << " of a zero";
                reject("froissart", msg.str());
                ok = false;
                break;
            }
        }
        if (ok) out.survivors.push_back(std::move(c));
    }
    return out;
}

AverageResult model_average(const std::vector<RationalApproximant>& survivors, const std::vector<double>& qs) {
    if (survivors.empty()) throw Error(ErrorCode::EmptySurvivors, "model average needs at least one survivor");
    AverageResult out;
    out.q = qs;
    for (double q : qs) {
        if (q < 0.0) throw Error(ErrorCode::Domain, "model average is defined for q >= 0");
        double s = 0.0;
        std::vector<double> v;
        for (const auto& r : survivors) v.push_back(r.evaluate(q));
        for (double x : v) s += x;
        const double mean = s / static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        out.mean.push_back(mean);
        out.dispersion.push_back(v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0);
    }
    return out;
}

cplx average_at(const std::vector<RationalApproximant>& survivors, cplx q) {
    if (survivors.empty()) throw Error(ErrorCode::EmptySurvivors, "no survivors to average");
    cplx s = 0.0;
    for (const auto& r : survivors) s += r.evaluate(q);
    return s / static_cast<double>(survivors.size());
}

std::vector<std::pair<int, int>> default_candidate_set(int max_order) {
    std::vector<std::pair<int, int>> out;
    for (int K = 6; K <= 10; ++K) {
        for (int N = 0; N <= K; ++N) {
            const int D = K - N;
            if (std::abs(N - D) <= 1 && K <= max_order) out.emplace_back(N, D);
        }
    }
    if (3 <= max_order) out.emplace_back(0, 3);
    if (4 <= max_order) out.emplace_back(0, 4);
    return out;
}

std::vector<RationalApproximant> rank_by_tail(std::vector<RationalApproximant> s) {
    std::stable_sort(s.begin(), s.end(), [](const RationalApproximant& a, const RationalApproximant& b) {
        const bool an = std::isnan(a.tail_residual), bn = std::isnan(b.tail_residual);
        if (an != bn) return bn;
        if (an) return false;
        return a.tail_residual < b.tail_residual;
    });
    return s;
}

std::vector<RationalApproximant> build_candidates(const SeriesCoefficients& coeffs,
                                                  const std::vector<std::pair<int, int>>& set) {
    std::vector<std::future<RationalApproximant>> jobs;
    for (const auto& [N, D] : set) {
        jobs.push_back(std::async(std::launch::async, [&coeffs, N = N, D = D] {
            auto r = pade(coeffs, N, D);
            if (r.constructible && r.D >= 1) {
                try {
                    pole_analysis(r);
                } catch (const Error& e) {
                    r.constructible = false;
                    r.construction_note = std::string("pole analysis failed: ") + e.what();
                }
            }
            return r;
        }));
    }
    std::vector<RationalApproximant> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

}  // namespace gbmlap::pade
