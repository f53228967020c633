#include "gbmlap/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "gbmlap/linalg.hpp"

namespace gbmlap::recovery {

const char* to_string(BoundaryPolicy p) {
    return p == BoundaryPolicy::ShrinkWindow ? "shrink-window" : "local-poly-extrapolate";
}

BoundaryPolicy boundary_policy_from_string(const std::string& s) {
    if (s == "shrink-window") return BoundaryPolicy::ShrinkWindow;
    if (s == "local-poly-extrapolate") return BoundaryPolicy::LocalPolyExtrapolate;
    throw Error(ErrorCode::Config, "unknown boundary policy '" + s + "'");
}

void DifferentiatorConfig::validate() const {
    if (half_width < 1) throw Error(ErrorCode::Config, "differentiator half-width must be >= 1");
    if (order < 2) throw Error(ErrorCode::Config, "differentiator order must be >= 2 for a second derivative");
    if (order >= 2 * half_width + 1) throw Error(ErrorCode::Config, "differentiator order must be below the window size");
}

void RecoveryConfig::validate() const {
    differentiator.validate();
    if (!(theta >= 0.0 && theta < 1.0)) throw Error(ErrorCode::Config, "theta must lie in [0, 1)");
    if (core_steps < 0) throw Error(ErrorCode::Config, "core_steps must be >= 0");
}

std::vector<double> savgol_weights(const std::vector<int>& offsets, int order, int deriv) {
    if (deriv > order) throw Error(ErrorCode::Config, "derivative order exceeds polynomial order");
    if (static_cast<int>(offsets.size()) <= order) throw Error(ErrorCode::Config, "too few points for the polynomial order");
    linalg::Matrix a;
    for (int k : offsets) {
        std::vector<double> row;
        for (int j = 0; j <= order; ++j) row.push_back(std::pow(static_cast<double>(k), j));
        a.push_back(row);
    }
    double fact = 1.0;
    for (int j = 2; j <= deriv; ++j) fact *= j;
    // Weight k is the deriv-th fitted coefficient for unit data at point k.
    std::vector<double> w(offsets.size());
    for (std::size_t k = 0; k < offsets.size(); ++k) {
        std::vector<double> e(offsets.size(), 0.0);
        e[k] = 1.0;
        w[k] = fact * linalg::least_squares(a, e)[static_cast<std::size_t>(deriv)];
    }
    return w;
}

std::vector<double> savgol_second_derivative(const std::vector<double>& y, double h, const DifferentiatorConfig& cfg,
                                             std::vector<bool>* ok) {
    cfg.validate();
    if (!(h > 0.0)) throw Error(ErrorCode::Domain, "differentiation needs a uniform grid");
    const int n = static_cast<int>(y.size());
    std::vector<double> d(y.size(), 0.0);
    std::vector<bool> good(y.size(), false);
    std::map<std::tuple<int, int, int>, std::vector<double>> cache;  // (left, right, order)
    auto weights = [&](int left, int right, int order) -> const std::vector<double>& {
        const auto key = std::make_tuple(left, right, order);
        auto it = cache.find(key);
        if (it == cache.end()) {
            std::vector<int> offs;
            for (int k = -left; k <= right; ++k) offs.push_back(k);
            it = cache.emplace(key, savgol_weights(offs, order, 2)).first;
        }
        return it->second;
    };
    const int hw = cfg.half_width;
    for (int i = 0; i < n; ++i) {
        int left = hw, right = hw, order = cfg.order;
        if (i < hw || i + hw >= n) {
            if (cfg.boundary == BoundaryPolicy::ShrinkWindow) {
                const int s = std::min(i, n - 1 - i);
                left = right = s;
                order = std::min(cfg.order, 2 * s);
                if (order < 2) continue;
            } else {
                if (n < 2 * hw + 1) continue;
                left = std::min(i, 2 * hw);
                left = std::max(left, 2 * hw - (n - 1 - i));
                right = 2 * hw - left;
            }
        }
        const auto& w = weights(left, right, order);
        double s = 0.0;
        for (int k = -left; k <= right; ++k) s += w[static_cast<std::size_t>(k + left)] * y[static_cast<std::size_t>(i + k)];
        d[static_cast<std::size_t>(i)] = s / (h * h);
        good[static_cast<std::size_t>(i)] = true;
    }
    if (ok) *ok = std::move(good);
    return d;
}

ChiAndR chi_from_density(const RadialFunction& chi2, int core_points) {
    chi2.grid.validate();
    const auto& r = chi2.grid.points;
    ChiAndR out;
    out.chi = chi2;
    out.chi.role = RadialRole::Chi;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double v = chi2.values[i];
        out.chi.values[i] = v > 0.0 ? std::sqrt(v) : 0.0;
        if (!(v > 0.0)) out.chi.valid[i] = false;
    }
    out.R = out.chi;
    out.R.role = RadialRole::R;
    for (std::size_t i = 0; i < r.size(); ++i) out.R.values[i] = out.chi.values[i] / r[i];

    const std::size_t core = static_cast<std::size_t>(std::max(core_points, 0));
    const std::size_t fit_count = 6;
    if (core > 0 && r.size() >= core + fit_count) {
        linalg::Matrix a;
        std::vector<double> b;
        for (std::size_t i = core; i < core + fit_count; ++i) {
            a.push_back({1.0, r[i] * r[i]});
            b.push_back(out.R.values[i]);
        }
        const auto c = linalg::least_squares(a, b);
        for (std::size_t i = 0; i < core; ++i) out.R.values[i] = c[0] + c[1] * r[i] * r[i];
    }
    return out;
}

RadialFunction potential_from_second_derivative(const RadialFunction& chi, const std::vector<double>& d2chi,
                                                double e00_scaled, const RecoveryConfig& cfg) {
    cfg.validate();
    chi.grid.validate();
    const auto& r = chi.grid.points;
    if (d2chi.size() != r.size()) throw Error(ErrorCode::Domain, "second derivative does not match the grid");
    const double h = chi.grid.step > 0.0 ? chi.grid.step : r[0];
    const double r_core = cfg.core_steps * h;
    double cmax = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (chi.valid[i]) cmax = std::max(cmax, chi.values[i]);
    }
    RadialFunction v(chi.grid, std::vector<double>(r.size(), 0.0), RadialRole::Potential);
    std::size_t first_valid = r.size();
    for (std::size_t i = 0; i < r.size(); ++i) {
        // Small tolerance so that r = core_steps * h itself is kept.
        const bool keep = chi.valid[i] && cmax > 0.0 && chi.values[i] >= cfg.theta * cmax && chi.values[i] > 0.0 &&
                          r[i] >= r_core * (1.0 - 1e-12) && std::isfinite(d2chi[i]);
        v.valid[i] = keep;
        if (keep) {
            v.values[i] = e00_scaled + d2chi[i] / chi.values[i];
            first_valid = std::min(first_valid, i);
        } else {
            v.values[i] = std::nan("");
        }
    }
    if (first_valid == r.size()) throw Error(ErrorCode::RecoveryFailed, "no grid point passes the recovery mask");

    // Below the core radius use R = b0 + b1 r + b2 r^2 fitted just outside
    // it; chi = r R then gives chi''/chi = (2 b1 + 6 b2 r) / (r R).
    const std::size_t fit_count = 7;
    if (first_valid > 0 && first_valid + fit_count <= r.size()) {
        linalg::Matrix a;
        std::vector<double> b;
        for (std::size_t i = first_valid; i < first_valid + fit_count; ++i) {
            a.push_back({1.0, r[i], r[i] * r[i]});
            b.push_back(chi.values[i] / r[i]);
        }
        const auto c = linalg::least_squares(a, b);
        for (std::size_t i = 0; i < first_valid; ++i) {
            if (r[i] >= r_core * (1.0 - 1e-12)) break;
            const double R = c[0] + c[1] * r[i] + c[2] * r[i] * r[i];
            if (R != 0.0) v.values[i] = e00_scaled + (2.0 * c[1] + 6.0 * c[2] * r[i]) / (r[i] * R);
        }
    }
    return v;
}

RadialFunction potential_from_chi(const RadialFunction& chi, double e00_scaled, const RecoveryConfig& cfg) {
    cfg.validate();
    chi.grid.validate();
    if (!(chi.grid.step > 0.0)) throw Error(ErrorCode::Domain, "potential recovery needs a uniform grid");
    std::vector<bool> ok;
    auto d2 = savgol_second_derivative(chi.values, chi.grid.step, cfg.differentiator, &ok);
    for (std::size_t i = 0; i < d2.size(); ++i) {
        if (!ok[i]) d2[i] = std::nan("");
    }
    return potential_from_second_derivative(chi, d2, e00_scaled, cfg);
}

RadialFunction convert_outputs(const RadialFunction& v_scaled, UnitSystem target) {
    if (v_scaled.role != RadialRole::Potential) throw Error(ErrorCode::Domain, "unit conversion applies to potentials");
    RadialFunction out = v_scaled;
    if (target == UnitSystem::Hartree) {
        for (double& x : out.values) x = convert_energy(x, UnitSystem::Scaled, UnitSystem::Hartree);
    }
    return out;
}

}  // namespace gbmlap::recovery
