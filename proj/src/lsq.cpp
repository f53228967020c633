#include "gbmlap/lsq.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <iomanip>
#include <sstream>

#include "gbmlap/linalg.hpp"

namespace gbmlap::lsq {

const char* to_string(BoundarySet b) { return b == BoundarySet::DD ? "DD" : "DN"; }

const char* to_string(LSQStatus s) {
    switch (s) {
        case LSQStatus::Converged: return "converged";
        case LSQStatus::MaxIterations: return "max-iterations";
        case LSQStatus::LineSearchFailed: return "line-search-failed";
    }
    return "unknown";
}

void SLProblem::validate() const {
    if (q.size() < 4) throw Error(ErrorCode::Config, "Sturm-Liouville grid needs at least 3 intervals");
    for (double v : q) {
        if (!std::isfinite(v)) throw Error(ErrorCode::Domain, "q contains non-finite values");
    }
}

SLSpectrum sl_eigensolve(const SLProblem& p, int count) {
    p.validate();
    const int J = p.intervals();
    const double h = p.step();
    const bool dn = p.bc == BoundarySet::DN;
    const int n = dn ? J : J - 1;  // unknowns at nodes 1..J or 1..J-1
    if (count < 1 || count > J - 1) {
        throw Error(ErrorCode::Config, "eigenvalue count must lie in 1.." + std::to_string(J - 1));
    }
    linalg::SymTridiag t;
    t.diag.resize(static_cast<std::size_t>(n));
    t.off.assign(static_cast<std::size_t>(n - 1), -1.0 / (h * h));
    for (int i = 0; i < n; ++i) t.diag[static_cast<std::size_t>(i)] = 2.0 / (h * h) + p.q[static_cast<std::size_t>(i + 1)];
    if (dn) t.off.back() *= std::sqrt(2.0);

    SLSpectrum out;
    out.eigenvalues = linalg::lowest_eigenvalues(t, count);
    const auto w = trapezoid_weights(static_cast<std::size_t>(J) + 1);
    for (double& lam : out.eigenvalues) {
        const auto v = linalg::inverse_iteration(t, lam);
        std::vector<double> g(static_cast<std::size_t>(J) + 1, 0.0);
        for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i + 1)] = v[static_cast<std::size_t>(i)];
        if (dn) g[static_cast<std::size_t>(J)] *= std::sqrt(2.0);
        // Rayleigh quotient in difference form; avoids the cancellation
        // against the 2/h^2 diagonal.
        double kin = 0.0, pot = 0.0, nrm = 0.0;
        for (int j = 0; j < J; ++j) {
            const double d = g[static_cast<std::size_t>(j + 1)] - g[static_cast<std::size_t>(j)];
            kin += d * d / h;
        }
        for (int j = 0; j <= J; ++j) {
            const double gj = g[static_cast<std::size_t>(j)];
            pot += w[static_cast<std::size_t>(j)] * p.q[static_cast<std::size_t>(j)] * gj * gj;
            nrm += w[static_cast<std::size_t>(j)] * gj * gj;
        }
        lam = (kin + pot) / nrm;
        const double s = 1.0 / std::sqrt(nrm);
        for (double& x : g) x *= s;
        // Sign convention: positive slope at x = 0.
        if (g[1] < 0.0) {
            for (double& x : g) x = -x;
        }
        out.eigenfunctions.push_back(std::move(g));
    }
    return out;
}

std::vector<double> trapezoid_weights(std::size_t nodes) {
    const double h = 1.0 / static_cast<double>(nodes - 1);
    std::vector<double> w(nodes, h);
    w.front() = w.back() = 0.5 * h;
    return w;
}

double inner(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::Domain, "inner product of mismatched grid functions");
    const auto w = trapezoid_weights(a.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
    return s;
}

Targets generate_targets(const std::vector<double>& q, int count) {
    Targets t;
    t.dd = sl_eigensolve({q, BoundarySet::DD}, count).eigenvalues;
    t.dn = sl_eigensolve({q, BoundarySet::DN}, count).eigenvalues;
    return t;
}

void LSQConfig::validate() const {
    if (num_pairs < 1) throw Error(ErrorCode::Config, "num_pairs must be >= 1");
    if (!weights_dd.empty() && static_cast<int>(weights_dd.size()) != num_pairs) {
        throw Error(ErrorCode::Config, "weights_dd must have num_pairs entries");
    }
    if (!weights_dn.empty() && static_cast<int>(weights_dn.size()) != num_pairs) {
        throw Error(ErrorCode::Config, "weights_dn must have num_pairs entries");
    }
    if (mu_reg < 0.0) throw Error(ErrorCode::Config, "mu_reg must be >= 0");
    if (max_iterations < 0) throw Error(ErrorCode::Config, "max_iterations must be >= 0");
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw Error(ErrorCode::Config, "armijo_c must lie in (0, 1)");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw Error(ErrorCode::Config, "backtrack ratio must lie in (0, 1)");
    if (max_backtracks < 1) throw Error(ErrorCode::Config, "max_backtracks must be >= 1");
}

Evaluation functional_and_gradient(const std::vector<double>& q, const Targets& targets, const LSQConfig& cfg) {
    cfg.validate();
    const auto k = static_cast<std::size_t>(cfg.num_pairs);
    if (targets.dd.size() != k || targets.dn.size() != k) {
        throw Error(ErrorCode::Config, "target count does not match num_pairs");
    }
    auto dd = std::async(std::launch::async, [&] { return sl_eigensolve({q, BoundarySet::DD}, cfg.num_pairs); });
    const auto sdn = sl_eigensolve({q, BoundarySet::DN}, cfg.num_pairs);
    const auto sdd = dd.get();

    Evaluation e;
    e.grad.assign(q.size(), 0.0);
    auto accumulate = [&](const SLSpectrum& s, const std::vector<double>& tgt, const std::vector<double>& wts,
                          std::vector<double>& misfit) {
        for (std::size_t n = 0; n < k; ++n) {
            const double w = wts.empty() ? 1.0 : wts[n];
            const double r = s.eigenvalues[n] - tgt[n];
            misfit.push_back(r);
            e.G += w * r * r;
            // d lambda / d q = g^2 in the trapezoid inner product.
            const auto& g = s.eigenfunctions[n];
            for (std::size_t j = 0; j < q.size(); ++j) e.grad[j] += 2.0 * w * r * g[j] * g[j];
        }
    };
    accumulate(sdd, targets.dd, cfg.weights_dd, e.misfit_dd);
    accumulate(sdn, targets.dn, cfg.weights_dn, e.misfit_dn);
    e.F = e.G;
    if (cfg.mu_reg > 0.0) {
        const std::size_t m = q.size();
        const double h = 1.0 / static_cast<double>(m - 1);
        const auto w = trapezoid_weights(m);
        double reg = 0.0;
        for (std::size_t j = 0; j + 1 < m; ++j) {
            const double d = q[j + 1] - q[j];
            reg += d * d / h;
            // Derivative of sum (dq)^2/h, mapped to the L2 gradient.
            e.grad[j] += cfg.mu_reg * (-2.0 * d / h) / w[j];
            e.grad[j + 1] += cfg.mu_reg * (2.0 * d / h) / w[j + 1];
        }
        e.F += cfg.mu_reg * reg;
    }
    return e;
}

LSQResult minimize_pr_cg(const std::vector<double>& initial, const Targets& targets, const LSQConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    LSQResult res;
    std::vector<double> q = initial;
    auto cur = functional_and_gradient(q, targets, cfg);
    res.history.push_back({0, cur.F, cur.G, 0.0});
    std::vector<double> d(q.size());
    for (std::size_t j = 0; j < q.size(); ++j) d[j] = -cur.grad[j];
    double prev_F = 0.0, prev_step = 0.0;
    bool have_prev = false;
    res.status = LSQStatus::MaxIterations;

    int it = 0;
    while (it < cfg.max_iterations) {
        if (cur.F <= cfg.tolerance) {
            res.status = LSQStatus::Converged;
            break;
        }
        double slope = inner(cur.grad, d);
        if (!(slope < 0.0)) {
            for (std::size_t j = 0; j < q.size(); ++j) d[j] = -cur.grad[j];
            slope = inner(cur.grad, d);
        }
        if (!(slope < 0.0)) {
            res.status = LSQStatus::Converged;  // stationary point
            break;
        }
        // Initial trial step: interpolate the previous decrease, or aim at
        // the linear zero of F on the first iteration.
        double a = have_prev ? 2.02 * (cur.F - prev_F) / slope : cur.F / -slope;
        if (have_prev && !(a > 0.0)) a = prev_step;
        a = std::clamp(a, 1e-12, 1.0);

        bool accepted = false;
        Evaluation next;
        std::vector<double> trial(q.size());
        for (int b = 0; b < cfg.max_backtracks; ++b) {
            for (std::size_t j = 0; j < q.size(); ++j) trial[j] = q[j] + a * d[j];
            next = functional_and_gradient(trial, targets, cfg);
            if (next.F <= cur.F + cfg.armijo_c * a * slope) {
                accepted = true;
                break;
            }
            a *= cfg.backtrack;
        }
        if (!accepted) {
            if (!res.restarted) {
                res.restarted = true;
                have_prev = false;
                for (std::size_t j = 0; j < q.size(); ++j) d[j] = -cur.grad[j];
                continue;
            }
            res.status = LSQStatus::LineSearchFailed;
            break;
        }
        ++it;
        const double gg = inner(cur.grad, cur.grad);
        std::vector<double> diff(q.size());
        for (std::size_t j = 0; j < q.size(); ++j) diff[j] = next.grad[j] - cur.grad[j];
        const double beta = gg > 0.0 ? std::max(0.0, inner(next.grad, diff) / gg) : 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) d[j] = -next.grad[j] + beta * d[j];
        prev_F = cur.F;
        prev_step = a;
        have_prev = true;
        q = trial;
        cur = std::move(next);
        res.history.push_back({it, cur.F, cur.G, a});
    }
    if (res.status == LSQStatus::MaxIterations && cur.F <= cfg.tolerance) res.status = LSQStatus::Converged;
    res.q_rec = q;
    res.misfit_dd = cur.misfit_dd;
    res.misfit_dn = cur.misfit_dn;
    res.iterations = it;
    res.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

std::vector<double> map_radial_target(const forward::PotentialSpec& spec, double r_max, int intervals, int core_steps) {
    if (!(r_max > 0.0)) throw Error(ErrorCode::Config, "r_max must be positive");
    if (intervals < 3) throw Error(ErrorCode::Config, "need at least 3 intervals");
    if (core_steps < 1 || core_steps > intervals) throw Error(ErrorCode::Config, "core_steps out of range");
    std::vector<double> q(static_cast<std::size_t>(intervals) + 1);
    const double h = 1.0 / intervals;
    const double cap = r_max * r_max * forward::evaluate_scaled(spec, core_steps * h * r_max);
    for (int j = 0; j <= intervals; ++j) {
        q[static_cast<std::size_t>(j)] = j < core_steps ? cap : r_max * r_max * forward::evaluate_scaled(spec, j * h * r_max);
    }
    return q;
}

double radial_from_q(const std::vector<double>& q, double r_max, double r) {
    const double x = r / r_max;
    const double J = static_cast<double>(q.size() - 1);
    if (x <= 0.0) return q.front() / (r_max * r_max);
    if (x >= 1.0) return q.back() / (r_max * r_max);
    const double s = x * J;
    const auto i = std::min(static_cast<std::size_t>(s), q.size() - 2);
    const double f = s - static_cast<double>(i);
    return ((1.0 - f) * q[i] + f * q[i + 1]) / (r_max * r_max);
}

double relative_l2(const std::vector<double>& a, const std::vector<double>& reference) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - reference.at(i);
    return std::sqrt(inner(d, d) / inner(reference, reference));
}

std::string convergence_csv(const LSQResult& r) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "iteration,F,G,step\n";
    for (const auto& h : r.history) os << h.iteration << ',' << h.F << ',' << h.G << ',' << h.step << '\n';
    return os.str();
}

}  // namespace gbmlap::lsq
