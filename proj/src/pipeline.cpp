#include "gbmlap/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace gbmlap {

double rel_l2(const RadialFunction& rec, const RadialFunction& exact, Window w) {
    const auto& r = exact.grid.points;
    if (rec.grid.points != r) throw Error(ErrorCode::Domain, "rel_l2 needs both functions on the same grid");
    auto use = [&](std::size_t i) {
        return r[i] >= w.lo && r[i] <= w.hi && rec.valid[i] && exact.valid[i] && std::isfinite(rec.values[i]) &&
               std::isfinite(exact.values[i]);
    };
    double num = 0.0, den = 0.0;
    int segments = 0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        if (!use(i) || !use(i + 1)) continue;
        const double dr = r[i + 1] - r[i];
        const double d0 = rec.values[i] - exact.values[i], d1 = rec.values[i + 1] - exact.values[i + 1];
        num += 0.5 * dr * (d0 * d0 + d1 * d1);
        den += 0.5 * dr * (exact.values[i] * exact.values[i] + exact.values[i + 1] * exact.values[i + 1]);
        ++segments;
    }
    if (segments == 0) throw Error(ErrorCode::Domain, "metric window contains no valid segment");
    if (!(den > 0.0)) throw Error(ErrorCode::Domain, "reference function vanishes on the metric window");
    return std::sqrt(num / den);
}

Window default_window(const RadialFunction& e) {
    const auto& r = e.grid.points;
    const auto& v = e.values;
    if (r.empty()) throw Error(ErrorCode::Domain, "empty density");
    const auto peak = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    std::vector<double> cum(r.size());
    double s = 0.5 * r[0] * v[0];
    cum[0] = s;
    for (std::size_t i = 1; i < r.size(); ++i) {
        s += 0.5 * (r[i] - r[i - 1]) * (v[i] + v[i - 1]);
        cum[i] = s;
    }
    std::size_t k = 0;
    while (k + 1 < r.size() && cum[k] < 0.99 * s) ++k;
    return {0.1 * r[peak], r[k]};
}

namespace {

struct Reference {
    double e00_scaled = 0.0;
    MomentTable moments;
    std::vector<double> full_r, full_r2rho;  // on the whole solver grid
};

Reference reference_ground(const PipelineConfig& cfg, int max_order) {
    Reference ref;
    const double h = cfg.solver.step();
    const auto n = static_cast<std::size_t>(cfg.solver.n_points);
    ref.full_r = RadialGrid::uniform(h, n).points;
    if (auto a = forward::analytic_ground_state(cfg.potential)) {
        ref.e00_scaled = a->e00_scaled;
        for (int k = 0; k <= max_order; ++k) ref.moments.set(k, a->moment(k), MomentProvenance::ExactOracle);
        for (double r : ref.full_r) ref.full_r2rho.push_back(a->r2rho(r));
        return ref;
    }
    const auto o = forward::exact_ground_oracle(cfg.potential, cfg.solver, max_order);
    ref.e00_scaled = o.e00;
    ref.moments = o.moments;
    ref.full_r2rho = o.r2rho.values;
    return ref;
}

RadialFunction truncate(const std::vector<double>& values, const RadialGrid& g, RadialRole role) {
    return RadialFunction(g, std::vector<double>(values.begin(), values.begin() + static_cast<long>(g.size())), role);
}

double trapezoid_laplace(const std::vector<double>& r, const std::vector<double>& f, double q) {
    double s = 0.5 * r[0] * f[0] * std::exp(-q * r[0]);
    for (std::size_t i = 1; i < r.size(); ++i) {
        s += 0.5 * (r[i] - r[i - 1]) * (f[i] * std::exp(-q * r[i]) + f[i - 1] * std::exp(-q * r[i - 1]));
    }
    return s;
}

}  // namespace

LsqOutcome run_lsq_comparison(const PipelineConfig& cfg, const RadialFunction& v_exact, Window w) {
    LsqOutcome out;
    const auto& L = cfg.lsq;
    out.q_true = lsq::map_radial_target(cfg.potential, L.r_max, L.intervals, L.core_steps);
    const auto targets = lsq::generate_targets(out.q_true, L.config.num_pairs);
    const std::vector<double> start(out.q_true.size(), 0.0);
    out.result = lsq::minimize_pr_cg(start, targets, L.config);
    RadialFunction v(v_exact.grid, std::vector<double>(v_exact.size()), RadialRole::Potential);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double vs = lsq::radial_from_q(out.result.q_rec, L.r_max, v.grid.points[i]);
        v.values[i] = convert_energy(vs, UnitSystem::Scaled, UnitSystem::Hartree);
        v.valid[i] = v.grid.points[i] <= L.r_max;  // beyond the LSQ interval there is nothing to compare
    }
    out.v_hartree = v.values;
    out.rel_l2 = rel_l2(v, v_exact, w);
    auto rmse = [](const std::vector<double>& m) {
        double s = 0.0;
        for (double x : m) s += x * x;
        return m.empty() ? 0.0 : std::sqrt(s / static_cast<double>(m.size()));
    };
    out.rmse_dd = rmse(out.result.misfit_dd);
    out.rmse_dn = rmse(out.result.misfit_dn);
    return out;
}

namespace {

// Moments, continuation, inversion and recovery. Throws on the first failure.
void laplace_chain(const PipelineConfig& cfg, const Reference& ref, PipelineResult& res) {
    const int max_order = cfg.gbm.moment_max_order;

    // Even moments.
    if (cfg.mode == PipelineMode::ExactMoments) {
        res.e00_scaled = ref.e00_scaled;
        for (int k = 0; k <= max_order; k += 2) res.evens.set(k, ref.moments.value(k), MomentProvenance::ExactOracle);
    } else {
        const auto ds = forward::build_spectral_dataset(cfg.potential, gbm::required_levels_per_channel(cfg.gbm),
                                                        cfg.solver);
        auto ladder = gbm::gbm_even_ladder(ds, cfg.gbm);
        res.accounting = ladder.accounting;
        res.saturation_factors = ladder.saturation_factors;
        res.evens = ladder.evens;
        res.e00_scaled = ds.at(0, 0);
        if (ladder.accounting.truncated_at >= 0) {
            throw Error(ErrorCode::SpectralOrder,
                        "GBM ladder truncated at l=" + std::to_string(ladder.accounting.truncated_at) + ": " +
                            ladder.accounting.truncation_reason);
        }
    }

    // Odd moments.
    moments::OddFamily fam = cfg.odd;
    if (cfg.mode != PipelineMode::GbmEvenInterpOdd) {
        fam.kind = moments::OddFamilyKind::ExactOracle;
        fam.oracle = ref.moments;
    }
    auto completion = moments::complete_odd(res.evens, fam, max_order);
    res.moments = completion.table;
    res.odd_used = completion.used;
    res.odd_fell_back = completion.fell_back;
    for (const auto& note : completion.notes) res.notes.push_back(note);

    // Continuation.
    const auto series = pade::series_coefficients(res.moments, max_order);
    res.candidates = cfg.pade.candidates.empty() ? pade::default_candidate_set(max_order) : cfg.pade.candidates;
    auto filtered = pade::admissibility_filter(pade::build_candidates(series, res.candidates), cfg.pade.filter);
    res.rejections = filtered.rejections;
    res.survivors = pade::rank_by_tail(std::move(filtered.survivors));
    if (res.survivors.empty()) throw Error(ErrorCode::EmptySurvivors, "no Pade candidate passed the admissibility filter");

    if (!res.lq_q.empty()) {
        const auto avg = pade::model_average(res.survivors, res.lq_q);
        res.lq_mean = avg.mean;
        res.lq_dispersion = avg.dispersion;
    }

    // Inversion.
    if (cfg.inversion.method == InversionMethod::Numeric) {
        double floor = 0.0;
        for (const auto& s : res.survivors) {
            for (const auto& p : s.poles) floor = std::max(floor, p.value.real());
        }
        const auto& surv = res.survivors;
        auto L = [&surv](laplace::cplx q) { return pade::average_at(surv, q); };
        const auto chi2 = laplace::numeric_invert(L, res.grid, cfg.inversion.numeric, floor, &res.numeric);
        res.r2rho_rec = laplace::density_postprocess(chi2, &res.density);
    } else {
        std::string last_error;
        for (std::size_t k = 0; k < res.survivors.size(); ++k) {
            const auto& s = res.survivors[k];
            try {
                bool merged = false;
                const auto es = laplace::residue_invert(s, &merged);
                std::vector<double> vals(res.grid.size());
                for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = es.evaluate(res.grid.points[i]);
                res.r2rho_rec = laplace::density_postprocess(RadialFunction(res.grid, vals, RadialRole::ChiSquared),
                                                             &res.density);
                res.chosen = static_cast<int>(k);
                res.residue_merged_clusters = merged;
                if (merged) res.notes.push_back("residues computed with merged pole clusters");
                break;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::ReconstructionInvalid && e.code() != ErrorCode::Numeric) throw;
                std::ostringstream note;
                note << "survivor P(" << s.N << "," << s.D << ") skipped: " << e.what();
                res.notes.push_back(note.str());
                last_error = e.what();
            }
        }
        if (res.chosen < 0) throw Error(ErrorCode::ReconstructionInvalid, "every survivor failed inversion: " + last_error);
    }

    // Stieltjes moments of the chosen rational.
    const auto& best = res.survivors[static_cast<std::size_t>(std::max(res.chosen, 0))];
    try {
        moments::store_negative(res.moments, moments::negative_moments(best));
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DivergentIntegral) throw;
        res.notes.push_back(std::string("negative moments not available: ") + e.what());
    }

    // Recovery.
    const auto cr = recovery::chi_from_density(res.r2rho_rec, cfg.recovery.config.core_steps);
    res.chi_rec = cr.chi;
    const auto vs = recovery::potential_from_chi(cr.chi, res.e00_scaled, cfg.recovery.config);
    res.v_rec = recovery::convert_outputs(vs, UnitSystem::Hartree);
    res.rel_l2_v = rel_l2(res.v_rec, res.v_exact, res.window);
}

void record_failure(PipelineResult& res, const std::exception& e) {
    res.ok = false;
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        res.error_code = to_string(err->code());
    } else {
        res.error_code = to_string(ErrorCode::Numeric);
    }
    res.error_message = e.what();
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg_in) {
    const auto t0 = std::chrono::steady_clock::now();
    PipelineResult res;
    res.config = cfg_in;
    PipelineConfig cfg = cfg_in;
    bool references_ready = false;
    try {
        cfg_in.validate();
        cfg.gbm.path = cfg.resolved_path();
        res.config = cfg;

        // Exact references on the solver grid, then the recovery prefix.
        const auto ref = reference_ground(cfg, cfg.gbm.moment_max_order);
        const double h = cfg.solver.step();
        const auto n_rec = static_cast<std::size_t>(std::floor(cfg.recovery.r_max / h + 1e-9)) - 1;
        res.grid = RadialGrid::uniform(h, std::min(n_rec, ref.full_r.size()));
        res.r2rho_exact = truncate(ref.full_r2rho, res.grid, RadialRole::R2Rho);
        res.chi_exact = RadialFunction(res.grid, res.r2rho_exact.values, RadialRole::Chi);
        for (double& x : res.chi_exact.values) x = std::sqrt(std::max(x, 0.0));
        res.v_exact = RadialFunction(res.grid, std::vector<double>(res.grid.size()), RadialRole::Potential);
        for (std::size_t i = 0; i < res.grid.size(); ++i) {
            res.v_exact.values[i] =
                convert_energy(forward::evaluate_scaled(cfg.potential, res.grid.points[i]), UnitSystem::Scaled, UnitSystem::Hartree);
        }
        res.window = cfg.metric.window ? Window{cfg.metric.window->first, cfg.metric.window->second}
                                       : default_window(res.r2rho_exact);
        for (double q : cfg.metric.lq_grid) {
            res.lq_q.push_back(q);
            res.lq_exact.push_back(trapezoid_laplace(ref.full_r, ref.full_r2rho, q));
        }
        references_ready = true;
        laplace_chain(cfg, ref, res);
        res.ok = true;
    } catch (const std::exception& e) {
        record_failure(res, e);
    }
    // The LSQ comparator only needs the exact potential and the window, so it
    // still runs when the Laplace chain fails.
    if (references_ready && cfg.lsq.enabled) {
        try {
            res.lsq = run_lsq_comparison(cfg, res.v_exact, res.window);
        } catch (const std::exception& e) {
            res.lsq_error = e.what();
        }
    }
    res.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace gbmlap
