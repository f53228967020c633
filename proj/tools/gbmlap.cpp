// Command-line front end: forward solves, GBM ladders, reconstructions, the
// LSQ baseline, benchmark suites and the ground-state validators.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "gbmlap/bench.hpp"

using namespace gbmlap;
namespace fs = std::filesystem;

namespace {

constexpr int kPipelineError = 1;
constexpr int kConfigError = 2;

struct PotentialArgs {
    std::string id = "coulomb";
    std::string csv;
    std::string units;
    std::optional<double> Z, omega, V0, lambda, B, a, A, alpha, beta;

    void attach(CLI::App* app) {
        app->add_option("--potential", id, "coulomb | ho | hulthen | kratzer | hyperbolic");
        app->add_option("--potential-csv", csv, "tabulated potential (first line '# units: hartree|scaled')");
        app->add_option("--units", units, "declared units of the parameters: hartree | scaled");
        app->add_option("--Z", Z, "Coulomb charge");
        app->add_option("--omega", omega, "oscillator frequency");
        app->add_option("--V0", V0, "Hulthen depth");
        app->add_option("--lambda", lambda, "Hulthen inverse range");
        app->add_option("--B", B, "Kratzer strength or hyperbolic cosh^-2 coefficient");
        app->add_option("--a", a, "Kratzer length");
        app->add_option("--A", A, "hyperbolic sinh^-2 coefficient");
        app->add_option("--alpha", alpha, "hyperbolic sinh scale");
        app->add_option("--beta", beta, "hyperbolic cosh scale");
    }

    forward::PotentialSpec build() const {
        if (!csv.empty()) return forward::read_tabulated_csv(csv, id == "coulomb" ? "tabulated" : id);
        auto spec = forward::canonical(id);
        if (!units.empty()) spec.units = unit_system_from_string(units);
        auto reject = [&](const std::optional<double>& v, const char* flag) {
            if (v) throw Error(ErrorCode::Config, std::string(flag) + " does not apply to potential '" + id + "'");
        };
        std::visit(
            [&](auto& f) {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, forward::Coulomb>) {
                    if (Z) f.Z = *Z;
                } else {
                    reject(Z, "--Z");
                }
                if constexpr (std::is_same_v<F, forward::HarmonicOscillator>) {
                    if (omega) f.omega = *omega;
                } else {
                    reject(omega, "--omega");
                }
                if constexpr (std::is_same_v<F, forward::Hulthen>) {
                    if (V0) f.V0 = *V0;
                    if (lambda) f.lambda = *lambda;
                } else {
                    reject(V0, "--V0");
                    reject(lambda, "--lambda");
                }
                if constexpr (std::is_same_v<F, forward::Kratzer>) {
                    if (B) f.B = *B;
                    if (a) f.a = *a;
                } else if constexpr (std::is_same_v<F, forward::HyperbolicWell>) {
                    if (B) f.B_cosh = *B;
                    reject(a, "--a");
                } else {
                    reject(B, "--B");
                    reject(a, "--a");
                }
                if constexpr (std::is_same_v<F, forward::HyperbolicWell>) {
                    if (A) f.A_sinh = *A;
                    if (alpha) f.alpha = *alpha;
                    if (beta) f.beta = *beta;
                } else {
                    reject(A, "--A");
                    reject(alpha, "--alpha");
                    reject(beta, "--beta");
                }
            },
            spec.family);
        spec.validate();
        return spec;
    }
};

struct SolverArgs {
    std::optional<double> r_max;
    std::optional<int> n_points, richardson;
    std::string method;

    void attach(CLI::App* app) {
        app->add_option("--r-max", r_max, "solver box radius");
        app->add_option("--n-points", n_points, "interior points of the coarsest grid");
        app->add_option("--richardson", richardson, "Richardson levels");
        app->add_option("--method", method, "fd2 | numerov");
    }
    void apply(forward::SolverConfig& s) const {
        if (r_max) s.r_max = *r_max;
        if (n_points) s.n_points = *n_points;
        if (richardson) s.richardson_levels = *richardson;
        if (!method.empty()) s.method = forward::discretization_from_string(method);
    }
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Config, "cannot open config file " + path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Config, "config file " + path + ": " + e.what());
    }
}

std::vector<std::pair<int, int>> parse_pade(const std::string& s) {
    std::vector<int> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stoi(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw Error(ErrorCode::Config, "--pade expects integers N,D[,N,D...], got '" + s + "'");
        }
    }
    if (v.empty() || v.size() % 2 != 0) throw Error(ErrorCode::Config, "--pade expects pairs N,D[,N,D...]");
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < v.size(); i += 2) out.emplace_back(v[i], v[i + 1]);
    return out;
}

std::optional<bench::ReferenceTable> try_reference() {
    const auto p = bench::default_data_dir() / "reference_errors.json";
    if (!fs::exists(p)) return std::nullopt;
    return bench::load_reference_table(p);
}

json double_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

int cmd_forward(const PotentialArgs& pa, const SolverArgs& sa, int ell_max, int nr_max) {
    const auto spec = pa.build();
    forward::SolverConfig s;
    sa.apply(s);
    const auto ds = forward::build_spectral_dataset(spec, ell_max, nr_max, s);
    json levels = json::array();
    for (const auto& l : ds.levels()) {
        levels.push_back({{"n_r", l.n_r},
                          {"ell", l.ell},
                          {"E_scaled", l.value},
                          {"E_hartree", convert_energy(l.value, UnitSystem::Scaled, UnitSystem::Hartree)}});
    }
    std::cout << json({{"potential", to_json(spec)}, {"levels", levels}}).dump(2) << "\n";
    return 0;
}

int cmd_gbm(const PotentialArgs& pa, const SolverArgs& sa, std::optional<int> ell_max, std::optional<int> order,
            const std::string& path) {
    auto cfg = config_for(pa.build());
    sa.apply(cfg.solver);
    if (ell_max) cfg.gbm.ell_max = *ell_max;
    if (order) cfg.gbm.moment_max_order = *order;
    if (!path.empty() && path != "auto") {
        cfg.gbm_path_auto = false;
        cfg.gbm.path = gbm::ladder_path_from_string(path);
    }
    cfg.gbm.path = cfg.resolved_path();
    cfg.gbm.validate();
    const auto ds = forward::build_spectral_dataset(cfg.potential, gbm::required_levels_per_channel(cfg.gbm), cfg.solver);
    const auto ladder = gbm::gbm_even_ladder(ds, cfg.gbm);
    const auto oracle = forward::exact_ground_oracle(cfg.potential, cfg.solver, cfg.gbm.moment_max_order);
    json rows = json::array();
    for (const auto& [n, e] : ladder.evens.entries()) {
        const double ex = oracle.moments.value(n);
        rows.push_back({{"order", n},
                        {"gbm", e.value},
                        {"oracle", ex},
                        {"rel_err", (e.value - ex) / ex},
                        {"provenance", to_string(e.provenance)}});
    }
    json levels = json::array();
    for (const auto& [nr, l] : ladder.accounting.consumed_levels) levels.push_back({nr, l});
    std::cout << json({{"potential", to_json(cfg.potential)},
                       {"path", to_string(cfg.gbm.path)},
                       {"moments", rows},
                       {"saturation_factors", ladder.saturation_factors},
                       {"accounting",
                        {{"ell_used", ladder.accounting.ell_used},
                         {"consumed_count", ladder.accounting.consumed_count},
                         {"consumed_levels", levels},
                         {"reduction_vs_120_percent", gbm::accounting_report(ladder.accounting)},
                         {"truncated_at", ladder.accounting.truncated_at},
                         {"truncation_reason", ladder.accounting.truncation_reason}}}})
                     .dump(2)
              << "\n";
    return 0;
}

struct ReconstructArgs {
    std::string mode, odd_family, pade, invert, config_file, out = "runs";
    std::optional<double> filter_delta;
    bool lsq = false;
};

int cmd_reconstruct(const PotentialArgs& pa, const SolverArgs& sa, const ReconstructArgs& ra) {
    auto cfg = config_for(pa.build());
    sa.apply(cfg.solver);
    cfg.lsq.enabled = ra.lsq;
    if (!ra.mode.empty()) cfg.mode = pipeline_mode_from_string(ra.mode);
    if (!ra.odd_family.empty()) cfg.odd.kind = moments::odd_family_from_string(ra.odd_family);
    if (!ra.pade.empty()) cfg.pade.candidates = parse_pade(ra.pade);
    if (ra.filter_delta) cfg.pade.filter.delta = *ra.filter_delta;
    if (!ra.invert.empty()) cfg.inversion.method = inversion_method_from_string(ra.invert);
    if (!ra.config_file.empty()) cfg = config_from_json(read_json_file(ra.config_file), cfg);
    cfg.validate();

    const auto ref = try_reference();
    const auto suite = bench::run_suite({cfg}, ra.out, "reconstruct", ref ? &*ref : nullptr);
    const auto& res = suite.results.front();
    json out = {{"potential", cfg.potential.id},
                {"mode", to_string(cfg.mode)},
                {"status", res.ok ? "ok" : "failed"},
                {"rel_l2_V", double_or_null(res.rel_l2_v)},
                {"window", {res.window.lo, res.window.hi}},
                {"run_dir", suite.artifacts.front().dir.string()}};
    if (res.chosen >= 0) {
        const auto& s = res.survivors[static_cast<std::size_t>(res.chosen)];
        out["chosen"] = {s.N, s.D};
    }
    if (!res.ok) out["error"] = {{"code", res.error_code}, {"message", res.error_message}};
    if (res.lsq) out["lsq_rel_l2_V"] = res.lsq->rel_l2;
    std::cout << out.dump(2) << "\n";
    return res.ok ? 0 : kPipelineError;
}

struct LsqArgs {
    bool synthetic = false;
    std::optional<int> iterations, pairs, intervals;
    std::optional<double> r_max;
    std::string out;
};

int cmd_lsq(const PotentialArgs& pa, const LsqArgs& la) {
    auto cfg = config_for(forward::canonical("coulomb")).lsq;
    if (la.iterations) cfg.config.max_iterations = *la.iterations;
    if (la.pairs) cfg.config.num_pairs = *la.pairs;
    if (la.intervals) cfg.intervals = *la.intervals;
    if (la.r_max) cfg.r_max = *la.r_max;
    cfg.config.validate();

    std::vector<double> q_true;
    if (la.synthetic) {
        for (int i = 0; i <= cfg.intervals; ++i) q_true.push_back(2.0 * std::sin(std::numbers::pi * i / cfg.intervals));
    } else {
        q_true = lsq::map_radial_target(pa.build(), cfg.r_max, cfg.intervals, cfg.core_steps);
    }
    const auto targets = lsq::generate_targets(q_true, cfg.config.num_pairs);
    const auto res = lsq::minimize_pr_cg(std::vector<double>(q_true.size(), 0.0), targets, cfg.config);
    if (!la.out.empty()) {
        std::ofstream f(la.out, std::ios::binary);
        if (!f) throw Error(ErrorCode::Config, "cannot write " + la.out);
        f << lsq::convergence_csv(res);
    }
    std::cout << json({{"target", la.synthetic ? "synthetic 2 sin(pi x)" : pa.id},
                       {"iterations", res.iterations},
                       {"status", lsq::to_string(res.status)},
                       {"final_F", res.history.back().F},
                       {"rel_l2_q", lsq::relative_l2(res.q_rec, q_true)},
                       {"elapsed_seconds", res.elapsed_seconds}})
                     .dump(2)
              << "\n";
    return 0;
}

struct BenchArgs {
    std::string suite = "canonical", mode = "full", out = "runs", replay, config_file;
    bool no_lsq = false, strict = false;
};

int cmd_bench(const BenchArgs& ba) {
    if (!ba.replay.empty()) {
        const fs::path manifest = ba.replay;
        const fs::path dir = fs::path(ba.out) / ("replay-" + manifest.parent_path().filename().string());
        const auto rep = bench::replay_manifest(manifest, dir);
        std::cout << json({{"manifest", manifest.string()},
                           {"replay_dir", rep.replay_dir.string()},
                           {"identical", rep.identical},
                           {"mismatched", rep.mismatched}})
                         .dump(2)
                  << "\n";
        return rep.identical ? 0 : kPipelineError;
    }
    if (ba.suite != "canonical") throw Error(ErrorCode::Config, "unknown suite '" + ba.suite + "' (only 'canonical')");
    auto configs = bench::canonical_suite_configs(pipeline_mode_from_string(ba.mode));
    std::optional<json> overrides;
    if (!ba.config_file.empty()) {
        overrides = read_json_file(ba.config_file);
        if (overrides->contains("potential")) {
            throw Error(ErrorCode::Config, "a suite config must not override the potential");
        }
    }
    for (auto& c : configs) {
        if (ba.no_lsq) c.lsq.enabled = false;
        if (overrides) c = config_from_json(*overrides, c);
        c.validate();
    }
    const auto ref = try_reference();
    const auto out = bench::run_suite(configs, ba.out, ba.suite, ref ? &*ref : nullptr);
    bool all_ok = true;
    std::cout << "suite directory: " << out.root.string() << "\n";
    for (const auto& r : out.rows) {
        all_ok = all_ok && r.ok;
        std::cout << r.potential << ": " << (r.ok ? "ok" : "failed (" + r.error + ")") << "  rel_l2_V=" << bench::fmt17(r.rel_l2_v)
                  << "  reference=" << bench::fmt17(r.reference_lgbm);
        if (r.lsq_ran) std::cout << "  lsq_rel_l2_V=" << bench::fmt17(r.lsq_rel_l2);
        std::cout << "\n";
    }
    return (ba.strict && !all_ok) ? kPipelineError : 0;
}

int cmd_validate(const PotentialArgs& pa, const SolverArgs& sa) {
    const auto spec = pa.build();
    auto s = config_for(spec).solver;
    sa.apply(s);
    gbm::ChannelSolutions sols;
    for (int ell = 0; ell <= 2; ++ell) {
        auto c = s;
        c.n_eigs = ell == 0 ? 2 : 1;
        sols[ell] = forward::solve_channel(spec, ell, c);
    }
    const auto rep = gbm::validate_ground_state(spec, sols);
    bool ok = true;
    json items = json::array();
    for (const auto& it : rep.items) {
        const bool gated = it.name.rfind("theorem", 0) == 0;
        if (gated && it.status == gbm::CheckStatus::Fail) ok = false;
        items.push_back({{"name", it.name},
                         {"status", gbm::to_string(it.status)},
                         {"lhs", it.lhs},
                         {"rhs", it.rhs},
                         {"note", it.note}});
    }
    std::cout << json({{"potential", spec.id}, {"all_pass", ok}, {"items", items}}).dump(2) << "\n";
    return ok ? 0 : kPipelineError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Potential reconstruction from bound-state spectra via GBM moments and Laplace continuation"};
    app.require_subcommand(1);

    PotentialArgs pa;
    SolverArgs sa;

    auto* fwd = app.add_subcommand("forward", "solve the radial problem and print the spectrum");
    pa.attach(fwd);
    sa.attach(fwd);
    int f_ell = 6, f_nr = 2;
    fwd->add_option("--ell-max", f_ell, "highest channel");
    fwd->add_option("--nr-max", f_nr, "levels per channel");

    auto* gb = app.add_subcommand("gbm", "build the GBM even-moment ladder");
    pa.attach(gb);
    sa.attach(gb);
    std::optional<int> g_ell, g_order;
    std::string g_path;
    gb->add_option("--ell-max", g_ell, "ladder length");
    gb->add_option("--order", g_order, "highest even moment");
    gb->add_option("--path", g_path, "auto | yrast-s-channel | coulomb-degenerate");

    auto* rec = app.add_subcommand("reconstruct", "run the full pipeline for one potential");
    pa.attach(rec);
    sa.attach(rec);
    ReconstructArgs ra;
    rec->add_option("--mode", ra.mode, "exact-moments | gbm-even-exact-odd | gbm-even-interp-odd (full)");
    rec->add_option("--odd-family", ra.odd_family, "monotone-log-interp | constrained-fit | maxent-closure");
    rec->add_option("--pade", ra.pade, "candidate list N,D[,N,D...]");
    rec->add_option("--filter-delta", ra.filter_delta, "reject poles with Re >= -delta");
    rec->add_option("--invert", ra.invert, "residues | numeric");
    rec->add_option("--config", ra.config_file, "JSON config; its values override the flags");
    rec->add_option("--out", ra.out, "output root");
    rec->add_flag("--lsq", ra.lsq, "also run the LSQ comparator");

    auto* lq = app.add_subcommand("lsq", "run the two-spectra least-squares baseline");
    pa.attach(lq);
    LsqArgs la;
    lq->add_flag("--synthetic", la.synthetic, "recover q = 2 sin(pi x) instead of a mapped potential");
    lq->add_option("--iterations", la.iterations, "iteration cap");
    lq->add_option("--pairs", la.pairs, "eigenvalues per boundary set");
    lq->add_option("--intervals", la.intervals, "grid intervals on [0, 1]");
    lq->add_option("--map-r-max", la.r_max, "radius mapped onto x = 1");
    lq->add_option("--out", la.out, "convergence CSV path");

    auto* be = app.add_subcommand("bench", "run a benchmark suite or replay a manifest");
    BenchArgs ba;
    be->add_option("--suite", ba.suite, "suite name (canonical)");
    be->add_option("--mode", ba.mode, "pipeline mode for every member");
    be->add_option("--out", ba.out, "output root");
    be->add_option("--config", ba.config_file, "JSON overrides applied to every member");
    be->add_option("--replay", ba.replay, "re-run a manifest and compare checksums");
    be->add_flag("--no-lsq", ba.no_lsq, "skip the LSQ comparator");
    be->add_flag("--strict", ba.strict, "exit 1 when any member fails");

    auto* va = app.add_subcommand("validate", "ground-state ordering theorems and their conditions");
    pa.attach(va);
    sa.attach(va);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return kConfigError;
    }

    try {
        if (*fwd) return cmd_forward(pa, sa, f_ell, f_nr);
        if (*gb) return cmd_gbm(pa, sa, g_ell, g_order, g_path);
        if (*rec) return cmd_reconstruct(pa, sa, ra);
        if (*lq) return cmd_lsq(pa, la);
        if (*be) return cmd_bench(ba);
        if (*va) return cmd_validate(pa, sa);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::Config ? kConfigError : kPipelineError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kPipelineError;
    }
    return kConfigError;
}
