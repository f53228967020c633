#include "gbmlap/config.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace gbmlap {

const char* to_string(PipelineMode m) {
    switch (m) {
        case PipelineMode::ExactMoments: return "exact-moments";
        case PipelineMode::GbmEvenExactOdd: return "gbm-even-exact-odd";
        case PipelineMode::GbmEvenInterpOdd: return "gbm-even-interp-odd";
    }
    return "unknown";
}

PipelineMode pipeline_mode_from_string(const std::string& s) {
    if (s == "full") return PipelineMode::GbmEvenInterpOdd;
    for (auto m : {PipelineMode::ExactMoments, PipelineMode::GbmEvenExactOdd, PipelineMode::GbmEvenInterpOdd}) {
        if (s == to_string(m)) return m;
    }
    throw Error(ErrorCode::Config, "unknown pipeline mode '" + s + "'");
}

const char* to_string(InversionMethod m) { return m == InversionMethod::Residues ? "residues" : "numeric"; }

InversionMethod inversion_method_from_string(const std::string& s) {
    if (s == "residues") return InversionMethod::Residues;
    if (s == "numeric") return InversionMethod::Numeric;
    throw Error(ErrorCode::Config, "unknown inversion method '" + s + "'");
}

void PipelineConfig::validate() const {
    potential.validate();
    solver.validate();
    gbm::GBMConfig g = gbm;
    g.path = resolved_path();
    g.validate();
    odd.validate();
    for (const auto& [N, D] : pade.candidates) {
        if (N < 0 || D < 1) throw Error(ErrorCode::Config, "Pade candidates need N >= 0 and D >= 1");
        if (N + D > g.moment_max_order) {
            throw Error(ErrorCode::Config, "Pade candidate P(" + std::to_string(N) + "," + std::to_string(D) +
                                               ") needs more moments than the ladder provides");
        }
    }
    if (!(pade.filter.delta >= 0.0)) throw Error(ErrorCode::Config, "filter delta must be >= 0");
    if (!(pade.filter.froissart_rel >= 0.0)) throw Error(ErrorCode::Config, "froissart_rel must be >= 0");
    const auto& n = inversion.numeric;
    if (n.terms < 5 || n.terms % 2 == 0) throw Error(ErrorCode::Config, "inversion terms must be odd and >= 5");
    if (!(n.tolerance > 0.0 && n.tolerance < 1.0)) throw Error(ErrorCode::Config, "inversion tolerance must lie in (0,1)");
    if (!(n.period_factor > 1.0)) throw Error(ErrorCode::Config, "inversion period_factor must exceed 1");
    recovery.config.validate();
    if (!(recovery.r_max > 0.0) || recovery.r_max > solver.r_max) {
        throw Error(ErrorCode::Config, "recovery r_max must lie in (0, solver r_max]");
    }
    if (metric.window && !(metric.window->first < metric.window->second)) {
        throw Error(ErrorCode::Config, "metric window must be increasing");
    }
    for (double q : metric.lq_grid) {
        if (!(q >= 0.0)) throw Error(ErrorCode::Config, "L(q) samples must be >= 0");
    }
    if (lsq.enabled) {
        lsq.config.validate();
        if (!(lsq.r_max > 0.0)) throw Error(ErrorCode::Config, "lsq r_max must be positive");
        if (lsq.intervals < 3) throw Error(ErrorCode::Config, "lsq intervals must be >= 3");
        if (lsq.config.num_pairs > lsq.intervals - 1) throw Error(ErrorCode::Config, "lsq num_pairs exceeds the grid");
        if (lsq.core_steps < 1 || lsq.core_steps > lsq.intervals) throw Error(ErrorCode::Config, "lsq core_steps out of range");
    }
}

gbm::LadderPath PipelineConfig::resolved_path() const {
    if (!gbm_path_auto) return gbm.path;
    return std::holds_alternative<forward::Coulomb>(potential.family) ? gbm::LadderPath::CoulombDegenerate
                                                                     : gbm::LadderPath::YrastSChannel;
}

PipelineConfig canonical_config(const std::string& potential_id) { return config_for(forward::canonical(potential_id)); }

PipelineConfig config_for(const forward::PotentialSpec& spec) {
    PipelineConfig c;
    c.potential = spec;
    c.solver.r_max = 200.0;
    c.solver.n_points = 19999;
    c.solver.richardson_levels = 2;
    c.solver.method = forward::Discretization::FiniteDifference2;
    c.solver.bound_only = false;
    if (std::holds_alternative<forward::Coulomb>(spec.family)) {
        c.gbm.ell_max = 6;
        c.gbm.moment_max_order = 12;
    } else {
        c.gbm.ell_max = 10;
        c.gbm.moment_max_order = 20;
    }
    c.gbm.extra_s_level = 11;
    c.odd.kind = moments::OddFamilyKind::MaxentClosure;
    c.odd.maxent_terms = 3;
    for (int i = 0; i <= 200; ++i) c.metric.lq_grid.push_back(0.1 * i);
    return c;
}

namespace {

// Rejects keys outside `allowed` so that typos in config files surface.
void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw Error(ErrorCode::Config, where + " must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!ok.count(it.key())) throw Error(ErrorCode::Config, "unknown key '" + it.key() + "' in " + where);
    }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Config, where + "/" + key + ": " + e.what());
    }
}

json pairs_to_json(const std::vector<std::pair<int, int>>& v) {
    json a = json::array();
    for (const auto& [N, D] : v) a.push_back(json::array({N, D}));
    return a;
}

}  // namespace

json to_json(const forward::PotentialSpec& p) {
    json j;
    j["id"] = p.id;
    j["family"] = p.family_name();
    j["units"] = to_string(p.units);
    std::visit(
        [&j](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, forward::Coulomb>) {
                j["Z"] = f.Z;
            } else if constexpr (std::is_same_v<T, forward::HarmonicOscillator>) {
                j["omega"] = f.omega;
            } else if constexpr (std::is_same_v<T, forward::Hulthen>) {
                j["V0"] = f.V0;
                j["lambda"] = f.lambda;
            } else if constexpr (std::is_same_v<T, forward::Kratzer>) {
                j["B"] = f.B;
                j["a"] = f.a;
            } else if constexpr (std::is_same_v<T, forward::HyperbolicWell>) {
                j["A"] = f.A_sinh;
                j["B"] = f.B_cosh;
                j["alpha"] = f.alpha;
                j["beta"] = f.beta;
            } else {
                j["source"] = f.source;
                j["r"] = f.r;
                j["V"] = f.V;
            }
        },
        p.family);
    return j;
}

forward::PotentialSpec potential_from_json(const json& j) {
    const std::string where = "/potential";
    if (!j.is_object() || !j.contains("family")) throw Error(ErrorCode::Config, "potential needs a 'family'");
    const auto family = j.at("family").get<std::string>();
    forward::PotentialSpec p;
    p.id = j.value("id", family);
    p.units = j.contains("units") ? unit_system_from_string(j.at("units").get<std::string>()) : UnitSystem::Hartree;
    if (family == "coulomb") {
        check_keys(j, where, {"id", "family", "units", "Z"});
        forward::Coulomb f;
        read(j, "Z", f.Z, where);
        p.family = f;
    } else if (family == "ho") {
        check_keys(j, where, {"id", "family", "units", "omega"});
        forward::HarmonicOscillator f;
        read(j, "omega", f.omega, where);
        p.family = f;
    } else if (family == "hulthen") {
        check_keys(j, where, {"id", "family", "units", "V0", "lambda"});
        forward::Hulthen f;
        read(j, "V0", f.V0, where);
        read(j, "lambda", f.lambda, where);
        p.family = f;
    } else if (family == "kratzer") {
        check_keys(j, where, {"id", "family", "units", "B", "a"});
        forward::Kratzer f;
        read(j, "B", f.B, where);
        read(j, "a", f.a, where);
        p.family = f;
    } else if (family == "hyperbolic") {
        check_keys(j, where, {"id", "family", "units", "A", "B", "alpha", "beta"});
        forward::HyperbolicWell f;
        read(j, "A", f.A_sinh, where);
        read(j, "B", f.B_cosh, where);
        read(j, "alpha", f.alpha, where);
        read(j, "beta", f.beta, where);
        p.family = f;
    } else if (family == "tabulated") {
        check_keys(j, where, {"id", "family", "units", "source", "path", "r", "V"});
        if (j.contains("path")) {
            auto t = forward::read_tabulated_csv(j.at("path").get<std::string>(), p.id);
            p.family = t.family;
            p.units = t.units;
        } else {
            std::vector<double> r, V;
            read(j, "r", r, where);
            read(j, "V", V, where);
            p.family = forward::make_tabulated(r, V, j.value("source", std::string("inline")));
        }
    } else {
        throw Error(ErrorCode::Config, "unknown potential family '" + family + "'");
    }
    p.validate();
    return p;
}

json to_json(const PipelineConfig& c) {
    json j;
    j["potential"] = to_json(c.potential);
    j["mode"] = to_string(c.mode);
    j["solver"] = {{"r_max", c.solver.r_max},
                   {"n_points", c.solver.n_points},
                   {"method", to_string(c.solver.method)},
                   {"richardson_levels", c.solver.richardson_levels},
                   {"bound_only", c.solver.bound_only}};
    j["gbm"] = {{"ell_max", c.gbm.ell_max},
                {"mode", to_string(c.gbm.mode)},
                {"path", c.gbm_path_auto ? std::string("auto") : std::string(to_string(c.gbm.path))},
                {"moment_max_order", c.gbm.moment_max_order},
                {"extra_s_level", c.gbm.extra_s_level}};
    j["odd_family"] = {{"kind", moments::to_string(c.odd.kind)},
                       {"fit_degree", c.odd.fit_degree},
                       {"maxent_terms", c.odd.maxent_terms}};
    j["pade"] = {{"candidates", c.pade.candidates.empty() ? json("default") : pairs_to_json(c.pade.candidates)},
                 {"filter_delta", c.pade.filter.delta},
                 {"froissart_rel", c.pade.filter.froissart_rel}};
    j["inversion"] = {{"method", to_string(c.inversion.method)},
                      {"terms", c.inversion.numeric.terms},
                      {"tolerance", c.inversion.numeric.tolerance},
                      {"period_factor", c.inversion.numeric.period_factor}};
    const auto& rc = c.recovery.config;
    j["recovery"] = {{"r_max", c.recovery.r_max},
                     {"half_width", rc.differentiator.half_width},
                     {"order", rc.differentiator.order},
                     {"boundary", recovery::to_string(rc.differentiator.boundary)},
                     {"theta", rc.theta},
                     {"core_steps", rc.core_steps}};
    j["metric"] = {{"window", c.metric.window ? json::array({c.metric.window->first, c.metric.window->second})
                                              : json("default")},
                   {"lq_grid", c.metric.lq_grid}};
    const auto& lc = c.lsq.config;
    j["lsq"] = {{"enabled", c.lsq.enabled},
                {"r_max", c.lsq.r_max},
                {"intervals", c.lsq.intervals},
                {"core_steps", c.lsq.core_steps},
                {"num_pairs", lc.num_pairs},
                {"weights_dd", lc.weights_dd},
                {"weights_dn", lc.weights_dn},
                {"mu_reg", lc.mu_reg},
                {"max_iterations", lc.max_iterations},
                {"armijo_c", lc.armijo_c},
                {"backtrack", lc.backtrack},
                {"max_backtracks", lc.max_backtracks},
                {"tolerance", lc.tolerance}};
    return j;
}

PipelineConfig config_from_json(const json& j, PipelineConfig c) {
    check_keys(j, "config", {"potential", "mode", "solver", "gbm", "odd_family", "pade", "inversion", "recovery",
                             "metric", "lsq"});
    if (j.contains("potential")) c.potential = potential_from_json(j.at("potential"));
    if (j.contains("mode")) c.mode = pipeline_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        check_keys(s, "/solver", {"r_max", "n_points", "method", "richardson_levels", "bound_only"});
        read(s, "r_max", c.solver.r_max, "/solver");
        read(s, "n_points", c.solver.n_points, "/solver");
        if (s.contains("method")) c.solver.method = forward::discretization_from_string(s.at("method").get<std::string>());
        read(s, "richardson_levels", c.solver.richardson_levels, "/solver");
        read(s, "bound_only", c.solver.bound_only, "/solver");
    }
    if (j.contains("gbm")) {
        const auto& g = j.at("gbm");
        check_keys(g, "/gbm", {"ell_max", "mode", "path", "moment_max_order", "extra_s_level"});
        read(g, "ell_max", c.gbm.ell_max, "/gbm");
        if (g.contains("mode")) c.gbm.mode = gbm::ladder_mode_from_string(g.at("mode").get<std::string>());
        if (g.contains("path")) {
            const auto p = g.at("path").get<std::string>();
            c.gbm_path_auto = p == "auto";
            if (!c.gbm_path_auto) c.gbm.path = gbm::ladder_path_from_string(p);
        }
        read(g, "moment_max_order", c.gbm.moment_max_order, "/gbm");
        read(g, "extra_s_level", c.gbm.extra_s_level, "/gbm");
    }
    if (j.contains("odd_family")) {
        const auto& o = j.at("odd_family");
        check_keys(o, "/odd_family", {"kind", "fit_degree", "maxent_terms"});
        if (o.contains("kind")) c.odd.kind = moments::odd_family_from_string(o.at("kind").get<std::string>());
        read(o, "fit_degree", c.odd.fit_degree, "/odd_family");
        read(o, "maxent_terms", c.odd.maxent_terms, "/odd_family");
    }
    if (j.contains("pade")) {
        const auto& p = j.at("pade");
        check_keys(p, "/pade", {"candidates", "filter_delta", "froissart_rel"});
        if (p.contains("candidates")) {
            const auto& cj = p.at("candidates");
            c.pade.candidates.clear();
            if (cj.is_string()) {
                if (cj.get<std::string>() != "default") throw Error(ErrorCode::Config, "/pade/candidates must be 'default' or a list");
            } else {
                for (const auto& e : cj) {
                    if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::Config, "/pade/candidates entries are [N, D]");
                    c.pade.candidates.emplace_back(e[0].get<int>(), e[1].get<int>());
                }
            }
        }
        read(p, "filter_delta", c.pade.filter.delta, "/pade");
        read(p, "froissart_rel", c.pade.filter.froissart_rel, "/pade");
    }
    if (j.contains("inversion")) {
        const auto& v = j.at("inversion");
        check_keys(v, "/inversion", {"method", "terms", "tolerance", "period_factor"});
        if (v.contains("method")) c.inversion.method = inversion_method_from_string(v.at("method").get<std::string>());
        read(v, "terms", c.inversion.numeric.terms, "/inversion");
        read(v, "tolerance", c.inversion.numeric.tolerance, "/inversion");
        read(v, "period_factor", c.inversion.numeric.period_factor, "/inversion");
    }
    if (j.contains("recovery")) {
        const auto& r = j.at("recovery");
        check_keys(r, "/recovery", {"r_max", "half_width", "order", "boundary", "theta", "core_steps"});
        auto& rc = c.recovery.config;
        read(r, "r_max", c.recovery.r_max, "/recovery");
        read(r, "half_width", rc.differentiator.half_width, "/recovery");
        read(r, "order", rc.differentiator.order, "/recovery");
        if (r.contains("boundary")) rc.differentiator.boundary = recovery::boundary_policy_from_string(r.at("boundary").get<std::string>());
        read(r, "theta", rc.theta, "/recovery");
        read(r, "core_steps", rc.core_steps, "/recovery");
    }
    if (j.contains("metric")) {
        const auto& m = j.at("metric");
        check_keys(m, "/metric", {"window", "lq_grid"});
        if (m.contains("window")) {
            const auto& w = m.at("window");
            if (w.is_string()) {
                if (w.get<std::string>() != "default") throw Error(ErrorCode::Config, "/metric/window must be 'default' or [lo, hi]");
                c.metric.window.reset();
            } else {
                if (!w.is_array() || w.size() != 2) throw Error(ErrorCode::Config, "/metric/window must be [lo, hi]");
                c.metric.window = std::make_pair(w[0].get<double>(), w[1].get<double>());
            }
        }
        read(m, "lq_grid", c.metric.lq_grid, "/metric");
    }
    if (j.contains("lsq")) {
        const auto& l = j.at("lsq");
        check_keys(l, "/lsq", {"enabled", "r_max", "intervals", "core_steps", "num_pairs", "weights_dd", "weights_dn",
                               "mu_reg", "max_iterations", "armijo_c", "backtrack", "max_backtracks", "tolerance"});
        auto& lc = c.lsq.config;
        read(l, "enabled", c.lsq.enabled, "/lsq");
        read(l, "r_max", c.lsq.r_max, "/lsq");
        read(l, "intervals", c.lsq.intervals, "/lsq");
        read(l, "core_steps", c.lsq.core_steps, "/lsq");
        read(l, "num_pairs", lc.num_pairs, "/lsq");
        read(l, "weights_dd", lc.weights_dd, "/lsq");
        read(l, "weights_dn", lc.weights_dn, "/lsq");
        read(l, "mu_reg", lc.mu_reg, "/lsq");
        read(l, "max_iterations", lc.max_iterations, "/lsq");
        read(l, "armijo_c", lc.armijo_c, "/lsq");
        read(l, "backtrack", lc.backtrack, "/lsq");
        read(l, "max_backtracks", lc.max_backtracks, "/lsq");
        read(l, "tolerance", lc.tolerance, "/lsq");
    }
    return c;
}

json to_json(const MomentTable& t) {
    json out = json::array();
    for (const auto& [n, e] : t.entries()) out.push_back({{"order", n}, {"value", e.value}, {"provenance", to_string(e.provenance)}});
    return out;
}

MomentTable moment_table_from_json(const json& j) {
    if (!j.is_array()) throw Error(ErrorCode::Config, "moment table must be a JSON array");
    MomentTable t;
    for (const auto& e : j) {
        check_keys(e, "moment entry", {"order", "value", "provenance"});
        try {
            t.set(e.at("order").get<int>(), e.at("value").get<double>(),
                  moment_provenance_from_string(e.at("provenance").get<std::string>()));
        } catch (const nlohmann::json::exception& ex) {
            throw Error(ErrorCode::Config, std::string("moment entry: ") + ex.what());
        }
    }
    return t;
}

std::vector<std::string> config_leaf_paths(const json& j) {
    // Array elements fold into their parent so a list counts as one setting.
    auto is_index = [](const std::string& t) {
        return !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char ch) { return std::isdigit(ch); });
    };
    std::vector<std::string> out;
    const auto flat = j.flatten();
    for (auto it = flat.begin(); it != flat.end(); ++it) {
        std::string key = it.key();
        for (auto slash = key.find_last_of('/'); slash != std::string::npos && is_index(key.substr(slash + 1));
             slash = key.find_last_of('/')) {
            key.erase(slash);
        }
        if (std::find(out.begin(), out.end(), key) == out.end()) out.push_back(key);
    }
    return out;
}

}  // namespace gbmlap
