#include "gbmlap/bench.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>

#ifndef GBMLAP_VERSION
#define GBMLAP_VERSION "0.0.0"
#endif
#ifndef GBMLAP_DATA_DIR
#define GBMLAP_DATA_DIR "data"
#endif

namespace gbmlap::bench {

const char* tool_version() { return GBMLAP_VERSION; }

fs::path default_data_dir() { return fs::path(GBMLAP_DATA_DIR); }

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr) throw Error(ErrorCode::Numeric, "EVP_MD_CTX_new failed");
    const bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                    EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 && EVP_DigestFinal_ex(ctx, digest, &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) throw Error(ErrorCode::Numeric, "SHA-256 computation failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return os.str();
}

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::Config, "cannot read " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
    out << content;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + p.string());
}

}  // namespace

std::string sha256_file(const fs::path& p) { return sha256_hex(read_file(p)); }

std::string fmt17(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ReferenceTable load_reference_table(const fs::path& p) {
    ReferenceTable t;
    t.raw = json::parse(read_file(p));
    t.version = t.raw.at("version").get<std::string>();
    for (const auto& [id, v] : t.raw.at("rel_l2").at("lgbm").items()) t.lgbm[id] = v.get<double>();
    for (const auto& [id, v] : t.raw.at("rel_l2").at("lsq").items()) t.lsq[id] = v.get<double>();
    return t;
}

json config_diff(const json& golden, const json& actual) { return json::diff(golden, actual); }

namespace {

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

double value_or_nan(const RadialFunction& f, std::size_t i) {
    if (i >= f.size() || !f.valid[i] || !std::isfinite(f.values[i])) return nan();
    return f.values[i];
}

std::string radial_csv(const RadialGrid& g, const RadialFunction& exact, const RadialFunction& rec) {
    std::string s = "r,exact,reconstructed,abs_err\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double e = value_or_nan(exact, i), r = value_or_nan(rec, i);
        s += fmt17(g.points[i]) + ',' + fmt17(e) + ',' + fmt17(r) + ',' + fmt17(std::abs(r - e)) + '\n';
    }
    return s;
}

std::string lq_csv(const PipelineResult& res) {
    std::string s = "q,exact,averaged,dispersion\n";
    for (std::size_t i = 0; i < res.lq_q.size(); ++i) {
        const double m = i < res.lq_mean.size() ? res.lq_mean[i] : nan();
        const double d = i < res.lq_dispersion.size() ? res.lq_dispersion[i] : nan();
        s += fmt17(res.lq_q[i]) + ',' + fmt17(res.lq_exact[i]) + ',' + fmt17(m) + ',' + fmt17(d) + '\n';
    }
    return s;
}

std::string overlay_csv(const PipelineResult& res) {
    std::string s = "r,exact,laplace_gbm,lsq,err_laplace_gbm,err_lsq\n";
    for (std::size_t i = 0; i < res.grid.size(); ++i) {
        const double e = value_or_nan(res.v_exact, i);
        const double a = value_or_nan(res.v_rec, i);
        double b = nan();
        if (res.lsq && res.grid.points[i] <= res.config.lsq.r_max) b = res.lsq->v_hartree[i];
        s += fmt17(res.grid.points[i]) + ',' + fmt17(e) + ',' + fmt17(a) + ',' + fmt17(b) + ',' + fmt17(std::abs(a - e)) +
             ',' + fmt17(std::abs(b - e)) + '\n';
    }
    return s;
}

struct Series {
    std::string name;
    const std::vector<double>* y;
    const char* colour;
};

// Polyline rendering on a fixed 640x400 canvas. Non-finite samples break the
// line; the y range is taken from the first series (the exact curve) padded
// by 10% so wild reconstructions are clipped instead of flattening it.
std::string svg_plot(const std::string& title, const std::vector<double>& x, const std::vector<Series>& series,
                     bool log_y = false) {
    constexpr double W = 640, H = 400, ml = 60, mr = 20, mt = 30, mb = 40;
    auto tf = [log_y](double v) { return log_y ? (v > 0 ? std::log10(v) : nan()) : v; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (double v : x) {
        if (std::isfinite(v)) x0 = std::min(x0, v), x1 = std::max(x1, v);
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        if (k > 0 && std::isfinite(y0)) break;
        for (double v : *series[k].y) {
            const double t = tf(v);
            if (std::isfinite(t)) y0 = std::min(y0, t), y1 = std::max(y1, t);
        }
    }
    if (!std::isfinite(x0) || x1 <= x0) x0 = 0, x1 = 1;
    if (!std::isfinite(y0) || y1 <= y0) y0 = std::isfinite(y0) ? y0 - 1 : 0, y1 = y0 + 2;
    const double pad = 0.1 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double v) { return ml + (v - x0) / (x1 - x0) * (W - ml - mr); };
    auto py = [&](double v) { return H - mb - (v - y0) / (y1 - y0) * (H - mt - mb); };
    char buf[128];
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
    os << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    os << "<text x=\"320\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << title
       << "</text>\n";
    std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                  ml, mt, W - ml - mr, H - mt - mb);
    os << buf;
    auto label = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.3g", log_y ? std::pow(10.0, v) : v);
        return std::string(buf);
    };
    os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    std::snprintf(buf, sizeof buf, "%.3g", x0);
    os << "<text x=\"" << ml << "\" y=\"" << H - mb + 15 << "\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", x1);
    os << "<text x=\"" << W - mr << "\" y=\"" << H - mb + 15 << "\" text-anchor=\"end\">" << buf << "</text>\n";
    os << "<text x=\"" << ml - 4 << "\" y=\"" << H - mb << "\" text-anchor=\"end\">" << label(y0) << "</text>\n";
    os << "<text x=\"" << ml - 4 << "\" y=\"" << mt + 10 << "\" text-anchor=\"end\">" << label(y1) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        os << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 15 + 14 * static_cast<double>(k) << "\" fill=\""
           << series[k].colour << "\">" << series[k].name << "</text>\n";
    }
    os << "</g>\n";
    for (const auto& s : series) {
        std::string pts;
        auto flush = [&]() {
            if (!pts.empty()) {
                os << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.2\" points=\"" << pts
                   << "\"/>\n";
            }
            pts.clear();
        };
        for (std::size_t i = 0; i < x.size() && i < s.y->size(); ++i) {
            const double t = tf((*s.y)[i]);
            if (!std::isfinite(t) || !std::isfinite(x[i])) {
                flush();
                continue;
            }
            const double yy = std::clamp(py(t), mt, H - mb);
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x[i]), yy);
            pts += buf;
        }
        flush();
    }
    os << "</svg>\n";
    return os.str();
}

std::vector<double> column(const RadialFunction& f, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = value_or_nan(f, i);
    return out;
}

json poles_json(const pade::RationalApproximant& a) {
    json arr = json::array();
    for (const auto& p : a.poles) {
        arr.push_back({{"re", p.value.real()}, {"im", p.value.imag()}, {"multiplicity", p.multiplicity}});
    }
    return arr;
}

json nan_to_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string utc_timestamp(const char* fmt) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[64];
    std::strftime(buf, sizeof buf, fmt, &tm);
    return buf;
}

}  // namespace

RunArtifacts write_run(const PipelineResult& res, const fs::path& dir, const ReferenceTable* reference) {
    RunArtifacts art;
    art.dir = dir;
    fs::create_directories(dir);
    const auto& g = res.grid;
    const std::size_t n = g.size();

    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("vr.csv", radial_csv(g, res.v_exact, res.v_rec));
    files.emplace_back("r2rho.csv", radial_csv(g, res.r2rho_exact, res.r2rho_rec));
    files.emplace_back("lq.csv", lq_csv(res));
    files.emplace_back("chi.csv", radial_csv(g, res.chi_exact, res.chi_rec));
    files.emplace_back("overlay_error.csv", overlay_csv(res));
    if (res.lsq) files.emplace_back("lsq_convergence.csv", lsq::convergence_csv(res.lsq->result));

    const std::string id = res.config.potential.id;
    const auto ve = column(res.v_exact, n), vr = column(res.v_rec, n);
    const auto de = column(res.r2rho_exact, n), dr = column(res.r2rho_rec, n);
    const auto ce = column(res.chi_exact, n), cr = column(res.chi_rec, n);
    // Panels are drawn on the metric window neighbourhood, where the curves live.
    std::vector<double> xr(n, nan());
    const double hi = std::max(res.window.hi * 1.5, res.window.lo);
    for (std::size_t i = 0; i < n; ++i) {
        if (g.points[i] <= hi) xr[i] = g.points[i];
    }
    files.emplace_back("vr.svg", svg_plot(id + ": V(r) [Hartree]", xr, {{"exact", &ve, "black"}, {"reconstructed", &vr, "red"}}));
    files.emplace_back("r2rho.svg",
                       svg_plot(id + ": r^2 rho(r)", xr, {{"exact", &de, "black"}, {"reconstructed", &dr, "red"}}));
    files.emplace_back("lq.svg", svg_plot(id + ": L(q)", res.lq_q,
                                          {{"exact", &res.lq_exact, "black"}, {"averaged", &res.lq_mean, "red"}}, true));
    files.emplace_back("chi.svg", svg_plot(id + ": chi(r)", xr, {{"exact", &ce, "black"}, {"reconstructed", &cr, "red"}}));
    std::vector<double> vl(n, nan()), el(n, nan()), eg(n, nan());
    for (std::size_t i = 0; i < n; ++i) {
        if (res.lsq && g.points[i] <= res.config.lsq.r_max) vl[i] = res.lsq->v_hartree[i];
        eg[i] = std::abs(vr[i] - ve[i]);
        el[i] = std::abs(vl[i] - ve[i]);
    }
    files.emplace_back("overlay.svg", svg_plot(id + ": V(r) overlay", xr,
                                               {{"exact", &ve, "black"}, {"laplace-gbm", &vr, "red"}, {"lsq", &vl, "blue"}}));
    files.emplace_back("overlay_error.svg", svg_plot(id + ": |V_rec - V| (log)", xr,
                                                     {{"laplace-gbm", &eg, "red"}, {"lsq", &el, "blue"}}, true));
    if (res.lsq) {
        std::vector<double> it, F;
        for (const auto& h : res.lsq->result.history) {
            it.push_back(h.iteration);
            F.push_back(h.F);
        }
        files.emplace_back("lsq_convergence.svg", svg_plot(id + ": LSQ functional (log)", it, {{"F", &F, "blue"}}, true));
    }

    for (const auto& [name, content] : files) {
        write_file(dir / name, content);
        art.checksums[name] = sha256_hex(content);
    }

    json m;
    m["tool"] = "gbmlap";
    m["tool_version"] = tool_version();
    m["timestamp"] = utc_timestamp("%Y-%m-%dT%H:%M:%SZ");
    m["potential"] = to_json(res.config.potential);
    m["units"] = {{"input", to_string(res.config.potential.units)}, {"outputs", "hartree"}, {"internal", "scaled"}};
    m["mode"] = to_string(res.config.mode);
    m["config"] = to_json(res.config);
    m["status"] = res.ok ? "ok" : "failed";
    if (!res.ok) m["error"] = {{"code", res.error_code}, {"message", res.error_message}};
    m["notes"] = res.notes;

    json gbmj = {{"path", to_string(res.config.gbm.path)}, {"e00_scaled", res.e00_scaled}};
    if (res.accounting) {
        json levels = json::array();
        for (const auto& [nr, l] : res.accounting->consumed_levels) levels.push_back({nr, l});
        gbmj["accounting"] = {{"ell_used", res.accounting->ell_used},
                              {"consumed_count", res.accounting->consumed_count},
                              {"consumed_levels", levels},
                              {"reduction_vs_120_percent", gbm::accounting_report(*res.accounting)},
                              {"truncated_at", res.accounting->truncated_at}};
    }
    gbmj["saturation_factors"] = res.saturation_factors;
    m["gbm"] = gbmj;
    m["moments"] = to_json(res.moments);
    m["odd_family"] = {{"requested", moments::to_string(res.config.odd.kind)},
                       {"used", moments::to_string(res.odd_used)},
                       {"fell_back", res.odd_fell_back}};

    json cands = json::array();
    for (const auto& [N, D] : res.candidates) cands.push_back({N, D});
    json surv = json::array();
    for (std::size_t k = 0; k < res.survivors.size(); ++k) {
        const auto& s = res.survivors[k];
        surv.push_back({{"N", s.N},
                        {"D", s.D},
                        {"tail_residual", nan_to_null(s.tail_residual)},
                        {"condition_estimate", s.condition_estimate},
                        {"chosen", static_cast<int>(k) == res.chosen},
                        {"num", s.num},
                        {"den", s.den},
                        {"poles", poles_json(s)}});
    }
    json rej = json::array();
    for (const auto& r : res.rejections) rej.push_back({{"N", r.N}, {"D", r.D}, {"reason", r.reason}, {"detail", r.detail}});
    m["pade"] = {{"candidates", cands}, {"survivors", surv}, {"rejections", rej}};

    json inv = {{"method", to_string(res.config.inversion.method)},
                {"merged_pole_clusters", res.residue_merged_clusters},
                {"density",
                 {{"integral", res.density.integral},
                  {"normalization_deviation", res.density.normalization_deviation},
                  {"clipped", res.density.clipped},
                  {"masked", res.density.masked},
                  {"most_negative", res.density.most_negative}}}};
    if (res.config.inversion.method == InversionMethod::Numeric) {
        inv["numeric"] = {{"max_gap", res.numeric.max_gap}, {"evaluations", res.numeric.evaluations}};
    }
    m["inversion"] = inv;
    m["recovery"] = to_json(res.config)["recovery"];

    json metrics = {{"rel_l2_V", nan_to_null(res.rel_l2_v)},
                    {"window", {res.window.lo, res.window.hi}},
                    {"grid", {{"kind", "uniform"}, {"step", g.step}, {"points", g.size()},
                              {"r_first", g.size() ? g.points.front() : 0.0}, {"r_last", g.size() ? g.points.back() : 0.0}}}};
    if (res.lsq) {
        metrics["lsq"] = {{"rel_l2_V", res.lsq->rel_l2},
                          {"rmse_eigs_dd", res.lsq->rmse_dd},
                          {"rmse_eigs_dn", res.lsq->rmse_dn},
                          {"iterations", res.lsq->result.iterations},
                          {"final_F", res.lsq->result.history.back().F},
                          {"status", lsq::to_string(res.lsq->result.status)},
                          {"elapsed_seconds", res.lsq->result.elapsed_seconds},
                          {"core_cap_steps", res.config.lsq.core_steps}};
    } else if (!res.lsq_error.empty()) {
        metrics["lsq"] = {{"error", res.lsq_error}};
    }
    m["metrics"] = metrics;
    if (reference != nullptr) {
        json ref = {{"version", reference->version}, {"tag", "reference-only"}};
        if (auto it = reference->lgbm.find(id); it != reference->lgbm.end()) ref["lgbm_rel_l2"] = it->second;
        if (auto it = reference->lsq.find(id); it != reference->lsq.end()) ref["lsq_rel_l2"] = it->second;
        m["reference"] = ref;
    }
    m["elapsed_seconds"] = res.elapsed_seconds;
    json sums = json::object();
    for (const auto& [name, sum] : art.checksums) sums[name] = sum;
    m["checksums"] = sums;

    write_file(dir / "manifest.json", m.dump(2) + "\n");
    art.manifest = std::move(m);
    return art;
}

std::vector<PipelineConfig> canonical_suite_configs(PipelineMode mode) {
    std::vector<PipelineConfig> out;
    for (const auto& id : forward::canonical_ids()) {
        auto c = canonical_config(id);
        c.mode = mode;
        out.push_back(std::move(c));
    }
    return out;
}

SuiteOutcome run_suite(const std::vector<PipelineConfig>& configs, const fs::path& out_root, const std::string& suite_name,
                       const ReferenceTable* reference) {
    SuiteOutcome out;
    if (configs.empty()) return out;

    fs::path root = out_root / (utc_timestamp("%Y%m%dT%H%M%SZ") + "-" + suite_name);
    for (int k = 2; fs::exists(root); ++k) {
        root = out_root / (utc_timestamp("%Y%m%dT%H%M%SZ") + "-" + suite_name + "-" + std::to_string(k));
    }
    fs::create_directories(root);
    out.root = root;

    std::vector<std::future<std::pair<PipelineResult, RunArtifacts>>> jobs;
    for (const auto& cfg : configs) {
        jobs.push_back(std::async(std::launch::async, [&cfg, &root, reference]() {
            auto res = run_pipeline(cfg);
            auto art = write_run(res, root / cfg.potential.id, reference);
            return std::make_pair(std::move(res), std::move(art));
        }));
    }
    for (auto& j : jobs) {
        auto [res, art] = j.get();
        SuiteRow row;
        row.potential = res.config.potential.id;
        row.ok = res.ok;
        row.error = res.ok ? "" : res.error_code;
        row.rel_l2_v = res.rel_l2_v;
        row.lsq_ran = res.lsq.has_value();
        row.lsq_rel_l2 = res.lsq ? res.lsq->rel_l2 : nan();
        row.consumed_count = res.accounting ? res.accounting->consumed_count : 0;
        row.elapsed = res.elapsed_seconds;
        row.run_dir = art.dir;
        row.reference_lgbm = nan();
        row.reference_lsq = nan();
        if (reference != nullptr) {
            if (auto it = reference->lgbm.find(row.potential); it != reference->lgbm.end()) row.reference_lgbm = it->second;
            if (auto it = reference->lsq.find(row.potential); it != reference->lsq.end()) row.reference_lsq = it->second;
        }
        out.rows.push_back(row);
        out.results.push_back(std::move(res));
        out.artifacts.push_back(std::move(art));
    }

    std::string csv = "potential,status,error,rel_l2_V,reference_lgbm,lsq_rel_l2_V,reference_lsq,consumed_count,elapsed_s\n";
    json rows = json::array();
    for (const auto& r : out.rows) {
        csv += r.potential + ',' + (r.ok ? "ok" : "failed") + ',' + r.error + ',' + fmt17(r.rel_l2_v) + ',' +
               fmt17(r.reference_lgbm) + ',' + fmt17(r.lsq_rel_l2) + ',' + fmt17(r.reference_lsq) + ',' +
               std::to_string(r.consumed_count) + ',' + fmt17(r.elapsed) + '\n';
        rows.push_back({{"potential", r.potential},
                        {"status", r.ok ? "ok" : "failed"},
                        {"error", r.error},
                        {"rel_l2_V", nan_to_null(r.rel_l2_v)},
                        {"reference_lgbm", nan_to_null(r.reference_lgbm)},
                        {"lsq_rel_l2_V", nan_to_null(r.lsq_rel_l2)},
                        {"reference_lsq", nan_to_null(r.reference_lsq)},
                        {"consumed_count", r.consumed_count},
                        {"manifest", (fs::relative(r.run_dir, root) / "manifest.json").string()}});
    }
    write_file(root / "summary.csv", csv);
    write_file(root / "summary.json", json({{"suite", suite_name}, {"tool_version", tool_version()}, {"runs", rows}}).dump(2) + "\n");
    return out;
}

ReplayReport replay_manifest(const fs::path& manifest_path, const fs::path& out_dir) {
    const json m = json::parse(read_file(manifest_path));
    if (!m.contains("config") || !m.contains("checksums")) {
        throw Error(ErrorCode::Config, "manifest lacks config or checksums: " + manifest_path.string());
    }
    const auto cfg = config_from_json(m.at("config"), PipelineConfig{});
    const auto res = run_pipeline(cfg);
    const auto art = write_run(res, out_dir, nullptr);
    ReplayReport rep;
    rep.replay_dir = out_dir;
    for (const auto& [name, sum] : m.at("checksums").items()) {
        auto it = art.checksums.find(name);
        if (it == art.checksums.end() || it->second != sum.get<std::string>()) rep.mismatched.push_back(name);
    }
    for (const auto& [name, sum] : art.checksums) {
        if (!m.at("checksums").contains(name)) rep.mismatched.push_back(name);
    }
    rep.identical = rep.mismatched.empty();
    return rep;
}

}  // namespace gbmlap::bench
