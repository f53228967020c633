#include "gbmlap/forward.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

#include "gbmlap/interp.hpp"
#include "gbmlap/linalg.hpp"

namespace gbmlap::forward {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double eval_hartree_like(const PotentialFamily& fam, double r) {
    return std::visit(
        overloaded{
            [r](const Coulomb& p) { return -p.Z / r; },
            [r](const HarmonicOscillator& p) { return 0.5 * p.omega * p.omega * r * r; },
            [r](const Hulthen& p) {
                const double e = std::exp(-p.lambda * r);
                return -p.V0 * e / (-std::expm1(-p.lambda * r));
            },
            [r](const Kratzer& p) { return -2.0 * p.B * (p.a / r - p.a * p.a / (2.0 * r * r)); },
            [r](const HyperbolicWell& p) {
                const double s = std::sinh(p.alpha * r);
                const double c = std::cosh(p.beta * r);
                return p.A_sinh / (s * s) + p.B_cosh / (c * c);
            },
            [r](const Tabulated& p) {
                if (r <= p.r.front()) return p.V.front();
                if (r >= p.r.back()) return p.V.back();
                return p.spline ? (*p.spline)(r) : Pchip(p.r, p.V)(r);
            },
        },
        fam);
}

// Coarse-to-fine Richardson table on a scalar sequence with leading error
// order h^p and subsequent orders p+2, p+4, ...
double richardson(const std::vector<double>& seq, int p) {
    std::vector<double> t = seq;
    for (std::size_t j = 1; j < t.size(); ++j) {
        const double factor = std::pow(2.0, p + 2 * static_cast<int>(j - 1)) - 1.0;
        for (std::size_t k = t.size() - 1; k >= j; --k) {
            t[k] = t[k] + (t[k] - t[k - 1]) / factor;
        }
    }
    return t.back();
}

struct LevelSolve {
    double h = 0.0;
    std::vector<double> r;  // interior points
    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> vectors;  // normalised with h * sum u^2 = 1
};

std::vector<double> effective_potential(const PotentialSpec& spec, int ell,
                                        const std::vector<double>& r) {
    std::vector<double> w(r.size());
    const double cent = static_cast<double>(ell) * (ell + 1);
    for (std::size_t i = 0; i < r.size(); ++i) {
        w[i] = evaluate_scaled(spec, r[i]) + cent / (r[i] * r[i]);
    }
    return w;
}

void orient_and_normalise(std::vector<double>& u, double h) {
    double s = 0.0;
    double mx = 0.0;
    for (double v : u) {
        s += v * v;
        mx = std::max(mx, std::abs(v));
    }
    const double norm = std::sqrt(s * h);
    for (double& v : u) v /= norm;
    for (double v : u) {
        if (std::abs(v) > 1e-3 * mx / norm) {
            if (v < 0) {
                for (double& x : u) x = -x;
            }
            break;
        }
    }
}

LevelSolve solve_fd2(const std::vector<double>& w, double h, int k) {
    const std::size_t n = w.size();
    linalg::SymTridiag t;
    t.diag.resize(n);
    t.off.assign(n - 1, -1.0 / (h * h));
    for (std::size_t i = 0; i < n; ++i) t.diag[i] = 2.0 / (h * h) + w[i];
    LevelSolve out;
    out.h = h;
    out.eigenvalues = linalg::lowest_eigenvalues(t, k);
    for (double& lam : out.eigenvalues) {
        auto u = linalg::inverse_iteration(t, lam);
        // Rayleigh quotient in difference form: cancellation-free for the
        // large diagonal 2/h^2.
        double num = 0.0, den = 0.0, prev = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = u[i] - prev;
            num += d * d / (h * h) + w[i] * u[i] * u[i];
            den += u[i] * u[i];
            prev = u[i];
        }
        num += prev * prev / (h * h);
        lam = num / den;
        orient_and_normalise(u, h);
        out.vectors.push_back(std::move(u));
    }
    return out;
}

// Numerov matrix method: rows with a safely positive Numerov weight use the
// fourth-order recurrence, written as a symmetric tridiagonal pencil whose
// diagonal depends monotonically on E; the remaining rows (deep inside
// strong centrifugal cores) keep the three-point stencil.
LevelSolve solve_numerov(const std::vector<double>& w, double h, int k) {
    const std::size_t n = w.size();
    const double c = h * h / 12.0;
    const double wmin = *std::min_element(w.begin(), w.end());
    std::vector<bool> numerov_row(n);
    for (std::size_t i = 0; i < n; ++i) numerov_row[i] = c * (w[i] - wmin) < 0.5;

    auto build = [&](double e) {
        linalg::SymTridiag t;
        t.diag.resize(n);
        t.off.assign(n - 1, -1.0 / (h * h));
        for (std::size_t i = 0; i < n; ++i) {
            const double x = w[i] - e;
            const double s = numerov_row[i] ? x / (1.0 - c * x) : x;
            t.diag[i] = 2.0 / (h * h) + s;
        }
        return t;
    };
    auto count = [&](double e) { return linalg::sturm_count(build(e), 0.0); };

    double lo = wmin;
    double hi = std::max(wmin, 0.0) + 1.0;
    for (int guard = 0; count(hi) < k; ++guard) {
        if (guard > 200) throw Error(ErrorCode::Solver, "Numerov spectrum bound not found");
        hi = wmin + 2.0 * (hi - wmin);
    }
    LevelSolve out;
    out.h = h;
    out.eigenvalues = linalg::bisect_eigenvalues(count, lo, hi, k);
    for (double e : out.eigenvalues) {
        auto t = build(e);
        auto z = linalg::inverse_iteration(t, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (numerov_row[i]) z[i] /= (1.0 - c * (w[i] - e));
        }
        orient_and_normalise(z, h);
        out.vectors.push_back(std::move(z));
    }
    return out;
}

}  // namespace

Tabulated make_tabulated(std::vector<double> r, std::vector<double> V, std::string source) {
    Tabulated t;
    t.spline = std::make_shared<const Pchip>(r, V);
    t.r = std::move(r);
    t.V = std::move(V);
    t.source = std::move(source);
    return t;
}

std::string PotentialSpec::family_name() const {
    return std::visit(overloaded{
                          [](const Coulomb&) { return std::string("coulomb"); },
                          [](const HarmonicOscillator&) { return std::string("ho"); },
                          [](const Hulthen&) { return std::string("hulthen"); },
                          [](const Kratzer&) { return std::string("kratzer"); },
                          [](const HyperbolicWell&) { return std::string("hyperbolic"); },
                          [](const Tabulated&) { return std::string("tabulated"); },
                      },
                      family);
}

double PotentialSpec::asymptote() const {
    if (std::holds_alternative<HarmonicOscillator>(family)) {
        return std::numeric_limits<double>::infinity();
    }
    if (const auto* t = std::get_if<Tabulated>(&family)) return t->V.back();
    return 0.0;
}

void PotentialSpec::validate() const {
    auto need = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::Config, std::string("invalid potential parameter: ") + what);
    };
    std::visit(overloaded{
                   [&](const Coulomb& p) { need(p.Z > 0, "Z > 0"); },
                   [&](const HarmonicOscillator& p) { need(p.omega > 0, "omega > 0"); },
                   [&](const Hulthen& p) { need(p.lambda > 0, "lambda > 0"); },
                   [&](const Kratzer& p) { need(p.a > 0, "a > 0"); },
                   [&](const HyperbolicWell& p) {
                       need(p.alpha > 0, "alpha > 0");
                       need(p.beta > 0, "beta > 0");
                   },
                   [&](const Tabulated& p) {
                       need(p.r.size() >= 2 && p.r.size() == p.V.size(), "tabulated size");
                       need(p.r.front() > 0, "tabulated r > 0");
                       for (std::size_t i = 1; i < p.r.size(); ++i) need(p.r[i] > p.r[i - 1], "tabulated r increasing");
                   },
               },
               family);
}

PotentialSpec canonical(const std::string& id) {
    if (id == "coulomb") return {id, Coulomb{1.0}, UnitSystem::Hartree};
    if (id == "ho") return {id, HarmonicOscillator{1.0}, UnitSystem::Hartree};
    if (id == "hulthen") return {id, Hulthen{0.5, 0.5}, UnitSystem::Hartree};
    if (id == "kratzer") return {id, Kratzer{0.375, 1.0}, UnitSystem::Hartree};
    if (id == "hyperbolic") return {id, HyperbolicWell{1.0, -10.0, 1.0, 1.0}, UnitSystem::Hartree};
    throw Error(ErrorCode::Config, "unknown canonical potential '" + id + "'");
}

const std::vector<std::string>& canonical_ids() {
    static const std::vector<std::string> ids{"coulomb", "ho", "hulthen", "kratzer", "hyperbolic"};
    return ids;
}

std::vector<PotentialSpec> canonical_suite() {
    std::vector<PotentialSpec> out;
    for (const auto& id : canonical_ids()) out.push_back(canonical(id));
    return out;
}

double evaluate_potential(const PotentialSpec& spec, double r) {
    if (!(r > 0.0)) throw Error(ErrorCode::Domain, "potential evaluated at r <= 0");
    return eval_hartree_like(spec.family, r);
}

double evaluate_scaled(const PotentialSpec& spec, double r) {
    return convert_energy(evaluate_potential(spec, r), spec.units, UnitSystem::Scaled);
}

PotentialSpec read_tabulated_csv(const std::string& path, const std::string& id) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open tabulated potential '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::Config, "empty tabulated potential file");
    std::string lowered;
    for (char ch : line) lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    const auto pos = lowered.find("units:");
    if (lowered.rfind('#', 0) != 0 || pos == std::string::npos) {
        throw Error(ErrorCode::Config, "tabulated potential must start with '# units: <hartree|scaled>'");
    }
    std::string unit = lowered.substr(pos + 6);
    unit.erase(0, unit.find_first_not_of(" \t"));
    unit.erase(unit.find_last_not_of(" \t\r") + 1);
    std::vector<double> rs, vs;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double r = 0, v = 0;
        if (!(ss >> r >> v)) continue;  // header row such as "r,V"
        rs.push_back(r);
        vs.push_back(v);
    }
    if (rs.size() < 2) throw Error(ErrorCode::Config, "tabulated potential needs at least two rows");
    PotentialSpec spec{id, make_tabulated(std::move(rs), std::move(vs), path), unit_system_from_string(unit)};
    spec.validate();
    return spec;
}

const char* to_string(Discretization d) {
    return d == Discretization::Numerov ? "numerov" : "finite-difference-2";
}

Discretization discretization_from_string(const std::string& s) {
    if (s == "finite-difference-2" || s == "fd2") return Discretization::FiniteDifference2;
    if (s == "numerov") return Discretization::Numerov;
    throw Error(ErrorCode::Config, "unknown discretization '" + s + "'");
}

void SolverConfig::validate() const {
    if (!(r_max > 0.0)) throw Error(ErrorCode::Config, "solver r_max must be positive");
    if (n_points < 64) throw Error(ErrorCode::Config, "solver n_points must be >= 64");
    if (n_eigs < 1) throw Error(ErrorCode::Config, "solver n_eigs must be >= 1");
    if (richardson_levels < 1 || richardson_levels > 4) {
        throw Error(ErrorCode::Config, "richardson_levels must be in [1, 4]");
    }
}

ChannelSolution solve_channel(const PotentialSpec& spec, int ell, const SolverConfig& cfg) {
    cfg.validate();
    spec.validate();
    if (ell < 0) throw Error(ErrorCode::Domain, "negative angular momentum");
    const int order = cfg.method == Discretization::Numerov ? 4 : 2;

    std::vector<LevelSolve> levels;
    for (int lev = 0; lev < cfg.richardson_levels; ++lev) {
        const long n = (static_cast<long>(cfg.n_points) + 1) * (1L << lev) - 1;
        const double h = cfg.r_max / static_cast<double>(n + 1);
        std::vector<double> r(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = static_cast<double>(i + 1) * h;
        const auto w = effective_potential(spec, ell, r);
        const int k = std::min<int>(cfg.n_eigs, static_cast<int>(n));
        levels.push_back(cfg.method == Discretization::Numerov ? solve_numerov(w, h, k)
                                                                : solve_fd2(w, h, k));
        levels.back().r = std::move(r);
    }

    ChannelSolution sol;
    sol.ell = ell;
    sol.grid = RadialGrid::uniform(levels[0].h, static_cast<std::size_t>(cfg.n_points));
    const std::size_t nbase = sol.grid.size();
    const std::size_t k = levels[0].eigenvalues.size();
    const double asym = convert_energy(spec.asymptote(), spec.units, UnitSystem::Scaled);

    for (std::size_t s = 0; s < k; ++s) {
        std::vector<double> seq;
        for (const auto& lv : levels) seq.push_back(lv.eigenvalues[s]);
        const double e = richardson(seq, order);
        if (!std::isfinite(e)) {
            throw Error(ErrorCode::Solver, "non-finite eigenvalue in channel l=" + std::to_string(ell));
        }
        if (cfg.bound_only && !(e < asym)) break;
        std::vector<double> u(nbase);
        std::vector<double> samples(levels.size());
        for (std::size_t i = 0; i < nbase; ++i) {
            for (std::size_t lv = 0; lv < levels.size(); ++lv) {
                samples[lv] = levels[lv].vectors[s][(i + 1) * (std::size_t{1} << lv) - 1];
            }
            u[i] = richardson(samples, order);
        }
        orient_and_normalise(u, sol.grid.step);
        sol.eigenvalues.push_back(e);
        sol.eigenfunctions.push_back(std::move(u));
    }
    return sol;
}

SpectralDataset build_spectral_dataset(const PotentialSpec& spec, const std::vector<int>& counts,
                                       const SolverConfig& cfg) {
    std::vector<std::future<ChannelSolution>> jobs;
    for (std::size_t ell = 0; ell < counts.size(); ++ell) {
        SolverConfig c = cfg;
        c.n_eigs = std::max(1, counts[ell]);
        jobs.push_back(std::async(std::launch::async, [spec, ell, c] {
            return solve_channel(spec, static_cast<int>(ell), c);
        }));
    }
    SpectralDataset ds(spec.id, UnitSystem::Scaled);
    for (std::size_t ell = 0; ell < jobs.size(); ++ell) {
        const auto sol = jobs[ell].get();
        for (std::size_t n = 0; n < sol.eigenvalues.size() && static_cast<int>(n) < counts[ell]; ++n) {
            ds.add(static_cast<int>(n), static_cast<int>(ell), sol.eigenvalues[n]);
        }
    }
    return ds;
}

SpectralDataset build_spectral_dataset(const PotentialSpec& spec, int ell_max, int nr_max,
                                       const SolverConfig& cfg) {
    if (ell_max < 0 || nr_max < 0) throw Error(ErrorCode::Config, "ell_max and nr_max must be >= 0");
    return build_spectral_dataset(spec, std::vector<int>(static_cast<std::size_t>(ell_max) + 1, nr_max + 1), cfg);
}

double radial_moment(const RadialGrid& grid, const std::vector<double>& u, int n) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < u.size(); ++i) {
        s += static_cast<long double>(std::pow(grid.points[i], n)) * u[i] * u[i];
    }
    return static_cast<double>(s) * grid.step;
}

GroundOracle exact_ground_oracle(const PotentialSpec& spec, const SolverConfig& cfg, int max_order) {
    SolverConfig c = cfg;
    c.n_eigs = 1;
    const auto sol = solve_channel(spec, 0, c);
    if (sol.empty()) throw Error(ErrorCode::Solver, "no ground state for potential " + spec.id);
    GroundOracle out;
    out.e00 = sol.eigenvalues[0];
    std::vector<double> rho(sol.grid.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = sol.eigenfunctions[0][i] * sol.eigenfunctions[0][i];
    out.r2rho = RadialFunction(sol.grid, rho, RadialRole::R2Rho);
    const double mu0 = radial_moment(sol.grid, sol.eigenfunctions[0], 0);
    for (int n = 0; n <= max_order; ++n) {
        const double mu = n == 0 ? 1.0 : radial_moment(sol.grid, sol.eigenfunctions[0], n) / mu0;
        out.moments.set(n, mu, MomentProvenance::ExactOracle);
    }
    return out;
}

std::optional<AnalyticGround> analytic_ground_state(const PotentialSpec& spec) {
    // A potential declared in scaled units is twice the Hartree one, which
    // rescales the charge and the frequency.
    const bool scaled = spec.units == UnitSystem::Scaled;
    if (const auto* c = std::get_if<Coulomb>(&spec.family)) {
        const double Z = scaled ? 0.5 * c->Z : c->Z;
        if (!(Z > 0.0)) return std::nullopt;
        AnalyticGround g;
        g.e00_scaled = -Z * Z;
        g.r2rho = [Z](double r) { return 4.0 * Z * Z * Z * r * r * std::exp(-2.0 * Z * r); };
        // mu_n = (n+2)! / (2 (2Z)^n)
        g.moment = [Z](int n) { return std::tgamma(n + 3.0) / (2.0 * std::pow(2.0 * Z, n)); };
        return g;
    }
    if (const auto* h = std::get_if<HarmonicOscillator>(&spec.family)) {
        const double w = scaled ? h->omega / std::sqrt(2.0) : h->omega;
        AnalyticGround g;
        g.e00_scaled = 3.0 * w;
        g.r2rho = [w](double r) { return 4.0 / std::sqrt(std::numbers::pi) * std::pow(w, 1.5) * r * r * std::exp(-w * r * r); };
        g.moment = [w](int n) { return std::tgamma(0.5 * (n + 3)) / (std::tgamma(1.5) * std::pow(w, 0.5 * n)); };
        return g;
    }
    return std::nullopt;
}

}  // namespace gbmlap::forward
