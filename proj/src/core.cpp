#include "gbmlap/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gbmlap {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::Domain: return "domain-error";
        case ErrorCode::InputIncomplete: return "input-incomplete";
        case ErrorCode::SpectralOrder: return "spectral-order";
        case ErrorCode::DegenerateDenominator: return "degenerate-denominator";
        case ErrorCode::Config: return "config-error";
        case ErrorCode::Solver: return "solver-error";
        case ErrorCode::DivergentIntegral: return "divergent-integral";
        case ErrorCode::Numeric: return "numeric-error";
        case ErrorCode::RecoveryFailed: return "recovery-failed";
        case ErrorCode::ReconstructionInvalid: return "reconstruction-invalid";
        case ErrorCode::Inversion: return "inversion-error";
        case ErrorCode::EmptySurvivors: return "empty-survivors";
        case ErrorCode::Io: return "io-error";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

const char* to_string(UnitSystem u) { return u == UnitSystem::Hartree ? "hartree" : "scaled"; }

UnitSystem unit_system_from_string(const std::string& s) {
    if (s == "hartree" || s == "Hartree") return UnitSystem::Hartree;
    if (s == "scaled" || s == "Scaled") return UnitSystem::Scaled;
    throw Error(ErrorCode::Config, "unknown unit system '" + s + "'");
}

double convert_energy(double e, UnitSystem from, UnitSystem to) {
    if (from == to) return e;
    return from == UnitSystem::Hartree ? e * 2.0 : e / 2.0;
}

SpectralDataset::SpectralDataset(std::string potential_id, UnitSystem units)
    : potential_id_(std::move(potential_id)), units_(units) {}

void SpectralDataset::add(int n_r, int ell, double value) {
    if (n_r < 0 || ell < 0) throw Error(ErrorCode::Domain, "negative quantum number");
    auto [it, inserted] = levels_.emplace(std::make_pair(ell, n_r), value);
    if (!inserted) {
        throw Error(ErrorCode::Config, "duplicate level (" + std::to_string(n_r) + "," +
                                           std::to_string(ell) + ")");
    }
}

bool SpectralDataset::contains(int n_r, int ell) const {
    return levels_.count({ell, n_r}) != 0;
}

double SpectralDataset::at(int n_r, int ell) const {
    auto it = levels_.find({ell, n_r});
    if (it == levels_.end()) {
        throw Error(ErrorCode::InputIncomplete, "missing level (n_r=" + std::to_string(n_r) +
                                                    ", l=" + std::to_string(ell) + ")");
    }
    return it->second;
}

std::vector<EnergyLevel> SpectralDataset::levels() const {
    std::vector<EnergyLevel> out;
    out.reserve(levels_.size());
    for (const auto& [key, v] : levels_) out.push_back({key.second, key.first, v});
    return out;
}

SpectralDataset SpectralDataset::converted(UnitSystem to) const {
    SpectralDataset out(potential_id_, to);
    for (const auto& [key, v] : levels_) out.levels_[key] = convert_energy(v, units_, to);
    return out;
}

std::vector<std::string> SpectralDataset::check_invariants() const {
    std::vector<std::string> problems;
    if (!contains(0, 0)) {
        problems.emplace_back("ground level (0,0) missing");
    } else {
        const double e00 = at(0, 0);
        for (const auto& [key, v] : levels_) {
            if (v < e00) problems.push_back("level below E00 at l=" + std::to_string(key.first));
        }
    }
    const std::pair<int, int>* prev_key = nullptr;
    double prev = 0.0;
    for (const auto& kv : levels_) {
        if (prev_key && prev_key->first == kv.first.first && !(kv.second > prev)) {
            problems.push_back("non-increasing energies in channel l=" +
                               std::to_string(kv.first.first));
        }
        prev_key = &kv.first;
        prev = kv.second;
    }
    return problems;
}

const char* to_string(MomentProvenance p) {
    switch (p) {
        case MomentProvenance::GbmEvenRaw: return "gbm-even-raw";
        case MomentProvenance::GbmEvenSaturated: return "gbm-even-saturated";
        case MomentProvenance::InterpolatedOdd: return "interpolated-odd";
        case MomentProvenance::ExactOracle: return "exact-oracle";
        case MomentProvenance::StieltjesNegative: return "stieltjes-negative";
    }
    return "unknown";
}

MomentProvenance moment_provenance_from_string(const std::string& s) {
    for (auto p : {MomentProvenance::GbmEvenRaw, MomentProvenance::GbmEvenSaturated,
                   MomentProvenance::InterpolatedOdd, MomentProvenance::ExactOracle,
                   MomentProvenance::StieltjesNegative}) {
        if (s == to_string(p)) return p;
    }
    throw Error(ErrorCode::Config, "unknown moment provenance '" + s + "'");
}

void MomentTable::set(int order, double value, MomentProvenance provenance) {
    entries_[order] = MomentEntry{value, provenance};
}

bool MomentTable::has(int order) const { return entries_.count(order) != 0; }

const MomentEntry& MomentTable::entry(int order) const {
    auto it = entries_.find(order);
    if (it == entries_.end()) {
        throw Error(ErrorCode::InputIncomplete, "moment of order " + std::to_string(order) +
                                                    " is not available");
    }
    return it->second;
}

double MomentTable::value(int order) const { return entry(order).value; }

int MomentTable::max_order() const { return entries_.empty() ? -1 : entries_.rbegin()->first; }

MomentTable MomentTable::slice(int lo, int hi) const {
    MomentTable out;
    for (const auto& [n, e] : entries_) {
        if (n >= lo && n <= hi) out.entries_[n] = e;
    }
    return out;
}

const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::Positivity: return "positivity";
        case ViolationKind::Normalization: return "normalization";
        case ViolationKind::LogConvexity: return "log-convexity";
    }
    return "unknown";
}

std::vector<MomentViolation> validate_moment_table(const MomentTable& t, double normalization_tol,
                                                   double convexity_rel_tol) {
    std::vector<MomentViolation> out;
    for (const auto& [n, e] : t.entries()) {
        if (!(e.value > 0.0) || !std::isfinite(e.value)) {
            std::ostringstream msg;
            msg << "mu_" << n << " = " << e.value << " is not strictly positive";
            out.push_back({ViolationKind::Positivity, {n}, std::abs(e.value), msg.str()});
        }
    }
    if (t.has(0)) {
        const double dev = std::abs(t.value(0) - 1.0);
        if (dev > normalization_tol) {
            std::ostringstream msg;
            msg << "mu_0 deviates from 1 by " << dev;
            out.push_back({ViolationKind::Normalization, {0}, dev, msg.str()});
        }
    }
    // Interior triples of consecutive nonnegative orders.
    for (const auto& [n, e] : t.entries()) {
        if (n < 1 || !t.has(n - 1) || !t.has(n + 1)) continue;
        const double lhs = e.value * e.value;
        const double rhs = t.value(n - 1) * t.value(n + 1);
        if (lhs > rhs * (1.0 + convexity_rel_tol)) {
            std::ostringstream msg;
            msg << "mu_" << n << "^2 = " << lhs << " exceeds mu_" << n - 1 << "*mu_" << n + 1
                << " = " << rhs;
            out.push_back({ViolationKind::LogConvexity, {n - 1, n, n + 1}, lhs / rhs - 1.0,
                           msg.str()});
        }
    }
    return out;
}

RadialGrid RadialGrid::uniform(double h, std::size_t count) {
    RadialGrid g;
    g.step = h;
    g.points.resize(count);
    for (std::size_t i = 0; i < count; ++i) g.points[i] = static_cast<double>(i + 1) * h;
    return g;
}

void RadialGrid::validate() const {
    if (points.empty()) throw Error(ErrorCode::Domain, "empty radial grid");
    if (!(points.front() > 0.0)) throw Error(ErrorCode::Domain, "grid must start at r > 0");
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i] > points[i - 1])) throw Error(ErrorCode::Domain, "grid not increasing");
    }
    if (!std::isfinite(points.back())) throw Error(ErrorCode::Domain, "grid not finite");
}

const char* to_string(RadialRole r) {
    switch (r) {
        case RadialRole::ChiSquared: return "chi_squared";
        case RadialRole::Chi: return "chi";
        case RadialRole::R: return "R";
        case RadialRole::Rho: return "rho";
        case RadialRole::R2Rho: return "r2rho";
        case RadialRole::Potential: return "potential";
    }
    return "unknown";
}

RadialFunction::RadialFunction(RadialGrid g, std::vector<double> v, RadialRole r)
    : grid(std::move(g)), values(std::move(v)), valid(values.size(), true), role(r) {
    if (grid.size() != values.size()) {
        throw Error(ErrorCode::Domain, "radial function size does not match its grid");
    }
}

std::size_t RadialFunction::valid_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true));
}

}  // namespace gbmlap
