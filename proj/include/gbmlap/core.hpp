#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gbmlap {

// Every failure raised by the library carries one of these codes so the CLI
// can map it to an exit status and manifests can record a stable string.
enum class ErrorCode {
    Domain,
    InputIncomplete,
    SpectralOrder,
    DegenerateDenominator,
    Config,
    Solver,
    DivergentIntegral,
    Numeric,
    RecoveryFailed,
    ReconstructionInvalid,
    Inversion,
    EmptySurvivors,
    Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

enum class UnitSystem { Hartree, Scaled };

const char* to_string(UnitSystem u);
UnitSystem unit_system_from_string(const std::string& s);

// Hartree -> Scaled multiplies energies by two; lengths and moments are
// untouched by the change of units.
double convert_energy(double e, UnitSystem from, UnitSystem to);

struct EnergyLevel {
    int n_r = 0;
    int ell = 0;
    double value = 0.0;
};

class SpectralDataset {
public:
    SpectralDataset() = default;
    SpectralDataset(std::string potential_id, UnitSystem units);

    void add(int n_r, int ell, double value);
    bool contains(int n_r, int ell) const;
    double at(int n_r, int ell) const;  // throws InputIncomplete

    const std::string& potential_id() const { return potential_id_; }
    UnitSystem units() const { return units_; }
    std::size_t size() const { return levels_.size(); }

    // Levels sorted by (ell, n_r).
    std::vector<EnergyLevel> levels() const;

    SpectralDataset converted(UnitSystem to) const;

    // Returns a list of human-readable problems (empty when the dataset
    // satisfies ordering, uniqueness and ground-state invariants).
    std::vector<std::string> check_invariants() const;

private:
    std::string potential_id_;
    UnitSystem units_ = UnitSystem::Scaled;
    std::map<std::pair<int, int>, double> levels_;  // key (ell, n_r)
};

enum class MomentProvenance {
    GbmEvenRaw,
    GbmEvenSaturated,
    InterpolatedOdd,
    ExactOracle,
    StieltjesNegative,
};

const char* to_string(MomentProvenance p);
MomentProvenance moment_provenance_from_string(const std::string& s);

struct MomentEntry {
    double value = 0.0;
    MomentProvenance provenance = MomentProvenance::ExactOracle;
};

class MomentTable {
public:
    void set(int order, double value, MomentProvenance provenance);
    bool has(int order) const;
    double value(int order) const;  // throws InputIncomplete
    const MomentEntry& entry(int order) const;
    const std::map<int, MomentEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    int max_order() const;

    // Subset containing only the orders lo..hi that are present.
    MomentTable slice(int lo, int hi) const;

private:
    std::map<int, MomentEntry> entries_;
};

enum class ViolationKind { Positivity, Normalization, LogConvexity };
const char* to_string(ViolationKind k);

struct MomentViolation {
    ViolationKind kind;
    std::vector<int> orders;
    double magnitude = 0.0;
    std::string message;
};

std::vector<MomentViolation> validate_moment_table(const MomentTable& t,
                                                   double normalization_tol = 1e-10,
                                                   double convexity_rel_tol = 1e-9);

struct RadialGrid {
    std::vector<double> points;
    double step = 0.0;  // > 0 for uniform grids, 0 when the points are explicit

    static RadialGrid uniform(double h, std::size_t count);  // r_i = (i+1) h
    std::size_t size() const { return points.size(); }
    bool is_uniform() const { return step > 0.0; }
    void validate() const;
};

enum class RadialRole { ChiSquared, Chi, R, Rho, R2Rho, Potential };
const char* to_string(RadialRole r);

struct RadialFunction {
    RadialGrid grid;
    std::vector<double> values;
    std::vector<bool> valid;
    RadialRole role = RadialRole::ChiSquared;

    RadialFunction() = default;
    RadialFunction(RadialGrid g, std::vector<double> v, RadialRole role);

    std::size_t size() const { return values.size(); }
    std::size_t valid_count() const;
};

}  // namespace gbmlap
