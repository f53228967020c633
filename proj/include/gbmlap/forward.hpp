#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gbmlap/core.hpp"

namespace gbmlap {
class Pchip;
}

namespace gbmlap::forward {

struct Coulomb {
    double Z = 1.0;
};
struct HarmonicOscillator {
    double omega = 1.0;
};
struct Hulthen {
    double V0 = 0.5;
    double lambda = 0.5;
};
// V = -2B (a/r - a^2/(2 r^2))
struct Kratzer {
    double B = 0.375;
    double a = 1.0;
};
// V = A/sinh^2(alpha r) + B/cosh^2(beta r)
struct HyperbolicWell {
    double A_sinh = 1.0;
    double B_cosh = -10.0;
    double alpha = 1.0;
    double beta = 1.0;
};
// Samples of V(r); evaluated by monotone cubic interpolation and held
// constant beyond the sampled range.
struct Tabulated {
    std::vector<double> r;
    std::vector<double> V;
    std::string source;
    std::shared_ptr<const Pchip> spline;  // built by make_tabulated
};

Tabulated make_tabulated(std::vector<double> r, std::vector<double> V, std::string source);

using PotentialFamily =
    std::variant<Coulomb, HarmonicOscillator, Hulthen, Kratzer, HyperbolicWell, Tabulated>;

struct PotentialSpec {
    std::string id;
    PotentialFamily family;
    UnitSystem units = UnitSystem::Hartree;

    std::string family_name() const;
    // Limit of V as r -> infinity in the declared units (+inf for confining
    // potentials).
    double asymptote() const;
    void validate() const;
};

// Canonical benchmark parameterisations: "coulomb", "ho", "hulthen",
// "kratzer", "hyperbolic".
PotentialSpec canonical(const std::string& id);
std::vector<PotentialSpec> canonical_suite();
const std::vector<std::string>& canonical_ids();

double evaluate_potential(const PotentialSpec& spec, double r);  // declared units
double evaluate_scaled(const PotentialSpec& spec, double r);     // hbar = 2m = 1

// Two-column CSV reader. The first line must declare units, e.g.
// "# units: hartree"; an optional "r,V" header follows.
PotentialSpec read_tabulated_csv(const std::string& path, const std::string& id = "tabulated");

enum class Discretization { FiniteDifference2, Numerov };
const char* to_string(Discretization d);
Discretization discretization_from_string(const std::string& s);

struct SolverConfig {
    double r_max = 40.0;
    int n_points = 4000;  // interior points of the coarsest grid
    Discretization method = Discretization::FiniteDifference2;
    int n_eigs = 1;
    int richardson_levels = 2;
    // When set, eigenvalues at or above the potential's asymptote are
    // dropped and a channel without any is reported empty. When unset the
    // lowest box states are returned even if they lie in the continuum.
    bool bound_only = false;

    void validate() const;
    double step() const { return r_max / (n_points + 1); }
};

struct ChannelSolution {
    int ell = 0;
    std::vector<double> eigenvalues;  // scaled units, ascending
    RadialGrid grid;                  // interior points of the coarsest grid
    std::vector<std::vector<double>> eigenfunctions;  // u_{n_r}(r_i), int u^2 dr = 1
    bool empty() const { return eigenvalues.empty(); }
};

ChannelSolution solve_channel(const PotentialSpec& spec, int ell, const SolverConfig& cfg);

// Channels are solved concurrently and merged in (ell, n_r) order.
SpectralDataset build_spectral_dataset(const PotentialSpec& spec, int ell_max, int nr_max,
                                       const SolverConfig& cfg);

// Per-channel level counts: channel ell receives counts[ell] levels.
SpectralDataset build_spectral_dataset(const PotentialSpec& spec, const std::vector<int>& counts,
                                       const SolverConfig& cfg);

struct GroundOracle {
    RadialFunction r2rho;  // u_00^2 on the solver grid
    MomentTable moments;   // orders 0..max_order, exact-oracle provenance
    double e00 = 0.0;      // scaled
};

GroundOracle exact_ground_oracle(const PotentialSpec& spec, const SolverConfig& cfg,
                                 int max_order = 20);

// Closed-form ground state for the Coulomb and oscillator families;
// std::nullopt for the others.
struct AnalyticGround {
    double e00_scaled = 0.0;
    std::function<double(double)> r2rho;  // u_00(r)^2
    std::function<double(int)> moment;    // mu_n, n > -3
};
std::optional<AnalyticGround> analytic_ground_state(const PotentialSpec& spec);

// Trapezoid moment int r^n u^2 dr on a uniform grid whose end values vanish.
double radial_moment(const RadialGrid& grid, const std::vector<double>& u, int n);

}  // namespace gbmlap::forward
