#pragma once

#include <string>
#include <vector>

#include "gbmlap/core.hpp"
#include "gbmlap/forward.hpp"

// Two-spectra least-squares inverse Sturm-Liouville baseline on [0, 1]:
// -g'' + q g = lambda g with Dirichlet-Dirichlet and Dirichlet-Neumann data.
namespace gbmlap::lsq {

enum class BoundarySet { DD, DN };
const char* to_string(BoundarySet b);

// q on the uniform nodes x_j = j / J, j = 0..J.
struct SLProblem {
    std::vector<double> q;
    BoundarySet bc = BoundarySet::DD;

    int intervals() const { return static_cast<int>(q.size()) - 1; }
    double step() const { return 1.0 / intervals(); }
    void validate() const;
};

struct SLSpectrum {
    std::vector<double> eigenvalues;
    // Sampled on all J+1 nodes (zero at Dirichlet ends), normalised so that
    // the trapezoid integral of g^2 is one.
    std::vector<std::vector<double>> eigenfunctions;
};

// DD eliminates both end nodes; DN adds the node x=1 through a symmetric
// ghost-point row (scaled by sqrt 2 so the matrix stays symmetric).
SLSpectrum sl_eigensolve(const SLProblem& p, int count);

std::vector<double> trapezoid_weights(std::size_t nodes);
double inner(const std::vector<double>& a, const std::vector<double>& b);  // trapezoid on [0, 1]

struct Targets {
    std::vector<double> dd;
    std::vector<double> dn;
};

Targets generate_targets(const std::vector<double>& q, int count);

struct LSQConfig {
    int num_pairs = 60;
    std::vector<double> weights_dd;  // empty means all ones
    std::vector<double> weights_dn;
    double mu_reg = 0.0;
    int max_iterations = 300;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 60;
    double tolerance = 1e-20;  // stop once F falls below this

    void validate() const;
};

struct Evaluation {
    double F = 0.0;  // G + mu_reg * int (q')^2
    double G = 0.0;  // weighted eigenvalue misfit
    std::vector<double> grad;  // L2 gradient on the nodes
    std::vector<double> misfit_dd;  // lambda(q) - target
    std::vector<double> misfit_dn;
};

Evaluation functional_and_gradient(const std::vector<double>& q, const Targets& targets, const LSQConfig& cfg);

struct IterationRecord {
    int iteration = 0;
    double F = 0.0;
    double G = 0.0;
    double step = 0.0;
};

enum class LSQStatus { Converged, MaxIterations, LineSearchFailed };
const char* to_string(LSQStatus s);

struct LSQResult {
    std::vector<double> q_rec;
    std::vector<IterationRecord> history;  // entry 0 is the starting point
    std::vector<double> misfit_dd;
    std::vector<double> misfit_dn;
    int iterations = 0;
    double elapsed_seconds = 0.0;
    LSQStatus status = LSQStatus::MaxIterations;
    bool restarted = false;
};

// Polak-Ribiere+ nonlinear conjugate gradients with Armijo backtracking.
LSQResult minimize_pr_cg(const std::vector<double>& initial, const Targets& targets, const LSQConfig& cfg);

// q(x) = r_max^2 V_scaled(x r_max), held at its value at x_core = core_steps
// / J for smaller x.
std::vector<double> map_radial_target(const forward::PotentialSpec& spec, double r_max, int intervals,
                                      int core_steps = 2);

// Scaled potential at radius r from a q on [0, 1] (linear interpolation).
double radial_from_q(const std::vector<double>& q, double r_max, double r);

double relative_l2(const std::vector<double>& a, const std::vector<double>& reference);  // trapezoid on [0, 1]

std::string convergence_csv(const LSQResult& r);

}  // namespace gbmlap::lsq
