#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gbmlap/config.hpp"

namespace gbmlap {

struct Window {
    double lo = 0.0;
    double hi = 0.0;
};

// ||rec - exact|| / ||exact|| by the trapezoid rule over grid points inside
// the window where both functions are valid; a segment contributes only if
// both of its ends qualify.
double rel_l2(const RadialFunction& rec, const RadialFunction& exact, Window w);

// [0.1 r_peak, r_99]: r_peak maximises r^2 rho, r_99 encloses 99% of its
// integral (trapezoid from r = 0).
Window default_window(const RadialFunction& exact_r2rho);

struct LsqOutcome {
    lsq::LSQResult result;
    std::vector<double> q_true;
    std::vector<double> v_hartree;  // on the recovery grid
    double rel_l2 = 0.0;
    double rmse_dd = 0.0;
    double rmse_dn = 0.0;
};

struct PipelineResult {
    PipelineConfig config;
    bool ok = false;
    std::string error_code;
    std::string error_message;
    std::vector<std::string> notes;

    double e00_scaled = 0.0;
    std::optional<gbm::GBMAccounting> accounting;
    std::vector<double> saturation_factors;
    MomentTable evens;
    MomentTable moments;  // completed, plus Stieltjes entries when they converge
    moments::OddFamilyKind odd_used = moments::OddFamilyKind::MonotoneLogInterp;
    bool odd_fell_back = false;

    std::vector<std::pair<int, int>> candidates;
    std::vector<pade::RationalApproximant> survivors;  // ranked by tail residual
    std::vector<pade::Rejection> rejections;
    int chosen = -1;  // index into survivors used for the residue path
    bool residue_merged_clusters = false;
    laplace::DensityDiagnostics density;
    laplace::NumericDiagnostics numeric;

    RadialGrid grid;  // recovery grid
    RadialFunction r2rho_exact, r2rho_rec;
    RadialFunction chi_exact, chi_rec;
    RadialFunction v_exact, v_rec;  // Hartree
    std::vector<double> lq_q, lq_exact, lq_mean, lq_dispersion;

    Window window;
    double rel_l2_v = std::numeric_limits<double>::quiet_NaN();
    std::optional<LsqOutcome> lsq;
    std::string lsq_error;  // set when the comparator itself failed
    double elapsed_seconds = 0.0;
};

// Runs every stage; failures are caught and reported in the result. The LSQ
// comparator runs whenever the exact references could be built.
PipelineResult run_pipeline(const PipelineConfig& cfg);

// LSQ comparator on the mapped radial potential, measured on the given grid
// and window.
LsqOutcome run_lsq_comparison(const PipelineConfig& cfg, const RadialFunction& v_exact, Window w);

}  // namespace gbmlap
