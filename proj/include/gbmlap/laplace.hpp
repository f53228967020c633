#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "gbmlap/core.hpp"
#include "gbmlap/pade.hpp"

namespace gbmlap::laplace {

using cplx = std::complex<double>;

// One pole of a partial-fraction expansion: sum_j A[j-1] / (q - pole)^j.
struct PoleTerm {
    cplx pole;
    std::vector<cplx> A;
};

// Partial fractions of a proper rational from the approximant's analysed
// poles. With `merge_clusters` set, near-coincident roots (relative
// distance 1e-3) are treated as one multiple root.
std::vector<PoleTerm> partial_fractions(const pade::RationalApproximant& r, bool merge_clusters = false);

// f(r) = sum_i sum_k c_{i,k} r^k exp(p_i r)
struct ExponentialSum {
    struct Term {
        cplx pole;
        std::vector<cplx> coeffs;  // c_k multiplies r^k
    };
    std::vector<Term> terms;

    cplx evaluate_complex(double r) const;
    double evaluate(double r) const { return evaluate_complex(r).real(); }
    // Analytic transform: sum c_k k! / (q - p)^{k+1}.
    cplx laplace(cplx q) const;
    double max_pole_real() const;
};

ExponentialSum to_exponential_sum(const std::vector<PoleTerm>& pf);

// A/(q-p)^m maps to A r^{m-1} exp(p r)/(m-1)!. The decomposition is
// verified by transforming back on q in [0, 10]; if the roots as analysed
// fail that check, clusters of nearly equal roots are merged and the check
// is repeated before giving up.
ExponentialSum residue_invert(const pade::RationalApproximant& r, bool* merged = nullptr);

// Worst deviation between the transformed sum and the rational on `count`
// equispaced q in [0, q_max], relative to the largest |rational| there.
double round_trip_error(const ExponentialSum& s, const pade::RationalApproximant& r, int count = 50,
                        double q_max = 10.0);

struct InversionConfig {
    int terms = 41;              // 2M + 1 Fourier terms
    double tolerance = 1e-12;    // sets the abscissa shift -ln(tol)/(2T)
    double period_factor = 2.0;  // T = period_factor * r
};

struct NumericDiagnostics {
    double max_gap = 0.0;  // largest gap between the last two accelerated estimates
    int evaluations = 0;
};

// de Hoog, Knight and Stokes quotient-difference acceleration of the
// Fourier-series Bromwich inversion, evaluated independently per grid point.
// `abscissa_floor` must be >= the largest real part of any singularity.
RadialFunction numeric_invert(const std::function<cplx(cplx)>& L, const RadialGrid& grid,
                              const InversionConfig& cfg, double abscissa_floor = 0.0,
                              NumericDiagnostics* diag = nullptr);

double numeric_invert_at(const std::function<cplx(cplx)>& L, double r, const InversionConfig& cfg,
                         double abscissa_floor = 0.0, double* gap = nullptr);

struct DensityDiagnostics {
    double integral = 0.0;
    double normalization_deviation = 0.0;
    int clipped = 0;  // tiny negatives set to zero
    int masked = 0;   // deeper negatives left in place but marked invalid
    double most_negative = 0.0;  // relative to max
};

// Negative values no deeper than clip_rel * max are zeroed; every negative
// point is masked; anything deeper than reject_rel * max is rejected.
RadialFunction density_postprocess(const RadialFunction& chi2, DensityDiagnostics* diag = nullptr,
                                   double clip_rel = 1e-6, double reject_rel = 1e-3);

}  // namespace gbmlap::laplace
