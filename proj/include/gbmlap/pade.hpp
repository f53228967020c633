#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "gbmlap/core.hpp"
#include "gbmlap/polynomial.hpp"

namespace gbmlap::pade {

using cplx = std::complex<double>;

// Maclaurin coefficients a_n = (-1)^n mu_n / n! of the Laplace image
// L(q) = int exp(-q r) r^2 rho(r) dr.
struct SeriesCoefficients {
    std::vector<double> a;
    int max_order() const { return static_cast<int>(a.size()) - 1; }
};

SeriesCoefficients series_coefficients(const MomentTable& m, int order);

struct Pole {
    cplx value;
    int multiplicity = 1;
    double nearest_zero_distance = 0.0;  // +inf when the numerator is constant
};

struct RationalApproximant {
    int N = 0;
    int D = 0;
    std::vector<double> num;  // ascending, size N+1
    std::vector<double> den;  // ascending, den[0] = 1, size D+1
    bool constructible = true;
    std::string construction_note;
    double condition_estimate = 1.0;
    double expansion_mismatch = 0.0;  // max relative deviation on a_0..a_{N+D}
    double tail_residual = 0.0;       // rms relative deviation beyond N+D (NaN if none)
    std::vector<Pole> poles;
    std::vector<cplx> zeros;
    bool analysed = false;

    double evaluate(double q) const;
    cplx evaluate(cplx q) const;
    bool proper() const { return N < D; }
};

// Solves the Padé system for the denominator, then forms the numerator by
// convolution. Ill-conditioned systems yield constructible = false.
RationalApproximant pade(const SeriesCoefficients& coeffs, int N, int D);

// Finds poles (with multiplicity) and numerator zeros, and records the
// distance from each pole to its nearest zero.
void pole_analysis(RationalApproximant& r);

struct FilterConfig {
    double delta = 0.0;              // reject poles with Re >= -delta
    double froissart_rel = 1e-6;     // pole-zero distance threshold / max(1, |pole|)
};

struct Rejection {
    int N = 0;
    int D = 0;
    std::string reason;  // stable code: unconstructible, improper, right-half-plane, froissart
    std::string detail;
};

struct FilterResult {
    std::vector<RationalApproximant> survivors;
    std::vector<Rejection> rejections;
};

FilterResult admissibility_filter(std::vector<RationalApproximant> cands, const FilterConfig& cfg);

struct AverageResult {
    std::vector<double> q;
    std::vector<double> mean;
    std::vector<double> dispersion;  // sample standard deviation
};

AverageResult model_average(const std::vector<RationalApproximant>& survivors, const std::vector<double>& qs);
cplx average_at(const std::vector<RationalApproximant>& survivors, cplx q);

// Near-diagonal |N-D| <= 1 with N+D in [6,10], then P(0,3) and P(0,4);
// entries needing more than max_order coefficients are omitted.
std::vector<std::pair<int, int>> default_candidate_set(int max_order);

// Survivors ordered by increasing tail residual (NaN last), stable.
std::vector<RationalApproximant> rank_by_tail(std::vector<RationalApproximant> survivors);

std::vector<RationalApproximant> build_candidates(const SeriesCoefficients& coeffs,
                                                  const std::vector<std::pair<int, int>>& set);

}  // namespace gbmlap::pade
