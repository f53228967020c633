#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gbmlap/core.hpp"
#include "gbmlap/pade.hpp"

namespace gbmlap::moments {

enum class OddFamilyKind { MonotoneLogInterp, ConstrainedFit, MaxentClosure, ExactOracle };
const char* to_string(OddFamilyKind k);
OddFamilyKind odd_family_from_string(const std::string& s);

struct OddFamily {
    OddFamilyKind kind = OddFamilyKind::MonotoneLogInterp;
    int fit_degree = 3;    // constrained-fit polynomial degree in n (1..6)
    int maxent_terms = 3;  // J in w = r^2 exp(c_0 + ... + c_J x^J)
    std::optional<MomentTable> oracle;  // required by exact-oracle

    void validate() const;
};

struct Completion {
    MomentTable table;
    OddFamilyKind used = OddFamilyKind::MonotoneLogInterp;
    bool fell_back = false;
    int repaired = 0;  // odd entries moved onto a convexity bound
    std::vector<std::string> notes;
};

// Fills every odd order up to max_order. Even entries are copied unchanged.
Completion complete_odd(const MomentTable& evens, const OddFamily& family, int max_order);

// Bounds on an odd moment implied by log-convexity with its neighbours
// present in the table: lower = max(mu_{n-1}^2/mu_{n-2}, mu_{n+1}^2/mu_{n+2}),
// upper = sqrt(mu_{n-1} mu_{n+1}).
struct OddBracket {
    double lower = 0.0;
    double upper = 0.0;
};
OddBracket odd_bracket(const MomentTable& t, int n);

// mu_{-1} = int_0^inf L dq and mu_{-2} = int_0^inf q L dq in closed form
// from the partial fractions. The first needs D - N >= 2, the second
// D - N >= 3; mu_{-2} is absent when only the first converges.
struct NegativeMoments {
    double mu_m1 = 0.0;
    std::optional<double> mu_m2;
};
NegativeMoments negative_moments(const pade::RationalApproximant& L);

// Writes the values into orders -1 and -2 with stieltjes-negative provenance.
void store_negative(MomentTable& t, const NegativeMoments& nm);

}  // namespace gbmlap::moments
