#pragma once

#include <string>
#include <vector>

#include "gbmlap/core.hpp"

namespace gbmlap::recovery {

enum class BoundaryPolicy { ShrinkWindow, LocalPolyExtrapolate };
const char* to_string(BoundaryPolicy p);
BoundaryPolicy boundary_policy_from_string(const std::string& s);

struct DifferentiatorConfig {
    int half_width = 3;  // window of 2*half_width + 1 points
    int order = 4;
    BoundaryPolicy boundary = BoundaryPolicy::ShrinkWindow;

    void validate() const;
};

struct RecoveryConfig {
    DifferentiatorConfig differentiator;
    double theta = 1e-3;  // chi below theta * max(chi) is masked
    int core_steps = 3;   // r below core_steps * h is masked

    void validate() const;
};

// Least-squares polynomial weights: sum_k w_k y(x_0 + offsets[k] h) gives
// h^deriv times the deriv-th derivative at offset 0 of the degree-`order` fit.
std::vector<double> savgol_weights(const std::vector<int>& offsets, int order, int deriv);

// Second derivative on a uniform grid. Points where no admissible stencil
// exists (shrink-window at the very ends) are reported through `ok`.
std::vector<double> savgol_second_derivative(const std::vector<double>& y, double h, const DifferentiatorConfig& cfg,
                                             std::vector<bool>* ok = nullptr);

struct ChiAndR {
    RadialFunction chi;
    RadialFunction R;
};

// chi = sqrt(chi^2), R = chi / r. The first `core_points` values of R are
// replaced by an even polynomial b0 + b2 r^2 fitted to the following points.
ChiAndR chi_from_density(const RadialFunction& chi2, int core_points = 3);

// V = E00 + chi''/chi in scaled units, chi'' from the smoothing
// differentiator. Core points keep a value from a local quadratic model of
// R = chi / r but stay masked.
RadialFunction potential_from_chi(const RadialFunction& chi, double e00_scaled, const RecoveryConfig& cfg = {});

// Same masking with a caller-supplied chi''.
RadialFunction potential_from_second_derivative(const RadialFunction& chi, const std::vector<double>& d2chi,
                                                double e00_scaled, const RecoveryConfig& cfg = {});

RadialFunction convert_outputs(const RadialFunction& v_scaled, UnitSystem target);

}  // namespace gbmlap::recovery
