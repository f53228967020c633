#pragma once

#include <vector>

namespace gbmlap {

// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes with
// the shape-preserving three-point end conditions). Outside the node range
// the end cubic is extended.
class Pchip {
public:
    Pchip(std::vector<double> x, std::vector<double> y);
    double operator()(double t) const;
    double derivative(double t) const;
    const std::vector<double>& slopes() const { return d_; }

private:
    std::size_t interval(double t) const;
    std::vector<double> x_, y_, d_;
};

}  // namespace gbmlap
