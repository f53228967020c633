#include "gbmlap/interp.hpp"

#include <algorithm>
#include <cmath>

#include "gbmlap/core.hpp"

namespace gbmlap {

namespace {

double end_slope(double h0, double h1, double m0, double m1) {
    double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (std::signbit(d) != std::signbit(m0) || d == 0.0 || m0 == 0.0) {
        d = 0.0;
    } else if (std::signbit(m0) != std::signbit(m1) && std::abs(d) > 3.0 * std::abs(m0)) {
        d = 3.0 * m0;
    }
    return d;
}

}  // namespace

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw Error(ErrorCode::Domain, "pchip needs >= 2 matching nodes");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x_[i] > x_[i - 1])) throw Error(ErrorCode::Domain, "pchip nodes must increase");
    }
    std::vector<double> h(n - 1), m(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        m[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    if (n == 2) {
        d_[0] = d_[1] = m[0];
        return;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (m[k - 1] * m[k] <= 0.0) {
            d_[k] = 0.0;
        } else {
            const double w1 = 2.0 * h[k] + h[k - 1];
            const double w2 = h[k] + 2.0 * h[k - 1];
            d_[k] = (w1 + w2) / (w1 / m[k - 1] + w2 / m[k]);
        }
    }
    d_[0] = end_slope(h[0], h[1], m[0], m[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
}

std::size_t Pchip::interval(double t) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
}

double Pchip::operator()(double t) const {
    const std::size_t i = interval(t);
    const double h = x_[i + 1] - x_[i];
    const double s = (t - x_[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

double Pchip::derivative(double t) const {
    const std::size_t i = interval(t);
    const double h = x_[i + 1] - x_[i];
    const double s = (t - x_[i]) / h;
    const double dh00 = 6 * s * s - 6 * s;
    const double dh10 = 3 * s * s - 4 * s + 1;
    const double dh01 = -6 * s * s + 6 * s;
    const double dh11 = 3 * s * s - 2 * s;
    return (dh00 * y_[i] + dh01 * y_[i + 1]) / h + dh10 * d_[i] + dh11 * d_[i + 1];
}

}  // namespace gbmlap
