#include <doctest.h>

#include <cmath>

#include "gbmlap/recovery.hpp"

using namespace gbmlap;

namespace {

RadialFunction sampled(double h, std::size_t count, double (*f)(double), RadialRole role) {
    const auto g = RadialGrid::uniform(h, count);
    std::vector<double> v;
    for (double r : g.points) v.push_back(f(r));
    return RadialFunction(g, v, role);
}

double hydrogen_chi2(double r) { return 4.0 * r * r * std::exp(-2.0 * r); }
double hydrogen_chi(double r) { return 2.0 * r * std::exp(-r); }
double ho_chi(double r) { return r * std::exp(-0.5 * r * r); }

}  // namespace

TEST_SUITE("recovery") {
    TEST_CASE("square root of the density and the radial function") {
        const auto c = recovery::chi_from_density(sampled(0.01, 2000, hydrogen_chi2, RadialRole::ChiSquared));
        CHECK(c.chi.values[99] == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
        CHECK(std::abs(c.chi.values[99] - 0.735759) < 1e-6);
        CHECK(c.R.values[99] == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
        // The core extension is an even fit, so it is only exact for an even R;
        // the oscillator's exp(-r^2/2) is one, up to its r^4 term.
        const auto o = recovery::chi_from_density(sampled(0.01, 2000, [](double r) { return ho_chi(r) * ho_chi(r); },
                                                          RadialRole::ChiSquared));
        for (std::size_t i = 0; i < 3; ++i) {
            const double r = o.R.grid.points[i];
            CHECK(o.R.values[i] == doctest::Approx(std::exp(-0.5 * r * r)).epsilon(1e-5));
        }

        auto z = sampled(0.01, 100, hydrogen_chi2, RadialRole::ChiSquared);
        for (std::size_t i = 50; i < 60; ++i) z.values[i] = 0.0;
        const auto cz = recovery::chi_from_density(z);
        for (std::size_t i = 50; i < 60; ++i) {
            CHECK(cz.chi.values[i] == 0.0);
            CHECK_FALSE(cz.chi.valid[i]);
        }
    }

    TEST_CASE("analytic second derivatives give the exact potentials") {
        const auto g = RadialGrid::uniform(0.01, 1000);
        std::vector<double> hc, hd, oc, od;
        for (double r : g.points) {
            hc.push_back(hydrogen_chi(r));
            hd.push_back(2.0 * (r - 2.0) * std::exp(-r));
            oc.push_back(ho_chi(r));
            od.push_back((r * r * r - 3.0 * r) * std::exp(-0.5 * r * r));
        }
        recovery::RecoveryConfig cfg;
        cfg.theta = 0.0;
        const auto vh = recovery::potential_from_second_derivative(RadialFunction(g, hc, RadialRole::Chi), hd, -1.0, cfg);
        CHECK(vh.values[199] == doctest::Approx(-1.0).epsilon(1e-12));
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (vh.valid[i]) CHECK(std::abs(vh.values[i] + 2.0 / g.points[i]) <= 1e-10);
        }
        const auto vo = recovery::potential_from_second_derivative(RadialFunction(g, oc, RadialRole::Chi), od, 3.0, cfg);
        CHECK(vo.values[99] == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("smoothing differentiator on hydrogen") {
        const auto chi = sampled(0.01, 4000, hydrogen_chi, RadialRole::Chi);
        const auto v = recovery::potential_from_chi(chi, -1.0);
        int checked = 0;
        for (std::size_t i = 0; i < chi.size(); ++i) {
            const double r = chi.grid.points[i];
            if (r < 0.5 || r > 8.0) continue;
            REQUIRE(v.valid[i]);
            CHECK(std::abs(v.values[i] + 2.0 / r) <= 1e-5);
            ++checked;
        }
        CHECK(checked > 700);
        // Core points carry a value but stay out of the mask.
        CHECK_FALSE(v.valid[0]);
        CHECK(std::isfinite(v.values[0]));
    }

    TEST_CASE("textbook smoothing weights") {
        const auto w5 = recovery::savgol_weights({-2, -1, 0, 1, 2}, 2, 2);
        const double e5[] = {2.0 / 7, -1.0 / 7, -2.0 / 7, -1.0 / 7, 2.0 / 7};
        for (int k = 0; k < 5; ++k) CHECK(w5[static_cast<std::size_t>(k)] == doctest::Approx(e5[k]).epsilon(1e-12));
        const auto w7 = recovery::savgol_weights({-3, -2, -1, 0, 1, 2, 3}, 4, 2);
        const double e7[] = {-13.0, 67.0, -19.0, -70.0, -19.0, 67.0, -13.0};
        for (int k = 0; k < 7; ++k) CHECK(w7[static_cast<std::size_t>(k)] == doctest::Approx(e7[k] / 132.0).epsilon(1e-12));
        // Quadratics are differentiated exactly, including at the edges.
        std::vector<double> y;
        for (int i = 0; i < 40; ++i) y.push_back(3.0 * i * i * 0.01 - 0.2 * i + 1.0);
        for (auto b : {recovery::BoundaryPolicy::ShrinkWindow, recovery::BoundaryPolicy::LocalPolyExtrapolate}) {
            recovery::DifferentiatorConfig d;
            d.boundary = b;
            std::vector<bool> ok;
            const auto d2 = recovery::savgol_second_derivative(y, 1.0, d, &ok);
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (ok[i]) CHECK(d2[i] == doctest::Approx(0.06).epsilon(1e-9));
            }
        }
    }

    TEST_CASE("mask shrinks as theta grows") {
        const auto chi = sampled(0.01, 4000, hydrogen_chi, RadialRole::Chi);
        std::size_t prev = chi.size() + 1;
        std::vector<bool> prev_mask(chi.size(), true);
        for (double theta : {0.0, 1e-6, 1e-3, 1e-2, 0.1, 0.5}) {
            recovery::RecoveryConfig cfg;
            cfg.theta = theta;
            const auto v = recovery::potential_from_chi(chi, -1.0, cfg);
            CHECK(v.valid_count() <= prev);
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (v.valid[i]) CHECK(prev_mask[i]);
            }
            prev = v.valid_count();
            prev_mask = v.valid;
        }
    }

    TEST_CASE("ground energy enters additively") {
        const auto chi = sampled(0.01, 1500, hydrogen_chi, RadialRole::Chi);
        const auto a = recovery::potential_from_chi(chi, -1.0);
        const auto b = recovery::potential_from_chi(chi, 2.5);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a.valid[i] == b.valid[i]);
            if (a.valid[i]) CHECK(b.values[i] - a.values[i] == doctest::Approx(3.5).epsilon(1e-12));
        }
    }

    TEST_CASE("output units") {
        auto v = sampled(0.1, 50, [](double r) { return -2.0 / r; }, RadialRole::Potential);
        const auto h = recovery::convert_outputs(v, UnitSystem::Hartree);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(h.values[i] == -1.0 / v.grid.points[i]);
        auto o = sampled(0.1, 50, [](double r) { return r * r; }, RadialRole::Potential);
        CHECK(recovery::convert_outputs(o, UnitSystem::Hartree).values[9] == doctest::Approx(0.5));
        CHECK(recovery::convert_outputs(o, UnitSystem::Scaled).values == o.values);
        CHECK_THROWS_AS(recovery::convert_outputs(sampled(0.1, 5, hydrogen_chi, RadialRole::Chi), UnitSystem::Hartree), Error);
    }

    TEST_CASE("empty recovery window fails") {
        auto chi = sampled(0.01, 20, hydrogen_chi, RadialRole::Chi);
        for (std::size_t i = 0; i < chi.size(); ++i) chi.valid[i] = false;
        try {
            (void)recovery::potential_from_chi(chi, -1.0);
            FAIL("expected recovery-failed");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::RecoveryFailed);
        }
    }
}
