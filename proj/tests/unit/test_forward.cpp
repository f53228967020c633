#include <doctest.h>

#include <cmath>

#include "closed_forms.hpp"
#include "gbmlap/config.hpp"
#include "gbmlap/forward.hpp"

using namespace gbmlap;

namespace {

forward::SolverConfig canonical_solver() { return canonical_config("coulomb").solver; }

forward::SolverConfig quick_solver() {
    forward::SolverConfig s;
    s.r_max = 40.0;
    s.n_points = 3999;
    s.richardson_levels = 1;
    return s;
}

int interior_zeros(const std::vector<double>& u) {
    double peak = 0.0;
    for (double x : u) peak = std::max(peak, std::abs(x));
    int zeros = 0, last = 0;
    for (double x : u) {
        if (std::abs(x) < 1e-6 * peak) continue;
        const int s = x > 0 ? 1 : -1;
        if (last != 0 && s != last) ++zeros;
        last = s;
    }
    return zeros;
}

}  // namespace

TEST_SUITE("forward") {
    TEST_CASE("potential values in declared units") {
        CHECK(forward::evaluate_potential(forward::canonical("coulomb"), 2.0) == doctest::Approx(-0.5).epsilon(1e-15));
        const double hul = -0.5 * std::exp(-0.5) / (1.0 - std::exp(-0.5));
        CHECK(forward::evaluate_potential(forward::canonical("hulthen"), 1.0) == doctest::Approx(hul).epsilon(1e-14));
        CHECK(std::abs(hul + 0.77069) < 1e-4);  // the commonly quoted rounding is off in the fifth digit
        CHECK(forward::evaluate_potential(forward::canonical("kratzer"), 1.0) == doctest::Approx(-0.375).epsilon(1e-15));
        CHECK(forward::evaluate_scaled(forward::canonical("ho"), 3.0) == doctest::Approx(9.0));
        try {
            (void)forward::evaluate_potential(forward::canonical("coulomb"), 0.0);
            FAIL("r = 0 must be rejected");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Domain);
        }
    }

    TEST_CASE("converged ground levels match closed forms") {
        auto s = canonical_solver();
        const auto c = forward::solve_channel(forward::canonical("coulomb"), 0, s);
        CHECK(std::abs(c.eigenvalues.at(0) + 1.0) <= 1e-6);
        const auto h = forward::solve_channel(forward::canonical("ho"), 1, s);
        CHECK(std::abs(h.eigenvalues.at(0) - 5.0) <= 1e-6);
    }

    TEST_CASE("second-order stencil converges at rate four") {
        auto s = quick_solver();
        s.r_max = 10.0;
        s.n_points = 999;
        const double e1 = forward::solve_channel(forward::canonical("ho"), 0, s).eigenvalues.at(0) - 3.0;
        s.n_points = 1999;
        const double e2 = forward::solve_channel(forward::canonical("ho"), 0, s).eigenvalues.at(0) - 3.0;
        const double ratio = e1 / e2;
        CHECK(ratio >= 3.5);
        CHECK(ratio <= 4.5);
    }

    TEST_CASE("spectral datasets have the requested shape") {
        const auto s = canonical_solver();
        const auto c = forward::build_spectral_dataset(forward::canonical("coulomb"), 6, 0, s);
        CHECK(c.size() == 7);
        for (int l = 0; l <= 6; ++l) CHECK(std::abs(c.at(0, l) - closed::coulomb_level(0, l)) <= 1e-6);

        const auto h = forward::build_spectral_dataset(forward::canonical("ho"), 2, 1, quick_solver());
        CHECK(h.size() == 6);
        for (int l = 0; l <= 2; ++l) {
            for (int n = 0; n <= 1; ++n) CHECK(h.at(n, l) == doctest::Approx(closed::ho_level(n, l)).epsilon(1e-4));
        }
        CHECK(forward::build_spectral_dataset(forward::canonical("kratzer"), 0, 0, quick_solver()).size() == 1);
    }

    TEST_CASE("ground-state oracle moments") {
        const auto s = canonical_solver();
        const auto c = forward::exact_ground_oracle(forward::canonical("coulomb"), s, 20);
        CHECK(c.moments.value(0) == doctest::Approx(1.0).epsilon(1e-12));
        for (int n : {1, 2, 3, 4}) CHECK(c.moments.value(n) == doctest::Approx(closed::hydrogen_moment(n)).epsilon(1e-5));
        const auto h = forward::exact_ground_oracle(forward::canonical("ho"), s, 20);
        CHECK(h.moments.value(2) == doctest::Approx(1.5).epsilon(1e-5));
        for (const auto& id : forward::canonical_ids()) {
            const auto o = forward::exact_ground_oracle(forward::canonical(id), quick_solver(), 20);
            CHECK(o.moments.value(0) == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(validate_moment_table(o.moments, 1e-8, 1e-9).empty());
        }
    }

    TEST_CASE("analytic ground states agree with the solver") {
        const auto s = canonical_solver();
        for (const char* id : {"coulomb", "ho"}) {
            const auto spec = forward::canonical(id);
            const auto a = forward::analytic_ground_state(spec);
            REQUIRE(a.has_value());
            const auto o = forward::exact_ground_oracle(spec, s, 8);
            CHECK(a->e00_scaled == doctest::Approx(o.e00).epsilon(1e-6));
            for (int n = 1; n <= 8; ++n) CHECK(a->moment(n) == doctest::Approx(o.moments.value(n)).epsilon(1e-5));
        }
        CHECK_FALSE(forward::analytic_ground_state(forward::canonical("hulthen")).has_value());
    }

    TEST_CASE("node counts, yrast ordering and Coulomb degeneracy") {
        auto s = quick_solver();
        s.n_eigs = 3;
        for (const auto& id : forward::canonical_ids()) {
            const auto spec = forward::canonical(id);
            double prev = -1e300;
            for (int l = 0; l <= 2; ++l) {
                const auto sol = forward::solve_channel(spec, l, s);
                for (std::size_t n = 0; n < sol.eigenfunctions.size(); ++n) {
                    CAPTURE(id);
                    CAPTURE(l);
                    CAPTURE(n);
                    CHECK(interior_zeros(sol.eigenfunctions[n]) == static_cast<int>(n));
                }
                CHECK(sol.eigenvalues.at(0) > prev);
                prev = sol.eigenvalues.at(0);
            }
        }
        const auto ds = forward::build_spectral_dataset(forward::canonical("coulomb"), 1, 1, canonical_solver());
        CHECK(std::abs(ds.at(1, 0) - ds.at(0, 1)) <= 1e-6);
    }

    TEST_CASE("tabulated potentials reproduce their samples") {
        std::vector<double> r, v;
        for (int i = 1; i <= 400; ++i) {
            r.push_back(0.05 * i);
            v.push_back(0.5 * r.back() * r.back());
        }
        forward::PotentialSpec spec;
        spec.id = "tab";
        spec.family = forward::make_tabulated(r, v, "test");
        spec.validate();
        CHECK(forward::evaluate_potential(spec, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(forward::evaluate_potential(spec, 1.025) == doctest::Approx(0.5 * 1.025 * 1.025).epsilon(1e-3));
    }
}
