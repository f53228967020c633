#include <doctest.h>

#include <cmath>
#include <cstring>

#include "closed_forms.hpp"
#include "gbmlap/moments.hpp"

using namespace gbmlap;

namespace {

MomentTable hydrogen_evens(int max_order) {
    MomentTable t;
    for (int n = 0; n <= max_order; n += 2) t.set(n, closed::hydrogen_moment(n), MomentProvenance::GbmEvenSaturated);
    return t;
}

MomentTable hydrogen_all(int max_order) {
    MomentTable t;
    for (int n = 0; n <= max_order; ++n) t.set(n, closed::hydrogen_moment(n), MomentProvenance::ExactOracle);
    return t;
}

pade::RationalApproximant manual(std::vector<double> num, std::vector<double> den) {
    pade::RationalApproximant r;
    r.N = static_cast<int>(num.size()) - 1;
    r.D = static_cast<int>(den.size()) - 1;
    r.num = std::move(num);
    r.den = std::move(den);
    pade::pole_analysis(r);
    return r;
}

moments::OddFamily family(moments::OddFamilyKind k) {
    moments::OddFamily f;
    f.kind = k;
    return f;
}

}  // namespace

TEST_SUITE("moments") {
    TEST_CASE("exact oracle passes odd values through") {
        auto f = family(moments::OddFamilyKind::ExactOracle);
        f.oracle = hydrogen_all(7);
        const auto c = moments::complete_odd(hydrogen_evens(6), f, 7);
        CHECK(c.table.value(1) == 1.5);
        CHECK(c.table.value(3) == 7.5);
        CHECK(c.table.entry(3).provenance == MomentProvenance::ExactOracle);
        CHECK(c.repaired == 0);
    }

    TEST_CASE("monotone cubic matches an independent PCHIP") {
        // Reference values from scipy.interpolate.PchipInterpolator on (n, ln mu_n).
        MomentTable ev;
        ev.set(0, 1.0, MomentProvenance::GbmEvenSaturated);
        ev.set(2, 3.0, MomentProvenance::GbmEvenSaturated);
        ev.set(4, 22.5, MomentProvenance::GbmEvenSaturated);
        ev.set(6, 281.25, MomentProvenance::GbmEvenSaturated);
        const auto c = moments::complete_odd(ev, family(moments::OddFamilyKind::MonotoneLogInterp), 6);
        CHECK(c.table.value(1) == doctest::Approx(1.57086043350409).epsilon(1e-12));
        CHECK(c.table.value(3) == doctest::Approx(7.415757204007743).epsilon(1e-12));
        CHECK(c.table.value(5) == doctest::Approx(74.36122626601984).epsilon(1e-12));
        CHECK(c.table.value(1) > 1.0);
        CHECK(c.table.value(1) <= std::sqrt(3.0));
        CHECK(validate_moment_table(c.table).empty());

        const auto h = moments::complete_odd(hydrogen_evens(20), family(moments::OddFamilyKind::MonotoneLogInterp), 20);
        CHECK(h.table.value(3) == doctest::Approx(7.37550188438632).epsilon(1e-12));
        CHECK(h.table.value(19) == doctest::Approx(48654946761377.62).epsilon(1e-12));
    }

    TEST_CASE("every family respects the convexity bracket and the parity split") {
        using K = moments::OddFamilyKind;
        const auto ev = hydrogen_evens(12);
        for (K k : {K::MonotoneLogInterp, K::ConstrainedFit, K::MaxentClosure}) {
            CAPTURE(moments::to_string(k));
            const auto c = moments::complete_odd(ev, family(k), 12);
            CHECK(c.table.value(1) <= std::sqrt(c.table.value(0) * c.table.value(2)) * (1.0 + 1e-12));
            for (int n = 1; n <= 11; n += 2) CHECK(c.table.value(n) > 0.0);
            CHECK(validate_moment_table(c.table, 1e-10, 1e-9).empty());
            for (int n = 0; n <= 12; n += 2) {
                const double a = ev.value(n), b = c.table.value(n);
                CHECK(std::memcmp(&a, &b, sizeof a) == 0);
                CHECK(c.table.entry(n).provenance == MomentProvenance::GbmEvenSaturated);
            }
        }
    }

    TEST_CASE("maximum-entropy closure recovers a density inside its family") {
        // x^2 exp(-2x) is a member, so the odd moments should come out exact.
        const auto c = moments::complete_odd(hydrogen_evens(6), family(moments::OddFamilyKind::MaxentClosure), 6);
        CHECK_FALSE(c.fell_back);
        CHECK(c.used == moments::OddFamilyKind::MaxentClosure);
        for (int n : {1, 3, 5}) CHECK(c.table.value(n) == doctest::Approx(closed::hydrogen_moment(n)).epsilon(1e-6));
    }

    TEST_CASE("invalid inputs are refused") {
        MomentTable bad;
        bad.set(0, 1.0, MomentProvenance::GbmEvenSaturated);
        bad.set(2, 9.0, MomentProvenance::GbmEvenSaturated);
        bad.set(4, 10.0, MomentProvenance::GbmEvenSaturated);
        CHECK_THROWS_AS((void)moments::complete_odd(bad, family(moments::OddFamilyKind::MonotoneLogInterp), 4), Error);

        auto f = family(moments::OddFamilyKind::ConstrainedFit);
        f.fit_degree = 9;
        try {
            (void)moments::complete_odd(hydrogen_evens(6), f, 6);
            FAIL("expected a config error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Config);
        }
        try {
            (void)moments::complete_odd(hydrogen_evens(6), family(moments::OddFamilyKind::ExactOracle), 6);
            FAIL("exact-oracle without a table must be rejected");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Config);
        }
        CHECK_THROWS_AS(moments::odd_family_from_string("spline"), Error);
    }

    TEST_CASE("negative moments from the rational image") {
        const auto h = moments::negative_moments(manual({1.0}, {1.0, 1.5, 0.75, 0.125}));
        CHECK(std::abs(h.mu_m1 - 1.0) <= 1e-10);
        REQUIRE(h.mu_m2.has_value());
        CHECK(std::abs(*h.mu_m2 - 2.0) <= 1e-10);

        // 1/((q+1)(q+2)(q+3)): ln 2 - ln(3)/2 and 3 ln(3)/2 - 2 ln 2.
        const auto t = moments::negative_moments(manual({1.0 / 6.0}, {1.0, 11.0 / 6.0, 1.0, 1.0 / 6.0}));
        CHECK(t.mu_m1 == doctest::Approx(std::log(2.0) - 0.5 * std::log(3.0)).epsilon(1e-12));
        REQUIRE(t.mu_m2.has_value());
        CHECK(*t.mu_m2 == doctest::Approx(1.5 * std::log(3.0) - 2.0 * std::log(2.0)).epsilon(1e-12));

        // Two poles, so only the first negative moment converges.
        const auto two = moments::negative_moments(manual({0.5}, {1.0, 1.5, 0.5}));
        CHECK(two.mu_m1 == doctest::Approx(std::log(2.0)).epsilon(1e-12));
        CHECK_FALSE(two.mu_m2.has_value());

        MomentTable tab;
        moments::store_negative(tab, h);
        CHECK(tab.entry(-1).provenance == MomentProvenance::StieltjesNegative);
        CHECK(tab.has(-2));
    }

    TEST_CASE("divergent negative moments are errors") {
        for (const auto& r : {manual({1.0}, {1.0, 1.0}), manual({1.0}, {1.0, -2.0}), manual({1.0, 1.0}, {1.0, 1.0})}) {
            try {
                (void)moments::negative_moments(r);
                FAIL("expected divergent-integral");
            } catch (const Error& e) {
                CHECK(e.code() == ErrorCode::DivergentIntegral);
            }
        }
    }
}
