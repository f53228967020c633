#include <doctest.h>

#include <random>

#include "closed_forms.hpp"
#include "gbmlap/config.hpp"
#include "gbmlap/gbm.hpp"

using namespace gbmlap;

namespace {

MomentTable table_of(double (*mu)(int), int max_order) {
    MomentTable t;
    for (int n = 0; n <= max_order; ++n) t.set(n, mu(n), MomentProvenance::ExactOracle);
    return t;
}

gbm::GBMConfig coulomb_cfg(int ell_max, gbm::LadderMode mode = gbm::LadderMode::Saturated) {
    gbm::GBMConfig c;
    c.ell_max = ell_max;
    c.moment_max_order = 2 * ell_max;
    c.mode = mode;
    c.path = gbm::LadderPath::CoulombDegenerate;
    return c;
}

}  // namespace

TEST_SUITE("gbm") {
    TEST_CASE("saturation factor") {
        CHECK(gbm::saturation_factor(7.0, 3.0, 5.0, 1) == 1.0);
        CHECK(gbm::saturation_factor(-0.25, -1.0, -0.25, 1) == doctest::Approx(0.75));
        try {
            (void)gbm::saturation_factor(-1.0, -1.0, -0.5, 1);
            FAIL("expected degenerate-denominator");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DegenerateDenominator);
        }
        // f <= 1 always, with equality exactly on equal spacing.
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> d(0.01, 5.0);
        for (int i = 0; i < 500; ++i) {
            const double e00 = -d(rng), el0 = e00 + d(rng), e0l = e00 + d(rng);
            const int l = 1 + i % 9;
            CHECK(gbm::saturation_factor(el0, e00, e0l, l) <= 1.0);
            CHECK(gbm::saturation_factor(el0, e00, 0.5 * (el0 + e00), l) == 1.0);
        }
    }

    TEST_CASE("hydrogen ladder from closed-form levels") {
        const auto ds = closed::dataset(closed::coulomb_level, 6, 0, "coulomb");
        const auto raw = gbm::gbm_even_ladder(ds, coulomb_cfg(1, gbm::LadderMode::RawBound));
        CHECK(raw.evens.value(2) == doctest::Approx(4.0).epsilon(1e-14));
        CHECK(raw.evens.entry(2).provenance == MomentProvenance::GbmEvenRaw);

        const auto sat = gbm::gbm_even_ladder(ds, coulomb_cfg(6));
        CHECK(sat.evens.value(2) == doctest::Approx(3.0).epsilon(1e-14));
        CHECK(sat.evens.value(4) == doctest::Approx(22.5).epsilon(1e-14));
        for (int n = 2; n <= 12; n += 2) CHECK(sat.evens.value(n) == doctest::Approx(closed::hydrogen_moment(n)).epsilon(1e-12));
        CHECK(sat.accounting.consumed_count == 7);
        for (int l = 0; l <= 6; ++l) CHECK(sat.accounting.consumed_levels.count({0, l}) == 1);
        CHECK(gbm::accounting_report(sat.accounting) == doctest::Approx(100.0 * (1.0 - 7.0 / 120.0)));
    }

    TEST_CASE("oscillator ladder from closed-form levels") {
        const auto ds = closed::dataset(closed::ho_level, 10, 11, "ho");
        gbm::GBMConfig c;
        c.ell_max = 10;
        c.moment_max_order = 20;
        c.path = gbm::LadderPath::YrastSChannel;
        c.extra_s_level = 11;
        const auto sat = gbm::gbm_even_ladder(ds, c);
        CHECK(sat.evens.value(2) == doctest::Approx(1.5).epsilon(1e-14));
        for (int n = 2; n <= 20; n += 2) CHECK(sat.evens.value(n) == doctest::Approx(closed::ho_moment(n)).epsilon(1e-12));
        CHECK(sat.accounting.consumed_count == 22);
        CHECK(gbm::accounting_report(sat.accounting) == doctest::Approx(100.0 * (1.0 - 22.0 / 120.0)));
        for (double f : sat.saturation_factors) CHECK(f == 1.0);
    }

    TEST_CASE("accounting at the constraint count is zero percent") {
        gbm::GBMAccounting a;
        a.consumed_count = 120;
        CHECK(gbm::accounting_report(a) == 0.0);
    }

    TEST_CASE("missing level names the state") {
        auto ds = closed::dataset(closed::ho_level, 10, 0, "ho");
        gbm::GBMConfig c;
        c.ell_max = 10;
        c.moment_max_order = 20;
        c.path = gbm::LadderPath::YrastSChannel;
        try {
            (void)gbm::gbm_even_ladder(ds, c);
            FAIL("expected input-incomplete");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InputIncomplete);
        }
    }

    TEST_CASE("nonpositive first gap is a spectral-order error") {
        SpectralDataset ds("bad", UnitSystem::Scaled);
        ds.add(0, 0, -1.0);
        ds.add(0, 1, -1.5);
        try {
            (void)gbm::gbm_even_ladder(ds, coulomb_cfg(1));
            FAIL("expected spectral-order");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SpectralOrder);
        }
    }

    TEST_CASE("gap upper bound with closed forms") {
        const auto c = gbm::gap_upper_bound_check(closed::dataset(closed::coulomb_level, 1, 0, "c"),
                                                  table_of(closed::hydrogen_moment, 2), 1);
        CHECK(c.pass);
        CHECK(c.slack == doctest::Approx(0.25));
        const auto h = gbm::gap_upper_bound_check(closed::dataset(closed::ho_level, 1, 0, "h"), table_of(closed::ho_moment, 2), 1);
        CHECK(h.pass);
        CHECK(h.slack == doctest::Approx(0.0).epsilon(1e-14));
    }

    TEST_CASE("raw bound never undercuts the oracle for closed-form spectra") {
        const auto dc = closed::dataset(closed::coulomb_level, 6, 0, "c");
        const auto dh = closed::dataset(closed::ho_level, 6, 0, "h");
        for (int l = 1; l <= 6; ++l) {
            CHECK(gbm::raw_bound_slack(dc, table_of(closed::hydrogen_moment, 12), l) >= -1e-8);
            CHECK(gbm::raw_bound_slack(dh, table_of(closed::ho_moment, 12), l) >= -1e-8);
        }
    }

    TEST_CASE("validators on closed-form-converged solver data") {
        auto s = canonical_config("coulomb").solver;
        for (const char* id : {"coulomb", "ho"}) {
            const auto spec = forward::canonical(id);
            gbm::ChannelSolutions sols;
            for (int l = 0; l <= 2; ++l) {
                auto c = s;
                c.n_eigs = l == 0 ? 2 : 1;
                sols[l] = forward::solve_channel(spec, l, c);
            }
            const auto rep = gbm::validate_ground_state(spec, sols);
            CAPTURE(id);
            CHECK(rep.all_pass({"theorem1_left", "theorem2"}));
            const auto* t2 = rep.find("theorem2");
            REQUIRE(t2 != nullptr);
            if (std::string(id) == "coulomb") {
                CHECK(t2->lhs == doctest::Approx(3.0).epsilon(1e-5));
                CHECK(t2->rhs == doctest::Approx(4.0).epsilon(1e-5));
            } else {
                const auto* t3 = rep.find("theorem3_lower");
                REQUIRE(t3 != nullptr);
                CHECK(t3->status == gbm::CheckStatus::Pass);
                CHECK(t3->lhs == doctest::Approx(1.0).epsilon(1e-5));
                CHECK(t3->rhs == doctest::Approx(2.5).epsilon(1e-5));
            }
        }
    }

    TEST_CASE("validators skip when states are missing") {
        gbm::ChannelSolutions sols;
        auto s = canonical_config("coulomb").solver;
        s.r_max = 40;
        s.n_points = 3999;
        sols[0] = forward::solve_channel(forward::canonical("coulomb"), 0, s);
        const auto rep = gbm::validate_ground_state(forward::canonical("coulomb"), sols);
        const auto* t2 = rep.find("theorem2");
        REQUIRE(t2 != nullptr);
        CHECK(t2->status == gbm::CheckStatus::Skipped);
    }
}
