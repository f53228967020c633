#include <doctest.h>

#include <cstring>
#include <random>

#include "gbmlap/config.hpp"
#include "gbmlap/core.hpp"

using namespace gbmlap;

namespace {

bool has_violation(const std::vector<MomentViolation>& v, ViolationKind k, int order) {
    for (const auto& x : v) {
        if (x.kind != k) continue;
        for (int o : x.orders) {
            if (o == order) return true;
        }
    }
    return false;
}

}  // namespace

TEST_SUITE("core") {
    TEST_CASE("energy conversion doubles into scaled units") {
        CHECK(convert_energy(-0.5, UnitSystem::Hartree, UnitSystem::Scaled) == -1.0);
        CHECK(convert_energy(3.0, UnitSystem::Scaled, UnitSystem::Hartree) == 1.5);
        CHECK(convert_energy(0.123, UnitSystem::Hartree, UnitSystem::Hartree) == 0.123);
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> d(-50.0, 50.0);
        for (int i = 0; i < 100; ++i) {
            const double x = d(rng);
            CHECK(convert_energy(convert_energy(x, UnitSystem::Hartree, UnitSystem::Scaled), UnitSystem::Scaled,
                                 UnitSystem::Hartree) == x);
        }
    }

    TEST_CASE("unit names parse and reject garbage") {
        CHECK(unit_system_from_string("hartree") == UnitSystem::Hartree);
        CHECK(unit_system_from_string("scaled") == UnitSystem::Scaled);
        try {
            unit_system_from_string("rydberg");
            FAIL("expected a config error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Config);
        }
    }

    TEST_CASE("dataset conversion doubles every gap") {
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> d(-3.0, 3.0);
        for (int trial = 0; trial < 20; ++trial) {
            SpectralDataset ds("random", UnitSystem::Hartree);
            for (int l = 0; l < 4; ++l) {
                double e = d(rng) + l;
                for (int n = 0; n < 3; ++n) {
                    ds.add(n, l, e);
                    e += 0.1 + std::abs(d(rng));
                }
            }
            const auto sc = ds.converted(UnitSystem::Scaled);
            CHECK(sc.units() == UnitSystem::Scaled);
            const auto a = ds.levels(), b = sc.levels();
            REQUIRE(a.size() == b.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                for (std::size_t j = 0; j < a.size(); ++j) {
                    CHECK(b[i].value - b[j].value == doctest::Approx(2.0 * (a[i].value - a[j].value)).epsilon(1e-15));
                }
            }
        }
    }

    TEST_CASE("missing level reports input-incomplete") {
        SpectralDataset ds("x", UnitSystem::Scaled);
        ds.add(0, 0, -1.0);
        CHECK(ds.contains(0, 0));
        CHECK_FALSE(ds.contains(0, 1));
        try {
            (void)ds.at(0, 1);
            FAIL("expected input-incomplete");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InputIncomplete);
        }
    }

    TEST_CASE("moment table validation") {
        MomentTable h;
        h.set(0, 1.0, MomentProvenance::ExactOracle);
        h.set(1, 1.5, MomentProvenance::ExactOracle);
        h.set(2, 3.0, MomentProvenance::ExactOracle);
        CHECK(validate_moment_table(h).empty());

        MomentTable bad;
        bad.set(0, 1.0, MomentProvenance::ExactOracle);
        bad.set(1, 2.0, MomentProvenance::ExactOracle);
        bad.set(2, 3.0, MomentProvenance::ExactOracle);
        CHECK(has_violation(validate_moment_table(bad), ViolationKind::LogConvexity, 1));

        MomentTable unnorm;
        unnorm.set(0, 0.9, MomentProvenance::ExactOracle);
        unnorm.set(2, 3.0, MomentProvenance::ExactOracle);
        CHECK(has_violation(validate_moment_table(unnorm), ViolationKind::Normalization, 0));
    }

    TEST_CASE("moment table survives the manifest JSON format bit for bit") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> d(0.0, 30.0);
        MomentTable t;
        for (int n = -2; n <= 20; ++n) t.set(n, std::exp(d(rng)) * (1.0 + 1e-17 * n), MomentProvenance::InterpolatedOdd);
        t.set(0, 1.0, MomentProvenance::ExactOracle);
        const auto text = to_json(t).dump();
        const auto back = moment_table_from_json(json::parse(text));
        REQUIRE(back.size() == t.size());
        for (const auto& [n, e] : t.entries()) {
            const double a = e.value, b = back.value(n);
            CHECK(std::memcmp(&a, &b, sizeof a) == 0);
            CHECK(back.entry(n).provenance == e.provenance);
        }
    }

    TEST_CASE("uniform grid starts one step from the origin") {
        const auto g = RadialGrid::uniform(0.01, 5);
        REQUIRE(g.size() == 5);
        CHECK(g.points[0] == doctest::Approx(0.01));
        CHECK(g.points[4] == doctest::Approx(0.05));
        CHECK(g.is_uniform());
    }
}
