#include <doctest.h>

#include <cmath>
#include <random>

#include "closed_forms.hpp"
#include "gbmlap/pade.hpp"

using namespace gbmlap;

namespace {

MomentTable hydrogen_table(int max_order) {
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

// sum_i c_i / (q + a_i): Maclaurin coefficients sum_i c_i (-1)^n / a_i^{n+1}.
pade::SeriesCoefficients exponential_mixture(const std::vector<double>& c, const std::vector<double>& a, int order) {
    pade::SeriesCoefficients s;
    for (int n = 0; n <= order; ++n) {
        double v = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) v += c[i] * std::pow(-1.0, n) / std::pow(a[i], n + 1);
        s.a.push_back(v);
    }
    return s;
}

}  // namespace

TEST_SUITE("pade") {
    TEST_CASE("series coefficients") {
        const auto s = pade::series_coefficients(hydrogen_table(3), 3);
        REQUIRE(s.a.size() == 4);
        CHECK(s.a[0] == 1.0);
        CHECK(s.a[1] == doctest::Approx(-1.5));
        CHECK(s.a[2] == doctest::Approx(1.5));
        CHECK(s.a[3] == doctest::Approx(-1.25));

        MomentTable one;
        one.set(0, 1.0, MomentProvenance::ExactOracle);
        CHECK(pade::series_coefficients(one, 0).a == std::vector<double>{1.0});

        MomentTable ho;
        ho.set(0, 1.0, MomentProvenance::ExactOracle);
        ho.set(1, 1.1283791670955126, MomentProvenance::ExactOracle);
        ho.set(2, 1.5, MomentProvenance::ExactOracle);
        CHECK(pade::series_coefficients(ho, 2).a[2] == doctest::Approx(0.75));

        try {
            (void)pade::series_coefficients(one, 2);
            FAIL("expected input-incomplete");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InputIncomplete);
        }
    }

    TEST_CASE("hydrogen P(0,3) is exactly 8/(q+2)^3") {
        const auto r = pade::pade(pade::series_coefficients(hydrogen_table(6), 6), 0, 3);
        REQUIRE(r.constructible);
        REQUIRE(r.den.size() == 4);
        CHECK(r.den[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(r.den[1] == doctest::Approx(1.5).epsilon(1e-13));
        CHECK(r.den[2] == doctest::Approx(0.75).epsilon(1e-13));
        CHECK(r.den[3] == doctest::Approx(0.125).epsilon(1e-13));
        for (double q = 0.0; q <= 20.0; q += 0.25) {
            const double exact = 8.0 / std::pow(q + 2.0, 3);
            CHECK(std::abs(r.evaluate(q) - exact) <= 1e-9 * exact);
        }
        auto a = r;
        pade::pole_analysis(a);
        REQUIRE(a.poles.size() == 1);
        CHECK(a.poles[0].multiplicity == 3);
        CHECK(std::abs(a.poles[0].value - pade::cplx(-2.0, 0.0)) < 1e-6);
    }

    TEST_CASE("degenerate shapes") {
        pade::SeriesCoefficients s{{1.0, -2.0, 3.5, -4.0}};
        const auto poly = pade::pade(s, 3, 0);
        CHECK(poly.num == std::vector<double>{1.0, -2.0, 3.5, -4.0});
        const auto g = pade::pade(pade::SeriesCoefficients{{1.0, -1.0}}, 0, 1);
        CHECK(g.num[0] == doctest::Approx(1.0));
        CHECK(g.den[1] == doctest::Approx(1.0));
        auto ga = g;
        pade::pole_analysis(ga);
        REQUIRE(ga.poles.size() == 1);
        CHECK(std::abs(ga.poles[0].value - pade::cplx(-1.0, 0.0)) < 1e-12);
    }

    TEST_CASE("admissibility filter") {
        pade::FilterConfig cfg;
        const auto h = manual({8.0 / 8.0}, {1.0, 1.5, 0.75, 0.125});
        const auto rhp = manual({1.0}, {1.0, -2.0});                      // pole at +0.5
        const auto axis = manual({1.0}, {1.0, 0.0, 1.0});                 // poles at +-i
        const double p = 3.0000001;
        const auto fro = manual({1.0, 1.0 / 3.0}, {1.0, (1.0 + p) / p, 1.0 / p});  // zero -3, poles -1 and -p
        const auto improper = manual({1.0, 1.0}, {1.0, 1.0});
        const auto out = pade::admissibility_filter({h, rhp, axis, fro, improper}, cfg);
        REQUIRE(out.survivors.size() == 1);
        CHECK(out.survivors[0].D == 3);
        REQUIRE(out.rejections.size() == 4);
        CHECK(out.rejections[0].reason == "right-half-plane");
        CHECK(out.rejections[1].reason == "right-half-plane");
        CHECK(out.rejections[2].reason == "froissart");
        CHECK(out.rejections[3].reason == "improper");
    }

    TEST_CASE("filter soundness on random candidates") {
        std::mt19937 rng(17);
        std::uniform_real_distribution<double> d(-2.0, 2.0);
        std::vector<pade::RationalApproximant> cands;
        for (int i = 0; i < 200; ++i) {
            std::vector<double> den{1.0};
            for (int k = 0; k < 1 + i % 5; ++k) den.push_back(d(rng));
            cands.push_back(manual({1.0}, den));
        }
        const auto out = pade::admissibility_filter(cands, {});
        for (const auto& s : out.survivors) {
            for (const auto& pole : s.poles) CHECK(pole.value.real() < 0.0);
        }
        CHECK(out.survivors.size() + out.rejections.size() == cands.size());
    }

    TEST_CASE("model average") {
        const auto h = manual({1.0}, {1.0, 1.5, 0.75, 0.125});
        const auto one = pade::model_average({h}, {2.0});
        CHECK(one.mean[0] == doctest::Approx(0.125).epsilon(1e-14));
        CHECK(one.dispersion[0] == 0.0);
        const auto twin = pade::model_average({h, h}, {0.7});
        CHECK(twin.mean[0] == doctest::Approx(h.evaluate(0.7)).epsilon(1e-15));
        CHECK(twin.dispersion[0] == doctest::Approx(0.0));
        const auto two = pade::model_average({manual({1.0}, {1.0, 1.0}), manual({1.0}, {1.0, 1.5})}, {1.0});
        CHECK(two.mean[0] == doctest::Approx(0.45).epsilon(1e-14));
        CHECK(two.dispersion[0] == doctest::Approx(std::sqrt(0.005)).epsilon(1e-12));
        try {
            (void)pade::model_average({}, {1.0});
            FAIL("empty survivors must be rejected");
        } catch (const Error&) {
        }
    }

    TEST_CASE("default candidate set") {
        const auto set = pade::default_candidate_set(20);
        const std::vector<std::pair<int, int>> expected{{3, 3}, {3, 4}, {4, 3}, {4, 4}, {4, 5},
                                                        {5, 4}, {5, 5}, {0, 3}, {0, 4}};
        CHECK(set == expected);
        for (const auto& [N, D] : pade::default_candidate_set(6)) CHECK(N + D <= 6);
    }

    TEST_CASE("rational truth is reproduced and expansions match") {
        std::mt19937 rng(23);
        std::uniform_real_distribution<double> ca(0.2, 1.0), aa(0.5, 4.0);
        for (int trial = 0; trial < 30; ++trial) {
            const int k = 1 + trial % 3;
            std::vector<double> c, a;
            for (int i = 0; i < k; ++i) {
                c.push_back(ca(rng));
                a.push_back(aa(rng) + 0.7 * i);
            }
            const auto s = exponential_mixture(c, a, 12);
            const auto r = pade::pade(s, k - 1, k);
            REQUIRE(r.constructible);
            CHECK(r.expansion_mismatch <= 1e-9);
            for (double q = 0.0; q <= 5.0; q += 0.5) {
                double truth = 0.0;
                for (int i = 0; i < k; ++i) truth += c[static_cast<std::size_t>(i)] / (q + a[static_cast<std::size_t>(i)]);
                CHECK(r.evaluate(q) == doctest::Approx(truth).epsilon(1e-8));
            }
            for (const auto& cand : pade::build_candidates(s, {{0, 2}, {1, 2}, {2, 3}, {3, 3}})) {
                if (cand.constructible) CHECK(cand.expansion_mismatch <= 1e-9);
            }
        }
    }

    TEST_CASE("ranking puts NaN tails last") {
        auto a = manual({1.0}, {1.0, 1.0});
        auto b = a, c = a;
        a.tail_residual = 0.3;
        b.tail_residual = std::nan("");
        c.tail_residual = 0.1;
        const auto r = pade::rank_by_tail({a, b, c});
        CHECK(r[0].tail_residual == 0.1);
        CHECK(r[1].tail_residual == 0.3);
        CHECK(std::isnan(r[2].tail_residual));
    }
}
