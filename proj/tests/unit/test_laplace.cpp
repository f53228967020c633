#include <doctest.h>

#include <cmath>
#include <random>

#include "gbmlap/laplace.hpp"

using namespace gbmlap;

namespace {

pade::RationalApproximant manual(std::vector<double> num, std::vector<double> den) {
    pade::RationalApproximant r;
    r.N = static_cast<int>(num.size()) - 1;
    r.D = static_cast<int>(den.size()) - 1;
    r.num = std::move(num);
    r.den = std::move(den);
    pade::pole_analysis(r);
    return r;
}

// Expand prod (1 + q / a_i) so that sum c_i / (q + a_i) = num / den.
pade::RationalApproximant from_poles(const std::vector<double>& c, const std::vector<double>& a) {
    const std::size_t k = a.size();
    std::vector<double> den{1.0};
    for (double ai : a) {
        std::vector<double> next(den.size() + 1, 0.0);
        for (std::size_t j = 0; j < den.size(); ++j) {
            next[j] += den[j];
            next[j + 1] += den[j] / ai;
        }
        den = next;
    }
    std::vector<double> num(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> part{c[i] / a[i]};
        for (std::size_t m = 0; m < k; ++m) {
            if (m == i) continue;
            std::vector<double> next(part.size() + 1, 0.0);
            for (std::size_t j = 0; j < part.size(); ++j) {
                next[j] += part[j];
                next[j + 1] += part[j] / a[m];
            }
            part = next;
        }
        for (std::size_t j = 0; j < part.size(); ++j) num[j] += part[j];
    }
    return manual(num, den);
}

RadialFunction hydrogen_chi2(double h, std::size_t count) {
    const auto g = RadialGrid::uniform(h, count);
    std::vector<double> v;
    for (double r : g.points) v.push_back(4.0 * r * r * std::exp(-2.0 * r));
    return RadialFunction(g, v, RadialRole::ChiSquared);
}

}  // namespace

TEST_SUITE("laplace") {
    TEST_CASE("residue inversion of table transforms") {
        const auto h = manual({1.0}, {1.0, 1.5, 0.75, 0.125});
        const auto s = laplace::residue_invert(h);
        CHECK(s.evaluate(1.0) == doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-10));
        CHECK(std::abs(s.evaluate(1.0) - 0.541341) < 5e-7);
        for (double r = 0.1; r < 15.0; r += 0.37) CHECK(std::abs(s.evaluate(r) - 4.0 * r * r * std::exp(-2.0 * r)) <= 1e-10);
        CHECK(laplace::round_trip_error(s, h) <= 1e-9);

        const auto g = laplace::residue_invert(manual({1.0}, {1.0, 1.0}));
        for (double r : {0.0, 0.5, 3.0}) CHECK(g.evaluate(r) == doctest::Approx(std::exp(-r)).epsilon(1e-13));

        // 1/((q+1)(q+2)) = 0.5 / (1 + 1.5 q + 0.5 q^2)
        const auto two = laplace::residue_invert(manual({0.5}, {1.0, 1.5, 0.5}));
        for (double r : {0.2, 1.0, 4.0}) CHECK(two.evaluate(r) == doctest::Approx(std::exp(-r) - std::exp(-2.0 * r)).epsilon(1e-12));
    }

    TEST_CASE("residue sums are real-valued") {
        // A simple real pole, then a conjugate pair at -1 +- 2i.
        const auto r = from_poles({1.0}, {1.0});
        const auto cpx = manual({1.0, 0.3}, {1.0, 0.4, 0.2});
        for (const auto& rat : {r, cpx}) {
            const auto s = laplace::residue_invert(rat);
            for (double x = 0.05; x < 10.0; x += 0.5) CHECK(std::abs(s.evaluate_complex(x).imag()) <= 1e-10);
        }
    }

    TEST_CASE("numeric Bromwich inversion") {
        laplace::InversionConfig cfg;
        auto hyd = [](laplace::cplx q) { return 8.0 / ((q + 2.0) * (q + 2.0) * (q + 2.0)); };
        CHECK(std::abs(laplace::numeric_invert_at(hyd, 1.0, cfg) - 4.0 * std::exp(-2.0)) <= 1e-8);
        auto one = [](laplace::cplx q) { return 1.0 / (q + 1.0); };
        CHECK(std::abs(laplace::numeric_invert_at(one, 0.5, cfg) - std::exp(-0.5)) <= 1e-8);
        auto step = [](laplace::cplx q) { return 1.0 / q; };
        for (double r : {0.3, 1.0, 7.0}) CHECK(std::abs(laplace::numeric_invert_at(step, r, cfg, 0.0) - 1.0) <= 1e-8);

        laplace::NumericDiagnostics d;
        const auto f = laplace::numeric_invert(hyd, RadialGrid::uniform(0.5, 20), cfg, 0.0, &d);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double r = f.grid.points[i];
            CHECK(std::abs(f.values[i] - 4.0 * r * r * std::exp(-2.0 * r)) <= 1e-8);
        }
        CHECK(d.evaluations > 0);
    }

    TEST_CASE("residue and numeric paths agree on random rationals") {
        std::mt19937 rng(101);
        std::uniform_real_distribution<double> ca(0.1, 1.0), aa(0.3, 3.0);
        laplace::InversionConfig cfg;
        for (int trial = 0; trial < 12; ++trial) {
            const int k = 1 + trial % 4;
            std::vector<double> c, a;
            for (int i = 0; i < k; ++i) {
                c.push_back(ca(rng));
                a.push_back(aa(rng) + 0.9 * i);
            }
            const auto rat = from_poles(c, a);
            const auto s = laplace::residue_invert(rat);
            CHECK(laplace::round_trip_error(s, rat) <= 1e-9);
            auto L = [&](laplace::cplx q) { return rat.evaluate(q); };
            for (double r : {0.25, 1.0, 2.5, 6.0}) {
                double truth = 0.0;
                for (int i = 0; i < k; ++i) truth += c[static_cast<std::size_t>(i)] * std::exp(-a[static_cast<std::size_t>(i)] * r);
                CHECK(std::abs(s.evaluate(r) - truth) <= 1e-10);
                CHECK(std::abs(laplace::numeric_invert_at(L, r, cfg) - truth) <= 1e-8);
            }
        }
    }

    TEST_CASE("density post-processing") {
        laplace::DensityDiagnostics d;
        const auto clean = laplace::density_postprocess(hydrogen_chi2(0.01, 3999), &d);
        CHECK(d.clipped == 0);
        CHECK(d.masked == 0);
        CHECK(std::abs(d.integral - 1.0) <= 1e-6);

        auto tiny = hydrogen_chi2(0.01, 3999);
        tiny.values[3000] = -1e-9;
        const auto out = laplace::density_postprocess(tiny, &d);
        CHECK(d.clipped == 1);
        CHECK(out.values[3000] == 0.0);
        CHECK_FALSE(out.valid[3000]);

        auto deep = hydrogen_chi2(0.01, 3999);
        double peak = 0.0;
        for (double v : deep.values) peak = std::max(peak, v);
        deep.values[3000] = -0.01 * peak;
        try {
            (void)laplace::density_postprocess(deep);
            FAIL("expected reconstruction-invalid");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ReconstructionInvalid);
        }
    }
}
