#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "gbmlap/config.hpp"
#include "gbmlap/pipeline.hpp"

using namespace gbmlap;

namespace {

json load(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    return json::parse(in);
}

void schema_leaves(const json& node, const std::string& prefix, std::set<std::string>& out) {
    if (!node.contains("properties")) {
        out.insert(prefix);
        return;
    }
    for (auto it = node["properties"].begin(); it != node["properties"].end(); ++it) {
        schema_leaves(it.value(), prefix + "/" + it.key(), out);
    }
}

RadialFunction line(std::vector<double> v) {
    const auto g = RadialGrid::uniform(0.1, v.size());
    return RadialFunction(g, std::move(v), RadialRole::Potential);
}

PipelineConfig tabulated_config() {
    std::vector<double> r, v;
    for (int i = 1; i <= 100; ++i) {
        r.push_back(0.5 * i);
        v.push_back(-1.0 / r.back());
    }
    forward::PotentialSpec spec;
    spec.id = "tab";
    spec.family = forward::make_tabulated(r, v, "inline");
    auto c = config_for(spec);
    c.pade.candidates = {{0, 3}, {1, 3}};
    c.metric.window = std::make_pair(0.5, 8.0);
    return c;
}

}  // namespace

TEST_SUITE("config") {
    TEST_CASE("configs survive a JSON round trip") {
        for (const auto& id : forward::canonical_ids()) {
            const auto c = canonical_config(id);
            const auto j = to_json(c);
            CHECK(to_json(config_from_json(json::parse(j.dump()), PipelineConfig{})) == j);
        }
        const auto t = to_json(tabulated_config());
        CHECK(to_json(config_from_json(t, PipelineConfig{})) == t);
    }

    TEST_CASE("partial files keep the base values") {
        const auto base = canonical_config("ho");
        const auto c = config_from_json(json::parse(R"({"solver": {"n_points": 999}, "mode": "exact-moments"})"), base);
        CHECK(c.solver.n_points == 999);
        CHECK(c.solver.r_max == base.solver.r_max);
        CHECK(c.mode == PipelineMode::ExactMoments);
        CHECK(c.gbm.ell_max == 10);
    }

    TEST_CASE("unknown keys and bad values are config errors") {
        const auto base = canonical_config("coulomb");
        for (const char* text : {R"({"solvr": {}})", R"({"solver": {"r_mx": 3}})", R"({"mode": "fastest"})",
                                 R"({"potential": {"family": "coulomb", "omega": 1}})", R"({"solver": {"n_points": "many"}})"}) {
            CAPTURE(text);
            try {
                (void)config_from_json(json::parse(text), base);
                FAIL("expected a config error");
            } catch (const Error& e) {
                CHECK(e.code() == ErrorCode::Config);
            }
        }
        auto bad = base;
        bad.recovery.r_max = 500.0;
        CHECK_THROWS_AS(bad.validate(), Error);
    }

    TEST_CASE("canonical configs match the golden file") {
        const auto golden = load(GBMLAP_TEST_DATA_DIR "/golden_canonical_config.json");
        for (const auto& id : forward::canonical_ids()) {
            CAPTURE(id);
            REQUIRE(golden["configs"].contains(id));
            CHECK(golden["configs"][id] == to_json(canonical_config(id)));
        }
    }

    TEST_CASE("schema and configs name the same settings") {
        const auto schema = load(GBMLAP_TEST_DOCS_DIR "/config_schema.json");
        std::set<std::string> documented;
        schema_leaves(schema, "", documented);

        std::set<std::string> used;
        std::vector<json> all;
        for (const auto& id : forward::canonical_ids()) all.push_back(to_json(canonical_config(id)));
        all.push_back(to_json(tabulated_config()));
        for (const auto& j : all) {
            for (const auto& p : config_leaf_paths(j)) {
                CAPTURE(p);
                CHECK(documented.count(p) == 1);
                used.insert(p);
            }
        }
        for (const auto& p : documented) {
            CAPTURE(p);
            CHECK(used.count(p) == 1);
        }
    }

    TEST_CASE("relative L2 metric") {
        std::vector<double> e;
        for (int i = 1; i <= 100; ++i) e.push_back(-2.0 / (0.1 * i));
        const auto exact = line(e);
        const Window w{0.5, 8.0};
        CHECK(rel_l2(exact, exact, w) == 0.0);
        auto scaled = exact;
        for (double& x : scaled.values) x *= 1.01;
        CHECK(rel_l2(scaled, exact, w) == doctest::Approx(0.01).epsilon(1e-12));

        auto noisy = exact;
        for (std::size_t i = 0; i < noisy.size(); ++i) noisy.values[i] += 1e-3 * std::sin(3.0 * static_cast<double>(i));
        const double base = rel_l2(noisy, exact, w);
        auto a = noisy, b = exact;
        for (double& x : a.values) x *= -7.5;
        for (double& x : b.values) x *= -7.5;
        CHECK(rel_l2(a, b, w) == doctest::Approx(base).epsilon(1e-12));

        // Masked points drop out of the quadrature.
        auto holed = scaled;
        holed.valid[40] = false;
        CHECK(rel_l2(holed, exact, w) == doctest::Approx(0.01).epsilon(1e-12));

        CHECK_THROWS_AS((void)rel_l2(exact, exact, Window{20.0, 30.0}), Error);
    }

    TEST_CASE("default window from the density") {
        const auto g = RadialGrid::uniform(0.01, 3999);
        std::vector<double> v;
        for (double r : g.points) v.push_back(4.0 * r * r * std::exp(-2.0 * r));
        const auto w = default_window(RadialFunction(g, v, RadialRole::R2Rho));
        CHECK(w.lo == doctest::Approx(0.1).epsilon(1e-9));
        // 1 - e^{-2x}(1 + 2x + 2x^2) = 0.99 at x = 4.20297; the window ends on
        // the first grid point past it.
        CHECK(w.hi >= 4.2029);
        CHECK(w.hi <= 4.2030 + 0.01);
    }
}
