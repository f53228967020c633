#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string("\"") + GBMLAP_TEST_CLI + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path fresh(const std::string& name) {
    const fs::path p = fs::path(GBMLAP_TEST_SCRATCH) / ("cli-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// The single run directory below <root>/<stamp>-<suite>/<id>.
fs::path only_run(const fs::path& root, const std::string& id) {
    for (const auto& e : fs::directory_iterator(root)) {
        if (e.is_directory() && fs::exists(e.path() / id)) return e.path() / id;
    }
    return {};
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("usage and config errors exit with 2") {
        CHECK(run("reconstruct --potential coulomb --frobnicate") == 2);
        CHECK(run("reconstruct --potential coulomb --mode fastest") == 2);
        CHECK(run("reconstruct --potential coulomb --omega 2") == 2);
        CHECK(run("nonsense") == 2);

        const auto dir = fresh("badcfg");
        std::ofstream(dir / "bad.json") << R"({"solver": {"r_mx": 10}})";
        CHECK(run("reconstruct --potential coulomb --config " + (dir / "bad.json").string() + " --out " + dir.string()) == 2);
    }

    TEST_CASE("hydrogen reconstruction writes the closed-form chain") {
        const auto dir = fresh("hydrogen");
        REQUIRE(run("reconstruct --potential coulomb --Z 1 --mode exact-moments --pade 0,3 --out " + dir.string()) == 0);
        const auto runp = only_run(dir, "coulomb");
        REQUIRE_FALSE(runp.empty());

        int checked = 0;
        for (const auto& row : read_csv(runp / "r2rho.csv")) {
            const double r = row[0];
            CHECK(std::abs(row[2] - 4.0 * r * r * std::exp(-2.0 * r)) <= 1e-8);
            ++checked;
        }
        CHECK(checked > 1000);
        for (const auto& row : read_csv(runp / "vr.csv")) {
            const double r = row[0];
            if (r < 0.5 || r > 8.0) continue;
            CHECK(row[1] == doctest::Approx(-1.0 / r).epsilon(1e-12));
            CHECK(std::abs(row[2] + 1.0 / r) <= 1e-5 / r);
        }
    }

    TEST_CASE("validator and forward subcommands succeed on closed-form potentials") {
        CHECK(run("validate --potential ho") == 0);
        CHECK(run("validate --potential coulomb") == 0);
        CHECK(run("forward --potential ho --ell-max 2 --nr-max 1 --r-max 20 --n-points 1999") == 0);
        CHECK(run("gbm --potential coulomb --ell-max 2 --order 4") == 0);
    }
}
