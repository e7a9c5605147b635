#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qbethe/scalar_product.hpp"
#include "qbethe/serialization.hpp"

// Drives the installed command-line binary end to end: determinism of the
// reports, exit codes, and the negative-control hook.

namespace {

std::string cli_path() { return QBETHE_CLI_PATH; }

std::string tmp_file(const std::string& name) {
    return std::string("/tmp/qbethe_test_") + name;
}

int run(const std::string& args) {
    std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_config(const std::string& path) {
    qbethe::Json j;
    j["schema"] = "qbethe.config/1";
    j["chain"] = qbethe::chain_to_json(qbethe::default_config().chain);
    j["cardinalities"] = {1};
    j["sampling"] = qbethe::Json{{"seed", 11}, {"magnitude", 12}, {"count", 2}};
    std::ofstream out(path);
    out << j.dump(2);
}

}  // namespace

TEST_CASE("same seed gives byte-identical reports") {
    std::string cfg = tmp_file("cfg.json");
    write_config(cfg);
    std::string out1 = tmp_file("rep1.json"), out2 = tmp_file("rep2.json");
    REQUIRE(run("suite --config " + cfg + " --out " + out1) == 0);
    REQUIRE(run("suite --config " + cfg + " --out " + out2) == 0);
    std::string a = slurp(out1), b = slurp(out2);
    CHECK(!a.empty());
    CHECK(a == b);
}

TEST_CASE("seed changes the report") {
    std::string cfg = tmp_file("cfg.json");
    write_config(cfg);
    std::string out1 = tmp_file("rep3.json"), out2 = tmp_file("rep4.json");
    REQUIRE(run("check-yang-baxter --config " + cfg + " --out " + out1) == 0);
    REQUIRE(run("check-yang-baxter --config " + cfg + " --seed 999 --out " + out2) == 0);
    CHECK(slurp(out1) != slurp(out2));
}

TEST_CASE("parallel execution gives the same report") {
    std::string cfg = tmp_file("cfg.json");
    write_config(cfg);
    std::string out1 = tmp_file("rep5.json"), out2 = tmp_file("rep6.json");
    REQUIRE(run("check-action --config " + cfg + " --out " + out1) == 0);
    REQUIRE(run("check-action --config " + cfg + " --jobs 4 --out " + out2) == 0);
    CHECK(slurp(out1) == slurp(out2));
}

TEST_CASE("malformed config exits 2 and writes nothing") {
    std::string bad = tmp_file("bad.json");
    {
        std::ofstream out(bad);
        out << "{\"schema\": \"qbethe.config/1\", \"chain\": {\"rank\": 2}}";
    }
    std::string outp = tmp_file("never.json");
    std::remove(outp.c_str());
    CHECK(run("suite --config " + bad + " --out " + outp) == 2);
    CHECK(slurp(outp).empty());

    std::string garbage = tmp_file("garbage.json");
    {
        std::ofstream out(garbage);
        out << "not json";
    }
    CHECK(run("suite --config " + garbage) == 2);
}

TEST_CASE("negative control fails and names the damaged term") {
    std::string cfg = tmp_file("cfg.json");
    write_config(cfg);
    std::string outp = tmp_file("rep7.json");
    CHECK(run("check-action --config " + cfg + " --perturb-term 0 --out " + outp) == 1);
    auto rep = qbethe::Json::parse(slurp(outp));
    CHECK(rep["pass"] == false);
    bool found = false;
    for (const auto& chk : rep["checks"])
        if (chk["pass"] == false && chk.contains("details") &&
            chk["details"].contains("perturbed_term"))
            found = true;
    CHECK(found);
}

TEST_CASE("bethe vector export round trips through the library") {
    std::string cfg = tmp_file("cfg.json");
    write_config(cfg);
    std::string outp = tmp_file("state.json");
    REQUIRE(run("build-bv --config " + cfg + " --out " + outp) == 0);
    auto j = qbethe::Json::parse(slurp(outp));
    CHECK(j["schema"] == "qbethe.state/1");
    auto chain = qbethe::chain_from_json(j["bethe"]["chain"]);
    auto sets = qbethe::sets_from_json(j["bethe"]["sets"]);
    auto v = qbethe::state_from_json(j, chain);
    qbethe::BetheBuilder<qbethe::Rat> bb(chain);
    CHECK(v == bb.bethe(sets));
}

TEST_CASE("highest-coefficient batch queries from a grid file") {
    std::string cfg = tmp_file("cfg.json");
    write_config(cfg);
    std::string grid = tmp_file("grid.json");
    {
        std::ofstream out(grid);
        out << R"([{"kind":"Z","u":[["1/2"]],"t":[["1/3"]]},)"
            << R"({"kind":"Zbar","u":[["2/5"]],"t":[["3/7"]]}])";
    }
    std::string outp = tmp_file("rep8.json");
    REQUIRE(run("check-hc --config " + cfg + " --grid " + grid + " --out " + outp) == 0);
    auto rep = qbethe::Json::parse(slurp(outp));
    int queries = 0;
    for (const auto& chk : rep["checks"])
        if (chk["name"].get<std::string>().rfind("hc query", 0) == 0) {
            ++queries;
            CHECK(chk["details"].contains("value"));
        }
    CHECK(queries == 2);

    // the reported value matches a library evaluation
    qbethe::HighestCoefficients<qbethe::Rat> hc(qbethe::Rat(3, 2));
    qbethe::Rat want = hc.z({{qbethe::Rat(1, 2)}}, {{qbethe::Rat(1, 3)}});
    for (const auto& chk : rep["checks"])
        if (chk["name"] == "hc query#0 Z")
            CHECK(chk["details"]["value"] == qbethe::Json(want.str()));

    std::string badgrid = tmp_file("badgrid.json");
    {
        std::ofstream out(badgrid);
        out << "{\"not\": \"an array\"}";
    }
    CHECK(run("check-hc --config " + cfg + " --grid " + badgrid) == 2);
}

TEST_CASE("float mode export") {
    std::string cfg = tmp_file("cfg.json");
    write_config(cfg);
    std::string outp = tmp_file("fstate.json");
    REQUIRE(run("build-bv --mode float --config " + cfg + " --out " + outp) == 0);
    auto j = qbethe::Json::parse(slurp(outp));
    CHECK(j["mode"] == "float");
    CHECK(j["amplitudes"].size() > 0);
}
