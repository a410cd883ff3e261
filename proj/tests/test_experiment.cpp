#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_support.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nctorus/experiment.hpp"

using namespace nct;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const char* name) {
    const fs::path p = fs::temp_directory_path() / "nct_tests" / name;
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("config defaults parse and serialization is a fixed point") {
    const ExperimentConfig c = parse_config("{\"mode\": \"axioms\"}");
    CHECK(c.mode == "axioms");
    CHECK(c.q == 3);
    CHECK(c.p == 1);
    CHECK(c.d == 2);
    const std::string s1 = serialize_config(c);
    const ExperimentConfig c2 = parse_config(s1);
    CHECK(serialize_config(c2) == s1);
}

TEST_CASE("config rejects unknown keys at every level") {
    CHECK_THROWS_AS(parse_config("{\"mode\":\"axioms\",\"zap\":1}"),
                    config_error);
    CHECK_THROWS_AS(parse_config("{\"mode\":\"converge\",\"schedule\":"
                                 "{\"kind\":\"dilation\",\"oops\":2}}"),
                    config_error);
    CHECK_THROWS_AS(
        parse_config("{\"mode\":\"bound\",\"h\":{\"blocks\":[],\"x\":1}}"),
        config_error);
    CHECK_THROWS_AS(parse_config("not json"), config_error);
    CHECK_THROWS_AS(parse_config("[1,2]"), config_error);
    // an empty object is a complete config: every field has a default
    CHECK(parse_config("{}").mode == "axioms");
}

TEST_CASE("config validates numeric ranges and coprimality") {
    CHECK_THROWS_AS(parse_config("{\"mode\":\"axioms\",\"q\":1}"),
                    config_error);
    CHECK_THROWS_AS(parse_config("{\"mode\":\"axioms\",\"q\":9}"),
                    config_error);
    CHECK_THROWS_AS(parse_config("{\"mode\":\"axioms\",\"q\":4,\"p\":2}"),
                    config_error);
    CHECK_THROWS_AS(parse_config("{\"mode\":\"axioms\",\"d\":3}"),
                    config_error);
    CHECK_THROWS_AS(parse_config("{\"mode\":\"axioms\",\"workers\":0}"),
                    config_error);
    CHECK_THROWS_AS(parse_config("{\"mode\":\"bogus\"}"), config_error);
    CHECK_THROWS_AS(
        parse_config("{\"mode\":\"converge\",\"schedule\":{\"decay\":1.5}}"),
        config_error);
    CHECK_NOTHROW(parse_config("{\"mode\":\"axioms\",\"q\":5,\"p\":3}"));
}

TEST_CASE("coefficient specs accept the three spellings") {
    const ExperimentConfig a =
        parse_config("{\"mode\":\"bound\",\"h\":\"identity\","
                     "\"hprime\":\"scalar:2.5\"}");
    CHECK(a.h.kind == "identity");
    CHECK(a.hprime.kind == "scalar");
    CHECK(a.hprime.value == 2.5);
    const ExperimentConfig b = parse_config(
        "{\"mode\":\"bound\",\"h\":\"random:band=2,mag=0.3\"}");
    CHECK(b.h.kind == "random");
    CHECK(b.h.band == 2);
    CHECK(b.h.magnitude == 0.3);
    const ExperimentConfig c = parse_config(
        "{\"mode\":\"bound\",\"h\":{\"blocks\":"
        "[[[0,0,1.0,0.0]],[[0,0,0.0,0.0]],[[0,0,0.0,0.0]],[[0,0,1.0,0.0]]]}}");
    CHECK(c.h.kind == "blocks");
    CHECK_THROWS_AS(
        parse_config("{\"mode\":\"bound\",\"h\":\"random:band=2,mag=0.6\"}"),
        config_error);  // d * mag must stay below 1
    CHECK_THROWS_AS(parse_config("{\"mode\":\"bound\",\"h\":\"nonsense\"}"),
                    config_error);
}

TEST_CASE("a tiny run writes csv plus manifest and reports ok") {
    const fs::path out = fresh_dir("sandwich");
    ExperimentConfig c = parse_config(
        "{\"mode\":\"sandwich\",\"q\":3,\"samples\":2,\"seed\":3}");
    const RunResult r = run_experiment(c, out.string());
    CHECK(r.status == RunStatus::ok);
    CHECK(r.summary.find("sandwich") != std::string::npos);
    REQUIRE(fs::exists(out / "results.csv"));
    REQUIRE(fs::exists(out / "manifest.json"));
    const std::string csv = slurp(out / "results.csv");
    CHECK(csv.rfind("sample,delta,lip_h,lip_k,defect,ok", 0) == 0);
    const std::string manifest = slurp(out / "manifest.json");
    CHECK(manifest.find("\"mode\": \"sandwich\"") != std::string::npos);
    CHECK(manifest.find("\"status\": \"ok\"") != std::string::npos);
    CHECK(manifest.find("wall_time_ms") != std::string::npos);
}

TEST_CASE("axioms mode emits one row per suite with machine-scale residuals") {
    const fs::path out = fresh_dir("axioms");
    ExperimentConfig c = parse_config(
        "{\"mode\":\"axioms\",\"q\":2,\"samples\":4,\"seed\":1}");
    const RunResult r = run_experiment(c, out.string());
    CHECK(r.status == RunStatus::ok);
    const std::string csv = slurp(out / "results.csv");
    CHECK(csv.rfind("suite,kind,checks,failures,worst,threshold,status", 0) ==
          0);
    int rows = 0, ok = 0, expected_violation = 0;
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        ++rows;
        if (line.find(",pass") != std::string::npos) ++ok;
        if (line.find("expected-violation") != std::string::npos)
            ++expected_violation;
    }
    CHECK(rows == 20);
    CHECK(expected_violation == 1);  // the wrapping-pair witness
    CHECK(ok == rows - expected_violation);
}

TEST_CASE("csv output is byte-stable across worker counts") {
    ExperimentConfig c = parse_config(
        "{\"mode\":\"mk\",\"q\":2,\"samples\":3,\"seed\":11,"
        "\"restarts\":8,\"iterations\":100,\"grid\":64}");
    const fs::path out1 = fresh_dir("mk_w1");
    const fs::path out3 = fresh_dir("mk_w3");
    c.workers = 1;
    run_experiment(c, out1.string());
    c.workers = 3;
    run_experiment(c, out3.string());
    CHECK(slurp(out1 / "results.csv") == slurp(out3 / "results.csv"));
}

TEST_CASE("runtime failures propagate as exceptions, not exit codes") {
    ExperimentConfig c = parse_config(
        "{\"mode\":\"sandwich\",\"q\":2,\"samples\":1,\"seed\":1}");
    // filesystem failures keep their native type; callers see an exception
    CHECK_THROWS_AS(run_experiment(c, "/proc/nct_forbidden/out"),
                    std::exception);
}
