#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gslms/cli.hpp"
#include "json.hpp"
#include "tempdir.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Result r;
    r.code = gslms::cli_main(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t file_count(const fs::path& dir) {
    return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}));
}

} // namespace

TEST_CASE("usage errors") {
    CHECK(cli({}).code != 0);
    const auto bad = cli({"paper-exp1", "--no-such-flag"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("no-such-flag") != std::string::npos);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"paper-exp1", "--format", "xml"}).code == 2);
    CHECK(cli({"paper-exp1", "--runs", "0"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("run with a missing config file") {
    const auto r = cli({"run", "missing.cfg"});
    CHECK(r.code != 0);
    CHECK(r.err.find("missing.cfg") != std::string::npos);
}

TEST_CASE("paper-exp1 at reduced scale writes seven files") {
    testing::TempDir dir("exp1");
    const auto r = cli({"paper-exp1", "--runs", "10", "-o", dir.path().string()});
    REQUIRE(r.code == 0);
    CHECK(file_count(dir.path()) == 7);
    for (const char* name : {"LMS.csv", "GZA-LMS.csv", "GRZA-LMS.csv", "VP-GZA-LMS.csv", "VP-GRZA-LMS.csv",
                             "manifest.json", "plants.csv"}) {
        CHECK(fs::exists(dir.path() / name));
    }
    const auto m = nlohmann::json::parse(slurp(dir.path() / "manifest.json"));
    CHECK(m["master_seed"] == 20180101);
}

TEST_CASE("show-config output fed back through run") {
    testing::TempDir dir("roundtrip");
    const auto shown = cli({"show-config", "paper-exp2", "--runs", "2", "--iterations", "900"});
    REQUIRE(shown.code == 0);
    const fs::path cfg = dir.path() / "exp.cfg";
    std::ofstream(cfg) << shown.out;

    const fs::path a = dir.path() / "a";
    const fs::path b = dir.path() / "b";
    REQUIRE(cli({"paper-exp2", "--runs", "2", "--iterations", "900", "-o", a.string()}).code == 0);
    REQUIRE(cli({"run", cfg.string(), "-o", b.string()}).code == 0);
    for (const auto& entry : fs::directory_iterator(a)) {
        const fs::path other = b / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(slurp(entry.path()) == slurp(other));
    }
    CHECK(file_count(a) == file_count(b));
}

TEST_CASE("output directory from the environment, flag wins") {
    testing::TempDir dir("env");
    const fs::path env_dir = dir.path() / "env";
    const fs::path flag_dir = dir.path() / "flag";
    testing::ScopedEnv env("GSLMS_OUTPUT_DIR", env_dir.c_str());
    REQUIRE(cli({"paper-exp1", "--runs", "1", "--iterations", "50"}).code == 0);
    CHECK(fs::exists(env_dir / "manifest.json"));
    REQUIRE(cli({"paper-exp1", "--runs", "1", "--iterations", "50", "-o", flag_dir.string()}).code == 0);
    CHECK(fs::exists(flag_dir / "manifest.json"));
}

TEST_CASE("json format and plant export") {
    testing::TempDir dir("fmt");
    REQUIRE(cli({"paper-exp1", "--runs", "1", "--iterations", "50", "--format", "json", "-o",
                 dir.path().string()})
                .code == 0);
    CHECK(fs::exists(dir.path() / "VP-GRZA-LMS.json"));
    const fs::path plants = dir.path() / "p.csv";
    REQUIRE(cli({"export-plants", plants.string()}).code == 0);
    CHECK(slurp(plants).rfind("tap,w1,w2,w3\n", 0) == 0);
}

TEST_CASE("validate-model at reduced size") {
    const auto r = cli({"validate-model", "--ensemble", "500", "--horizon", "5", "--tuples", "20", "--grid", "101",
                        "--tolerance", "0.5", "--format", "json"});
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["checks"].size() >= 5);
    CHECK(j.contains("lms_recursion"));
    CHECK(r.code == (j["all_passed"].get<bool>() ? 0 : 1));
}
