#include "superkz/experiments.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result run_cli(const std::string& args) {
    const std::string cmd = std::string(SUPERKZ_CLI_PATH) + " " + args + " 2>/dev/null";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("superkz_cli_" + std::to_string(getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write(const std::string& name, const std::string& text) {
    const fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p.string();
}

json strip_timing(json j) {
    if (j.is_object()) {
        j.erase("seconds");
        for (auto& [k, v] : j.items()) v = strip_timing(v);
    } else if (j.is_array()) {
        for (auto& v : j) v = strip_timing(v);
    }
    return j;
}

const json kSmallScalar = {{"experiment", "scalar_identity"}, {"samples", 10}};

}  // namespace

TEST_CASE("cli: list") {
    auto r = run_cli("list");
    CHECK(r.code == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 10);
    auto v = run_cli("list --verbose");
    CHECK(v.code == 0);
    const json cat = json::parse(v.out);
    REQUIRE(cat.size() == 10);
    for (std::size_t i = 0; i < cat.size(); ++i) CHECK(cat[i]["name"] == superkz::experiment_catalog()[i].name);
}

TEST_CASE("cli: invalid input exits with code 2") {
    auto bad = run_cli("run --config " + write("bad.json", "{\"experiment\": "));
    CHECK(bad.code == 2);
    const json j = json::parse(bad.out);
    CHECK(j["valid"] == false);
    CHECK_FALSE(j["errors"].empty());

    auto unknown = run_cli("run --config " + write("unknown.json", R"({"experiment": "nope"})"));
    CHECK(unknown.code == 2);
    auto range = run_cli("validate --config " + write("range.json", R"({"experiment": "scalar_identity", "samples": -3})"));
    CHECK(range.code == 2);
    CHECK(json::parse(range.out)["errors"].size() >= 1);
    CHECK(run_cli("run --config " + (scratch() / "missing.json").string()).code == 2);
    CHECK(run_cli("frobnicate").code == 2);

    auto ok = run_cli("validate --config " + write("ok.json", kSmallScalar.dump()));
    CHECK(ok.code == 0);
    CHECK(json::parse(ok.out)["valid"] == true);
}

TEST_CASE("cli: passing and failing runs") {
    auto pass = run_cli("run --seed 5 --config " + write("pass.json", kSmallScalar.dump()));
    CHECK(pass.code == 0);
    CHECK(json::parse(pass.out)["pass"] == true);

    std::ifstream is(std::string(SUPERKZ_GOLDEN_DIR) + "/kz_ell2_gl2.config.json");
    json cfg = json::parse(is);
    cfg["cases"][0]["targets"][0]["expect_omega"] = 2;
    auto fail = run_cli("run --config " + write("fail.json", cfg.dump()));
    CHECK(fail.code == 1);
    CHECK(json::parse(fail.out)["pass"] == false);
}

TEST_CASE("cli: seeded runs are deterministic") {
    const std::string cfg = write("det.json", kSmallScalar.dump());
    const std::string a = (scratch() / "a.json").string(), b = (scratch() / "b.json").string();
    REQUIRE(run_cli("run --seed 11 --config " + cfg + " --out " + a).code == 0);
    REQUIRE(run_cli("run --seed 11 --config " + cfg + " --out " + b).code == 0);
    std::ifstream ia(a), ib(b);
    CHECK(strip_timing(json::parse(ia)) == strip_timing(json::parse(ib)));
}

TEST_CASE("cli: batches") {
    json batch = json::array({kSmallScalar, {{"experiment", "scalar_identity"}, {"samples", 5}, {"seed", 3}}});
    auto r = run_cli("run --jobs 2 --config " + write("batch.json", batch.dump()));
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["pass"] == true);
    REQUIRE(j["reports"].size() == 2);
    CHECK(j["reports"][1]["seed"] == 3);
    auto csv = run_cli("run --csv --config " + write("csv.json", R"({"experiment": "kz_ell2"})") + " --out " +
                       (scratch() / "csv_out.json").string());
    CHECK(csv.code == 0);
    CHECK(fs::exists(scratch() / "csv_out.json.csv"));
}

TEST_CASE("cli: golden two-point report") {
    auto r = run_cli("run --seed 3 --config " + std::string(SUPERKZ_GOLDEN_DIR) + "/kz_ell2_gl2.config.json");
    REQUIRE(r.code == 0);
    const json rep = json::parse(r.out);
    json got = {{"experiment", rep["experiment"]}, {"pass", rep["pass"]}, {"assertions", json::array()},
                {"spaces", rep["data"]["spaces"]}};
    for (const auto& a : rep["assertions"]) got["assertions"].push_back({{"name", a["name"]}, {"pass", a["pass"]}});
    for (auto& s : got["spaces"]) s.erase("transport_rel_error");
    std::ifstream is(std::string(SUPERKZ_GOLDEN_DIR) + "/kz_ell2_gl2.expected.json");
    CHECK(got == json::parse(is));
}
