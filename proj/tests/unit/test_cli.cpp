#include <doctest.h>

#include "cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;
using modkam::cli::CommandConfig;
using modkam::cli::Format;

namespace {

std::string data(const std::string& name) { return std::string(MODKAM_TEST_DATA) + "/" + name; }

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / "modkam_cli_tests";
    fs::create_directories(d);
    return d / name;
}

struct Run {
    int code;
    std::string out, err;
};

Run dispatch(const std::string& sub, const std::string& input, const std::string& output = "", Format f = Format::json) {
    CommandConfig c;
    c.subcommand = sub;
    c.input = input;
    c.output = output;
    c.format = f;
    std::ostringstream out, err;
    int code = modkam::cli::dispatch(c, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

Run argv_run(std::vector<std::string> args) {
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    int code = modkam::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST_CASE("subcommand set") {
    const auto& s = modkam::cli::subcommands();
    for (const char* name : {"modcheck", "dini", "kstar", "remaining", "jackson-bench", "dio", "kam-run", "regularity"})
        CHECK(std::find(s.begin(), s.end(), name) != s.end());
}

TEST_CASE("usage errors exit 2") {
    CHECK(argv_run({"modkam", "frobnicate", "--input", data("dini_log1.json")}).code == 2);
    CHECK(argv_run({"modkam", "dini"}).code == 2);
    CHECK(dispatch("dini", data("does_not_exist.json")).code == 2);
    CHECK(dispatch("dini", scratch("cfg.toml").string()).code == 2);

    std::ofstream(scratch("broken.json")) << "{\"modulus\": ";
    CHECK(dispatch("dini", scratch("broken.json").string()).code == 2);

    std::ofstream(scratch("schema.json")) << R"({"modulus": {"kind": "log_hoelder"}, "k": 6, "tau": 2})";
    Run r = dispatch("dini", scratch("schema.json").string());
    CHECK(r.code == 2);
    CHECK(r.err.find("lambda") != std::string::npos);
}

TEST_CASE("modcheck on a log type modulus") {
    fs::path out = scratch("modcheck.json");
    Run r = dispatch("modcheck", data("modcheck_log2.json"), out.string());
    REQUIRE(r.code == 0);
    json j = json::parse(slurp(out));
    CHECK(j["semi_separability"]["verdict"] == true);
    CHECK(j["weak_homogeneity"]["limsup"].get<double>() == doctest::Approx(1.0).epsilon(0.02));
    CHECK(j["comparison"] == "strictly_weaker");
    CHECK(r.out.find("modcheck:") != std::string::npos);
}

TEST_CASE("analysis failures exit 1 with diagnostics") {
    Run d = dispatch("dini", data("dini_log1.json"));
    CHECK(d.code == 1);
    CHECK(json::parse(d.out.substr(0, d.out.rfind("dini:")))["verdict"] == "diverges");

    Run r = dispatch("dio", data("dio_resonant.json"));
    CHECK(r.code == 1);
    json e = json::parse(r.err);
    CHECK(e["witness"] == json::array({1, -2}));
}

TEST_CASE("csv output and determinism") {
    Run a = dispatch("remaining", data("remaining_log.json"), "", Format::csv);
    Run b = dispatch("remaining", data("remaining_log.json"), "", Format::csv);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("ln_gamma,", 0) == 0);

    fs::path p1 = scratch("k1.json"), p2 = scratch("k2.json");
    dispatch("kstar", data("kstar_hoelder.json"), p1.string());
    dispatch("kstar", data("kstar_hoelder.json"), p2.string());
    CHECK(slurp(p1) == slurp(p2));
    CHECK(json::parse(slurp(p1))["k_star"] == 2);
}

TEST_CASE("regularity and jackson subcommands") {
    fs::path p = scratch("reg.json");
    REQUIRE(dispatch("regularity", data("regularity.json"), p.string()).code == 0);
    CHECK(json::parse(slurp(p))["k_star"] == 3);

    fs::path q = scratch("jack.json");
    REQUIRE(dispatch("jackson-bench", data("jackson.json"), q.string()).code == 0);
    CHECK(json::parse(slurp(q))["fits"].size() >= 1);
}

TEST_CASE("kam-run artifacts") {
    fs::path dir = scratch("kam_ok");
    fs::remove_all(dir);
    Run r = dispatch("kam-run", data("kam_example.json"), dir.string());
    REQUIRE(r.code == 0);
    std::string csv = slurp(dir / "trace.csv");
    CHECK(csv.rfind("nu,r_nu,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 6);
    json res = json::parse(slurp(dir / "residual.json"));
    CHECK(res["residual"]["du_minus_hy"].get<double>() <= 1e-6);
    CHECK(res["residual"]["dv_plus_hx"].get<double>() <= 1e-6);
    CHECK(json::parse(slurp(dir / "torus.json")).contains("u_minus_id"));

    fs::path bad = scratch("kam_bad");
    fs::remove_all(bad);
    Run h = dispatch("kam-run", data("kam_lambda_one.json"), bad.string());
    CHECK(h.code == 1);
    CHECK(json::parse(h.err)["hypothesis"] == "H1");
}
