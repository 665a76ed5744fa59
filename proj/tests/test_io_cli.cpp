#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "memkernel/io.hpp"
#include "memkernel/moments.hpp"
#include "memkernel/operators.hpp"

using namespace memkernel;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

struct CliResult {
    int exit_code;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(MEMKERNEL_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[512];
    while (fgets(buf, sizeof buf, pipe)) out += buf;
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path tmp_dir() {
    auto dir = fs::temp_directory_path() / "memkernel_test_io";
    fs::create_directories(dir);
    return dir;
}

SolutionField small_field() {
    TransportParams tp;
    return solve_gfpe(make_power_law_kernel(1.0), InitialCondition::gaussian(1.0), tp,
                      make_grid(-5.0, 5.0, 51), 1.0);
}

}  // namespace

TEST_CASE("csv format contract and round trip") {
    auto field = small_field();
    const auto path = (tmp_dir() / "field.csv").string();
    emit_csv(field, path);
    const std::string text = slurp(path);
    CHECK(text.rfind("x,value\n", 0) == 0);
    CHECK(text.find('\r') == std::string::npos);  // LF endings only

    auto loaded = load_csv(path);
    REQUIRE(loaded.grid.size() == field.grid.size());
    // re-emitting the loaded field is byte-identical: no value drift
    const auto path2 = (tmp_dir() / "field2.csv").string();
    emit_csv(loaded, path2);
    CHECK(slurp(path2) == text);

    CHECK_THROWS_AS(load_csv((tmp_dir() / "missing.csv").string()), io_error);
    const auto badpath = (tmp_dir() / "bad.csv").string();
    std::ofstream(badpath) << "nope\n";
    CHECK_THROWS_AS(load_csv(badpath), io_error);
}

TEST_CASE("solver output is deterministic") {
    const auto a = (tmp_dir() / "det_a.csv").string();
    const auto b = (tmp_dir() / "det_b.csv").string();
    emit_csv(small_field(), a);
    emit_csv(small_field(), b);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("json payloads") {
    auto field = small_field();
    auto j = to_json(field);
    CHECK(j["meta"]["equation"] == "gfpe");
    CHECK(j["x"].size() == field.grid.size());

    VerificationReport rep;
    rep.identity = "demo";
    rep.tolerance = 1e-4;
    rep.residual(3e-5);
    rep.finish();
    auto jr = to_json(rep);
    CHECK(jr.contains("identity"));
    CHECK(jr.contains("max_abs_residual"));
    CHECK(jr.contains("pass"));
    CHECK(jr["pass"] == true);
}

TEST_CASE("svg output carries one polyline per series") {
    auto f1 = small_field();
    auto f2 = small_field();
    auto f3 = small_field();
    const auto path = (tmp_dir() / "plot.svg").string();
    emit_svg({{"a", &f1.grid, &f1.values},
              {"b", &f2.grid, &f2.values},
              {"c", &f3.grid, &f3.values}},
             path, "demo");
    const std::string text = slurp(path);
    std::size_t count = 0, pos = 0;
    while ((pos = text.find("<polyline", pos)) != std::string::npos) {
        ++count;
        pos += 9;
    }
    CHECK(count == 3);
}

TEST_CASE("cli: solve writes the requested csv") {
    const auto out = (tmp_dir() / "cli_fig1_I.csv").string();
    auto r = run_cli("solve gfpe --kernel power_law:0.5 --ic delta --B 1 --mu 1 --t 1 --nx 101 "
                     "--xmin=-10 --xmax 10 --out " + out);
    CHECK(r.exit_code == 0);
    auto loaded = load_csv(out);
    CHECK(loaded.grid.size() == 101);
    // the same invocation is byte-identical
    const auto out2 = (tmp_dir() / "cli_fig1_I_repeat.csv").string();
    run_cli("solve gfpe --kernel power_law:0.5 --ic delta --B 1 --mu 1 --t 1 --nx 101 "
            "--xmin=-10 --xmax 10 --out " + out2);
    CHECK(slurp(out) == slurp(out2));
}

TEST_CASE("cli: msd prints nine significant digits") {
    auto r = run_cli("msd gdwe --kernel gdwe_power:0.75 --ic gaussian:1 --a 1 --t 1");
    CHECK(r.exit_code == 0);
    // 2/Gamma(5/2) + sigma^2 = 2.50450556
    CHECK(r.output == "2.50450556\n");
}

TEST_CASE("cli: verify subcommands and exit codes") {
    auto ok = run_cli("verify ml-composition --alpha 1 --t0 0 --t2 1");
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("pass") != std::string::npos);

    const auto rep_path = (tmp_dir() / "report.json").string();
    auto norm = run_cli("verify normalization --kernel power_law:0.5 --t 1 --out " + rep_path);
    CHECK(norm.exit_code == 0);
    const std::string rep = slurp(rep_path);
    CHECK(rep.find("\"identity\"") != std::string::npos);
    CHECK(rep.find("\"max_abs_residual\"") != std::string::npos);
    CHECK(rep.find("\"pass\"") != std::string::npos);

    auto fail = run_cli("verify cmf --image cos --s-grid 1,2,4 --n-max 2");
    CHECK(fail.exit_code == 3);  // numerical-accuracy failure
    CHECK(fail.output.find("FAIL") != std::string::npos);
}

TEST_CASE("cli: configuration errors exit with 2") {
    CHECK(run_cli("solve gfpe --kernel bogus --ic delta --t 1 --out /tmp/x.csv").exit_code == 2);
    CHECK(run_cli("solve gfpe --kernel power_law:0.5 --ic bogus --t 1 --out /tmp/x.csv").exit_code ==
          2);
    CHECK(run_cli("solve nowhere --kernel power_law:0.5 --ic delta --t 1 --out /tmp/x.csv")
              .exit_code == 2);
    CHECK(run_cli("verify bogus").exit_code == 2);
}

TEST_CASE("cli: kernel eval and list") {
    auto r = run_cli("kernel eval --kernel power_law:0.5 --s 4");
    CHECK(r.exit_code == 0);
    CHECK(r.output == "0.5 0\n");  // 4^{-1/2}
    CHECK(run_cli("kernel list").exit_code == 0);
}

TEST_CASE("cli: preset writes its curve files") {
    const auto dir = (tmp_dir() / "preset_out").string();
    auto r = run_cli("solve --preset fig3 --nx 81 --out-dir " + dir + " --format svg");
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(fs::path(dir) / "fig3_I.csv"));
    CHECK(fs::exists(fs::path(dir) / "fig3_II.csv"));
    CHECK(fs::exists(fs::path(dir) / "fig3_III.csv"));
    CHECK(fs::exists(fs::path(dir) / "fig3.svg"));
    auto curve = load_csv((fs::path(dir) / "fig3_I.csv").string());
    CHECK(curve.grid.size() == 81);
}

TEST_CASE("cli: json config file with flag precedence") {
    const auto cfg = (tmp_dir() / "run.json").string();
    std::ofstream(cfg) << R"({"kernel":"gdwe_power:0.75","ic":"gaussian:1","a":1.0,"t":1.0})";
    auto r = run_cli("msd gdwe --config " + cfg);
    CHECK(r.exit_code == 0);
    CHECK(r.output == "2.50450556\n");
    // explicit flag overrides the file value
    auto r2 = run_cli("msd gdwe --config " + cfg + " --t 2");
    CHECK(r2.exit_code == 0);
    CHECK(r2.output != r.output);
}
