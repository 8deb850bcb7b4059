#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <msgt/serialize.hpp>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("msgt-test-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

struct RunResult {
    int code = 0;
    std::string out;
};

RunResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream captured;
    std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
    RunResult result;
    result.code = msgt::cli::run(args);
    std::cout.rdbuf(old);
    result.out = captured.str();
    return result;
}

const char* kConfig = R"(system demo
dim 1
rhs1 = -x1 + 5 + u
output = x1
state_cone + input_cone + output_cone +
)";

}  // namespace

TEST_CASE("examples lists the registry") {
    const RunResult r = run_cli({"examples"});
    CHECK(r.code == 0);
    CHECK(r.out.find("sec5-original") != std::string::npos);
    CHECK(r.out.find("zorro") != std::string::npos);
}

TEST_CASE("parse accepts valid configs and rejects bad ones with exit 2") {
    TempDir dir;
    msgt::write_file(dir.file("ok.sys"), kConfig);
    CHECK(run_cli({"parse", dir.file("ok.sys")}).code == 0);

    msgt::write_file(dir.file("bad.sys"), "system s\ndim 2\nrhs1 = x1\nrhs2 = x3\noutput = x1\n");
    CHECK(run_cli({"parse", dir.file("bad.sys")}).code == 2);

    CHECK(run_cli({"parse"}).code == 2);           // missing argument
    CHECK(run_cli({"frobnicate"}).code == 2);      // unknown subcommand
    CHECK(run_cli({"verify", "unknown-name"}).code == 2);
}

TEST_CASE("simulate an open loop to CSV") {
    TempDir dir;
    const std::string out = dir.file("traj.csv");
    const RunResult r = run_cli({"simulate", "sec5-x", "--x0", "0", "--input", "const:1",
                                 "--t-final", "20", "--tol", "1e-9,1e-12", "--out", out});
    CHECK(r.code == 0);

    const std::string csv = msgt::read_file(out);
    CHECK(csv.rfind("t,x1,u,y\n", 0) == 0);
    std::istringstream in(csv);
    std::string line, last;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (!line.empty()) last = line;
    }
    const double terminal = std::stod(last.substr(last.find(',') + 1));
    CHECK(std::abs(terminal - 6.0) < 1e-5);
}

TEST_CASE("simulate with file-backed input signals") {
    TempDir dir;
    msgt::write_file(dir.file("drive.pwc"), "0,0\n1,1\n");
    const std::string out = dir.file("pwc.csv");
    CHECK(run_cli({"simulate", "sec5-x", "--x0", "0", "--input", "pwc:" + dir.file("drive.pwc"),
                   "--t-final", "2", "--out", out})
              .code == 0);
    CHECK(msgt::read_file(out).rfind("t,x1,u,y\n", 0) == 0);

    msgt::write_file(dir.file("ramp.smp"), "0,0\n2,1\n");
    CHECK(run_cli({"simulate", "sec5-x", "--x0", "0", "--input",
                   "sampled:" + dir.file("ramp.smp"), "--t-final", "2"})
              .code == 0);

    CHECK(run_cli({"simulate", "sec5-x", "--x0", "0", "--input", "bogus:1", "--t-final", "1"})
              .code == 2);
}

TEST_CASE("simulate the closed loop") {
    TempDir dir;
    const std::string out = dir.file("loop.csv");
    const RunResult r = run_cli(
        {"simulate", "sec5-original", "--x0", "5,1", "--t-final", "10", "--out", out});
    CHECK(r.code == 0);
    CHECK(msgt::read_file(out).rfind("t,x1,z1,y,w\n", 0) == 0);

    // Closed loops take no input signal.
    const RunResult bad = run_cli({"simulate", "sec5-original", "--x0", "5,1", "--input",
                                   "const:1", "--t-final", "5"});
    CHECK(bad.code == 2);
}

TEST_CASE("char reports the branch structure") {
    TempDir dir;
    const std::string out = dir.file("char.json");
    const RunResult r = run_cli({"char", "sec5-z", "--u", "0:6:601", "--out", out, "--csv",
                                 dir.file("char.csv")});
    CHECK(r.code == 0);

    const ordered_json j = ordered_json::parse(msgt::read_file(out));
    const auto& intervals = j["profile"]["intervals"];
    REQUIRE(intervals.size() == 3);
    CHECK(intervals[0][2] == 1);
    CHECK(intervals[1][2] == 3);
    CHECK(intervals[2][2] == 1);
    const auto& folds = j["profile"]["folds"];
    REQUIRE(folds.size() == 2);
    CHECK(std::abs(folds[0].get<double>() - 4.0) < 1e-6);
    CHECK(std::abs(folds[1].get<double>() - 5.0) < 1e-6);

    CHECK(msgt::read_file(dir.file("char.csv")).rfind("u,branch_index,value\n", 0) == 0);
}

TEST_CASE("iterate emits the period-2 path") {
    TempDir dir;
    const std::string out = dir.file("paths.csv");
    const RunResult r =
        run_cli({"iterate", "zorro", "--w0", "0.3", "--depth", "40", "--out", out});
    CHECK(r.code == 0);
    const std::string csv = msgt::read_file(out);
    CHECK(csv.rfind("start,step,value,branch\n", 0) == 0);
    CHECK(csv.find("periodic period=2") != std::string::npos);
    CHECK(csv.find("0.29999999999999999,0,0.29999999999999999") != std::string::npos);
    CHECK(csv.find("0.45000000000000001") != std::string::npos);  // 3/4 - 0.3
}

TEST_CASE("fixed-points solves the perturbed zorro") {
    const RunResult r = run_cli({"fixed-points", "zorro-eps(1.5)", "--range", "0:1"});
    CHECK(r.code == 0);
    const ordered_json j = ordered_json::parse(r.out);
    REQUIRE(j["fixed_points"].size() == 3);
    CHECK(std::abs(j["fixed_points"][1].get<double>() - 3.0 / 7.0) < 1e-9);
}

TEST_CASE("verify writes a passing report for the running example") {
    TempDir dir;
    const std::string out = dir.file("report.json");
    const RunResult r = run_cli({"verify", "sec5-original", "--report", out});
    CHECK(r.code == 0);

    const ordered_json j = ordered_json::parse(msgt::read_file(out));
    CHECK(j["verdict"] == "pass");
    CHECK(j["condition1"]["pass"] == true);
    CHECK(j["condition2"]["pass"] == true);
    CHECK(j["condition3"]["pass"] == true);
    CHECK(j["condition4"]["pass"] == true);
    REQUIRE(j["attractive_set"].size() == 1);
    CHECK(j.contains("loop_equilibria"));
    CHECK(j.contains("budgets"));

    // The stdout text rendering mirrors the JSON.
    CHECK(r.out.find("condition1") != std::string::npos);
    CHECK(r.out.find("verdict: pass") != std::string::npos);

    // Verification failures exit 1 and still serialize the report: wire two
    // standard-output subsystems together so no channel reverses the order.
    msgt::write_file(dir.file("bad.loop"),
                     "loop bad\nx sec5-x\nz sec5p-z\nw_range 0 1.5\ny_range 4 7\n");
    const std::string bad = dir.file("bad.json");
    const RunResult rb = run_cli({"verify", dir.file("bad.loop"), "--report", bad});
    CHECK(rb.code == 1);
    CHECK(ordered_json::parse(msgt::read_file(bad))["verdict"] == "fail");
}

TEST_CASE("verify accepts budgets and loop files") {
    TempDir dir;
    const RunResult r = run_cli({"verify", "sec5-original", "--report", dir.file("r.json"),
                                 "--grid", "3x3", "--budget", R"({"t_final": 30})"});
    CHECK(r.code == 0);

    CHECK(run_cli({"verify", "sec5-original", "--budget", R"({"bogus": 1})"}).code == 2);

    msgt::write_file(dir.file("loop.cfg"),
                     "loop demo\nx sec5-x\nz sec5-z\nw_range 0 1.5\ny_range 4 7\n"
                     "x_box 0 10\nz_box 0 5\nbound_offset 6\n");
    const RunResult rl =
        run_cli({"verify", dir.file("loop.cfg"), "--report", dir.file("rl.json")});
    CHECK(rl.code == 0);
}

TEST_CASE("identical invocations produce byte-identical artifacts") {
    TempDir dir;
    const std::string a = dir.file("a.json");
    const std::string b = dir.file("b.json");
    CHECK(run_cli({"char", "sec5-z", "--u", "0:6:121", "--out", a}).code == 0);
    CHECK(run_cli({"char", "sec5-z", "--u", "0:6:121", "--out", b}).code == 0);
    CHECK(msgt::read_file(a) == msgt::read_file(b));

    const std::string ra = dir.file("ra.json");
    const std::string rb = dir.file("rb.json");
    CHECK(run_cli({"verify", "sec5-original", "--report", ra}).code == 0);
    CHECK(run_cli({"verify", "sec5-original", "--report", rb}).code == 0);
    CHECK(msgt::read_file(ra) == msgt::read_file(rb));
}

TEST_CASE("plot accepts every artifact the other subcommands emit") {
    TempDir dir;

    const std::string traj = dir.file("traj.csv");
    REQUIRE(run_cli({"simulate", "sec5-x", "--x0", "0", "--input", "const:1", "--t-final", "5",
                     "--out", traj})
                .code == 0);
    const std::string charj = dir.file("char.json");
    const std::string charc = dir.file("char.csv");
    REQUIRE(run_cli({"char", "sec5-z", "--u", "0:6:61", "--out", charj, "--csv", charc}).code ==
            0);
    const std::string paths = dir.file("paths.csv");
    REQUIRE(run_cli({"iterate", "zorro", "--w0", "0.3", "--depth", "30", "--out", paths}).code ==
            0);
    const std::string fixed = dir.file("fixed.json");
    REQUIRE(run_cli({"fixed-points", "zorro", "--range", "0:1", "--out", fixed}).code == 0);
    const std::string report = dir.file("report.json");
    REQUIRE(run_cli({"verify", "sec5-original", "--report", report}).code == 0);

    int index = 0;
    for (const std::string& artifact : {traj, charc, paths, fixed, report}) {
        const std::string script = dir.file("plot" + std::to_string(index++) + ".gp");
        const RunResult r = run_cli({"plot", artifact, "--script", script});
        CHECK(r.code == 0);
        CHECK(fs::exists(script));
        CHECK(msgt::read_file(script).find("plot") != std::string::npos);
    }

    // Built-in map names are plottable directly (polyline recipes).
    const std::string zs = dir.file("zorro.gp");
    CHECK(run_cli({"plot", "zorro-eps(1.5)", "--script", zs}).code == 0);
    CHECK(fs::exists(zs));
}

TEST_CASE("polyline files act as maps") {
    TempDir dir;
    msgt::write_file(dir.file("tent.map"), "0,0\n0.5,1\n1,0\n");
    const RunResult r = run_cli({"fixed-points", dir.file("tent.map"), "--range", "0:1"});
    CHECK(r.code == 0);
    const ordered_json j = ordered_json::parse(r.out);
    // Tent-map fixed points: 0 and 2/3.
    REQUIRE(j["fixed_points"].size() == 2);
    CHECK(std::abs(j["fixed_points"][0].get<double>()) < 1e-9);
    CHECK(std::abs(j["fixed_points"][1].get<double>() - 2.0 / 3.0) < 1e-9);
}
