#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "app.hpp"
#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "perfun");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = perfun::cli::runApp(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

json runJson(std::vector<std::string> args, int expected = 0) {
    const Run r = run(std::move(args));
    CHECK(r.code == expected);
    INFO(r.err);
    return json::parse(r.out);
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::string tempFile(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << body;
    return path.string();
}

}  // namespace

TEST_CASE("catalog listing") {
    const Run r = run({"catalog"});
    CHECK(r.code == 0);
    for (const char* name : {"duffing", "sinsq", "expcos", "radial-quartic"}) CHECK(r.out.find(name) != std::string::npos);
    const json j = runJson({"catalog", "--json"});
    CHECK(j["systems"].size() == 10);
    const Run h = run({"catalog", "homog"});
    CHECK(h.out.find("parameter k") != std::string::npos);
    CHECK(h.out.find("scaling law") != std::string::npos);
    CHECK(run({"catalog", "nope"}).code == 2);
}

TEST_CASE("analyze writes a CSV table") {
    const Run r = run({"analyze", "--system", "duffing", "--order", "2", "--s-range", "0:1", "--steps", "21", "--out", "csv"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find('\r') == std::string::npos);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 22);
    CHECK(ls[0] == "s,x,y,T,D1_int,D2_int,D1_fd,D2_fd,D1_agree,D2_agree,blowup");
    for (std::size_t i = 1; i < ls.size(); ++i) {
        std::vector<std::string> cols;
        std::istringstream in(ls[i]);
        for (std::string c; std::getline(in, c, ',');) cols.push_back(c);
        REQUIRE(cols.size() == 11);
        CHECK(std::stod(cols[4]) < 0.0);
        CHECK(cols[8] == "1");
    }
}

TEST_CASE("harmonic derivative columns vanish") {
    const json j = runJson({"analyze", "--system", "harmonic", "--order", "3", "--steps", "11"});
    for (const auto& row : j["profile"]["rows"])
        for (const char* col : {"D_int", "D_fd"})
            for (const auto& v : row[col]) CHECK(std::abs(v.get<double>()) <= 1e-6);
    CHECK(j["tolerances"]["rel_tol"] == 1e-10);
}

TEST_CASE("reports are deterministic apart from timing") {
    const std::vector<std::string> args{"critical", "--system", "radial-quartic", "--seed", "7"};
    json a = runJson(args), b = runJson(args);
    a.erase("timing");
    b.erase("timing");
    CHECK(a.dump() == b.dump());
    CHECK(a["config"]["seed"] == 7);
}

TEST_CASE("critical") {
    const json r = runJson({"critical", "--system", "radial-quartic"});
    REQUIRE(r["critical"]["count"] == 1);
    CHECK(std::abs(r["critical"]["orbits"][0]["r"].get<double>() - std::sqrt(0.5)) <= 1e-4);
    CHECK(runJson({"critical", "--system", "harmonic"})["critical"]["count"] == 0);
    const json e = runJson({"critical", "--system", "expcos", "--emit-orbits"});
    REQUIRE(e["critical"]["count"] == 1);
    CHECK(e["critical"]["orbits"][0]["classification"] == "min");
    CHECK(e["critical"]["orbits"][0]["orbit"].size() > 100);
}

TEST_CASE("certify exit codes") {
    CHECK(runJson({"certify", "--system", "sinsq", "--criterion", "corollary8-ii"})["summary"]["verdict"] ==
          "holds-on-samples");
    const json c10 = runJson({"certify", "--system", "cor10", "--params", "1,1,1", "--criterion", "corollary10"});
    CHECK(c10["certificate"]["values"]["critical_orbits"] == 1.0);
    runJson({"certify", "--system", "cor11-j", "--params", "1,4,1", "--criterion", "corollary11"}, 5);
    const json v = runJson({"certify", "--system", "duffing", "--criterion", "corollary9"}, 4);
    CHECK(v["certificate"].contains("witness"));
    CHECK(run({"certify", "--system", "duffing", "--criterion", "bogus"}).code == 2);
    CHECK(run({"certify", "--system", "duffing", "--criterion", "corollary10"}).code == 2);
}

TEST_CASE("validate") {
    const json h = runJson({"validate", "--system", "homog", "--params", "k=2", "--order", "2"});
    CHECK(h["summary"]["pass"] == true);
    CHECK(h["summary"]["worst_relative_error"].get<double>() <= 1e-4);
    CHECK(runJson({"validate", "--system", "duffing", "--order", "2"})["summary"]["pass"] == true);
    const json c = runJson({"validate", "--system", "cubic", "--order", "1", "--anchor=-0.5,0", "--s-range", "0:0.2",
                            "--steps", "5"});
    CHECK(c["summary"]["partial"] == true);
    for (const auto& row : c["profile"]["rows"]) {
        CHECK(row["D_int"][0].is_null());
        CHECK(row["D_fd"][0].is_number());
        CHECK(row["note"].get<std::string>().find("IntegrandBlowup") != std::string::npos);
    }
}

TEST_CASE("configuration files") {
    const std::string sep = tempFile("perfun_sep.json", R"j({"kind": "separable", "G": "x^2/2 + x^4/2", "F": "y^2/2",
        "anchor": [1.0, 0.0], "s_range": [0, 1]})j");
    const json a = runJson({"analyze", "--file", sep, "--order", "2", "--steps", "5"});
    const json b = runJson({"analyze", "--system", "duffing", "--order", "2", "--steps", "5", "--s-range", "0:1"});
    for (int i = 0; i < 5; ++i)
        CHECK(a["profile"]["rows"][i]["T"].get<double>() ==
              doctest::Approx(b["profile"]["rows"][i]["T"].get<double>()).epsilon(1e-12));

    const std::string custom = tempFile("perfun_custom.json", R"j({"kind": "custom", "V1": "y", "V2": "-x - 2*x^3",
        "H": "(x^2 + x^4 + y^2)/2", "anchor": [1, 0], "s_range": [0, 0.5]})j");
    const json c = runJson({"analyze", "--file", custom, "--order", "1", "--steps", "3"});
    CHECK(c["profile"]["rows"][0]["T"].get<double>() == doctest::Approx(4.00430952182442492).epsilon(1e-8));
    CHECK(c["profile"]["rows"][2]["D_int"][0].get<double>() < 0.0);

    const std::string ham = tempFile("perfun_ham.json", R"j({"kind": "hamiltonian", "H": "(x^2 + y^2)/2",
        "anchor": [1, 0], "integrator": {"rel_tol": 1e-11}})j");
    const json h = runJson({"critical", "--file", ham});
    CHECK(h["critical"]["count"] == 0);
    CHECK(h["tolerances"]["rel_tol"] == 1e-11);

    const std::string reparam = tempFile("perfun_xi.json", R"j({"kind": "reparam",
        "xi": "(x^2 + y^2) - (x^2 + y^2)^2", "anchor": [0.3, 0], "s_range": [-0.4, 1.15]})j");
    CHECK(runJson({"critical", "--file", reparam})["critical"]["count"] == 1);

    const std::string jac = tempFile("perfun_jac.json", R"j({"kind": "jacobian", "P": "x*sqrt(1 + x^2)", "Q": "y",
        "anchor": [0.5, 0], "s_range": [0, 0.5]})j");
    CHECK(run({"analyze", "--file", jac, "--order", "1", "--steps", "3"}).code == 0);

    CHECK(run({"analyze", "--file", tempFile("perfun_bad1.json", R"j({"kind": "separable", "G": "x^2/2"})j")}).code == 2);
    CHECK(run({"analyze", "--file", tempFile("perfun_bad2.json", R"j({"kind": "hamiltonian", "H": "x^2 +",
        "anchor": [1, 0]})j")}).code == 2);
    CHECK(run({"analyze", "--file", tempFile("perfun_bad3.json", R"j({"kind": "reparam", "xi": "1 - x^2",
        "H": "x", "anchor": [1, 0]})j")}).code == 2);
    CHECK(run({"analyze", "--file", tempFile("perfun_bad4.json", "{not json")}).code == 2);
    CHECK(run({"analyze", "--file", "/nonexistent/perfun.json"}).code == 2);
}

TEST_CASE("usage errors") {
    CHECK(run({"analyze"}).code == 2);
    CHECK(run({"analyze", "--system", "duffing", "--file", "x.json"}).code == 2);
    CHECK(run({"analyze", "--system", "duffing", "--out", "xml"}).code == 2);
    CHECK(run({"analyze", "--system", "duffing", "--s-range", "1:0"}).code == 2);
    CHECK(run({"analyze", "--system", "homog", "--params", "k=2.5"}).code == 2);
    CHECK(run({"analyze", "--system", "cor11-j"}).code == 2);
    CHECK(run({"critical", "--system", "duffing", "--out", "csv"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("numerical failures exit with 3") {
    // the W-orbit leaves the central square of sinsq
    const Run r = run({"analyze", "--system", "sinsq", "--s-range", "0:3", "--steps", "4"});
    CHECK(r.code == 3);
    CHECK(r.err.find("row") != std::string::npos);
}
