#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "spectra/io.hpp"

using namespace spectra;

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(SPECTRA_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf;
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string data(const std::string& name) {
    return std::string(SPECTRA_DATA_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("analyze reports the A1 surface") {
    auto r = run("analyze " + data("a1.json"));
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.output);
    CHECK(j["schema"] == kSchema);
    CHECK(j["n"] == 1);
    CHECK(j["surface"]["boundary_marks"][0] == 4);
    CHECK(j["zeros"].size() == 2);
}

TEST_CASE("analyze flags non-amenable surfaces") {
    auto r = run("analyze " + data("sphere_5_punctures.json"));
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.output);
    CHECK(j["amenable"] == false);
}

TEST_CASE("malformed JSON exits with the validation code") {
    const std::string path = "/tmp/spectra_bad_input.json";
    std::ofstream(path) << "{\"numerator\": [[1,";
    auto r = run("analyze " + path);
    CHECK(r.exit_code == 2);
}

TEST_CASE("spectrum on the big-chamber cubic finds three classes") {
    auto r = run("spectrum " + data("a2_big_chamber.json") + " --h-max 40");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.output);
    CHECK(j["saddles"].size() == 3);
}

TEST_CASE("round trip: emitted differential JSON is accepted back") {
    QuadraticDifferential qd{Poly{cplx(0, 1), cplx(2, 0)},
                             {{cplx(1, -1), 2, -1}},
                             +1};
    json j = to_json(qd);
    QuadraticDifferential back = differential_from_json(j);
    CHECK(back.numerator.size() == qd.numerator.size());
    CHECK(back.poles.size() == 1);
    CHECK(back.poles[0].sign == -1);
    json j2 = to_json(back);
    CHECK(j == j2);
}

TEST_CASE("foliation-plot emits well-formed SVG with a viewBox") {
    auto r = run("foliation-plot " + data("a1.json") + " --theta 0");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("<svg") != std::string::npos);
    CHECK(r.output.find("viewBox=") != std::string::npos);
    CHECK(r.output.find("</svg>") != std::string::npos);
}

TEST_CASE("rays emits SVG on request") {
    auto r = run("rays " + data("a1.json") + " --format svg");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("<svg") != std::string::npos);
}

TEST_CASE("mutate applies the pentagon sequence exactly") {
    const std::string path = "/tmp/spectra_seed.json";
    std::ofstream(path) << R"({"schema":"spectra-rh/1","skew":[[0,1],[-1,0]]})";
    auto r = run("mutate " + path + " --sequence 1,2,1,2,1,2,1,2,1,2 --point 2,0,3,0");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.output);
    CHECK(j["point_image"][0][0].get<double>() == doctest::Approx(2.0));
    CHECK(j["point_image"][1][0].get<double>() == doctest::Approx(3.0));
}

TEST_CASE("pentagon-check passes") {
    auto r = run("pentagon-check --points 100");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.output);
    CHECK(j["status"] == "PASS");
    CHECK(j["exact_identity"] == true);
}

TEST_CASE("wallcross evaluates sector compositions") {
    auto r = run("wallcross " + data("a1.json") + " --sector 0.2:2.9 --points 3");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.output);
    CHECK(j["points"].size() == 3);
}

TEST_CASE("quiver serialization carries arrows and signed cycles") {
    auto T = fan_triangulation(punctured_polygon_surface(3));
    json j = to_json(quiver_with_potential(T, -1));
    CHECK(j["vertices"] == 3);
    CHECK(j["arrows"].size() == 3);
    REQUIRE(j["potential"].size() == 1);
    CHECK(j["potential"][0]["coefficient"] == 1);  // -eps(p) with eps = -1
    CHECK(j["potential"][0]["cycle"].size() == 3);
}
