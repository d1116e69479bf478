#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "conclab/io.hpp"
#include "conclab/testing.hpp"
#include "conclab/walsh.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

using namespace conclab;
using conclab::io::json;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("conclab_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string write(const std::string& name, const std::string& content) const {
        const fs::path p = path / name;
        std::ofstream out(p);
        out << content;
        return p.string();
    }
};

struct RunResult {
    int exit_code = -1;
    std::string output;
};

// Run the CLI binary (path in CONCLAB_BIN) and capture stdout.
RunResult run_cli(const std::string& args) {
    const char* bin = std::getenv("CONCLAB_BIN");
    REQUIRE(bin != nullptr);
    const std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) result.output.append(buf.data(), n);
    const int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

}  // namespace

TEST_CASE("space json: cube shorthand and explicit factors") {
    SpacePtr cube = io::space_from_json(json::parse(R"({"cube": 3})"));
    CHECK(cube->is_uniform_cube());
    CHECK(cube->dimension() == 3);
    CHECK(io::space_to_json(*cube) == json{{"cube", 3}});

    SpacePtr biased = io::space_from_json(
        json::parse(R"({"factors":[{"atoms":[1,-1],"probs":[0.75,0.25]}]})"));
    CHECK(biased->factor(0).prob(0) == doctest::Approx(0.75));
    json round = io::space_to_json(*biased);
    SpacePtr again = io::space_from_json(round);
    CHECK(again->same_as(*biased));

    CHECK_THROWS_AS(io::space_from_json(json::parse(R"({"cube": "x"})")), std::invalid_argument);
    CHECK_THROWS_AS(io::space_from_json(json::parse(R"({})")), std::invalid_argument);
}

TEST_CASE("function json: table, walsh, builtins") {
    SpacePtr cube = io::space_from_json(json::parse(R"({"cube": 2})"));
    GridFunction table =
        io::function_from_json(json::parse(R"({"table":[1.0,2.0,3.0,4.0]})"), cube);
    CHECK(table.values()[3] == 4.0);
    CHECK_THROWS_AS(io::function_from_json(json::parse(R"({"table":[1.0]})"), cube),
                    std::invalid_argument);

    GridFunction w = io::function_from_json(
        json::parse(R"({"walsh":[{"subset":[1,2],"coef":1.0}]})"), cube);
    REQUIRE(w.is_walsh());
    CHECK(w.walsh_terms()[0].mask == 0b11);
    CHECK_THROWS_AS(io::function_from_json(
                        json::parse(R"({"walsh":[{"subset":[3],"coef":1.0}]})"), cube),
                    std::invalid_argument);

    GridFunction c = io::function_from_json(
        json::parse(R"({"builtin":{"name":"constant","params":{"value":2.5}}})"), cube);
    CHECK(c.values()[0] == 2.5);
    GridFunction coord = io::function_from_json(
        json::parse(R"({"builtin":{"name":"coordinate","params":{"i":1}}})"), cube);
    CHECK(coord(0) == doctest::Approx(1.0));

    // polynomial builtin maps to sparse walsh on the cube
    GridFunction poly = io::function_from_json(
        json::parse(R"({"builtin":{"name":"polynomial","params":{"terms":[{"subset":[1,2],"coef":2.0}]}}})"),
        cube);
    CHECK(poly.is_walsh());

    // centered polynomial on a biased space has exact degree structure
    SpacePtr biased = io::space_from_json(
        json::parse(R"({"factors":[{"atoms":[1,-1],"probs":[0.75,0.25]},
                                   {"atoms":[1,-1],"probs":[0.6,0.4]}]})"));
    GridFunction cp = io::function_from_json(
        json::parse(R"({"builtin":{"name":"centered_polynomial","params":{"terms":[{"subset":[1,2],"coef":1.0}]}}})"),
        biased);
    CHECK(std::abs(expectation(cp)) <= 1e-14);
    CHECK_THROWS_AS(io::function_from_json(
                        json::parse(R"({"builtin":{"name":"nope","params":{}}})"), cube),
                    std::invalid_argument);
}

TEST_CASE("17-digit dump round-trips doubles exactly") {
    testing::InputRng rng(601);
    json values = json::array();
    for (int k = 0; k < 200; ++k) values.push_back(rng.symmetric(1e3) * std::pow(10.0, rng.integer(-12, 12)));
    values.push_back(0.1);
    values.push_back(1.0 / 3.0);
    const std::string text = io::dump_string(values, 0);
    json parsed = json::parse(text);
    REQUIRE(parsed.size() == values.size());
    for (std::size_t k = 0; k < values.size(); ++k)
        CHECK(parsed[k].get<double>() == values[k].get<double>());  // bit-exact
}

TEST_CASE("matrix and vector json") {
    Eigen::MatrixXd m =
        io::matrix_from_json(json::parse(R"({"dim":2,"data":[0.5,0.0,0.0,-0.5]})"));
    CHECK(m(0, 0) == 0.5);
    CHECK(m(1, 1) == -0.5);
    CHECK_THROWS_AS(io::matrix_from_json(json::parse(R"({"dim":2,"data":[1.0]})")),
                    std::invalid_argument);
    Eigen::VectorXd v = io::vector_from_json(json::parse(R"([0.3, 0.0])"));
    CHECK(v.size() == 2);
    CHECK(v[0] == 0.3);
}

TEST_CASE("decomposition export shape") {
    SpacePtr cube = ProductSpace::uniform_cube(2);
    GridFunction prod = GridFunction::dense(
        cube, GridFunction::coordinate(cube, 0).values() * GridFunction::coordinate(cube, 1).values());
    json dec = io::decomposition_to_json(decompose(prod));
    REQUIRE(dec.is_array());
    REQUIRE(dec.size() == 1);
    CHECK(dec[0]["subset"] == json::array({1, 2}));
    CHECK(dec[0]["coef"].get<double>() == doctest::Approx(1.0));
    CHECK(dec[0]["norm2"].get<double>() == doctest::Approx(1.0));

    json gen = io::decomposition_to_json(decompose(prod, DecomposeMethod::Generic));
    CHECK(gen[0].contains("values"));
}

TEST_CASE("cli: certify worked example, json and csv") {
    TempDir dir;
    const std::string space = dir.write("cube2.json", R"({"cube": 2})");
    const std::string fn = dir.write("x1x2.json", R"({"walsh":[{"subset":[1,2],"coef":1.0}]})");

    RunResult r = run_cli("certify cor_bernoulli --space " + space + " --function " + fn);
    CHECK(r.exit_code == 0);
    json cert = json::parse(r.output);
    CHECK(cert["theorem"] == "cor_bernoulli");
    CHECK(cert["verdict"] == "pass");
    CHECK(cert["slack"].get<double>() == doctest::Approx(2.0 - std::exp(1.0 / 7.0)).epsilon(1e-9));
    CHECK(cert["constant"].get<double>() == doctest::Approx(1.0 / 7.0));

    RunResult csv = run_cli("certify cor_bernoulli --csv --space " + space + " --function " + fn);
    CHECK(csv.exit_code == 0);
    CHECK(csv.output.rfind("cor_bernoulli,", 0) == 0);
    // columns: theorem,c,bound,measured,ci,verdict,slack
    CHECK(csv.output.find(",pass,") != std::string::npos);
}

TEST_CASE("cli: byte-identical output for identical run configs") {
    TempDir dir;
    const std::string space = dir.write("cube10.json", R"({"cube": 10})");
    const std::string fn = dir.write("chaos.json",
                                     R"({"walsh":[{"subset":[1,2],"coef":0.5},
                                                  {"subset":[3,4],"coef":-0.25}]})");
    const std::string args = "certify cor_bernoulli --method mc --samples 50000 --seed 31 --space " +
                             space + " --function " + fn;
    RunResult a = run_cli(args);
    RunResult b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    json cert = json::parse(a.output);
    CHECK(cert["measured"]["method"] == "monte_carlo");
    CHECK(cert["measured"]["samples"] == 50000);
}

TEST_CASE("cli: spectrum subcommand") {
    TempDir dir;
    const std::string space = dir.write("cube3.json", R"({"cube": 3})");
    const std::string fn = dir.write("x1x2x3.json", R"({"walsh":[{"subset":[1,2,3],"coef":1.0}]})");
    RunResult r = run_cli("spectrum --space " + space + " --function " + fn);
    CHECK(r.exit_code == 0);
    json rep = json::parse(r.output);
    REQUIRE(rep["entries"].size() == 1);
    CHECK(rep["entries"][0]["degree"] == 3);
    CHECK(rep["entries"][0]["eigenvalue"].get<double>() == doctest::Approx(6.0));
    CHECK(rep["entries"][0]["residual_sup"].get<double>() <= 1e-9);
}

TEST_CASE("cli: diffops dump") {
    TempDir dir;
    const std::string space = dir.write("cube2.json", R"({"cube": 2})");
    const std::string fn = dir.write("f.json", R"({"table":[1.0, -1.0, -1.0, 1.0]})");
    RunResult r = run_cli("diffops --op l2 --i 1 --space " + space + " --function " + fn);
    CHECK(r.exit_code == 0);
    json out = json::parse(r.output);
    CHECK(out["op"] == "l2");
    for (const json& v : out["table"]) CHECK(v.get<double>() == doctest::Approx(1.0));

    RunResult h = run_cli("diffops --op hess-mean --space " + space + " --function " + fn);
    CHECK(h.exit_code == 0);
    CHECK(json::parse(h.output)["entries"].size() == 1);
}

TEST_CASE("cli: mlsi subcommand and failure exit code") {
    TempDir dir;
    const std::string space = dir.write("cube1.json", R"({"cube": 1})");
    const std::string fn = dir.write("x1.json", R"({"table":[1.0,-1.0]})");
    RunResult ok = run_cli("mlsi --gamma d --sigma2 1 --space " + space + " --function " + fn);
    CHECK(ok.exit_code == 0);
    CHECK(json::parse(ok.output)["verdict"] == "pass");

    // an inadmissibly small constant must fail loudly with exit 1
    const std::string big = dir.write("3x1.json", R"({"table":[3.0,-3.0]})");
    RunResult bad = run_cli("mlsi --gamma d --sigma2 0.01 --space " + space + " --function " + big);
    CHECK(bad.exit_code == 1);
    CHECK(json::parse(bad.output)["verdict"] == "fail");
}

TEST_CASE("cli: not_applicable maps to exit 2") {
    TempDir dir;
    const std::string space = dir.write("cube3.json", R"({"cube": 3})");
    // the gradient norm of this chaos is not constant, so at scale 50 the
    // iterated-modulus hypothesis fails
    const std::string fn = dir.write("big.json",
        R"({"walsh":[{"subset":[1,2],"coef":50.0},{"subset":[2,3],"coef":50.0},{"subset":[1,3],"coef":50.0}]})");
    RunResult r = run_cli("certify thm_zentral --space " + space + " --function " + fn);
    CHECK(r.exit_code == 2);
    CHECK(json::parse(r.output)["verdict"] == "not_applicable");
    // with --rescale the same input is certified at the boundary
    RunResult ok = run_cli("certify thm_zentral --rescale --space " + space + " --function " + fn);
    CHECK(ok.exit_code == 0);
}

TEST_CASE("cli: malformed json exits 3 with a position diagnostic") {
    TempDir dir;
    const std::string space = dir.write("broken.json", "{\"cube\": \n 2,,}");
    const std::string fn = dir.write("f.json", R"({"table":[1.0,-1.0]})");
    RunResult r = run_cli("certify thm_zentral --space " + space + " --function " + fn);
    CHECK(r.exit_code == 3);
    // unknown theorem id is also an input error
    const std::string cube = dir.write("cube1.json", R"({"cube": 1})");
    RunResult u = run_cli("certify thm_nonsense --space " + cube + " --function " + fn);
    CHECK(u.exit_code == 3);
    // Monte Carlo sample counts below 1000 are rejected before any work
    RunResult s = run_cli("certify thm_zentral --method mc --samples 10 --space " + cube +
                          " --function " + fn);
    CHECK(s.exit_code == 3);
}

TEST_CASE("cli: gaussian subcommands") {
    TempDir dir;
    const std::string a = dir.write("a.json", R"({"dim":2,"data":[0.5,0.0,0.0,-0.5]})");
    RunResult r = run_cli("gaussian certify --A " + a + " --samples 100000 --seed 5");
    CHECK(r.exit_code == 0);
    json cert = json::parse(r.output);
    CHECK(cert["constant"].get<double>() == doctest::Approx(1.0 / 6.0));
    CHECK(cert["verdict"] == "pass");

    const std::string l = dir.write("l.json", R"([0.3, 0.0])");
    RunResult rl = run_cli("gaussian certify --A " + a + " --l " + l + " --samples 100000 --seed 6");
    CHECK(rl.exit_code == 0);
    CHECK(json::parse(rl.output)["constant"].get<double>() == doctest::Approx(1.0 / 13.5));

    RunResult p = run_cli("gaussian poincare --A " + a);
    CHECK(p.exit_code == 0);
    CHECK(json::parse(p.output)["pass"] == true);

    RunResult g = run_cli("gaussian itgrad --A " + a + " --points 200 --step 1e-4 --seed 2");
    CHECK(g.exit_code == 0);
    CHECK(json::parse(g.output)["violations"] == 0);
}

TEST_CASE("cli: decompose subcommand") {
    TempDir dir;
    const std::string space = dir.write("biased.json",
        R"({"factors":[{"atoms":[1,-1],"probs":[0.75,0.25]},{"atoms":[1,-1],"probs":[0.75,0.25]}]})");
    const std::string fn = dir.write("prod.json",
        R"({"builtin":{"name":"polynomial","params":{"terms":[{"subset":[1,2],"coef":1.0}]}}})");
    RunResult r = run_cli("decompose --space " + space + " --function " + fn);
    CHECK(r.exit_code == 0);
    json dec = json::parse(r.output);
    REQUIRE(dec.is_array());
    CHECK(dec.size() == 4);  // constant, two first-order terms, one pair term
}
