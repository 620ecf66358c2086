// This file is part of imchit, a C++ library for bounding hitting
// probabilities and expected hitting times of Markov chains with
// set-valued transition rows.
//
// MIT License
//
// Permission is hereby granted, free of charge, to any person obtaining a copy
// of this software and associated documentation files (the "Software"), to deal
// in the Software without restriction, including without limitation the rights
// to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
// copies of the Software, and to permit persons to whom the Software is
// furnished to do so, subject to the following conditions:
//
// The above copyright notice and this permission notice shall be included in
// all copies or substantial portions of the Software.
//
// THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
// IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
// FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
// AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
// LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
// OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
// SOFTWARE.

#include "imchit/cli.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace imchit;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return std::string(IMCHIT_MODELS_DIR) + "/" + name; }

std::string write_temp(const char* name, const std::string& content) {
    const std::string path = std::string("/tmp/") + name;
    std::ofstream file(path);
    file << content;
    return path;
}

} // namespace

TEST_CASE("analyze prints the table") {
    const CliRun r = run({"analyze", "--model", fixture("fixint.json")});
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("1.250000") != std::string::npos);
    REQUIRE(r.out.find("2.500000") != std::string::npos);
    REQUIRE(r.out.find("always_hits") != std::string::npos);
    REQUIRE(r.out.find("almost_sure: {1, 2}") != std::string::npos);
    REQUIRE(r.out.find("target: {2}") != std::string::npos);
    REQUIRE(r.err.empty());
}

TEST_CASE("structured output is machine readable and reproducible") {
    const CliRun a = run({"analyze", "--model", fixture("fixint.json"), "--format", "structured"});
    const CliRun b = run({"analyze", "--model", fixture("fixint.json"), "--format", "structured"});
    REQUIRE(a.code == 0);
    REQUIRE(a.out == b.out);
    const AnalysisResult parsed = parse_result(a.out);
    REQUIRE(parsed.states.labels == std::vector<std::string>{"1", "2"});
    REQUIRE(parsed.lower_prob == numvec{1.0, 1.0});
    REQUIRE(parsed.upper_time[0].value() == Catch::Approx(2.5).margin(1e-8));
}

TEST_CASE("target override replaces the file target") {
    const CliRun r = run({"analyze", "--model", fixture("fixgeo.json"), "--target", "a"});
    REQUIRE(r.code == 0);
    // b cannot reach a at all, so it lands in the dead region.
    REQUIRE(r.out.find("never_hits") != std::string::npos);
    REQUIRE(r.out.find("target: {a}") != std::string::npos);

    const CliRun bad = run({"analyze", "--model", fixture("fixgeo.json"), "--target", "zzz"});
    REQUIRE(bad.code == 1);
    REQUIRE(bad.err.find("unknown state label") != std::string::npos);
}

TEST_CASE("input failures exit with code 1") {
    REQUIRE(run({"analyze"}).code == 1);
    REQUIRE(run({}).code == 1);
    REQUIRE(run({"analyze", "--model", "/nonexistent.json"}).code == 1);

    const std::string garbled = write_temp("imchit_garbled.json", "not json at all");
    const CliRun g = run({"analyze", "--model", garbled});
    REQUIRE(g.code == 1);
    REQUIRE(g.err.find("could not parse JSON") != std::string::npos);

    const std::string invalid = write_temp(
        "imchit_invalid.json",
        R"({"states": ["1"], "target": [], "rows": {"1": {"type": "vertices", "vertices": [[1]]}}})");
    const CliRun v = run({"analyze", "--model", invalid});
    REQUIRE(v.code == 1);
    REQUIRE(v.err.find("target must be nonempty") != std::string::npos);

    std::remove(garbled.c_str());
    std::remove(invalid.c_str());
}

TEST_CASE("an exhausted iteration budget exits with code 2") {
    const CliRun r = run({"analyze", "--model", fixture("fixgeo.json"), "--max-iters", "1"});
    REQUIRE(r.code == 2);
    REQUIRE(r.err.find("iteration budget") != std::string::npos);
}

TEST_CASE("help is available at both levels") {
    REQUIRE(run({"--help"}).code == 0);
    const CliRun sub = run({"analyze", "--help"});
    REQUIRE(sub.code == 0);
    REQUIRE(sub.out.find("--model") != std::string::npos);
}

TEST_CASE("verify checks a single model") {
    const CliRun r = run({"verify", "--model", fixture("fixint.json")});
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("result: PASS") != std::string::npos);
    REQUIRE(r.out.find("lower-prob-zero-iff-avoidable") != std::string::npos);
}

TEST_CASE("verify sweeps a generated corpus") {
    const CliRun r = run({"verify", "--seed", "1"});
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("corpus: 200 models") != std::string::npos);
    REQUIRE(r.out.find("result: PASS") != std::string::npos);
}

TEST_CASE("simulate matches the analytic fixture") {
    const CliRun a = run({"simulate", "--model", fixture("fixgeo.json"), "--runs", "2000", "--seed", "5"});
    const CliRun b = run({"simulate", "--model", fixture("fixgeo.json"), "--runs", "2000", "--seed", "5"});
    CAPTURE(a.err);
    REQUIRE(a.code == 0);
    REQUIRE(a.out == b.out);
    REQUIRE(a.out.find("runs: 2000") != std::string::npos);
    // Both states reach the target with certainty; b is already there.
    REQUIRE(a.out.find("1.000000") != std::string::npos);
    REQUIRE(a.out.find("0.000000") != std::string::npos);

    const CliRun widened = run({"simulate", "--model", fixture("fixint.json")});
    REQUIRE(widened.code == 1);
    REQUIRE(widened.err.find("set-valued") != std::string::npos);
}

TEST_CASE("oracle compares against exhaustive enumeration") {
    const CliRun r = run({"oracle", "--model", fixture("fixint.json")});
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("pure selections enumerated: 2") != std::string::npos);
    REQUIRE(r.out.find("result: PASS") != std::string::npos);
}

TEST_CASE("counterexample prints the trend") {
    const CliRun r = run({"counterexample", "--n-max", "5"});
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("0.833333") != std::string::npos);
    REQUIRE(r.out.find("inf") != std::string::npos);
    REQUIRE(r.out.find("partition (all sizes):") != std::string::npos);
}
