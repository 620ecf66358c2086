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

#include "imchit/imprecise.hpp"
#include "imchit/verify.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace imchit;

namespace {

VertexRow point_row(numvec p) { return VertexRow{{std::move(p)}}; }

Model geometric_model() {
    Model m;
    m.states.labels = {"a", "b"};
    m.target.members = {1};
    m.rows.emplace_back(point_row({0.5, 0.5}));
    m.rows.emplace_back(point_row({0.0, 1.0}));
    return m;
}

Model trap_model() {
    Model m;
    m.states.labels = {"s", "t", "u"};
    m.target.members = {1};
    m.rows.emplace_back(point_row({0.2, 0.4, 0.4}));
    m.rows.emplace_back(point_row({0.0, 1.0, 0.0}));
    m.rows.emplace_back(point_row({0.0, 0.0, 1.0}));
    return m;
}

Model interval_model() {
    Model m;
    m.states.labels = {"1", "2"};
    m.target.members = {1};
    m.rows.emplace_back(IntervalRow{{0.2, 0.4}, {0.6, 0.8}});
    m.rows.emplace_back(point_row({0.0, 1.0}));
    return m;
}

} // namespace

TEST_CASE("interval model bounds") {
    const AnalysisResult r = analyze(interval_model());
    // The target is hit from everywhere under every feasible row.
    REQUIRE(r.lower_prob == numvec{1.0, 1.0});
    REQUIRE(r.upper_prob == numvec{1.0, 1.0});
    // Mass on the target per step ranges over [0.4, 0.8].
    REQUIRE(r.lower_time[0].is_finite());
    REQUIRE(r.lower_time[0].value() == Catch::Approx(1.25).margin(1e-8));
    REQUIRE(r.upper_time[0].is_finite());
    REQUIRE(r.upper_time[0].value() == Catch::Approx(2.5).margin(1e-8));
    REQUIRE(r.lower_time[1] == ExtendedValue::finite(0.0));
    REQUIRE(r.upper_time[1] == ExtendedValue::finite(0.0));
    REQUIRE(r.regions == std::vector<RegionLabel>{RegionLabel::always_hits, RegionLabel::always_hits});
    REQUIRE(r.findings.empty());
}

TEST_CASE("trap model bounds") {
    const AnalysisResult r = analyze(trap_model());
    REQUIRE(r.lower_prob[0] == Catch::Approx(0.5).margin(1e-8));
    REQUIRE(r.upper_prob[0] == Catch::Approx(0.5).margin(1e-8));
    REQUIRE(r.lower_prob[1] == 1.0);
    REQUIRE(r.upper_prob[1] == 1.0);
    REQUIRE(r.lower_prob[2] == 0.0);
    REQUIRE(r.upper_prob[2] == 0.0);
    REQUIRE_FALSE(r.lower_time[0].is_finite());
    REQUIRE_FALSE(r.upper_time[0].is_finite());
    REQUIRE_FALSE(r.lower_time[2].is_finite());
    REQUIRE_FALSE(r.upper_time[2].is_finite());
    REQUIRE(r.regions == std::vector<RegionLabel>{RegionLabel::exposed_unsure, RegionLabel::always_hits,
                                                  RegionLabel::never_hits});
    REQUIRE(r.findings.empty());
}

TEST_CASE("geometric model times") {
    const AnalysisResult r = analyze(geometric_model());
    REQUIRE(r.lower_time[0].value() == Catch::Approx(2.0).margin(1e-8));
    REQUIRE(r.upper_time[0].value() == Catch::Approx(2.0).margin(1e-8));
    REQUIRE(r.lower_prob == numvec{1.0, 1.0});
    REQUIRE(r.upper_prob == numvec{1.0, 1.0});
}

TEST_CASE("iteration budget is enforced") {
    REQUIRE_THROWS_AS(analyze(geometric_model(), IterationSettings{1e-9, 1}), iteration_limit_error);
}

TEST_CASE("analyze rejects invalid models") {
    Model m = interval_model();
    m.target.members.clear();
    REQUIRE_THROWS_WITH(analyze(m), Catch::Matchers::ContainsSubstring("invalid model"));
}

TEST_CASE("escape family trend") {
    const CounterexampleTrend trend = counterexample_trend(8);
    REQUIRE(trend.entries.size() == 7);
    prec_t last = 0.0;
    for (const auto& entry : trend.entries) {
        REQUIRE(entry.lower_prob == 0.0);
        REQUIRE(entry.upper_prob > last);
        REQUIRE_FALSE(entry.lower_time_finite);
        REQUIRE_FALSE(entry.upper_time_finite);
        REQUIRE(entry.partition_summary.find("avoidable={1,3}") != std::string::npos);
        last = entry.upper_prob;
    }
    REQUIRE(trend.entries.back().family_size == 8);
    REQUIRE(trend.entries.back().upper_prob == Catch::Approx(8.0 / 9.0).margin(1e-7));
}

TEST_CASE("iterates only improve as the tolerance tightens") {
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        const Model m = (seed % 2 == 0)
            ? random_interval_model(2 + seed % 5, 0.3, 0.25, splitmix64(seed * 3))
            : random_vertex_model(2 + seed % 4, 1 + seed % 3, 0.3, splitmix64(seed * 5));
        const AnalysisResult loose = analyze(m, IterationSettings{1e-3, 1000000});
        const AnalysisResult tight = analyze(m, IterationSettings{1e-11, 1000000});
        for (size_t x = 0; x < m.size(); ++x) {
            INFO("seed " << seed << " state " << x);
            REQUIRE(loose.lower_prob[x] <= tight.lower_prob[x] + 1e-12);
            REQUIRE(loose.upper_prob[x] <= tight.upper_prob[x] + 1e-12);
            REQUIRE(loose.lower_time[x].is_finite() == tight.lower_time[x].is_finite());
            REQUIRE(loose.upper_time[x].is_finite() == tight.upper_time[x].is_finite());
            if (loose.lower_time[x].is_finite())
                REQUIRE(loose.lower_time[x].value() <= tight.lower_time[x].value() + 1e-12);
            if (loose.upper_time[x].is_finite())
                REQUIRE(loose.upper_time[x].value() <= tight.upper_time[x].value() + 1e-12);
        }
    }
}

TEST_CASE("bounds always bracket") {
    for (uint64_t seed = 100; seed <= 160; ++seed) {
        const Model m = (seed % 2 == 0)
            ? random_interval_model(2 + seed % 6, 0.35, 0.3, splitmix64(seed))
            : random_vertex_model(2 + seed % 4, 1 + seed % 3, 0.35, splitmix64(seed));
        const AnalysisResult r = analyze(m);
        for (size_t x = 0; x < m.size(); ++x) {
            INFO("seed " << seed << " state " << x);
            REQUIRE(r.lower_prob[x] <= r.upper_prob[x]);
            if (r.upper_time[x].is_finite()) {
                REQUIRE(r.lower_time[x].is_finite());
                REQUIRE(r.lower_time[x].value() <= r.upper_time[x].value());
            }
        }
    }
}

TEST_CASE("tiny forced progress is not mistaken for avoidance") {
    // Each sweep moves less than any sensible tolerance, yet the chain is
    // forced towards the target: the computed lower probability must leave
    // zero even if it cannot get anywhere near the true value of 0.5.
    Model m;
    m.states.labels = {"x1", "x2", "g", "t"};
    m.target.members = {3};
    m.rows.emplace_back(point_row({0.0, 1.0, 0.0, 0.0}));
    m.rows.emplace_back(point_row({0.0, 1.0 - 2e-10, 1e-10, 1e-10}));
    m.rows.emplace_back(point_row({0.0, 0.0, 1.0, 0.0}));
    m.rows.emplace_back(point_row({0.0, 0.0, 0.0, 1.0}));
    REQUIRE(validate_model(m).empty());

    const AnalysisResult r = analyze(m);
    REQUIRE(r.partition.avoidable == stateset{2});
    REQUIRE(r.partition.avoidable_exposure == stateset{0, 1});
    REQUIRE(r.lower_prob[0] > 0.0);
    REQUIRE(r.lower_prob[1] > 0.0);
    REQUIRE(r.upper_prob[0] > 0.0);
    REQUIRE(r.upper_prob[1] > 0.0);
    REQUIRE(r.regions[0] == RegionLabel::exposed_unsure);
    REQUIRE(r.regions[1] == RegionLabel::exposed_unsure);
    REQUIRE(r.findings.empty());
}

TEST_CASE("classify_states flags slot violations") {
    const Model m = trap_model();
    const Partition parts = state_partition(m);
    const AnalysisResult r = analyze(m);

    numvec bad_lower = r.lower_prob;
    bad_lower[0] = 0.0; // exposed state must keep a strictly positive lower bound
    std::vector<std::string> findings;
    classify_states(m, parts, bad_lower, r.upper_prob, r.lower_time, r.upper_time, &findings);
    REQUIRE(findings.size() == 1);
    REQUIRE(findings[0].find("state \"s\" (exposed_unsure)") != std::string::npos);
    REQUIRE(findings[0].find("outside (0,1)") != std::string::npos);

    std::vector<ExtendedValue> bad_time = r.upper_time;
    bad_time[2] = ExtendedValue::finite(5.0); // unreachable state cannot have finite time
    findings.clear();
    classify_states(m, parts, r.lower_prob, r.upper_prob, r.lower_time, bad_time, &findings);
    REQUIRE(findings.size() == 1);
    REQUIRE(findings[0].find("state \"u\" (never_hits)") != std::string::npos);
    REQUIRE(findings[0].find("upper time finite") != std::string::npos);
}

TEST_CASE("solvers accept a precomputed partition") {
    const Model m = trap_model();
    const Partition parts = state_partition(m);
    const IterationSettings settings{};
    const numvec lp = lower_hitting_probabilities(m, parts, settings);
    const numvec up = upper_hitting_probabilities(m, parts, settings);
    const auto lt = lower_hitting_times(m, parts, settings);
    const auto ut = upper_hitting_times(m, parts, settings);
    const AnalysisResult r = analyze(m);
    REQUIRE(lp == r.lower_prob);
    REQUIRE(up == r.upper_prob);
    REQUIRE(lt == r.lower_time);
    REQUIRE(ut == r.upper_time);

    // Convenience overloads match as well.
    REQUIRE(lower_hitting_probabilities(m, settings) == lp);
    REQUIRE(upper_hitting_probabilities(m, settings) == up);
    REQUIRE(lower_hitting_times(m, settings) == lt);
    REQUIRE(upper_hitting_times(m, settings) == ut);
}

TEST_CASE("region names are stable") {
    REQUIRE(region_name(RegionLabel::never_hits) == std::string("never_hits"));
    REQUIRE(region_name(RegionLabel::avoidable_unsure) == std::string("avoidable_unsure"));
    REQUIRE(region_name(RegionLabel::exposed_unsure) == std::string("exposed_unsure"));
    REQUIRE(region_name(RegionLabel::avoidable_sure) == std::string("avoidable_sure"));
    REQUIRE(region_name(RegionLabel::exposed_sure) == std::string("exposed_sure"));
    REQUIRE(region_name(RegionLabel::always_hits) == std::string("always_hits"));
}
