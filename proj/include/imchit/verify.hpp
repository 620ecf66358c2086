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

// Self-verification: random model generators, an exhaustive pure-selection
// oracle for small models, and a relation checker that tests the structural
// laws connecting the four envelope quantities and the qualitative sets on
// any given model.

#pragma once

#include "imchit/imprecise.hpp"
#include "imchit/model_io.hpp"
#include "imchit/precise.hpp"

#include <cmath>
#include <random>

namespace imchit {

enum class Verdict {
    pass,
    fail,
    /// A one-directional law whose converse genuinely fails on this state;
    /// recorded with a witness, counted separately from failures.
    reported,
};

/// Outcome of check_relations: per-state verdicts for every relation, plus
/// flat witness lists for anything that failed or was worth reporting.
struct RelationReport {
    std::vector<std::pair<std::string, std::vector<Verdict>>> relations;
    std::vector<std::string> failure_witnesses;
    std::vector<std::string> mismatch_witnesses;
    size_t passes = 0;
    size_t failures = 0;
    size_t mismatches = 0;
    bool passed() const noexcept { return failures == 0; }
};

namespace detail {

/// Uniform index in [0, bound) from raw engine output. Modulo bias is
/// irrelevant here (bound is tiny against 2^64) and the result is identical
/// on every platform, unlike std::uniform_int_distribution.
template <class Engine>
inline size_t draw_index(Engine& eng, size_t bound) {
    return static_cast<size_t>(eng() % bound);
}

/// Random point of the simplex supported on `active`, via normalized
/// exponential weights (uniform over the sub-simplex).
template <class Engine>
inline numvec random_simplex_point(Engine& eng, const std::vector<char>& active) {
    const size_t n = active.size();
    numvec w(n, 0.0);
    prec_t total = 0.0;
    for (size_t y = 0; y < n; ++y) {
        if (!active[y]) continue;
        w[y] = -std::log1p(-unit_double(eng));
        total += w[y];
    }
    if (total <= 0.0) {
        for (size_t y = 0; y < n; ++y)
            if (active[y]) {
                w[y] = 1.0;
                total = 1.0;
                break;
            }
    }
    for (size_t y = 0; y < n; ++y) w[y] /= total;
    return w;
}

/// Destination mask with each entry dropped with probability `sparsity`;
/// at least one entry always survives.
template <class Engine>
inline std::vector<char> random_support(Engine& eng, size_t n, prec_t sparsity) {
    std::vector<char> active(n, 0);
    bool any = false;
    for (size_t y = 0; y < n; ++y) {
        active[y] = unit_double(eng) >= sparsity ? 1 : 0;
        any = any || active[y] != 0;
    }
    if (!any) active[draw_index(eng, n)] = 1;
    return active;
}

/// Proper nonempty target: size 1..n-1, states chosen by partial shuffle.
template <class Engine>
inline stateset random_target(Engine& eng, size_t n) {
    if (n < 2) return {0};
    const size_t count = 1 + draw_index(eng, n - 1);
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    stateset target;
    for (size_t i = 0; i < count; ++i) {
        std::swap(order[i], order[i + draw_index(eng, n - i)]);
        target.insert(order[i]);
    }
    return target;
}

inline std::vector<std::string> numbered_labels(size_t n) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (size_t i = 1; i <= n; ++i) labels.push_back(std::to_string(i));
    return labels;
}

/// One vertex list per row; interval rows are expanded to their extreme
/// points. Throws std::range_error for interval rows too wide to expand.
inline std::vector<std::vector<numvec>> row_vertex_lists(const Model& m) {
    std::vector<std::vector<numvec>> lists;
    lists.reserve(m.size());
    for (const auto& row : m.rows) {
        if (const auto* iv = std::get_if<IntervalRow>(&row))
            lists.push_back(interval_row_vertices(*iv));
        else
            lists.push_back(std::get<VertexRow>(row).vertices);
    }
    return lists;
}

inline size_t selection_count(const std::vector<std::vector<numvec>>& lists, size_t cap) {
    size_t count = 1;
    for (const auto& l : lists) {
        if (l.empty()) return 0;
        if (count > cap / l.size() + 1) return cap + 1;
        count *= l.size();
        if (count > cap) return cap + 1;
    }
    return count;
}

} // namespace detail

/**
 * Random model with one probability-interval row per state. `sparsity` is
 * the chance a destination is dropped from a row's support, `width` the
 * total slack of each interval around its center (clipped to [0,1]).
 * Feasibility holds by construction: lower bounds sit below the center
 * point and upper bounds above it.
 */
inline Model random_interval_model(size_t n, prec_t sparsity, prec_t width, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("random_interval_model: need at least one state");
    std::mt19937_64 eng(splitmix64(seed));
    Model m;
    m.states.labels = detail::numbered_labels(n);
    m.target.members = detail::random_target(eng, n);
    for (size_t x = 0; x < n; ++x) {
        const auto active = detail::random_support(eng, n, sparsity);
        const numvec center = detail::random_simplex_point(eng, active);
        IntervalRow iv;
        iv.lower.assign(n, 0.0);
        iv.upper.assign(n, 0.0);
        for (size_t y = 0; y < n; ++y) {
            if (!active[y]) continue;
            iv.lower[y] = std::max(0.0, center[y] - width / 2);
            iv.upper[y] = std::min(1.0, center[y] + width / 2);
        }
        m.rows.emplace_back(std::move(iv));
    }
    return m;
}

/// Random model with up to `max_vertices` explicit vertices per row.
inline Model random_vertex_model(size_t n, size_t max_vertices, prec_t sparsity, uint64_t seed) {
    if (n < 1 || max_vertices < 1)
        throw std::invalid_argument("random_vertex_model: need at least one state and one vertex");
    std::mt19937_64 eng(splitmix64(seed));
    Model m;
    m.states.labels = detail::numbered_labels(n);
    m.target.members = detail::random_target(eng, n);
    for (size_t x = 0; x < n; ++x) {
        VertexRow vr;
        const size_t count = 1 + detail::draw_index(eng, max_vertices);
        for (size_t k = 0; k < count; ++k)
            vr.vertices.push_back(detail::random_simplex_point(eng, detail::random_support(eng, n, sparsity)));
        m.rows.emplace_back(std::move(vr));
    }
    return m;
}

/**
 * Three-state family showing that a vanishing avoidance probability does
 * not buy a finite minimal hitting time. State "1" may stay put or follow
 * one of the kernels (1 - 1/n - 1/n^2, 1/n, 1/n^2) for n up to
 * `family_size`; "2" is the target, "3" a dead end. As the family grows,
 * the best-case hitting probability from "1" climbs toward 1, yet staying
 * put forever remains available, so both expected-time envelopes stay
 * infinite and the avoidance option never disappears.
 */
inline Model counterexample_model(size_t family_size) {
    if (family_size < 2) throw std::invalid_argument("counterexample_model: family size must be at least 2");
    Model m;
    m.states.labels = {"1", "2", "3"};
    m.target.members = {1};
    VertexRow first;
    first.vertices.push_back({1.0, 0.0, 0.0});
    for (size_t n = 2; n <= family_size; ++n) {
        const prec_t inv = 1.0 / static_cast<prec_t>(n);
        first.vertices.push_back({1.0 - inv - inv * inv, inv, inv * inv});
    }
    m.rows.emplace_back(std::move(first));
    m.rows.emplace_back(VertexRow{{{0.0, 1.0, 0.0}}});
    m.rows.emplace_back(VertexRow{{{0.0, 0.0, 1.0}}});
    return m;
}

/// Envelopes obtained by exhausting every pure selection (one vertex per
/// row) with the exact single-matrix solvers. Small models only.
struct BruteForceEnvelopes {
    numvec lower_prob;
    numvec upper_prob;
    std::vector<ExtendedValue> lower_time;
    std::vector<ExtendedValue> upper_time;
    /// States where some pure selection hits almost surely.
    stateset sure_selection;
    size_t selections = 0;
};

/**
 * Visits every pure selection of the model as a stochastic matrix, in
 * odometer order over the per-row vertex lists. Unguarded; callers bound
 * the selection count themselves.
 */
template <class Visitor>
inline void for_each_pure_matrix(const Model& m, Visitor visit) {
    const auto lists = detail::row_vertex_lists(m);
    const size_t n = m.size();
    std::vector<size_t> pick(n, 0);
    StochasticMatrix T;
    T.entries.resize(n);
    while (true) {
        for (size_t x = 0; x < n; ++x) T.entries[x] = lists[x][pick[x]];
        visit(static_cast<const StochasticMatrix&>(T));
        size_t x = 0;
        while (x < n && ++pick[x] == lists[x].size()) pick[x++] = 0;
        if (x == n) return;
    }
}

/**
 * Exhaustive oracle: statewise extremes of the exact per-matrix solutions
 * over all pure selections. Pure selections suffice for all four
 * envelopes, so this agrees with the iterative solvers up to their
 * stopping tolerance. Throws std::range_error when the model admits more
 * than 100000 pure selections (or an interval row is too wide to expand).
 */
inline BruteForceEnvelopes brute_force_envelopes(const Model& m) {
    const auto lists = detail::row_vertex_lists(m);
    constexpr size_t CAP = 100000;
    const size_t count = detail::selection_count(lists, CAP);
    if (count == 0) throw std::invalid_argument("brute_force_envelopes: a row has no vertices");
    if (count > CAP)
        throw std::range_error("brute_force_envelopes: model exceeds " + std::to_string(CAP) +
                               " pure selections");

    const size_t n = m.size();
    BruteForceEnvelopes out;
    out.lower_prob.assign(n, 1.0);
    out.upper_prob.assign(n, 0.0);
    out.lower_time.assign(n, ExtendedValue::infinity());
    out.upper_time.assign(n, ExtendedValue::finite(0.0));
    for_each_pure_matrix(m, [&](const StochasticMatrix& T) {
        ++out.selections;
        const numvec p = hitting_probabilities(T, m.target);
        const auto h = expected_hitting_times(T, m.target);
        const stateset sure = sure_hitting_states(T, m.target);
        for (size_t x = 0; x < n; ++x) {
            out.lower_prob[x] = std::min(out.lower_prob[x], p[x]);
            out.upper_prob[x] = std::max(out.upper_prob[x], p[x]);
            out.lower_time[x] = std::min(out.lower_time[x], h[x]);
            out.upper_time[x] = std::max(out.upper_time[x], h[x]);
        }
        out.sure_selection.insert(sure.begin(), sure.end());
    });
    return out;
}

/**
 * Checks the structural laws tying the four envelopes to the qualitative
 * sets on one model, one verdict per state per relation. Laws that hold in
 * one direction only get `reported` (with a witness) where the converse
 * fails; everything else is pass or fail. When the model is small enough
 * for the exhaustive oracle, the oracle-agreement relations run as well.
 */
inline RelationReport check_relations(const Model& m, const IterationSettings& settings = {}) {
    const AnalysisResult r = analyze(m, settings);
    const size_t n = m.size();
    RelationReport report;

    auto finish = [&](const std::string& name, std::vector<Verdict> verdicts) {
        for (const Verdict v : verdicts) {
            if (v == Verdict::pass) ++report.passes;
            else if (v == Verdict::fail) ++report.failures;
            else ++report.mismatches;
        }
        report.relations.emplace_back(name, std::move(verdicts));
    };
    auto witness = [&](const std::string& relation, size_t x, const std::string& what) {
        return relation + ": state \"" + m.states.labels[x] + "\": " + what;
    };
    const auto& fmt = detail::format_number;

    stateset divergent = r.partition.avoidable;
    divergent.insert(r.partition.avoidable_exposure.begin(), r.partition.avoidable_exposure.end());
    stateset risky = r.partition.unreachable;
    risky.insert(r.partition.unreachable_exposure.begin(), r.partition.unreachable_exposure.end());

    {
        const std::string name = "finite-upper-time-implies-lower-prob-one";
        std::vector<Verdict> v(n, Verdict::pass);
        for (size_t x = 0; x < n; ++x)
            if (r.upper_time[x].is_finite() && r.lower_prob[x] != 1.0) {
                v[x] = Verdict::fail;
                report.failure_witnesses.push_back(witness(
                    name, x, "upper time " + fmt(r.upper_time[x].value()) + " finite but lower probability " +
                                 fmt(r.lower_prob[x]) + " != 1"));
            }
        finish(name, std::move(v));
    }
    {
        const std::string name = "finite-lower-time-implies-upper-prob-one";
        std::vector<Verdict> v(n, Verdict::pass);
        for (size_t x = 0; x < n; ++x)
            if (r.lower_time[x].is_finite() && r.upper_prob[x] < 1.0 - 1e-6) {
                v[x] = Verdict::fail;
                report.failure_witnesses.push_back(witness(
                    name, x, "lower time " + fmt(r.lower_time[x].value()) + " finite but upper probability " +
                                 fmt(r.upper_prob[x]) + " < 1 - 1e-6"));
            }
        finish(name, std::move(v));
    }
    {
        const std::string name = "lower-prob-one-iff-finite-upper-time";
        std::vector<Verdict> v(n, Verdict::pass);
        for (size_t x = 0; x < n; ++x) {
            if ((r.lower_prob[x] == 1.0) == r.upper_time[x].is_finite()) continue;
            v[x] = Verdict::fail;
            report.failure_witnesses.push_back(
                witness(name, x,
                        "lower probability " + fmt(r.lower_prob[x]) + " vs upper time " +
                            (r.upper_time[x].is_finite() ? "finite" : "infinite")));
        }
        finish(name, std::move(v));
    }
    {
        const std::string name = "lower-prob-zero-iff-avoidable";
        std::vector<Verdict> v(n, Verdict::pass);
        for (size_t x = 0; x < n; ++x) {
            if ((r.lower_prob[x] == 0.0) == (r.partition.avoidable.count(x) > 0)) continue;
            v[x] = Verdict::fail;
            report.failure_witnesses.push_back(witness(
                name, x,
                "lower probability " + fmt(r.lower_prob[x]) +
                    (r.partition.avoidable.count(x) > 0 ? " on an avoidable state" : " off the avoidable set")));
        }
        finish(name, std::move(v));
    }
    {
        const std::string name = "upper-prob-zero-iff-unreachable";
        std::vector<Verdict> v(n, Verdict::pass);
        for (size_t x = 0; x < n; ++x) {
            if ((r.upper_prob[x] == 0.0) == (r.partition.unreachable.count(x) > 0)) continue;
            v[x] = Verdict::fail;
            report.failure_witnesses.push_back(
                witness(name, x,
                        "upper probability " + fmt(r.upper_prob[x]) +
                            (r.partition.unreachable.count(x) > 0 ? " on an unreachable state"
                                                                  : " off the unreachable set")));
        }
        finish(name, std::move(v));
    }
    {
        const std::string name = "infinite-upper-time-iff-avoidable-or-exposed";
        std::vector<Verdict> v(n, Verdict::pass);
        for (size_t x = 0; x < n; ++x) {
            if (r.upper_time[x].is_finite() == (divergent.count(x) == 0)) continue;
            v[x] = Verdict::fail;
            report.failure_witnesses.push_back(
                witness(name, x,
                        std::string("upper time ") + (r.upper_time[x].is_finite() ? "finite" : "infinite") +
                            (divergent.count(x) > 0 ? " on a divergent state" : " off the divergent sets")));
        }
        finish(name, std::move(v));
    }
    {
        // One-directional: membership forces an infinite lower time, but an
        // infinite lower time does not force membership (the avoidance
        // option may come from an unattained limit instead).
        const std::string name = "infinite-lower-time-if-unreachable-or-exposed";
        std::vector<Verdict> v(n, Verdict::pass);
        for (size_t x = 0; x < n; ++x) {
            if (risky.count(x) > 0 && r.lower_time[x].is_finite()) {
                v[x] = Verdict::fail;
                report.failure_witnesses.push_back(witness(
                    name, x, "lower time " + fmt(r.lower_time[x].value()) + " finite on a risky state"));
            } else if (risky.count(x) == 0 && !r.lower_time[x].is_finite() && !m.target.contains(x)) {
                v[x] = Verdict::reported;
                report.mismatch_witnesses.push_back(
                    witness(name, x, "lower time infinite outside the unreachable and exposed sets"));
            }
        }
        finish(name, std::move(v));
    }
    {
        const std::string name = "region-assigned";
        std::vector<Verdict> v(n, Verdict::pass);
        for (size_t x = 0; x < n; ++x) {
            const std::string prefix = "state \"" + m.states.labels[x] + "\"";
            for (const auto& finding : r.findings)
                if (finding.compare(0, prefix.size(), prefix) == 0) {
                    v[x] = Verdict::reported;
                    report.mismatch_witnesses.push_back(name + ": " + finding);
                }
        }
        finish(name, std::move(v));
    }

    // Oracle agreement, when exhaustive enumeration is affordable.
    bool oracle_ok = true;
    try {
        const auto lists = detail::row_vertex_lists(m);
        oracle_ok = detail::selection_count(lists, 100000) <= 100000;
    } catch (const std::range_error&) {
        oracle_ok = false;
    }
    if (oracle_ok) {
        const BruteForceEnvelopes oracle = brute_force_envelopes(m);
        auto close = [](prec_t a, prec_t b) { return std::fabs(a - b) <= 1e-6 * std::max({1.0, std::fabs(a), std::fabs(b)}); };
        auto time_close = [&](const ExtendedValue& a, const ExtendedValue& b) {
            if (a.is_finite() != b.is_finite()) return false;
            return !a.is_finite() || close(a.value(), b.value());
        };
        {
            const std::string name = "oracle-envelope-agreement";
            std::vector<Verdict> v(n, Verdict::pass);
            for (size_t x = 0; x < n; ++x) {
                std::string bad;
                if (!close(r.lower_prob[x], oracle.lower_prob[x]))
                    bad = "lower probability " + fmt(r.lower_prob[x]) + " vs " + fmt(oracle.lower_prob[x]);
                else if (!close(r.upper_prob[x], oracle.upper_prob[x]))
                    bad = "upper probability " + fmt(r.upper_prob[x]) + " vs " + fmt(oracle.upper_prob[x]);
                else if (!time_close(r.lower_time[x], oracle.lower_time[x]))
                    bad = "lower time mismatch";
                else if (!time_close(r.upper_time[x], oracle.upper_time[x]))
                    bad = "upper time mismatch";
                if (!bad.empty()) {
                    v[x] = Verdict::fail;
                    report.failure_witnesses.push_back(witness(name, x, bad + " (enumeration)"));
                }
            }
            finish(name, std::move(v));
        }
        {
            const std::string name = "oracle-almost-sure-agreement";
            std::vector<Verdict> v(n, Verdict::pass);
            for (size_t x = 0; x < n; ++x) {
                if ((oracle.sure_selection.count(x) > 0) == (r.partition.almost_sure.count(x) > 0)) continue;
                v[x] = Verdict::fail;
                report.failure_witnesses.push_back(witness(
                    name, x,
                    oracle.sure_selection.count(x) > 0 ? "a pure selection hits almost surely but the state "
                                                           "is not marked almost-sure"
                                                       : "marked almost-sure but no pure selection hits "
                                                         "almost surely"));
            }
            finish(name, std::move(v));
        }
        {
            const std::string name = "finite-lower-time-implies-sure-selection";
            std::vector<Verdict> v(n, Verdict::pass);
            for (size_t x = 0; x < n; ++x)
                if (r.lower_time[x].is_finite() && oracle.sure_selection.count(x) == 0) {
                    v[x] = Verdict::fail;
                    report.failure_witnesses.push_back(witness(
                        name, x, "lower time finite but no pure selection hits almost surely"));
                }
            finish(name, std::move(v));
        }
    }
    return report;
}

/// One row of the growing-family experiment.
struct CounterexampleTrendEntry {
    size_t family_size;
    prec_t lower_prob;
    prec_t upper_prob;
    bool lower_time_finite;
    bool upper_time_finite;
    std::string partition_summary;
};

struct CounterexampleTrend {
    std::vector<CounterexampleTrendEntry> entries;
};

namespace detail {

inline std::string summarize_sets(const StateSpace& states, const Partition& p) {
    auto one = [&](const char* name, const stateset& s) {
        std::string out = std::string(name) + "={";
        bool first = true;
        for (size_t x : s) {
            if (!first) out += ",";
            first = false;
            out += states.labels[x];
        }
        return out + "}";
    };
    return one("avoidable", p.avoidable) + " " + one("avoidable_exposure", p.avoidable_exposure) + " " +
           one("unreachable", p.unreachable) + " " + one("unreachable_exposure", p.unreachable_exposure) + " " +
           one("almost_sure", p.almost_sure);
}

} // namespace detail

/**
 * Runs the growing counterexample family from size 2 up to `max_family`
 * and records the envelope of state "1" at every size. Self-checking: the
 * best-case probability must equal N/(N+1) within 1e-7 and increase
 * strictly, the worst case must stay exactly 0, both expected times must
 * stay infinite, and the partition must stay fixed. A violation throws
 * std::logic_error since it indicates a solver defect, not bad input.
 */
inline CounterexampleTrend counterexample_trend(size_t max_family, const IterationSettings& settings = {}) {
    if (max_family < 2) throw std::invalid_argument("counterexample_trend: max family size must be at least 2");
    CounterexampleTrend trend;
    prec_t previous = 0.0;
    for (size_t N = 2; N <= max_family; ++N) {
        const Model m = counterexample_model(N);
        const AnalysisResult r = analyze(m, settings);
        const prec_t expected = static_cast<prec_t>(N) / static_cast<prec_t>(N + 1);
        auto bail = [&](const std::string& what) {
            throw std::logic_error("counterexample_trend: family size " + std::to_string(N) + ": " + what);
        };
        if (std::fabs(r.upper_prob[0] - expected) > 1e-7)
            bail("upper probability " + detail::format_number(r.upper_prob[0]) + " != " +
                 detail::format_number(expected));
        if (r.lower_prob[0] != 0.0) bail("lower probability not exactly 0");
        if (r.lower_time[0].is_finite() || r.upper_time[0].is_finite()) bail("an expected time became finite");
        if (r.upper_prob[0] <= previous) bail("upper probability failed to increase strictly");
        if (r.partition.avoidable != stateset{0, 2} || r.partition.unreachable != stateset{2} ||
            !r.partition.avoidable_exposure.empty() || !r.partition.unreachable_exposure.empty())
            bail("partition drifted: " + detail::summarize_sets(m.states, r.partition));
        previous = r.upper_prob[0];
        trend.entries.push_back({N, r.lower_prob[0], r.upper_prob[0], r.lower_time[0].is_finite(),
                                 r.upper_time[0].is_finite(), detail::summarize_sets(m.states, r.partition)});
    }
    return trend;
}

} // namespace imchit
