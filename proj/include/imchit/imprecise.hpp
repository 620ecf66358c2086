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

#pragma once

#include "imchit/model.hpp"
#include "imchit/operators.hpp"
#include "imchit/reach.hpp"

#include <algorithm>
#include <sstream>

namespace imchit {

struct IterationSettings {
    /// Sup-norm step size under which value iteration stops.
    prec_t tolerance = 1e-9;
    /// Hard budget of Jacobi sweeps; exceeding it raises
    /// iteration_limit_error.
    size_t max_iterations = 1000000;
};

/**
 * The six value profiles (lower prob, upper prob, lower time, upper time)
 * a state can have. Membership is decided by the qualitative sets alone;
 * the numeric vectors are checked against the profile afterwards.
 */
enum class RegionLabel {
    never_hits,       ///< (0, 0, inf, inf)
    avoidable_unsure, ///< (0, (0,1], inf, inf)
    exposed_unsure,   ///< ((0,1), (0,1], inf, inf)
    avoidable_sure,   ///< (0, 1, <inf, inf)
    exposed_sure,     ///< ((0,1), 1, <inf, inf)
    always_hits,      ///< (1, 1, <inf, <inf)
};

inline const char* region_name(RegionLabel r) {
    switch (r) {
    case RegionLabel::never_hits: return "never_hits";
    case RegionLabel::avoidable_unsure: return "avoidable_unsure";
    case RegionLabel::exposed_unsure: return "exposed_unsure";
    case RegionLabel::avoidable_sure: return "avoidable_sure";
    case RegionLabel::exposed_sure: return "exposed_sure";
    case RegionLabel::always_hits: return "always_hits";
    }
    throw std::logic_error("internal error: unknown region label");
}

/// Compact (lower prob, upper prob, lower time, upper time) slot notation.
inline const char* region_pattern(RegionLabel r) {
    switch (r) {
    case RegionLabel::never_hits: return "(0,0,inf,inf)";
    case RegionLabel::avoidable_unsure: return "(0,(0,1],inf,inf)";
    case RegionLabel::exposed_unsure: return "((0,1),(0,1],inf,inf)";
    case RegionLabel::avoidable_sure: return "(0,1,<inf,inf)";
    case RegionLabel::exposed_sure: return "((0,1),1,<inf,inf)";
    case RegionLabel::always_hits: return "(1,1,<inf,<inf)";
    }
    throw std::logic_error("internal error: unknown region label");
}

/// Inverse of region_pattern. Throws std::invalid_argument on an unknown
/// pattern string.
inline RegionLabel region_from_pattern(const std::string& pattern) {
    for (RegionLabel r : {RegionLabel::never_hits, RegionLabel::avoidable_unsure, RegionLabel::exposed_unsure,
                          RegionLabel::avoidable_sure, RegionLabel::exposed_sure, RegionLabel::always_hits})
        if (pattern == region_pattern(r)) return r;
    throw std::invalid_argument("unknown region pattern \"" + pattern + "\"");
}

namespace detail {

/**
 * Jacobi value iteration on the undetermined block, monotone from below.
 * Stops once the sup-norm step drops under the tolerance and, when
 * `require_positive` is set, every block entry has left zero. The
 * positivity wait matters for probabilities: the value front can crawl
 * through low-mass corridors in steps far below any tolerance, and a
 * premature stop would freeze exact zeros on states whose true value is
 * positive.
 */
template <class RowValue>
inline void solve_block(numvec& values, const std::vector<size_t>& block, RowValue row_value,
                        const IterationSettings& settings, bool require_positive) {
    if (block.empty()) return;
    numvec next(values);
    prec_t step = 0.0;
    for (size_t iter = 0; iter < settings.max_iterations; ++iter) {
        step = 0.0;
        for (size_t x : block) {
            next[x] = row_value(x, values);
            step = std::max(step, next[x] - values[x]);
        }
        for (size_t x : block) values[x] = next[x];
        bool done = step < settings.tolerance;
        if (done && require_positive) {
            for (size_t x : block)
                if (values[x] <= 0.0) {
                    done = false;
                    break;
                }
        }
        if (done) return;
    }
    std::ostringstream msg;
    msg << "iteration budget of " << settings.max_iterations << " sweeps exceeded (last step " << step << ")";
    throw iteration_limit_error(msg.str());
}

} // namespace detail

/**
 * Statewise minimum hitting probability over the row sets. Exactly 0 on
 * `avoidable`, exactly 1 on the target and on states that hit under every
 * selection; value iteration runs only on `avoidable_exposure`, where the
 * value is strictly between 0 and 1.
 */
inline numvec lower_hitting_probabilities(const Model& m, const Partition& parts,
                                          const IterationSettings& settings = {}) {
    const size_t n = m.size();
    numvec p(n, 1.0);
    std::vector<size_t> block;
    for (size_t x = 0; x < n; ++x) {
        if (m.target.contains(x)) continue;
        if (parts.avoidable.count(x) > 0) {
            p[x] = 0.0;
        } else if (parts.avoidable_exposure.count(x) > 0) {
            p[x] = 0.0;
            block.push_back(x);
        }
    }
    detail::solve_block(
        p, block, [&](size_t x, const numvec& v) { return lower_row_envelope(m.rows[x], v).value; }, settings,
        /*require_positive=*/true);
    return p;
}

/**
 * Statewise maximum hitting probability over the row sets. Exactly 0 on
 * `unreachable` and exactly 1 on `almost_sure`: row sets are closed, so a
 * maximum of 1 is attained exactly where some selection hits almost
 * surely. Value iteration covers the remaining states, whose value is
 * strictly between 0 and 1.
 */
inline numvec upper_hitting_probabilities(const Model& m, const Partition& parts,
                                          const IterationSettings& settings = {}) {
    const size_t n = m.size();
    numvec p(n, 0.0);
    std::vector<size_t> block;
    for (size_t x = 0; x < n; ++x) {
        if (m.target.contains(x) || parts.almost_sure.count(x) > 0) {
            p[x] = 1.0;
        } else if (parts.unreachable.count(x) == 0) {
            block.push_back(x);
        }
    }
    detail::solve_block(
        p, block, [&](size_t x, const numvec& v) { return upper_row_envelope(m.rows[x], v).value; }, settings,
        /*require_positive=*/true);
    return p;
}

/**
 * Statewise maximum expected hitting time over the row sets. Infinite
 * exactly on `avoidable` and `avoidable_exposure`; elsewhere every
 * selection drives the chain to the target, and value iteration converges
 * to the finite maximum. No realizable edge can leave the finite block
 * toward the divergent states (such an edge would put its source in
 * `avoidable_exposure`), so zero placeholders in the masked slots never
 * receive mass.
 */
inline std::vector<ExtendedValue> upper_hitting_times(const Model& m, const Partition& parts,
                                                      const IterationSettings& settings = {}) {
    const size_t n = m.size();
    stateset divergent = parts.avoidable;
    divergent.insert(parts.avoidable_exposure.begin(), parts.avoidable_exposure.end());

    std::vector<size_t> block;
    for (size_t x = 0; x < n; ++x)
        if (!m.target.contains(x) && divergent.count(x) == 0) block.push_back(x);

    const auto adj = possible_edges(m);
    for (size_t x : block)
        for (size_t y : adj[x])
            if (divergent.count(y) > 0)
                throw std::logic_error("internal error: finite-time block has a realizable edge into the "
                                       "divergent set");

    numvec h(n, 0.0);
    detail::solve_block(
        h, block, [&](size_t x, const numvec& v) { return 1.0 + upper_row_envelope(m.rows[x], v).value; },
        settings,
        /*require_positive=*/false);

    std::vector<ExtendedValue> out;
    out.reserve(n);
    for (size_t x = 0; x < n; ++x)
        out.push_back(divergent.count(x) > 0 ? ExtendedValue::infinity() : ExtendedValue::finite(h[x]));
    return out;
}

/**
 * Statewise minimum expected hitting time over the row sets. Finite
 * exactly on `almost_sure`. The minimizing selection must keep all mass
 * inside `almost_sure` (one step outside makes the expectation infinite,
 * and every step costs 1), so the row envelopes are restricted to that
 * support; the restriction is feasible for every `almost_sure` row by
 * construction of the set.
 */
inline std::vector<ExtendedValue> lower_hitting_times(const Model& m, const Partition& parts,
                                                      const IterationSettings& settings = {}) {
    const size_t n = m.size();
    std::vector<char> allowed(n, 0);
    for (size_t x : parts.almost_sure) allowed[x] = 1;

    std::vector<size_t> block;
    for (size_t x : parts.almost_sure)
        if (!m.target.contains(x)) block.push_back(x);

    numvec h(n, 0.0);
    detail::solve_block(
        h, block,
        [&](size_t x, const numvec& v) { return 1.0 + lower_row_envelope_within(m.rows[x], v, allowed).value; },
        settings,
        /*require_positive=*/false);

    std::vector<ExtendedValue> out;
    out.reserve(n);
    for (size_t x = 0; x < n; ++x)
        out.push_back(allowed[x] ? ExtendedValue::finite(h[x]) : ExtendedValue::infinity());
    return out;
}

inline numvec lower_hitting_probabilities(const Model& m, const IterationSettings& settings) {
    return lower_hitting_probabilities(m, state_partition(m), settings);
}
inline numvec upper_hitting_probabilities(const Model& m, const IterationSettings& settings) {
    return upper_hitting_probabilities(m, state_partition(m), settings);
}
inline std::vector<ExtendedValue> upper_hitting_times(const Model& m, const IterationSettings& settings) {
    return upper_hitting_times(m, state_partition(m), settings);
}
inline std::vector<ExtendedValue> lower_hitting_times(const Model& m, const IterationSettings& settings) {
    return lower_hitting_times(m, state_partition(m), settings);
}

/**
 * Assigns each state its region label from the qualitative sets and checks
 * the numeric vectors against the label's value profile. Deviations are
 * appended to `findings` (when given) rather than thrown: the exact slots
 * (0, 1, 0, inf) are guaranteed by construction, but the open slots are
 * only approached by iteration and deserve reporting, not a crash.
 */
inline std::vector<RegionLabel> classify_states(const Model& m, const Partition& parts, const numvec& lower_prob,
                                                const numvec& upper_prob,
                                                const std::vector<ExtendedValue>& lower_time,
                                                const std::vector<ExtendedValue>& upper_time,
                                                std::vector<std::string>* findings = nullptr) {
    const size_t n = m.size();
    std::vector<RegionLabel> regions(n, RegionLabel::always_hits);

    auto report = [&](size_t x, const std::string& what) {
        if (findings != nullptr)
            findings->push_back("state \"" + m.states.labels[x] + "\" (" + region_name(regions[x]) + "): " + what);
    };
    auto describe = [](prec_t v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };

    for (size_t x = 0; x < n; ++x) {
        const bool sure = parts.almost_sure.count(x) > 0;
        if (m.target.contains(x)) {
            regions[x] = RegionLabel::always_hits;
        } else if (parts.unreachable.count(x) > 0) {
            regions[x] = RegionLabel::never_hits;
        } else if (parts.avoidable.count(x) > 0) {
            regions[x] = sure ? RegionLabel::avoidable_sure : RegionLabel::avoidable_unsure;
        } else if (parts.avoidable_exposure.count(x) > 0) {
            regions[x] = sure ? RegionLabel::exposed_sure : RegionLabel::exposed_unsure;
        } else {
            regions[x] = RegionLabel::always_hits;
            if (!sure) report(x, "hits under every selection yet no selection hits almost surely");
        }

        const prec_t lp = lower_prob[x], up = upper_prob[x];
        switch (regions[x]) {
        case RegionLabel::never_hits:
            if (lp != 0.0) report(x, "lower probability " + describe(lp) + " not exactly 0");
            if (up != 0.0) report(x, "upper probability " + describe(up) + " not exactly 0");
            if (lower_time[x].is_finite()) report(x, "lower time finite in a region where it must be infinite");
            if (upper_time[x].is_finite()) report(x, "upper time finite in a region where it must be infinite");
            break;
        case RegionLabel::avoidable_unsure:
        case RegionLabel::avoidable_sure:
            if (lp != 0.0) report(x, "lower probability " + describe(lp) + " not exactly 0");
            if (up <= 0.0 || up > 1.0) report(x, "upper probability " + describe(up) + " outside (0,1]");
            if (regions[x] == RegionLabel::avoidable_sure) {
                if (up != 1.0) report(x, "upper probability " + describe(up) + " not exactly 1");
                if (!lower_time[x].is_finite()) report(x, "lower time infinite in a region where it is finite");
            } else if (lower_time[x].is_finite()) {
                report(x, "lower time finite in a region where it must be infinite");
            }
            if (upper_time[x].is_finite()) report(x, "upper time finite in a region where it must be infinite");
            break;
        case RegionLabel::exposed_unsure:
        case RegionLabel::exposed_sure:
            if (lp <= 0.0 || lp >= 1.0) report(x, "lower probability " + describe(lp) + " outside (0,1)");
            if (regions[x] == RegionLabel::exposed_sure) {
                if (up != 1.0) report(x, "upper probability " + describe(up) + " not exactly 1");
                if (!lower_time[x].is_finite()) report(x, "lower time infinite in a region where it is finite");
            } else {
                if (up <= 0.0 || up > 1.0) report(x, "upper probability " + describe(up) + " outside (0,1]");
                if (lower_time[x].is_finite()) report(x, "lower time finite in a region where it must be infinite");
            }
            if (upper_time[x].is_finite()) report(x, "upper time finite in a region where it must be infinite");
            break;
        case RegionLabel::always_hits:
            if (lp != 1.0) report(x, "lower probability " + describe(lp) + " not exactly 1");
            if (up != 1.0) report(x, "upper probability " + describe(up) + " not exactly 1");
            if (!lower_time[x].is_finite()) report(x, "lower time infinite in a region where it is finite");
            if (!upper_time[x].is_finite()) report(x, "upper time infinite in a region where it is finite");
            if (m.target.contains(x)) {
                if (!lower_time[x].is_finite() || lower_time[x].value() != 0.0)
                    report(x, "lower time on a target state not exactly 0");
                if (!upper_time[x].is_finite() || upper_time[x].value() != 0.0)
                    report(x, "upper time on a target state not exactly 0");
            }
            break;
        }
    }
    return regions;
}

/// Everything the solvers produce for one model, bundled for output.
struct AnalysisResult {
    StateSpace states;
    TargetSet target;
    numvec lower_prob;
    numvec upper_prob;
    std::vector<ExtendedValue> lower_time;
    std::vector<ExtendedValue> upper_time;
    Partition partition;
    std::vector<RegionLabel> regions;
    /// Human-readable notes where a numeric value strays from its region's
    /// profile; empty in normal operation.
    std::vector<std::string> findings;
};

/**
 * Full pipeline: validate, partition, solve all four envelopes, classify.
 * The two probability vectors and the two time vectors are computed
 * independently from below, so the lower/upper order is enforced afterwards
 * (a repair within iteration tolerance, never a change of regime).
 */
inline AnalysisResult analyze(const Model& m, const IterationSettings& settings = {}) {
    const auto errors = validate_model(m);
    if (!errors.empty()) throw std::invalid_argument("invalid model: " + errors.front());

    AnalysisResult r;
    r.states = m.states;
    r.target = m.target;
    r.partition = state_partition(m);
    r.lower_prob = lower_hitting_probabilities(m, r.partition, settings);
    r.upper_prob = upper_hitting_probabilities(m, r.partition, settings);
    r.lower_time = lower_hitting_times(m, r.partition, settings);
    r.upper_time = upper_hitting_times(m, r.partition, settings);
    for (size_t x = 0; x < m.size(); ++x) {
        r.upper_prob[x] = std::max(r.upper_prob[x], r.lower_prob[x]);
        if (r.lower_time[x].is_finite() && r.upper_time[x].is_finite() &&
            r.upper_time[x].value() < r.lower_time[x].value())
            r.upper_time[x] = r.lower_time[x];
    }
    r.regions =
        classify_states(m, r.partition, r.lower_prob, r.upper_prob, r.lower_time, r.upper_time, &r.findings);
    return r;
}

} // namespace imchit
