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

#include "imchit/definitions.hpp"

#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <variant>

namespace imchit {

/// Set of state indices. Ordered so that iteration order is deterministic.
using stateset = std::set<size_t>;

/**
 * Finite ordered state space. States are addressed by 0-based index
 * internally; labels are only used at the input/output boundary.
 */
struct StateSpace {
    /// Distinct state identifiers; position defines the state index.
    std::vector<std::string> labels;

    size_t size() const noexcept { return labels.size(); }

    /// Index of a label; throws std::invalid_argument for unknown labels.
    size_t index_of(const std::string& label) const {
        for (size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return i;
        throw std::invalid_argument("unknown state label \"" + label + "\"");
    }

    bool has_label(const std::string& label) const noexcept {
        for (const auto& l : labels)
            if (l == label) return true;
        return false;
    }
};

/// Nonempty set of states whose first visit is being timed.
struct TargetSet {
    stateset members;

    bool contains(size_t state) const noexcept { return members.count(state) > 0; }
    size_t size() const noexcept { return members.size(); }
};

/// Row-stochastic transition matrix of a single chain.
struct StochasticMatrix {
    /// entries[x][y] is the mass moving from state x to state y.
    std::vector<numvec> entries;

    size_t size() const noexcept { return entries.size(); }
    const numvec& row(size_t x) const { return entries[x]; }
};

/**
 * Per-destination bounds on one transition row: the row set is
 * { p : lower <= p <= upper, sum(p) = 1 }. Nonempty iff
 * sum(lower) <= 1 <= sum(upper) and lower <= upper componentwise.
 */
struct IntervalRow {
    numvec lower;
    numvec upper;
};

/// One transition row given by the extreme points of its set.
struct VertexRow {
    std::vector<numvec> vertices;
};

/// A transition row set in either representation.
using CredalRow = std::variant<IntervalRow, VertexRow>;

/**
 * A Markov chain with set-valued transition rows. Rows are specified
 * separately per state, so the induced set of transition matrices is the
 * row-wise product of the per-state row sets: nonempty, compact and convex
 * whenever every row set is.
 */
struct Model {
    StateSpace states;
    TargetSet target;
    /// One row set per state, in state order. Rows of target states are
    /// carried but ignored by all solvers.
    std::vector<CredalRow> rows;

    size_t size() const noexcept { return states.size(); }
};

namespace detail {

inline std::string format_index(size_t i) { return std::to_string(i); }

inline prec_t sum(const numvec& v) { return std::accumulate(v.begin(), v.end(), prec_t(0)); }

} // namespace detail

/**
 * Checks every structural invariant of a model and returns one description
 * per violation; an empty result means the model is valid. Violations are
 * data, not failures: no exception is thrown for bad values.
 */
inline std::vector<std::string> validate_model(const Model& m) {
    std::vector<std::string> out;
    const size_t n = m.states.size();

    if (n == 0) out.push_back("states: state space is empty");
    std::set<std::string> seen;
    for (const auto& label : m.states.labels)
        if (!seen.insert(label).second) out.push_back("states: duplicate state label \"" + label + "\"");

    if (m.target.members.empty()) out.push_back("target must be nonempty");
    for (size_t s : m.target.members)
        if (s >= n) out.push_back("target: state index " + detail::format_index(s) + " out of range");

    if (m.rows.size() != n) {
        out.push_back("rows: expected " + detail::format_index(n) + " rows, got " +
                      detail::format_index(m.rows.size()));
        return out; // per-row checks below assume one row per state
    }

    for (size_t x = 0; x < n; ++x) {
        const std::string where = "row \"" + (x < n ? m.states.labels[x] : detail::format_index(x)) + "\"";
        if (const auto* iv = std::get_if<IntervalRow>(&m.rows[x])) {
            if (iv->lower.size() != n || iv->upper.size() != n) {
                out.push_back(where + ": bound vectors must have one entry per state");
                continue;
            }
            for (size_t y = 0; y < n; ++y) {
                if (!(iv->lower[y] >= 0.0))
                    out.push_back(where + ": lower bound " + detail::format_index(y) + " is negative");
                if (!(iv->upper[y] <= 1.0))
                    out.push_back(where + ": upper bound " + detail::format_index(y) + " exceeds 1");
                if (!(iv->lower[y] <= iv->upper[y]))
                    out.push_back(where + ": lower bound " + detail::format_index(y) + " exceeds its upper bound");
            }
            const prec_t suml = detail::sum(iv->lower), sumu = detail::sum(iv->upper);
            if (!(suml <= 1.0 + MASS_TOL))
                out.push_back(where + ": sum of lower bounds > 1 (empty row polytope)");
            if (!(sumu >= 1.0 - MASS_TOL))
                out.push_back(where + ": sum of upper bounds < 1 (empty row polytope)");
        } else {
            const auto& vr = std::get<VertexRow>(m.rows[x]);
            if (vr.vertices.empty()) {
                out.push_back(where + ": no vertices");
                continue;
            }
            for (size_t k = 0; k < vr.vertices.size(); ++k) {
                const auto& v = vr.vertices[k];
                const std::string vwhere = where + " vertex " + detail::format_index(k);
                if (v.size() != n) {
                    out.push_back(vwhere + ": must have one entry per state");
                    continue;
                }
                bool in_range = true;
                for (prec_t e : v)
                    if (!(e >= 0.0 && e <= 1.0)) in_range = false;
                if (!in_range) out.push_back(vwhere + ": entries outside [0,1]");
                const prec_t mass = detail::sum(v);
                if (!(std::abs(mass - 1.0) <= MASS_TOL)) {
                    std::ostringstream msg;
                    msg.precision(17);
                    msg << vwhere << ": mass " << mass << " outside [1-1e-12, 1+1e-12]";
                    out.push_back(msg.str());
                }
            }
        }
    }
    return out;
}

/// Checks that a matrix is row-stochastic; same reporting style as
/// validate_model.
inline std::vector<std::string> validate_matrix(const StochasticMatrix& T) {
    std::vector<std::string> out;
    const size_t n = T.size();
    if (n == 0) out.push_back("matrix is empty");
    for (size_t x = 0; x < n; ++x) {
        if (T.entries[x].size() != n) {
            out.push_back("row " + detail::format_index(x) + ": wrong length");
            continue;
        }
        for (prec_t e : T.entries[x])
            if (!(e >= 0.0 && e <= 1.0)) {
                out.push_back("row " + detail::format_index(x) + ": entries outside [0,1]");
                break;
            }
        if (!(std::abs(detail::sum(T.entries[x]) - 1.0) <= MASS_TOL))
            out.push_back("row " + detail::format_index(x) + ": mass outside [1-1e-12, 1+1e-12]");
    }
    return out;
}

/// Builds the model whose every row set is the single distribution given by
/// the matrix row. Keeps labels "1".."n".
inline Model point_model(const StochasticMatrix& T, const TargetSet& target) {
    Model m;
    for (size_t i = 0; i < T.size(); ++i) m.states.labels.push_back(std::to_string(i + 1));
    m.target = target;
    for (size_t x = 0; x < T.size(); ++x) m.rows.push_back(VertexRow{{T.entries[x]}});
    return m;
}

/// True when every row set is a single distribution.
inline bool is_point_model(const Model& m) {
    for (const auto& row : m.rows) {
        const auto* vr = std::get_if<VertexRow>(&row);
        if (vr != nullptr) {
            if (vr->vertices.size() != 1) return false;
            continue;
        }
        const auto& iv = std::get<IntervalRow>(row);
        for (size_t y = 0; y < iv.lower.size(); ++y)
            if (iv.lower[y] != iv.upper[y]) return false;
    }
    return true;
}

/// The single matrix of a point model; throws std::invalid_argument when
/// some row set contains more than one distribution.
inline StochasticMatrix to_matrix(const Model& m) {
    if (!is_point_model(m))
        throw std::invalid_argument("model rows are set-valued; no single transition matrix exists");
    StochasticMatrix T;
    for (const auto& row : m.rows) {
        if (const auto* vr = std::get_if<VertexRow>(&row))
            T.entries.push_back(vr->vertices.front());
        else
            T.entries.push_back(std::get<IntervalRow>(row).lower);
    }
    return T;
}

/// Resolves a list of state labels into a target set.
inline TargetSet target_from_labels(const StateSpace& states, const std::vector<std::string>& labels) {
    TargetSet t;
    for (const auto& label : labels) t.members.insert(states.index_of(label));
    return t;
}

} // namespace imchit
