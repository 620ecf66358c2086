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

#include <algorithm>

namespace imchit {

/**
 * Optimum of one row envelope together with a distribution from the row set
 * that attains it.
 */
struct EnvelopeWitness {
    prec_t value;
    numvec distribution;
};

/// output[x] = sum_y T(x,y) f(y). Throws std::invalid_argument on dimension
/// mismatch.
inline numvec apply_matrix(const StochasticMatrix& T, const numvec& f) {
    const size_t n = T.size();
    if (f.size() != n) throw std::invalid_argument("apply_matrix: dimension mismatch");
    numvec out(n, 0.0);
    for (size_t x = 0; x < n; ++x) {
        if (T.entries[x].size() != n) throw std::invalid_argument("apply_matrix: dimension mismatch");
        prec_t acc = 0.0;
        for (size_t y = 0; y < n; ++y) acc += T.entries[x][y] * f[y];
        out[x] = acc;
    }
    return out;
}

namespace detail {

/// Dot product accumulated in index order; the fixed order makes
/// upper(f) == -lower(-f) hold bitwise (IEEE addition is sign-symmetric).
inline prec_t dot(const numvec& p, const numvec& f) {
    prec_t acc = 0.0;
    for (size_t i = 0; i < p.size(); ++i) acc += p[i] * f[i];
    return acc;
}

/**
 * Greedy optimum of dot(p, f) over an interval row, optionally restricted to
 * distributions supported inside `allowed`.
 *
 * Destinations are processed in ascending f order for the minimum and
 * descending f order for the maximum, ties broken by ascending state index.
 * The optimum saturates upper bounds up to a pivot destination and lower
 * bounds past it. Only the pivot entry is computed by subtraction; every
 * other entry is a verbatim copy of its bound, so clean inputs give clean
 * outputs and nothing spills onto later destinations.
 */
inline EnvelopeWitness interval_envelope(const IntervalRow& row, const numvec& f, bool maximize,
                                         const std::vector<char>* allowed) {
    const size_t n = row.lower.size();
    if (row.upper.size() != n || f.size() != n)
        throw std::invalid_argument("row envelope: dimension mismatch");

    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (f[a] != f[b]) return maximize ? f[a] > f[b] : f[a] < f[b];
        return a < b;
    });

    numvec p(n, 0.0);
    for (size_t y = 0; y < n; ++y) {
        if (allowed != nullptr && !(*allowed)[y]) {
            // Masked destinations must be avoidable: forced mass there means
            // the caller's restriction is inconsistent with the row.
            if (row.lower[y] > 0.0)
                throw std::logic_error("internal error: masked destination carries a positive lower bound");
        } else {
            p[y] = row.lower[y];
        }
    }

    // suffix_low[i] = sum of lower bounds of the destinations still waiting
    // after position i of the processing order.
    numvec suffix_low(n + 1, 0.0);
    for (size_t i = n; i-- > 0;) {
        const size_t y = order[i];
        const bool masked = allowed != nullptr && !(*allowed)[y];
        suffix_low[i] = suffix_low[i + 1] + (masked ? 0.0 : row.lower[y]);
    }

    prec_t mass = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const size_t y = order[i];
        if (allowed != nullptr && !(*allowed)[y]) continue;
        // Mass available for y once everyone later gets at least its lower
        // bound; clamping makes this the upper bound before the pivot and
        // the lower bound after it.
        const prec_t room = 1.0 - mass - suffix_low[i + 1];
        p[y] = std::min(row.upper[y], std::max(row.lower[y], room));
        mass += p[y];
    }
    if (std::abs(mass - 1.0) > 1e-9)
        throw std::logic_error("internal error: row admits no distribution within the allowed support");

    return {dot(p, f), std::move(p)};
}

/// Optimum of dot(v, f) over the vertices of a vertex row, optionally over
/// vertices supported inside `allowed` only.
inline EnvelopeWitness vertex_envelope(const VertexRow& row, const numvec& f, bool maximize,
                                       const std::vector<char>* allowed) {
    if (row.vertices.empty()) throw std::invalid_argument("row envelope: row has no vertices");
    const numvec* best = nullptr;
    prec_t best_value = 0.0;
    for (const auto& v : row.vertices) {
        if (v.size() != f.size()) throw std::invalid_argument("row envelope: dimension mismatch");
        if (allowed != nullptr) {
            bool admissible = true;
            for (size_t y = 0; y < v.size(); ++y)
                if (v[y] > 0.0 && !(*allowed)[y]) {
                    admissible = false;
                    break;
                }
            if (!admissible) continue;
        }
        const prec_t value = dot(v, f);
        // Strict comparison keeps the first vertex among ties, which makes
        // the min/max pair agree under negation of f.
        if (best == nullptr || (maximize ? value > best_value : value < best_value)) {
            best = &v;
            best_value = value;
        }
    }
    if (best == nullptr)
        throw std::logic_error("internal error: no vertex lies within the allowed support");
    return {best_value, *best};
}

inline EnvelopeWitness row_envelope(const CredalRow& row, const numvec& f, bool maximize,
                                    const std::vector<char>* allowed) {
    if (const auto* iv = std::get_if<IntervalRow>(&row)) return interval_envelope(*iv, f, maximize, allowed);
    return vertex_envelope(std::get<VertexRow>(row), f, maximize, allowed);
}

} // namespace detail

/// Minimum of dot(p, f) over the row set, with an attaining distribution.
inline EnvelopeWitness lower_row_envelope(const CredalRow& row, const numvec& f) {
    return detail::row_envelope(row, f, false, nullptr);
}

/// Maximum of dot(p, f) over the row set, with an attaining distribution.
/// Equals -lower_row_envelope(row, -f).value exactly.
inline EnvelopeWitness upper_row_envelope(const CredalRow& row, const numvec& f) {
    return detail::row_envelope(row, f, true, nullptr);
}

/**
 * Minimum of dot(p, f) restricted to distributions in the row set that put
 * no mass outside `allowed`. The caller must guarantee such distributions
 * exist; a violation is an internal error, not bad input.
 */
inline EnvelopeWitness lower_row_envelope_within(const CredalRow& row, const numvec& f,
                                                 const std::vector<char>& allowed) {
    return detail::row_envelope(row, f, false, &allowed);
}

/// Statewise lower envelope: output[x] = min over row set x of dot(p, f).
/// Rows are specified separately, so the statewise minimum is jointly
/// attainable by a single transition matrix.
inline numvec lower_transition(const Model& m, const numvec& f) {
    if (f.size() != m.size()) throw std::invalid_argument("lower_transition: dimension mismatch");
    numvec out(m.size());
    for (size_t x = 0; x < m.size(); ++x) out[x] = lower_row_envelope(m.rows[x], f).value;
    return out;
}

/// Statewise upper envelope; mirror of lower_transition.
inline numvec upper_transition(const Model& m, const numvec& f) {
    if (f.size() != m.size()) throw std::invalid_argument("upper_transition: dimension mismatch");
    numvec out(m.size());
    for (size_t x = 0; x < m.size(); ++x) out[x] = upper_row_envelope(m.rows[x], f).value;
    return out;
}

/**
 * Exact extreme points of an interval row { p : l <= p <= u, sum(p) = 1 }.
 *
 * Every extreme point has at most one coordinate strictly between its
 * bounds, so enumerating (pivot, bound pattern) pairs and keeping the
 * feasible ones is complete. Guarded to rows with at most 12 destinations;
 * throws std::range_error beyond that.
 */
inline std::vector<numvec> interval_row_vertices(const IntervalRow& row) {
    const size_t n = row.lower.size();
    if (row.upper.size() != n) throw std::invalid_argument("interval_row_vertices: dimension mismatch");
    if (n > 12) throw std::range_error("interval_row_vertices: rows with more than 12 destinations are not supported");
    if (n == 0) return {};

    constexpr prec_t feas_tol = 1e-9;
    std::vector<numvec> points;
    for (size_t pivot = 0; pivot < n; ++pivot) {
        const size_t patterns = size_t(1) << (n - 1);
        for (size_t bits = 0; bits < patterns; ++bits) {
            numvec p(n);
            prec_t rest = 0.0;
            size_t bit = 0;
            for (size_t y = 0; y < n; ++y) {
                if (y == pivot) continue;
                p[y] = ((bits >> bit) & 1u) != 0 ? row.upper[y] : row.lower[y];
                rest += p[y];
                ++bit;
            }
            const prec_t residual = 1.0 - rest;
            if (residual < row.lower[pivot] - feas_tol || residual > row.upper[pivot] + feas_tol) continue;
            p[pivot] = std::clamp(residual, row.lower[pivot], row.upper[pivot]);
            points.push_back(std::move(p));
        }
    }

    std::sort(points.begin(), points.end());
    std::vector<numvec> unique_points;
    for (auto& p : points) {
        if (!unique_points.empty()) {
            bool same = true;
            for (size_t y = 0; y < n; ++y)
                if (std::abs(p[y] - unique_points.back()[y]) > feas_tol) {
                    same = false;
                    break;
                }
            if (same) continue;
        }
        unique_points.push_back(std::move(p));
    }
    return unique_points;
}

} // namespace imchit
