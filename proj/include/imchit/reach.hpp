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

#include <deque>

namespace imchit {

/**
 * Qualitative classification of the non-target states.
 *
 * The four sets decide exactly where the envelope quantities degenerate:
 * lower hitting probability is 0 exactly on `avoidable`, upper hitting
 * probability is 0 exactly on `unreachable`, the upper expected hitting
 * time is infinite exactly on `avoidable` plus `avoidable_exposure`, and
 * membership in `unreachable` plus `unreachable_exposure` forces the lower
 * expected hitting time to be infinite. The lower expected hitting time is
 * finite exactly on `almost_sure`.
 */
struct Partition {
    /// Non-target states from which some row selection makes the target
    /// unreachable: hitting can be avoided outright.
    stateset avoidable;
    /// Non-target states outside `avoidable` from which some selection
    /// reaches `avoidable` with positive probability, never crossing the
    /// target on the way.
    stateset avoidable_exposure;
    /// Non-target states from which no selection can reach the target.
    stateset unreachable;
    /// Non-target states outside `unreachable` from which every selection
    /// reaches `unreachable` with positive probability before the target.
    stateset unreachable_exposure;
    /// States from which some selection hits the target with probability
    /// one. Contains the target itself.
    stateset almost_sure;
};

namespace detail {

/// Whether the row set contains a distribution supported inside `allowed`.
inline bool row_realizable_within(const CredalRow& row, const std::vector<char>& allowed) {
    if (const auto* iv = std::get_if<IntervalRow>(&row)) {
        prec_t mass_available = 0.0;
        for (size_t y = 0; y < iv->lower.size(); ++y) {
            if (!allowed[y]) {
                // Lower bounds are exact decimals; any positive bound forces
                // mass outside the candidate support.
                if (iv->lower[y] > 0.0) return false;
            } else {
                mass_available += iv->upper[y];
            }
        }
        return mass_available >= 1.0 - MASS_TOL;
    }
    const auto& vr = std::get<VertexRow>(row);
    for (const auto& v : vr.vertices) {
        bool inside = true;
        for (size_t y = 0; y < v.size(); ++y)
            if (v[y] > 0.0 && !allowed[y]) {
                inside = false;
                break;
            }
        if (inside) return true;
    }
    return false;
}

/**
 * Destinations that receive positive mass under some distribution of the
 * row set supported inside `allowed`; empty when no such distribution
 * exists. For interval rows a destination is realizable unless the lower
 * bounds already spend the whole mass budget elsewhere.
 */
inline stateset realizable_edges_within(const CredalRow& row, const std::vector<char>& allowed) {
    stateset edges;
    if (!row_realizable_within(row, allowed)) return edges;
    if (const auto* iv = std::get_if<IntervalRow>(&row)) {
        prec_t sum_lower = 0.0;
        for (size_t y = 0; y < iv->lower.size(); ++y)
            if (allowed[y]) sum_lower += iv->lower[y];
        const bool frozen = sum_lower >= 1.0 - MASS_TOL;
        for (size_t y = 0; y < iv->lower.size(); ++y) {
            if (!allowed[y]) continue;
            if (frozen ? iv->lower[y] > 0.0 : iv->upper[y] > 0.0) edges.insert(y);
        }
        return edges;
    }
    const auto& vr = std::get<VertexRow>(row);
    for (const auto& v : vr.vertices) {
        bool inside = true;
        for (size_t y = 0; y < v.size(); ++y)
            if (v[y] > 0.0 && !allowed[y]) {
                inside = false;
                break;
            }
        if (!inside) continue;
        for (size_t y = 0; y < v.size(); ++y)
            if (v[y] > 0.0) edges.insert(y);
    }
    return edges;
}

/// Reverse closure of `seeds` under the adjacency, adding only states for
/// which `admit` returns true.
template <class Admit>
inline stateset backward_closure(const std::vector<stateset>& adj, const stateset& seeds, Admit admit) {
    std::vector<stateset> radj(adj.size());
    for (size_t x = 0; x < adj.size(); ++x)
        for (size_t y : adj[x]) radj[y].insert(x);
    stateset reached = seeds;
    std::deque<size_t> queue(seeds.begin(), seeds.end());
    while (!queue.empty()) {
        const size_t y = queue.front();
        queue.pop_front();
        for (size_t x : radj[y]) {
            if (reached.count(x) > 0 || !admit(x)) continue;
            reached.insert(x);
            queue.push_back(x);
        }
    }
    return reached;
}

} // namespace detail

/**
 * One-step possibility graph: edge (x,y) iff some distribution in row set x
 * puts positive mass on y. A strict convex mixture of the whole row set
 * realizes all edges of one row simultaneously, so a single transition
 * matrix witnesses any path in this graph.
 */
inline std::vector<stateset> possible_edges(const Model& m) {
    const std::vector<char> all(m.size(), 1);
    std::vector<stateset> adj(m.size());
    for (size_t x = 0; x < m.size(); ++x) adj[x] = detail::realizable_edges_within(m.rows[x], all);
    return adj;
}

/// Non-target states with no path to `target` in the possibility graph: the
/// target cannot be hit from them under any selection.
inline stateset unreachable_states(const Model& m, const stateset& target) {
    const auto adj = possible_edges(m);
    const auto reaching = detail::backward_closure(adj, target, [](size_t) { return true; });
    stateset out;
    for (size_t x = 0; x < m.size(); ++x)
        if (target.count(x) == 0 && reaching.count(x) == 0) out.insert(x);
    return out;
}

/**
 * Greatest set of non-target states that can trap the chain: every member
 * has a row distribution supported inside the set. Assembling one such
 * distribution per state yields a single matrix under which the target is
 * unreachable from anywhere in the set, and conversely any matrix that
 * avoids the target traps its reachable closure, so the fixpoint is exact.
 * Computed by deleting states without a trap row until stable; terminates
 * within |states| rounds.
 */
inline stateset avoidable_states(const Model& m, const stateset& target) {
    const size_t n = m.size();
    std::vector<char> candidate(n, 1);
    for (size_t s : target) candidate[s] = 0;

    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t x = 0; x < n; ++x) {
            if (!candidate[x]) continue;
            if (!detail::row_realizable_within(m.rows[x], candidate)) {
                candidate[x] = 0;
                changed = true;
            }
        }
    }
    stateset out;
    for (size_t x = 0; x < n; ++x)
        if (candidate[x]) out.insert(x);
    return out;
}

/**
 * Non-target states outside `avoidable` that may wander into it: reverse
 * reachability from `avoidable` in the possibility graph, expanding through
 * non-target states only. Paths crossing the target do not count, because
 * hitting is resolved at the first target visit.
 */
inline stateset avoidable_exposure_states(const Model& m, const stateset& target, const stateset& avoidable) {
    const auto adj = possible_edges(m);
    const auto reached =
        detail::backward_closure(adj, avoidable, [&](size_t x) { return target.count(x) == 0; });
    stateset out;
    for (size_t x : reached)
        if (avoidable.count(x) == 0) out.insert(x);
    return out;
}

/**
 * Non-target states outside `unreachable` from which every selection enters
 * `unreachable` with positive probability before the target. Computed as
 * the complement of the greatest trap avoiding `unreachable` in a modified
 * model whose target states are absorbing; absorbing the target encodes the
 * censoring at the first target visit.
 */
inline stateset unreachable_exposure_states(const Model& m, const stateset& target, const stateset& unreachable) {
    Model absorbed = m;
    for (size_t s : target) {
        numvec loop(m.size(), 0.0);
        loop[s] = 1.0;
        absorbed.rows[s] = VertexRow{{std::move(loop)}};
    }
    const stateset can_avoid = avoidable_states(absorbed, unreachable);
    stateset out;
    for (size_t x = 0; x < m.size(); ++x)
        if (target.count(x) == 0 && unreachable.count(x) == 0 && can_avoid.count(x) == 0) out.insert(x);
    return out;
}

/**
 * Greatest set S containing the target such that some selection keeps the
 * chain inside S while every state of S retains a path to the target
 * through distributions supported inside S. From any state of S that
 * selection hits the target with probability one, and conversely the
 * reachable closure of any almost-surely-hitting matrix survives every
 * round, so the fixpoint is exactly the set where the lower expected
 * hitting time is finite.
 */
inline stateset almost_sure_states(const Model& m, const stateset& target) {
    const size_t n = m.size();
    std::vector<char> safe(n, 1);

    while (true) {
        std::vector<stateset> adj(n);
        for (size_t x = 0; x < n; ++x)
            if (safe[x]) adj[x] = detail::realizable_edges_within(m.rows[x], safe);

        stateset seeds;
        for (size_t s : target)
            if (safe[s]) seeds.insert(s);
        const auto reaching = detail::backward_closure(adj, seeds, [&](size_t x) { return safe[x] != 0; });

        bool changed = false;
        for (size_t x = 0; x < n; ++x) {
            if (safe[x] && reaching.count(x) == 0) {
                safe[x] = 0;
                changed = true;
            }
        }
        if (!changed) break;
    }
    stateset out;
    for (size_t x = 0; x < n; ++x)
        if (safe[x]) out.insert(x);
    return out;
}

/**
 * Computes all five qualitative sets for the model's own target and checks
 * the structural inclusions between them. A violated inclusion cannot come
 * from input data and is reported as an internal error.
 */
inline Partition state_partition(const Model& m) {
    const stateset& target = m.target.members;
    Partition p;
    p.avoidable = avoidable_states(m, target);
    p.unreachable = unreachable_states(m, target);
    p.avoidable_exposure = avoidable_exposure_states(m, target, p.avoidable);
    p.unreachable_exposure = unreachable_exposure_states(m, target, p.unreachable);
    p.almost_sure = almost_sure_states(m, target);

    auto subset_of = [](const stateset& a, const stateset& b) {
        for (size_t x : a)
            if (b.count(x) == 0) return false;
        return true;
    };
    auto disjoint_from_target = [&](const stateset& s) {
        for (size_t x : s)
            if (target.count(x) > 0) return false;
        return true;
    };

    stateset divergent = p.avoidable;
    divergent.insert(p.avoidable_exposure.begin(), p.avoidable_exposure.end());
    stateset risky = p.unreachable;
    risky.insert(p.unreachable_exposure.begin(), p.unreachable_exposure.end());

    bool ok = subset_of(p.unreachable, p.avoidable) && subset_of(risky, divergent);
    ok = ok && disjoint_from_target(p.avoidable) && disjoint_from_target(p.avoidable_exposure) &&
         disjoint_from_target(p.unreachable) && disjoint_from_target(p.unreachable_exposure);
    for (size_t x : p.avoidable_exposure)
        if (p.avoidable.count(x) > 0) ok = false;
    for (size_t x : p.unreachable_exposure)
        if (p.unreachable.count(x) > 0) ok = false;
    ok = ok && subset_of(target, p.almost_sure);
    // States clear of the divergent sets hit under every selection, hence
    // surely under some selection.
    for (size_t x = 0; x < m.size(); ++x)
        if (target.count(x) == 0 && divergent.count(x) == 0 && p.almost_sure.count(x) == 0) ok = false;

    if (!ok) throw std::logic_error("internal error: partition invariant violated");
    return p;
}

} // namespace imchit
