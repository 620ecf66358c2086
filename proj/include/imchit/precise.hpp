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
#include <random>

namespace imchit {

/// Monte Carlo summary of first-visit times of the target set.
struct SimulationEstimate {
    /// Fraction of runs that reached the target within the horizon cap.
    prec_t hit_fraction;
    /// Mean first-visit time over the hitting runs only; the infinite
    /// element when no run hit.
    ExtendedValue mean_time_given_hit;
    size_t runs;
    size_t horizon_cap;
    /// Runs that exhausted the horizon without hitting. Kept separate and
    /// never folded into the mean.
    size_t censored_runs;
};

namespace detail {

/// Support-graph successors: edges (x,y) with T(x,y) > 0.
inline std::vector<stateset> support_graph(const StochasticMatrix& T) {
    std::vector<stateset> adj(T.size());
    for (size_t x = 0; x < T.size(); ++x)
        for (size_t y = 0; y < T.size(); ++y)
            if (T.entries[x][y] > 0.0) adj[x].insert(y);
    return adj;
}

/// States with a path into `seeds` (including the seeds), optionally
/// restricted to paths whose non-seed states avoid `blocked`.
inline stateset states_reaching(const std::vector<stateset>& adj, const stateset& seeds,
                                const stateset* blocked = nullptr) {
    const size_t n = adj.size();
    std::vector<stateset> radj(n);
    for (size_t x = 0; x < n; ++x)
        for (size_t y : adj[x]) radj[y].insert(x);

    stateset reached = seeds;
    std::deque<size_t> queue(seeds.begin(), seeds.end());
    while (!queue.empty()) {
        const size_t y = queue.front();
        queue.pop_front();
        for (size_t x : radj[y]) {
            if (reached.count(x) > 0) continue;
            if (blocked != nullptr && blocked->count(x) > 0) continue;
            reached.insert(x);
            queue.push_back(x);
        }
    }
    return reached;
}

/**
 * Solves A x = b by Gaussian elimination with partial pivoting. The systems
 * solved here are strictly diagonally dominated after elimination of
 * transient blocks; a vanishing pivot therefore signals a bug upstream.
 */
inline numvec solve_linear(std::vector<numvec> A, numvec b) {
    const size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
        if (std::abs(A[pivot][col]) < 1e-14)
            throw std::logic_error("internal error: singular linear system in hitting solver");
        std::swap(A[col], A[pivot]);
        std::swap(b[col], b[pivot]);
        for (size_t r = col + 1; r < n; ++r) {
            const prec_t factor = A[r][col] / A[col][col];
            if (factor == 0.0) continue;
            for (size_t c = col; c < n; ++c) A[r][c] -= factor * A[col][c];
            b[r] -= factor * b[col];
        }
    }
    numvec x(n);
    for (size_t ri = n; ri-- > 0;) {
        prec_t acc = b[ri];
        for (size_t c = ri + 1; c < n; ++c) acc -= A[ri][c] * x[c];
        x[ri] = acc / A[ri][ri];
    }
    return x;
}

} // namespace detail

/// States reachable from `from` along positive-probability edges, including
/// `from` itself.
inline stateset reachable_states(const StochasticMatrix& T, const stateset& from) {
    const auto adj = detail::support_graph(T);
    stateset reached = from;
    std::deque<size_t> queue(from.begin(), from.end());
    while (!queue.empty()) {
        const size_t x = queue.front();
        queue.pop_front();
        for (size_t y : adj[x]) {
            if (reached.insert(y).second) queue.push_back(y);
        }
    }
    return reached;
}

/**
 * States whose hitting probability of the target equals one, decided on the
 * support graph alone. The hitting probability is below one exactly when a
 * target-avoiding path leads to some state that cannot reach the target at
 * all, so the answer is exact regardless of the entry magnitudes.
 */
inline stateset sure_hitting_states(const StochasticMatrix& T, const TargetSet& target) {
    const size_t n = T.size();
    const auto adj = detail::support_graph(T);
    const stateset reaching = detail::states_reaching(adj, target.members);
    stateset dead; // cannot reach the target at all
    for (size_t x = 0; x < n; ++x)
        if (reaching.count(x) == 0) dead.insert(x);
    // Escapes are censored at the target: a path through the target never
    // lowers the hitting probability.
    const stateset at_risk = detail::states_reaching(adj, dead, &target.members);
    stateset sure;
    for (size_t x = 0; x < n; ++x)
        if (at_risk.count(x) == 0) sure.insert(x);
    return sure;
}

/**
 * Minimal nonnegative solution of the hitting-probability system: p = 1 on
 * the target, p(x) = sum_y T(x,y) p(y) elsewhere. States that cannot reach
 * the target are pinned to zero, which selects the minimal solution; the
 * remaining block leaves itself with positive probability, so its linear
 * system is uniquely solvable.
 */
inline numvec hitting_probabilities(const StochasticMatrix& T, const TargetSet& target) {
    const size_t n = T.size();
    for (size_t s : target.members)
        if (s >= n) throw std::invalid_argument("hitting_probabilities: target state out of range");

    const auto adj = detail::support_graph(T);
    const stateset reaching = detail::states_reaching(adj, target.members);

    numvec p(n, 0.0);
    for (size_t s : target.members) p[s] = 1.0;

    std::vector<size_t> block; // reaching states outside the target
    for (size_t x : reaching)
        if (!target.contains(x)) block.push_back(x);
    if (block.empty()) return p;

    std::vector<size_t> pos(n, size_t(-1));
    for (size_t i = 0; i < block.size(); ++i) pos[block[i]] = i;

    std::vector<numvec> A(block.size(), numvec(block.size(), 0.0));
    numvec b(block.size(), 0.0);
    for (size_t i = 0; i < block.size(); ++i) {
        const size_t x = block[i];
        for (size_t y = 0; y < n; ++y) {
            const prec_t t = T.entries[x][y];
            if (t == 0.0) continue;
            if (target.contains(y))
                b[i] += t;
            else if (pos[y] != size_t(-1))
                A[i][pos[y]] -= t;
            // mass into states that cannot reach the target contributes zero
        }
        A[i][i] += 1.0;
    }
    const numvec solution = detail::solve_linear(std::move(A), std::move(b));
    for (size_t i = 0; i < block.size(); ++i) p[block[i]] = solution[i];
    return p;
}

/**
 * Minimal nonnegative solution of the expected-hitting-time system: h = 0 on
 * the target, h(x) = 1 + sum_y T(x,y) h(y) elsewhere; infinite exactly where
 * the hitting probability is below one. Finiteness is decided on the support
 * graph, so no tolerance enters the infinite/finite split.
 */
inline std::vector<ExtendedValue> expected_hitting_times(const StochasticMatrix& T, const TargetSet& target) {
    const size_t n = T.size();
    for (size_t s : target.members)
        if (s >= n) throw std::invalid_argument("expected_hitting_times: target state out of range");

    const stateset sure = sure_hitting_states(T, target);

    std::vector<ExtendedValue> h(n, ExtendedValue::infinity());
    for (size_t s : target.members) h[s] = ExtendedValue::finite(0.0);

    std::vector<size_t> block; // sure states outside the target
    for (size_t x : sure)
        if (!target.contains(x)) block.push_back(x);
    if (block.empty()) return h;

    std::vector<size_t> pos(n, size_t(-1));
    for (size_t i = 0; i < block.size(); ++i) pos[block[i]] = i;

    std::vector<numvec> A(block.size(), numvec(block.size(), 0.0));
    numvec b(block.size(), 1.0);
    for (size_t i = 0; i < block.size(); ++i) {
        const size_t x = block[i];
        for (size_t y = 0; y < n; ++y) {
            const prec_t t = T.entries[x][y];
            if (t == 0.0) continue;
            if (target.contains(y)) continue;
            if (pos[y] == size_t(-1))
                throw std::logic_error("internal error: finite-time block is not closed");
            A[i][pos[y]] -= t;
        }
        A[i][i] += 1.0;
    }
    const numvec solution = detail::solve_linear(std::move(A), std::move(b));
    for (size_t i = 0; i < block.size(); ++i) h[block[i]] = ExtendedValue::finite(solution[i]);
    return h;
}

/**
 * Monte Carlo estimate of the first-visit time of the target from `start`.
 * Each run draws an independent stream derived from (seed, run index), so
 * the estimate is reproducible for a fixed seed and runs may be reordered
 * or parallelized without changing the result.
 */
inline SimulationEstimate simulate_chain(const StochasticMatrix& T, const TargetSet& target, size_t start,
                                         size_t runs, size_t cap, uint64_t seed) {
    const size_t n = T.size();
    if (runs < 1 || cap < 1) throw std::invalid_argument("simulate_chain: runs and cap must be at least 1");
    if (start >= n) throw std::invalid_argument("simulate_chain: start state out of range");

    const uint64_t stream_base = splitmix64(seed);
    size_t hits = 0;
    prec_t total_time = 0.0;
    for (size_t run = 0; run < runs; ++run) {
        std::mt19937_64 eng(splitmix64(stream_base + run));
        size_t x = start;
        for (size_t t = 0;; ++t) {
            if (target.contains(x)) {
                ++hits;
                total_time += prec_t(t);
                break;
            }
            if (t == cap) break;
            const prec_t u = unit_double(eng);
            prec_t cum = 0.0;
            size_t next = x;
            for (size_t y = 0; y < n; ++y) {
                const prec_t mass = T.entries[x][y];
                if (mass <= 0.0) continue;
                cum += mass;
                next = y;
                if (u < cum) break;
            }
            x = next;
        }
    }
    SimulationEstimate est;
    est.runs = runs;
    est.horizon_cap = cap;
    est.censored_runs = runs - hits;
    est.hit_fraction = prec_t(hits) / prec_t(runs);
    est.mean_time_given_hit = hits > 0 ? ExtendedValue::finite(total_time / prec_t(hits)) : ExtendedValue::infinity();
    return est;
}

} // namespace imchit
