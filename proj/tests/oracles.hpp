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

// Test-only oracles. Each one re-derives a quantity the library computes,
// by a deliberately different construction (relaxation loops instead of
// BFS, exhaustive bound patterns instead of greedy filling, long-horizon
// iteration instead of elimination), so agreement between the two is a
// meaningful check rather than a tautology.

#pragma once

#include "imchit/model.hpp"
#include "imchit/precise.hpp"

#include <algorithm>
#include <vector>

namespace oracles {

using namespace imchit;

/// All vertices of { p : l <= p <= u, sum p = 1 }: every lower/upper bound
/// pattern, with each coordinate in turn repaired to absorb the residual.
inline std::vector<numvec> box_simplex_vertices(const IntervalRow& row) {
    const size_t n = row.lower.size();
    std::vector<numvec> out;
    for (size_t pattern = 0; pattern < (size_t{1} << n); ++pattern) {
        for (size_t pivot = 0; pivot < n; ++pivot) {
            numvec p(n);
            long double rest = 1.0L;
            for (size_t y = 0; y < n; ++y) {
                p[y] = ((pattern >> y) & 1) != 0 ? row.upper[y] : row.lower[y];
                if (y != pivot) rest -= p[y];
            }
            if (rest < static_cast<long double>(row.lower[pivot]) - 1e-12L ||
                rest > static_cast<long double>(row.upper[pivot]) + 1e-12L)
                continue;
            p[pivot] = std::min(row.upper[pivot], std::max(row.lower[pivot], static_cast<prec_t>(rest)));
            out.push_back(p);
        }
    }
    return out;
}

/// Extreme of dot(p, f) over the interval row by exhaustive vertex
/// enumeration with long double accumulation.
inline prec_t envelope_by_enumeration(const IntervalRow& row, const numvec& f, bool maximize) {
    long double best = maximize ? -1e300L : 1e300L;
    for (const auto& v : box_simplex_vertices(row)) {
        long double acc = 0.0L;
        for (size_t y = 0; y < f.size(); ++y) acc += static_cast<long double>(v[y]) * f[y];
        if (maximize ? acc > best : acc < best) best = acc;
    }
    return static_cast<prec_t>(best);
}

/// Random distribution inside the interval row: lower bounds plus randomly
/// spread leftover mass, finished deterministically so the result is always
/// feasible.
template <class Engine>
inline numvec random_feasible(const IntervalRow& row, Engine& eng) {
    const size_t n = row.lower.size();
    numvec p = row.lower;
    prec_t budget = 1.0;
    for (const prec_t v : p) budget -= v;
    for (size_t attempt = 0; attempt < 64 && budget > 1e-12; ++attempt) {
        const size_t y = static_cast<size_t>(eng() % n);
        const prec_t add = std::min(row.upper[y] - p[y], budget * unit_double(eng));
        if (add > 0) {
            p[y] += add;
            budget -= add;
        }
    }
    for (size_t y = 0; y < n && budget > 0; ++y) {
        const prec_t add = std::min(row.upper[y] - p[y], budget);
        if (add > 0) {
            p[y] += add;
            budget -= add;
        }
    }
    return p;
}

/// Minimal nonnegative solution of the hitting-probability system by
/// long-horizon iteration from zero (no elimination).
inline numvec iterative_hitting_probabilities(const StochasticMatrix& T, const TargetSet& target,
                                              size_t sweeps = 400000, prec_t tol = 1e-14) {
    const size_t n = T.size();
    numvec p(n, 0.0);
    for (const size_t s : target.members) p[s] = 1.0;
    numvec next = p;
    for (size_t k = 0; k < sweeps; ++k) {
        prec_t step = 0.0;
        for (size_t x = 0; x < n; ++x) {
            if (target.contains(x)) continue;
            prec_t acc = 0.0;
            for (size_t y = 0; y < n; ++y) acc += T.entries[x][y] * p[y];
            step = std::max(step, acc - next[x]);
            next[x] = acc;
        }
        p = next;
        if (step < tol) break;
    }
    return p;
}

/// States from which the matrix surely hits the target, by fixed-round
/// relaxation sweeps over the dense matrix (no graph structures).
inline std::vector<char> surely_hits(const StochasticMatrix& T, const TargetSet& target) {
    const size_t n = T.size();
    std::vector<char> reach(n, 0);
    for (const size_t s : target.members) reach[s] = 1;
    for (size_t round = 0; round < n; ++round)
        for (size_t x = 0; x < n; ++x) {
            if (reach[x]) continue;
            for (size_t y = 0; y < n; ++y)
                if (T.entries[x][y] > 0 && reach[y]) {
                    reach[x] = 1;
                    break;
                }
        }
    std::vector<char> risk(n, 0);
    for (size_t x = 0; x < n; ++x) risk[x] = reach[x] ? 0 : 1;
    for (size_t round = 0; round < n; ++round)
        for (size_t x = 0; x < n; ++x) {
            if (risk[x] || target.contains(x)) continue;
            for (size_t y = 0; y < n; ++y)
                if (T.entries[x][y] > 0 && risk[y]) {
                    risk[x] = 1;
                    break;
                }
        }
    std::vector<char> sure(n, 0);
    for (size_t x = 0; x < n; ++x) sure[x] = risk[x] ? 0 : 1;
    return sure;
}

/// Expected hitting times on the surely-hitting block by long-horizon
/// iteration from zero; entries off the block are meaningless zeros.
inline numvec iterative_hitting_times(const StochasticMatrix& T, const TargetSet& target,
                                      size_t sweeps = 400000, prec_t tol = 1e-12) {
    const size_t n = T.size();
    const auto sure = surely_hits(T, target);
    numvec h(n, 0.0);
    numvec next = h;
    for (size_t k = 0; k < sweeps; ++k) {
        prec_t step = 0.0;
        for (size_t x = 0; x < n; ++x) {
            if (!sure[x] || target.contains(x)) continue;
            prec_t acc = 1.0;
            for (size_t y = 0; y < n; ++y) acc += T.entries[x][y] * h[y];
            step = std::max(step, acc - next[x]);
            next[x] = acc;
        }
        h = next;
        if (step < tol) break;
    }
    return h;
}

/// Whether the support graph of T admits a path from x into the target
/// set, again by relaxation.
inline bool can_reach(const StochasticMatrix& T, const TargetSet& target, size_t x) {
    const size_t n = T.size();
    std::vector<char> reach(n, 0);
    for (const size_t s : target.members) reach[s] = 1;
    for (size_t round = 0; round < n; ++round)
        for (size_t z = 0; z < n; ++z) {
            if (reach[z]) continue;
            for (size_t y = 0; y < n; ++y)
                if (T.entries[z][y] > 0 && reach[y]) {
                    reach[z] = 1;
                    break;
                }
        }
    return reach[x] != 0;
}

} // namespace oracles
