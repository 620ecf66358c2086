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

#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace imchit {

/// Default numerical precision.
using prec_t = double;

/// Vector of numbers.
using numvec = std::vector<prec_t>;

/// Absolute tolerance accepted on probability mass sums. Decimal input
/// accumulates rounding of a few ulp per entry; anything beyond this
/// tolerance is a modeling error, not noise.
constexpr prec_t MASS_TOL = 1e-12;

/**
 * splitmix64 mixing step. Used to derive independent, reproducible RNG
 * streams from a user seed; the constants are the reference ones.
 */
inline uint64_t splitmix64(uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform double in [0,1) built from the top 53 bits of one engine draw.
template <class Engine> inline prec_t unit_double(Engine& eng) {
    return prec_t(eng() >> 11) * 0x1.0p-53;
}

/**
 * Thrown when a fixed-point iteration exhausts its iteration budget before
 * meeting its stopping rule. Carries a human-readable diagnostic; callers
 * must not treat the partial iterate as an answer.
 */
class iteration_limit_error : public std::runtime_error {
public:
    explicit iteration_limit_error(const std::string& message) : std::runtime_error(message) {}
};

/**
 * A nonnegative extended real: either a finite value or +infinity.
 *
 * Expected hitting times take values in [0,inf]; this type keeps the
 * distinction explicit instead of encoding infinity as a sentinel double.
 */
class ExtendedValue {
public:
    /// Finite zero.
    ExtendedValue() : value_(0.0), finite_(true) {}

    /// A finite nonnegative value; rejects negatives, NaN and IEEE infinities.
    static ExtendedValue finite(prec_t value) {
        if (!std::isfinite(value) || value < 0.0)
            throw std::invalid_argument("finite extended value must be a nonnegative real");
        return ExtendedValue(value, true);
    }

    /// The infinite element.
    static ExtendedValue infinity() { return ExtendedValue(0.0, false); }

    bool is_finite() const noexcept { return finite_; }

    /// The finite value; throws when called on the infinite element.
    prec_t value() const {
        if (!finite_) throw std::range_error("infinite extended value has no finite representation");
        return value_;
    }

    // Total order with infinity dominating all finite values.
    bool operator==(const ExtendedValue& o) const noexcept {
        return finite_ == o.finite_ && (!finite_ || value_ == o.value_);
    }
    bool operator!=(const ExtendedValue& o) const noexcept { return !(*this == o); }
    bool operator<(const ExtendedValue& o) const noexcept {
        if (!finite_) return false;
        if (!o.finite_) return true;
        return value_ < o.value_;
    }
    bool operator>(const ExtendedValue& o) const noexcept { return o < *this; }
    bool operator<=(const ExtendedValue& o) const noexcept { return !(o < *this); }
    bool operator>=(const ExtendedValue& o) const noexcept { return !(*this < o); }

private:
    ExtendedValue(prec_t value, bool finite) : value_(value), finite_(finite) {}

    prec_t value_;
    bool finite_;
};

inline std::ostream& operator<<(std::ostream& os, const ExtendedValue& v) {
    if (v.is_finite())
        os << v.value();
    else
        os << "inf";
    return os;
}

} // namespace imchit
