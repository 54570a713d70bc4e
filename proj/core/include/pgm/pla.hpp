// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pgm/detail/segment_fitter.hpp"
#include "pgm/error.hpp"

namespace pgm {

/// One input point: a key and its rank in the sorted array.
struct KeyPoint {
    uint64_t key;
    uint64_t position;
};

/// A key point with its own vertical tolerance.
struct RangedPoint {
    KeyPoint point;
    uint64_t tolerance;
};

/// Open interval of slopes under which a segment stays within tolerance.
struct SlopeRange {
    double lo;
    double hi;
};

/// One linear model. The prediction for a key k >= first_key is
/// floor((k - first_key) * slope + intercept), clamped by the caller.
struct Segment {
    uint64_t first_key;
    double slope;
    double intercept;
    SlopeRange slope_range;
    uint64_t covered_count;  // distinct keys covered
};

/// An ordered sequence of tolerance-respecting segments over a key range.
struct PlaModel {
    std::vector<Segment> segments;
    uint64_t epsilon;    // uniform epsilon, or the max tolerance of a ranged build
    uint64_t key_count;  // length n of the input sequence, duplicates included

    size_t size() const { return segments.size(); }

    /// Index of the rightmost segment whose first_key is <= key, or 0 when
    /// key precedes every segment.
    size_t segment_for_key(uint64_t key) const {
        auto it = std::upper_bound(segments.begin(), segments.end(), key,
                                   [](uint64_t k, const Segment& s) { return k < s.first_key; });
        return it == segments.begin() ? 0 : size_t(it - segments.begin()) - 1;
    }
};

/// Floored prediction of a segment, clamped into [0, n-1].
inline uint64_t segment_predict(const Segment& s, uint64_t key, uint64_t n) {
    uint64_t dx = key >= s.first_key ? key - s.first_key : 0;
    double v = double(dx) * s.slope + s.intercept;
    double f = std::floor(v);
    if (!(f > 0))
        return 0;
    uint64_t p = f >= 18446744073709551615.0 ? n - 1 : uint64_t(f);
    return p >= n ? n - 1 : p;
}

namespace detail {

inline Segment to_segment(const FittedStripe& fs) {
    return Segment{fs.first_key, fs.slope, fs.intercept, {fs.slope_lo, fs.slope_hi}, fs.covered};
}

/// Streaming driver shared by all builders. Source is a callable returning
/// std::optional<RangedPoint>; points are consumed exactly once, duplicate
/// keys collapse to their first occurrence.
template <typename Source>
PlaModel build_pla_stream(Source&& next) {
    SegmentFitter fitter;
    PlaModel model;
    uint64_t count = 0;
    uint64_t max_tol = 0;
    uint64_t prev_key = 0;
    bool have_prev = false;

    for (auto item = next(); item.has_value(); item = next()) {
        const auto [kp, tol] = *item;
        if (tol == 0)
            throw InvalidEpsilon();
        ++count;
        if (have_prev) {
            if (kp.key < prev_key)
                throw UnsortedData("keys must be nondecreasing");
            if (kp.key == prev_key)
                continue;
        }
        prev_key = kp.key;
        have_prev = true;
        max_tol = std::max(max_tol, tol);
        if (!fitter.add(kp.key, int64_t(kp.position), int64_t(tol))) {
            model.segments.push_back(to_segment(fitter.finish()));
            fitter.reset();
            fitter.add(kp.key, int64_t(kp.position), int64_t(tol));
        }
    }
    if (count == 0)
        throw EmptyInput();
    model.segments.push_back(to_segment(fitter.finish()));
    model.epsilon = max_tol;
    model.key_count = count;
    return model;
}

}  // namespace detail

/// Minimum-size piecewise linear epsilon-approximation of a sorted sequence.
/// Single left-to-right pass, O(n) time.
PlaModel build_optimal_pla(std::span<const KeyPoint> points, uint64_t epsilon);

/// Streaming variant: next() yields std::optional<KeyPoint>, each point is
/// inspected exactly once.
template <typename Source>
PlaModel build_optimal_pla_from_source(Source&& next, uint64_t epsilon) {
    if (epsilon == 0)
        throw InvalidEpsilon();
    auto wrapped = [&next, epsilon]() -> std::optional<RangedPoint> {
        auto p = next();
        if (!p.has_value())
            return std::nullopt;
        return RangedPoint{*p, epsilon};
    };
    return detail::build_pla_stream(wrapped);
}

/// Shrinking-cone heuristic. Valid but generally not minimal.
PlaModel build_greedy_pla(std::span<const KeyPoint> points, uint64_t epsilon);

/// Optimal build with a per-point tolerance.
PlaModel build_optimal_pla_ranged(std::span<const RangedPoint> points);

/// True iff every point satisfies |prediction - position| <= model.epsilon
/// under its responsible segment. Duplicate keys are checked at their first
/// occurrence, like the builders.
bool verify_epsilon(const PlaModel& model, std::span<const KeyPoint> points);

}  // namespace pgm
