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

#include "pgm/pla.hpp"

#include <cmath>
#include <limits>

namespace pgm {

PlaModel build_optimal_pla(std::span<const KeyPoint> points, uint64_t epsilon) {
    if (epsilon == 0)
        throw InvalidEpsilon();
    if (points.empty())
        throw EmptyInput();
    size_t i = 0;
    auto next = [&]() -> std::optional<RangedPoint> {
        if (i == points.size())
            return std::nullopt;
        return RangedPoint{points[i++], epsilon};
    };
    return detail::build_pla_stream(next);
}

PlaModel build_optimal_pla_ranged(std::span<const RangedPoint> points) {
    if (points.empty())
        throw EmptyInput();
    size_t i = 0;
    auto next = [&]() -> std::optional<RangedPoint> {
        if (i == points.size())
            return std::nullopt;
        return points[i++];
    };
    return detail::build_pla_stream(next);
}

namespace {

// Exact rational bound on a cone edge, denominator > 0.
struct ConeBound {
    __int128 num;
    __int128 den;
};

bool bound_less(const ConeBound& a, const ConeBound& b) { return a.num * b.den < b.num * a.den; }

}  // namespace

PlaModel build_greedy_pla(std::span<const KeyPoint> points, uint64_t epsilon) {
    if (epsilon == 0)
        throw InvalidEpsilon();
    if (points.empty())
        throw EmptyInput();

    PlaModel model;
    model.epsilon = epsilon;
    model.key_count = points.size();

    const auto eps = __int128(epsilon);
    uint64_t origin_key = 0;
    int64_t origin_pos = 0;
    uint64_t covered = 0;
    ConeBound lo{}, hi{};
    bool lo_set = false, hi_set = false;
    uint64_t prev_key = 0;
    bool have_prev = false;

    auto emit = [&] {
        Segment s;
        s.first_key = origin_key;
        s.covered_count = covered;
        if (covered == 1 || !lo_set) {
            s.slope = 1.0;
            s.slope_range = {0.0, 9007199254740992.0};
            s.intercept = double(origin_pos);
        } else {
            long double lo_ld = detail::to_ld(lo.num) / detail::to_ld(lo.den);
            long double hi_ld = detail::to_ld(hi.num) / detail::to_ld(hi.den);
            s.slope = double((lo_ld + hi_ld) / 2.0L);
            // Cone lines are anchored at the origin point, so the intercept is
            // exact; the small up-bias keeps floored predictions off the low
            // boundary under float rounding.
            s.intercept = double(origin_pos) + 0x1p-20;
            s.slope_range = {double(lo_ld), double(hi_ld)};
            if (!(s.slope_range.lo < s.slope))
                s.slope_range.lo = std::nextafter(s.slope, -std::numeric_limits<double>::infinity());
            if (!(s.slope < s.slope_range.hi))
                s.slope_range.hi = std::nextafter(s.slope, std::numeric_limits<double>::infinity());
        }
        model.segments.push_back(s);
    };

    auto start = [&](uint64_t key, int64_t pos) {
        origin_key = key;
        origin_pos = pos;
        covered = 1;
        lo_set = hi_set = false;
    };

    for (const auto& p : points) {
        if (have_prev) {
            if (p.key < prev_key)
                throw UnsortedData("keys must be nondecreasing");
            if (p.key == prev_key)
                continue;
        }
        prev_key = p.key;
        have_prev = true;

        if (covered == 0) {
            start(p.key, int64_t(p.position));
            continue;
        }

        __int128 dx = __int128(p.key) - origin_key;
        __int128 dy = __int128(int64_t(p.position)) - origin_pos;
        ConeBound new_lo{dy - eps, dx};
        ConeBound new_hi{dy + eps, dx};
        ConeBound cand_lo = (!lo_set || bound_less(lo, new_lo)) ? new_lo : lo;
        ConeBound cand_hi = (!hi_set || bound_less(new_hi, hi)) ? new_hi : hi;
        if (bound_less(cand_hi, cand_lo)) {
            emit();
            start(p.key, int64_t(p.position));
            continue;
        }
        lo = cand_lo;
        hi = cand_hi;
        lo_set = hi_set = true;
        ++covered;
    }
    emit();
    return model;
}

bool verify_epsilon(const PlaModel& model, std::span<const KeyPoint> points) {
    if (model.segments.empty())
        return false;
    const uint64_t n = model.key_count;
    uint64_t prev_key = 0;
    bool have_prev = false;
    for (const auto& p : points) {
        if (have_prev && p.key == prev_key)
            continue;
        prev_key = p.key;
        have_prev = true;
        const Segment& s = model.segments[model.segment_for_key(p.key)];
        if (p.key < s.first_key)
            return false;
        uint64_t pred = segment_predict(s, p.key, n);
        uint64_t diff = pred >= p.position ? pred - p.position : p.position - pred;
        if (diff > model.epsilon)
            return false;
    }
    return true;
}

}  // namespace pgm
