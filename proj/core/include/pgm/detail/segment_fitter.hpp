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

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace pgm::detail {

// The fitter grows one stripe at a time: a maximal run of points
// (x_i, y_i) with per-point tolerances t_i that admits a line f with
// y_i - t_i <= f(x_i) <= y_i + t_i for every point. Feasibility is
// tracked through the convex hulls of the upper bounds (x, y+t) and the
// lower bounds (x, y-t); the stripe closes as soon as the extreme-slope
// "rectangle" spanned by the hulls would be violated. All geometry runs
// on 128-bit integers, so stripe boundaries are exact.

struct HullPoint {
    uint64_t x;
    int64_t y;
};

struct HullSlope {
    __int128 dx;
    __int128 dy;
};

inline HullSlope slope_of(const HullPoint& from, const HullPoint& to) {
    return {__int128(to.x) - __int128(from.x), __int128(to.y) - __int128(from.y)};
}

// Valid whenever both dx values share a sign.
inline bool slope_less(const HullSlope& a, const HullSlope& b) { return a.dy * b.dx < a.dx * b.dy; }
inline bool slope_greater(const HullSlope& a, const HullSlope& b) { return a.dy * b.dx > a.dx * b.dy; }

inline __int128 cross(const HullPoint& o, const HullPoint& a, const HullPoint& b) {
    return (__int128(a.x) - o.x) * (__int128(b.y) - o.y) - (__int128(a.y) - o.y) * (__int128(b.x) - o.x);
}

inline long double to_ld(__int128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? -(unsigned __int128)v : (unsigned __int128)v;
    long double r = (long double)(uint64_t)(u >> 64) * 18446744073709551616.0L + (long double)(uint64_t)u;
    return neg ? -r : r;
}

inline long double slope_value(const HullSlope& s) { return to_ld(s.dy) / to_ld(s.dx); }

/// Parameters of a closed stripe, ready to become a Segment.
struct FittedStripe {
    uint64_t first_key;
    int64_t first_position;
    uint64_t covered;       // distinct points in the stripe
    double slope;           // midpoint of the feasible slope interval
    double intercept;       // value of the fitted line at first_key
    double slope_lo;        // open feasible interval around slope
    double slope_hi;
};

class SegmentFitter {
public:
    bool empty() const { return count_ == 0; }
    uint64_t covered() const { return count_; }

    /// Tries to extend the stripe with point (x, y) and tolerance tol >= 1.
    /// x must strictly exceed every previously added x. Returns false and
    /// leaves the stripe untouched when the point does not fit; the caller
    /// then emits the stripe via finish() and starts over.
    bool add(uint64_t x, int64_t y, int64_t tol) {
        HullPoint hi{x, y + tol};
        HullPoint lo{x, y - tol};

        if (count_ == 0) {
            first_x_ = x;
            first_y_ = y;
            rect_[0] = hi;
            rect_[1] = lo;
            upper_.clear();
            lower_.clear();
            upper_.push_back(hi);
            lower_.push_back(lo);
            upper_start_ = lower_start_ = 0;
            count_ = 1;
            return true;
        }
        if (count_ == 1) {
            rect_[2] = lo;
            rect_[3] = hi;
            upper_.push_back(hi);
            lower_.push_back(lo);
            count_ = 2;
            return true;
        }

        auto min_slope = slope_of(rect_[0], rect_[2]);
        auto max_slope = slope_of(rect_[1], rect_[3]);
        if (slope_less(slope_of(rect_[2], hi), min_slope) || slope_greater(slope_of(rect_[3], lo), max_slope))
            return false;

        if (slope_less(slope_of(rect_[1], hi), max_slope)) {
            // New upper bound tightens the max slope; pivot on the lower hull.
            auto best = slope_of(lower_[lower_start_], hi);
            size_t best_i = lower_start_;
            for (size_t i = lower_start_ + 1; i < lower_.size(); ++i) {
                auto val = slope_of(lower_[i], hi);
                if (slope_greater(val, best))
                    break;
                best = val;
                best_i = i;
            }
            rect_[1] = lower_[best_i];
            rect_[3] = hi;
            lower_start_ = best_i;

            size_t end = upper_.size();
            while (end >= upper_start_ + 2 && cross(upper_[end - 2], upper_[end - 1], hi) <= 0)
                --end;
            upper_.resize(end);
            upper_.push_back(hi);
        }

        if (slope_greater(slope_of(rect_[0], lo), min_slope)) {
            // New lower bound tightens the min slope; pivot on the upper hull.
            auto best = slope_of(upper_[upper_start_], lo);
            size_t best_i = upper_start_;
            for (size_t i = upper_start_ + 1; i < upper_.size(); ++i) {
                auto val = slope_of(upper_[i], lo);
                if (slope_less(val, best))
                    break;
                best = val;
                best_i = i;
            }
            rect_[0] = upper_[best_i];
            rect_[2] = lo;
            upper_start_ = best_i;

            size_t end = lower_.size();
            while (end >= lower_start_ + 2 && cross(lower_[end - 2], lower_[end - 1], lo) >= 0)
                --end;
            lower_.resize(end);
            lower_.push_back(lo);
        }

        ++count_;
        return true;
    }

    FittedStripe finish() const {
        FittedStripe out;
        out.first_key = first_x_;
        out.first_position = first_y_;
        out.covered = count_;

        if (count_ == 1) {
            // A lone point puts no constraint on the slope. The open interval
            // is truncated to (0, 2^53) and the line pinned to the point.
            out.slope = 1.0;
            out.slope_lo = 0.0;
            out.slope_hi = 9007199254740992.0;
            out.intercept = double(first_y_);
            return out;
        }

        long double lo_ld = slope_value(slope_of(rect_[0], rect_[2]));
        long double hi_ld = slope_value(slope_of(rect_[1], rect_[3]));
        long double slope = (lo_ld + hi_ld) / 2.0L;

        // The intercept range at the chosen slope comes from the retained
        // hulls: f must stay below every upper bound and above every lower
        // bound. Centering the intercept centers the maximum signed error.
        long double t_hi = std::numeric_limits<long double>::max();
        for (size_t i = upper_start_; i < upper_.size(); ++i) {
            long double v = (long double)upper_[i].y - slope * (long double)(upper_[i].x - first_x_);
            if (v < t_hi)
                t_hi = v;
        }
        long double t_lo = std::numeric_limits<long double>::lowest();
        for (size_t i = lower_start_; i < lower_.size(); ++i) {
            long double v = (long double)lower_[i].y - slope * (long double)(lower_[i].x - first_x_);
            if (v > t_lo)
                t_lo = v;
        }
        // Tiny upward bias: predictions are floored against integer ranks, so
        // the safe band is [y-t, y+t+1) and only the low side can be hurt by
        // float rounding.
        long double intercept = (t_lo + t_hi) / 2.0L + 0x1p-20L;

        out.slope = double(slope);
        out.intercept = double(intercept);
        out.slope_lo = double(lo_ld);
        out.slope_hi = double(hi_ld);
        if (!(out.slope_lo < out.slope))
            out.slope_lo = std::nextafter(out.slope, -std::numeric_limits<double>::infinity());
        if (!(out.slope < out.slope_hi))
            out.slope_hi = std::nextafter(out.slope, std::numeric_limits<double>::infinity());
        return out;
    }

    void reset() {
        count_ = 0;
        upper_.clear();
        lower_.clear();
        upper_start_ = lower_start_ = 0;
    }

private:
    std::vector<HullPoint> upper_;  // lower hull of the (x, y+t) bounds
    std::vector<HullPoint> lower_;  // upper hull of the (x, y-t) bounds
    size_t upper_start_ = 0;
    size_t lower_start_ = 0;
    HullPoint rect_[4];
    uint64_t first_x_ = 0;
    int64_t first_y_ = 0;
    uint64_t count_ = 0;
};

}  // namespace pgm::detail
