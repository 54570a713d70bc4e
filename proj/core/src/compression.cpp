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

#include "pgm/compression.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "pgm/detail/io.hpp"

namespace pgm {

SlopeTable minimize_slopes(std::span<const SlopeRange> intervals) {
    if (intervals.empty())
        throw EmptyInput();
    for (const auto& iv : intervals)
        if (!(iv.lo < iv.hi))
            throw InvalidInterval("slope interval is empty");

    const size_t m = intervals.size();
    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (intervals[a].lo != intervals[b].lo)
            return intervals[a].lo < intervals[b].lo;
        return intervals[a].hi < intervals[b].hi;
    });

    SlopeTable out;
    std::vector<uint32_t> group_of(m);
    double run_lo = intervals[order[0]].lo;
    double run_hi = intervals[order[0]].hi;

    auto close_group = [&] {
        double mid = (run_lo + run_hi) / 2.0;
        if (!(run_lo < mid))
            mid = std::nextafter(run_lo, run_hi);
        if (!(mid < run_hi))
            mid = std::nextafter(run_hi, run_lo);
        out.table.push_back(mid);
        out.group_ranges.push_back({run_lo, run_hi});
    };

    group_of[order[0]] = 0;
    for (size_t i = 1; i < m; ++i) {
        const auto& iv = intervals[order[i]];
        if (iv.lo < run_hi) {
            // Still pairwise intersecting: lows are sorted, so the running
            // intersection is (iv.lo, min(run_hi, iv.hi)).
            run_lo = iv.lo;
            run_hi = std::min(run_hi, iv.hi);
        } else {
            close_group();
            run_lo = iv.lo;
            run_hi = iv.hi;
        }
        group_of[order[i]] = uint32_t(out.table.size());
    }
    close_group();

    size_t t = out.table.size();
    out.assignment = detail::PackedIntVector(m, detail::bit_width_for(t - 1));
    for (size_t j = 0; j < m; ++j)
        out.assignment.set(j, group_of[j]);
    return out;
}

InterceptStore encode_intercepts(std::span<const uint64_t> intercepts, uint64_t n) {
    if (intercepts.empty())
        throw EmptyInput();
    if (n == 0)
        throw InvalidSequence("universe must be positive");
    uint64_t prev = 0;
    for (size_t j = 0; j < intercepts.size(); ++j) {
        if (intercepts[j] >= n)
            throw InvalidSequence("value out of range");
        if (j > 0 && intercepts[j] < prev)
            throw InvalidSequence("sequence must be nondecreasing");
        prev = intercepts[j];
    }

    InterceptStore s;
    s.universe_ = n;
    s.count_ = intercepts.size();
    uint64_t per = n / s.count_;
    s.low_bits_ = per >= 2 ? uint8_t(std::bit_width(per) - 1) : 0;
    s.low_ = detail::PackedIntVector(s.count_, s.low_bits_);
    s.high_ = detail::SelectableBits(s.count_ + ((n - 1) >> s.low_bits_) + 1);
    for (size_t j = 0; j < intercepts.size(); ++j) {
        s.low_.set(j, intercepts[j] & ((s.low_bits_ == 64 ? 0 : (uint64_t(1) << s.low_bits_)) - 1));
        s.high_.set((intercepts[j] >> s.low_bits_) + j);
    }
    s.high_.build_select();
    return s;
}

size_t CompressedLevel::size_bytes() const {
    size_t bits = first_keys.size() * 64;
    if (is_compressed)
        bits += slopes.size_bits() + intercepts.size_bits();
    else
        bits += first_keys.size() * 128;
    return (bits + 7) / 8;
}

namespace {

struct LevelPoints {
    // Distinct (key, position) pairs the level approximates, in key order.
    std::vector<uint64_t> xs;
    std::vector<uint64_t> ys;
};

LevelPoints level_points(const PgmIndex& index, size_t level) {
    LevelPoints pts;
    if (level + 1 < index.height()) {
        const auto& below = index.levels()[level + 1].segments;
        pts.xs.reserve(below.size());
        pts.ys.reserve(below.size());
        for (size_t j = 0; j < below.size(); ++j) {
            pts.xs.push_back(below[j].first_key);
            pts.ys.push_back(j);
        }
    } else {
        const auto& keys = index.data().keys;
        for (size_t i = 0; i < keys.size(); ++i) {
            if (i > 0 && keys[i] == keys[i - 1])
                continue;
            pts.xs.push_back(keys[i]);
            pts.ys.push_back(i);
        }
    }
    return pts;
}

// Centered feasible intercepts for the assigned slopes, returned as floored
// integers, forced nondecreasing for the Elias-Fano layout.
std::vector<uint64_t> choose_intercepts(const CompressedLevel& lv, const LevelPoints& pts, uint32_t eps) {
    const size_t m = lv.first_keys.size();
    std::vector<uint64_t> out(m);
    size_t p = 0;
    int64_t prev = 0;
    for (size_t j = 0; j < m; ++j) {
        long double slope = lv.slopes.table[lv.slopes.assignment.get(j)];
        uint64_t fk = lv.first_keys[j];
        uint64_t next_fk = j + 1 < m ? lv.first_keys[j + 1] : std::numeric_limits<uint64_t>::max();
        long double t_lo = std::numeric_limits<long double>::lowest();
        long double t_hi = std::numeric_limits<long double>::max();
        for (; p < pts.xs.size() && (j + 1 == m || pts.xs[p] < next_fk); ++p) {
            long double base = slope * (long double)(pts.xs[p] - fk);
            t_lo = std::max(t_lo, (long double)pts.ys[p] - eps - base);
            t_hi = std::min(t_hi, (long double)pts.ys[p] + eps - base);
        }
        int64_t candidate = int64_t(std::floor(double((t_lo + t_hi) / 2.0L)));
        candidate = std::max(candidate, int64_t(0));
        if (j > 0 && candidate < prev)
            candidate = prev;
        out[j] = uint64_t(candidate);
        prev = candidate;
    }
    return out;
}

bool verify_level(const CompressedLevel& lv, const LevelPoints& pts, uint64_t below_size) {
    const size_t m = lv.first_keys.size();
    const int64_t bound = int64_t(lv.epsilon_effective);
    size_t p = 0;
    for (size_t j = 0; j < m; ++j) {
        double slope = lv.slope_at(j);
        double intercept = lv.intercept_at(j);
        uint64_t fk = lv.first_keys[j];
        uint64_t next_fk = j + 1 < m ? lv.first_keys[j + 1] : std::numeric_limits<uint64_t>::max();
        for (; p < pts.xs.size() && (j + 1 == m || pts.xs[p] < next_fk); ++p) {
            double v = std::floor(double(pts.xs[p] - fk) * slope + intercept);
            int64_t pred = !(v > 0) ? 0
                                    : (v >= double(below_size) ? int64_t(below_size) - 1 : int64_t(v));
            int64_t err = pred - int64_t(pts.ys[p]);
            if (err > bound || err < -bound)
                return false;
        }
    }
    return true;
}

int64_t c_routed_prediction(const CompressedLevel& lv, size_t j, uint64_t key, uint64_t below_size) {
    uint64_t fk = lv.first_keys[j];
    uint64_t k = key > fk ? key : fk;
    double v = std::floor(double(k - fk) * lv.slope_at(j) + lv.intercept_at(j));
    int64_t pos;
    if (!(v > 0))
        pos = 0;
    else if (v >= double(below_size))
        pos = int64_t(below_size) - 1;
    else
        pos = int64_t(v);

    if (j + 1 < lv.first_keys.size()) {
        double b = std::floor(lv.intercept_at(j + 1));
        int64_t bound = !(b > 0) ? 0 : (b >= double(below_size) ? int64_t(below_size) - 1 : int64_t(b));
        pos = std::min(pos, bound);
    }
    return pos;
}

detail::SearchResult route_in_window_keys(std::span<const uint64_t> first_keys, int64_t pos, uint64_t eps,
                                          uint64_t key) {
    const size_t m = first_keys.size();
    size_t lo = uint64_t(pos) > eps ? size_t(pos - int64_t(eps)) : 0;
    size_t hi = std::min<size_t>(size_t(pos) + eps, m - 1);
    auto it = std::upper_bound(first_keys.begin() + lo, first_keys.begin() + hi + 1, key);
    size_t q = size_t(it - first_keys.begin());
    size_t j = q == lo ? (lo == 0 ? 0 : lo - 1) : q - 1;
    return {j, uint32_t(hi - lo + 1)};
}

}  // namespace

CompressedPgm build_compressed(const PgmIndex& index) {
    CompressedPgm out;
    out.data_ = index.data_ptr();
    out.eps_leaf_ = index.epsilon_leaf();
    out.eps_internal_ = index.epsilon_internal();

    const size_t L = index.height();
    out.levels_.resize(L);
    for (size_t l = 0; l < L; ++l) {
        const auto& segs = index.levels()[l].segments;
        auto& lv = out.levels_[l];
        lv.epsilon = uint32_t(l + 1 == L ? out.eps_leaf_ : out.eps_internal_);
        lv.first_keys.reserve(segs.size());
        for (const auto& s : segs)
            lv.first_keys.push_back(s.first_key);

        uint64_t below_size =
            l + 1 < L ? index.levels()[l + 1].segments.size() : index.data().keys.size();

        if (segs.size() < 8) {
            lv.is_compressed = false;
            lv.epsilon_effective = lv.epsilon;
            lv.plain_slopes.reserve(segs.size());
            lv.plain_intercepts.reserve(segs.size());
            for (const auto& s : segs) {
                lv.plain_slopes.push_back(s.slope);
                lv.plain_intercepts.push_back(s.intercept);
            }
            continue;
        }

        lv.is_compressed = true;
        lv.epsilon_effective = lv.epsilon + 1;
        std::vector<SlopeRange> ranges;
        ranges.reserve(segs.size());
        for (const auto& s : segs)
            ranges.push_back(s.slope_range);
        lv.slopes = minimize_slopes(ranges);

        auto pts = level_points(index, l);
        uint64_t universe = below_size + lv.epsilon + 2;
        for (int attempt = 0;; ++attempt) {
            auto ints = choose_intercepts(lv, pts, lv.epsilon);
            lv.intercepts = encode_intercepts(ints, universe);
            if (verify_level(lv, pts, below_size))
                break;
            if (attempt >= 8)
                throw Error("slope compression could not preserve the error bound");
            // Float rounding pushed a prediction past the bound: nudge every
            // representative one ulp toward its group intersection center.
            for (size_t g = 0; g < lv.slopes.table.size(); ++g) {
                double center = (lv.slopes.group_ranges[g].lo + lv.slopes.group_ranges[g].hi) / 2.0;
                lv.slopes.table[g] = std::nextafter(lv.slopes.table[g], center);
            }
        }
    }
    return out;
}

uint64_t CompressedPgm::rank_impl(uint64_t key, std::vector<uint32_t>* trace) const {
    const auto& keys = data_->keys;
    const uint64_t n = keys.size();
    const uint64_t key_eff = key > keys.front() ? key : keys.front();

    size_t j = 0;
    for (size_t l = 0; l + 1 < levels_.size(); ++l) {
        const auto& below = levels_[l + 1];
        int64_t pos = c_routed_prediction(levels_[l], j, key_eff, below.first_keys.size());
        auto r = route_in_window_keys(below.first_keys, pos, levels_[l].epsilon_effective, key_eff);
        if (trace)
            trace->push_back(r.window);
        j = r.index;
    }

    int64_t pos = c_routed_prediction(levels_.back(), j, key_eff, n);
    auto r = detail::leaf_lower_bound(keys, pos, levels_.back().epsilon_effective, key);
    if (trace)
        trace->push_back(r.window);
    return r.index;
}

uint32_t CompressedPgm::probe_window(uint64_t key) const {
    std::vector<uint32_t> trace;
    rank_impl(key, &trace);
    return trace.back();
}

std::vector<uint32_t> CompressedPgm::window_trace(uint64_t key) const {
    std::vector<uint32_t> trace;
    rank_impl(key, &trace);
    return trace;
}

size_t CompressedPgm::size_bytes() const {
    size_t total = 0;
    for (const auto& lv : levels_)
        total += lv.size_bytes();
    return total;
}

struct InterceptStoreIo {
    static void save(std::ostream& os, const InterceptStore& s) {
        detail::write_u64(os, s.universe_);
        detail::write_u64(os, s.count_);
        detail::write_u8(os, s.low_bits_);
        detail::write_u64(os, s.low_.words().size());
        for (uint64_t w : s.low_.words())
            detail::write_u64(os, w);
        detail::write_u64(os, s.high_.bit_size());
        detail::write_u64(os, s.high_.words().size());
        for (uint64_t w : s.high_.words())
            detail::write_u64(os, w);
    }

    static InterceptStore load(std::istream& is) {
        InterceptStore s;
        s.universe_ = detail::read_u64(is);
        s.count_ = detail::read_u64(is);
        s.low_bits_ = detail::read_u8(is);
        uint64_t low_words = detail::read_u64(is);
        std::vector<uint64_t> lw(low_words);
        for (auto& w : lw)
            w = detail::read_u64(is);
        s.low_.assign_raw(s.count_, s.low_bits_, std::move(lw));
        uint64_t high_bits = detail::read_u64(is);
        uint64_t high_words = detail::read_u64(is);
        std::vector<uint64_t> hw(high_words);
        for (auto& w : hw)
            w = detail::read_u64(is);
        s.high_.assign_raw(high_bits, std::move(hw));
        if (s.high_.one_count() != s.count_)
            throw CorruptFile("intercept store bit count mismatch");
        return s;
    }
};

void CompressedPgm::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot open " + path + " for writing");
    detail::write_magic(os, "PGMC");
    detail::write_u16(os, 1);
    detail::write_u32(os, uint32_t(eps_leaf_));
    detail::write_u32(os, uint32_t(eps_internal_));
    detail::write_u64(os, data_->keys.size());
    detail::write_u16(os, uint16_t(levels_.size()));
    for (const auto& lv : levels_) {
        detail::write_u64(os, lv.first_keys.size());
        detail::write_u8(os, lv.is_compressed ? 1 : 0);
        detail::write_u32(os, lv.epsilon);
        detail::write_u32(os, lv.epsilon_effective);
        for (uint64_t k : lv.first_keys)
            detail::write_u64(os, k);
        if (lv.is_compressed) {
            detail::write_u32(os, uint32_t(lv.slopes.table.size()));
            for (double s : lv.slopes.table)
                detail::write_f64(os, s);
            detail::write_u8(os, lv.slopes.assignment.width());
            detail::write_u64(os, lv.slopes.assignment.words().size());
            for (uint64_t w : lv.slopes.assignment.words())
                detail::write_u64(os, w);
            InterceptStoreIo::save(os, lv.intercepts);
        } else {
            for (size_t j = 0; j < lv.first_keys.size(); ++j) {
                detail::write_f64(os, lv.plain_slopes[j]);
                detail::write_f64(os, lv.plain_intercepts[j]);
            }
        }
    }
    if (!os)
        throw IoError("write failed: " + path);
}

CompressedPgm CompressedPgm::load(const std::string& path, std::shared_ptr<const SortedKeys> data) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open " + path);
    detail::expect_magic(is, "PGMC");
    if (detail::read_u16(is) != 1)
        throw CorruptFile("unsupported compressed format version");

    CompressedPgm out;
    out.eps_leaf_ = detail::read_u32(is);
    out.eps_internal_ = detail::read_u32(is);
    uint64_t n = detail::read_u64(is);
    if (!data || data->keys.size() != n)
        throw ConfigError("index was built over a different key count");
    out.data_ = std::move(data);

    uint16_t level_count = detail::read_u16(is);
    out.levels_.resize(level_count);
    for (auto& lv : out.levels_) {
        uint64_t m = detail::read_u64(is);
        if (m == 0)
            throw CorruptFile("empty level");
        lv.is_compressed = detail::read_u8(is) != 0;
        lv.epsilon = detail::read_u32(is);
        lv.epsilon_effective = detail::read_u32(is);
        lv.first_keys.resize(m);
        for (auto& k : lv.first_keys)
            k = detail::read_u64(is);
        if (lv.is_compressed) {
            uint32_t t = detail::read_u32(is);
            lv.slopes.table.resize(t);
            for (auto& s : lv.slopes.table)
                s = detail::read_f64(is);
            lv.slopes.group_ranges.assign(t, SlopeRange{0.0, 0.0});
            uint8_t width = detail::read_u8(is);
            uint64_t words = detail::read_u64(is);
            std::vector<uint64_t> w(words);
            for (auto& x : w)
                x = detail::read_u64(is);
            lv.slopes.assignment.assign_raw(m, width, std::move(w));
            lv.intercepts = InterceptStoreIo::load(is);
        } else {
            lv.plain_slopes.resize(m);
            lv.plain_intercepts.resize(m);
            for (size_t j = 0; j < m; ++j) {
                lv.plain_slopes[j] = detail::read_f64(is);
                lv.plain_intercepts[j] = detail::read_f64(is);
            }
        }
    }
    return out;
}

}  // namespace pgm
