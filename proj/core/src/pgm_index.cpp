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

#include "pgm/pgm_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "pgm/detail/io.hpp"

namespace pgm {

void SortedKeys::validate() const {
    if (!std::is_sorted(keys.begin(), keys.end()))
        throw UnsortedData("keys are not sorted");
    if (payload_width == 0) {
        if (!payload.empty())
            throw ConfigError("payload bytes present but payload_width is 0");
    } else if (payload.size() != keys.size() * payload_width) {
        throw ConfigError("payload size does not match key count");
    }
}

namespace detail {

int64_t routed_prediction(const PlaModel& level, size_t j, uint64_t key, uint64_t below_size) {
    const Segment& s = level.segments[j];
    uint64_t k = key > s.first_key ? key : s.first_key;
    double v = double(k - s.first_key) * s.slope + s.intercept;
    double f = std::floor(v);
    int64_t pos;
    if (!(f > 0))
        pos = 0;
    else if (f >= double(below_size))
        pos = int64_t(below_size) - 1;
    else
        pos = int64_t(f);

    if (j + 1 < level.segments.size()) {
        double b = std::floor(level.segments[j + 1].intercept);
        int64_t bound = !(b > 0) ? 0 : (b >= double(below_size) ? int64_t(below_size) - 1 : int64_t(b));
        pos = std::min(pos, bound);
    }
    return pos;
}

SearchResult route_in_window(const PlaModel& level, int64_t pos, uint64_t eps, uint64_t key) {
    const auto& segs = level.segments;
    const size_t m = segs.size();
    size_t lo = uint64_t(pos) > eps ? size_t(pos - int64_t(eps)) : 0;
    size_t hi = std::min<size_t>(size_t(pos) + eps, m - 1);
    auto first = segs.begin() + lo;
    auto last = segs.begin() + hi + 1;
    auto it = std::upper_bound(first, last, key,
                               [](uint64_t k, const Segment& s) { return k < s.first_key; });
    size_t q = size_t(it - segs.begin());
    size_t j = q == lo ? (lo == 0 ? 0 : lo - 1) : q - 1;
    return {j, uint32_t(hi - lo + 1)};
}

SearchResult leaf_lower_bound(std::span<const uint64_t> keys, int64_t pos, uint64_t eps, uint64_t key) {
    const size_t n = keys.size();
    size_t lo = uint64_t(pos) > eps ? size_t(pos - int64_t(eps)) : 0;
    size_t hi = std::min<size_t>(size_t(pos) + eps, n - 1);
    uint32_t window = uint32_t(hi - lo + 1);
    auto it = std::lower_bound(keys.begin() + lo, keys.begin() + hi + 1, key);
    size_t q = size_t(it - keys.begin());
    if (q == hi + 1 && hi + 1 < n && keys[hi] < key) {
        // Every key in the window is smaller, so the window ended inside a
        // run of duplicates; the rank is the end of that run.
        q = size_t(std::upper_bound(keys.begin() + hi + 1, keys.end(), keys[hi]) - keys.begin());
    }
    return {q, window};
}

}  // namespace detail

uint64_t PgmIndex::rank_impl(uint64_t key, std::vector<uint32_t>* trace) const {
    const auto& keys = data_->keys;
    const uint64_t n = keys.size();
    const uint64_t key_eff = key > keys.front() ? key : keys.front();

    size_t j = 0;
    for (size_t l = 0; l + 1 < levels_.size(); ++l) {
        const PlaModel& below = levels_[l + 1];
        int64_t pos = detail::routed_prediction(levels_[l], j, key_eff, below.segments.size());
        auto r = detail::route_in_window(below, pos, eps_internal_, key_eff);
        if (trace)
            trace->push_back(r.window);
        j = r.index;
    }

    int64_t pos = detail::routed_prediction(levels_.back(), j, key_eff, n);
    auto r = detail::leaf_lower_bound(keys, pos, eps_leaf_, key);
    if (trace)
        trace->push_back(r.window);
    return r.index;
}

bool PgmIndex::member(uint64_t key) const {
    uint64_t r = rank(key);
    return r < data_->keys.size() && data_->keys[r] == key;
}

std::optional<uint64_t> PgmIndex::predecessor(uint64_t key) const {
    uint64_t r = rank(key);
    if (r == 0)
        return std::nullopt;
    return data_->keys[r - 1];
}

std::optional<std::span<const uint8_t>> PgmIndex::lookup(uint64_t key) const {
    if (data_->payload_width == 0)
        return std::nullopt;
    uint64_t r = rank(key);
    if (r >= data_->keys.size() || data_->keys[r] != key)
        return std::nullopt;
    return data_->payload_at(r);
}

RangeResult PgmIndex::range(uint64_t lo, uint64_t hi) const {
    if (lo > hi)
        throw InvalidRange();
    uint64_t begin = rank(lo);
    uint64_t end = hi == std::numeric_limits<uint64_t>::max() ? data_->keys.size() : rank(hi + 1);
    return RangeResult{std::span<const uint64_t>(data_->keys).subspan(begin, end - begin), size_t(begin),
                       data_.get()};
}

uint32_t PgmIndex::probe_window(uint64_t key) const {
    std::vector<uint32_t> trace;
    rank_impl(key, &trace);
    return trace.back();
}

std::vector<uint32_t> PgmIndex::window_trace(uint64_t key) const {
    std::vector<uint32_t> trace;
    rank_impl(key, &trace);
    return trace;
}

uint64_t PgmIndex::total_segments() const {
    uint64_t total = 0;
    for (const auto& level : levels_)
        total += level.segments.size();
    return total;
}

LevelStats PgmIndex::stats() const {
    LevelStats st;
    for (size_t l = 0; l < levels_.size(); ++l) {
        size_t m = levels_[l].segments.size();
        st.segments_per_level.push_back(m);
        uint64_t below = l + 1 < levels_.size() ? levels_[l + 1].segments.size() : data_->keys.size();
        st.fanout_per_level.push_back(double(below) / double(m));
    }
    return st;
}

PgmIndex build_index(std::shared_ptr<const SortedKeys> data, uint64_t epsilon_leaf, uint64_t epsilon_internal) {
    if (!data || data->keys.empty())
        throw EmptyInput();
    if (epsilon_leaf == 0 || epsilon_internal == 0)
        throw InvalidEpsilon();
    data->validate();

    PgmIndex index;
    index.data_ = std::move(data);
    index.eps_leaf_ = epsilon_leaf;
    index.eps_internal_ = epsilon_internal;

    const auto& keys = index.data_->keys;
    size_t i = 0;
    auto source = [&]() -> std::optional<KeyPoint> {
        if (i == keys.size())
            return std::nullopt;
        KeyPoint p{keys[i], i};
        ++i;
        return p;
    };
    std::vector<PlaModel> bottom_up;
    bottom_up.push_back(build_optimal_pla_from_source(source, epsilon_leaf));

    while (bottom_up.back().segments.size() > 1) {
        const auto& prev = bottom_up.back().segments;
        std::vector<KeyPoint> points;
        points.reserve(prev.size());
        for (size_t s = 0; s < prev.size(); ++s)
            points.push_back({prev[s].first_key, s});
        bottom_up.push_back(build_optimal_pla(points, epsilon_internal));
    }

    index.levels_.assign(bottom_up.rbegin(), bottom_up.rend());
    return index;
}

PgmIndex build_index(std::vector<uint64_t> keys, uint64_t epsilon_leaf, uint64_t epsilon_internal) {
    auto data = std::make_shared<SortedKeys>();
    data->keys = std::move(keys);
    return build_index(std::move(data), epsilon_leaf, epsilon_internal);
}

void PgmIndex::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot open " + path + " for writing");
    detail::write_magic(os, "PGMI");
    detail::write_u16(os, 1);
    detail::write_u32(os, uint32_t(eps_leaf_));
    detail::write_u32(os, uint32_t(eps_internal_));
    detail::write_u64(os, data_->keys.size());
    detail::write_u16(os, uint16_t(levels_.size()));
    for (const auto& level : levels_) {
        detail::write_u64(os, level.segments.size());
        for (const auto& s : level.segments) {
            detail::write_u64(os, s.first_key);
            detail::write_f64(os, s.slope);
            detail::write_f64(os, s.intercept);
        }
    }
    if (!os)
        throw IoError("write failed: " + path);
}

PgmIndex PgmIndex::load(const std::string& path, std::shared_ptr<const SortedKeys> data) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open " + path);
    detail::expect_magic(is, "PGMI");
    uint16_t version = detail::read_u16(is);
    if (version != 1)
        throw CorruptFile("unsupported index format version");

    PgmIndex index;
    index.eps_leaf_ = detail::read_u32(is);
    index.eps_internal_ = detail::read_u32(is);
    uint64_t n = detail::read_u64(is);
    uint16_t level_count = detail::read_u16(is);
    if (index.eps_leaf_ == 0 || level_count == 0)
        throw CorruptFile("invalid header");
    if (!data || data->keys.size() != n)
        throw ConfigError("index was built over a different key count");

    index.data_ = std::move(data);
    index.levels_.resize(level_count);
    for (size_t l = 0; l < level_count; ++l) {
        uint64_t m = detail::read_u64(is);
        if (m == 0)
            throw CorruptFile("empty level");
        auto& level = index.levels_[l];
        level.epsilon = l + 1 == level_count ? index.eps_leaf_ : index.eps_internal_;
        level.key_count = l + 1 == level_count ? n : 0;
        level.segments.resize(m);
        uint64_t prev_key = 0;
        for (uint64_t s = 0; s < m; ++s) {
            auto& seg = level.segments[s];
            seg.first_key = detail::read_u64(is);
            seg.slope = detail::read_f64(is);
            seg.intercept = detail::read_f64(is);
            seg.slope_range = {std::nextafter(seg.slope, -std::numeric_limits<double>::infinity()),
                               std::nextafter(seg.slope, std::numeric_limits<double>::infinity())};
            seg.covered_count = 0;
            if (s > 0 && seg.first_key <= prev_key)
                throw CorruptFile("segment keys not strictly increasing");
            prev_key = seg.first_key;
        }
    }
    if (index.levels_.front().segments.size() != 1)
        throw CorruptFile("root level must hold exactly one segment");
    return index;
}

}  // namespace pgm
