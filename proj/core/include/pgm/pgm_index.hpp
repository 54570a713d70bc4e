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

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pgm/pla.hpp"

namespace pgm {

/// The indexed data: a sorted array of keys, optionally carrying one
/// fixed-width payload block per key.
struct SortedKeys {
    std::vector<uint64_t> keys;
    std::vector<uint8_t> payload;
    size_t payload_width = 0;

    size_t size() const { return keys.size(); }

    std::span<const uint8_t> payload_at(size_t i) const {
        return std::span<const uint8_t>(payload).subspan(i * payload_width, payload_width);
    }

    /// Throws UnsortedData / ConfigError when the invariants do not hold.
    void validate() const;
};

struct LevelStats {
    std::vector<size_t> segments_per_level;  // root first
    std::vector<double> fanout_per_level;    // realized fan-out of each level
};

/// Result of a range query: a view over the underlying array.
struct RangeResult {
    std::span<const uint64_t> keys;
    size_t first_position = 0;
    const SortedKeys* data = nullptr;

    const uint64_t* begin() const { return keys.data(); }
    const uint64_t* end() const { return keys.data() + keys.size(); }
    size_t size() const { return keys.size(); }

    std::span<const uint8_t> payload_at(size_t i) const { return data->payload_at(first_position + i); }
};

/// Recursive PGM-index: a hierarchy of optimal PLA-models where each level
/// indexes the first keys of the level below and the last level indexes the
/// data array. Immutable after construction; reads are thread-safe.
class PgmIndex {
public:
    PgmIndex() = default;

    /// Number of keys strictly smaller than `key`.
    uint64_t rank(uint64_t key) const { return rank_impl(key, nullptr); }

    bool member(uint64_t key) const;
    std::optional<uint64_t> predecessor(uint64_t key) const;
    std::optional<std::span<const uint8_t>> lookup(uint64_t key) const;
    RangeResult range(uint64_t lo, uint64_t hi) const;

    /// Size of the final binary-search interval examined for `key`.
    uint32_t probe_window(uint64_t key) const;

    /// Window sizes per level, root to leaf, the last entry being the final
    /// data-array search interval.
    std::vector<uint32_t> window_trace(uint64_t key) const;

    size_t height() const { return levels_.size(); }
    const std::vector<PlaModel>& levels() const { return levels_; }
    uint64_t epsilon_leaf() const { return eps_leaf_; }
    uint64_t epsilon_internal() const { return eps_internal_; }
    uint64_t key_count() const { return data_ ? data_->keys.size() : 0; }
    uint64_t total_segments() const;
    LevelStats stats() const;

    /// Bytes of the index structure itself (24 bytes per stored segment);
    /// the data array is not counted.
    size_t size_bytes() const { return total_segments() * 24; }

    const SortedKeys& data() const { return *data_; }
    std::shared_ptr<const SortedKeys> data_ptr() const { return data_; }

    void save(const std::string& path) const;
    static PgmIndex load(const std::string& path, std::shared_ptr<const SortedKeys> data);

    friend PgmIndex build_index(std::shared_ptr<const SortedKeys> data, uint64_t epsilon_leaf,
                                uint64_t epsilon_internal);

private:
    uint64_t rank_impl(uint64_t key, std::vector<uint32_t>* trace) const;

    std::shared_ptr<const SortedKeys> data_;
    std::vector<PlaModel> levels_;  // root first, levels_.back() indexes the data
    uint64_t eps_leaf_ = 0;
    uint64_t eps_internal_ = 0;
};

/// Builds the recursive index. epsilon_internal defaults to 4.
PgmIndex build_index(std::shared_ptr<const SortedKeys> data, uint64_t epsilon_leaf,
                     uint64_t epsilon_internal = 4);

/// Convenience overload copying a bare key vector.
PgmIndex build_index(std::vector<uint64_t> keys, uint64_t epsilon_leaf, uint64_t epsilon_internal = 4);

namespace detail {

/// Floored min-rule prediction of segment `j` of `level` for `key`, clamped
/// into [0, below_size-1]. The min with the next segment's intercept keeps
/// the estimate sound for keys falling between two segments.
int64_t routed_prediction(const PlaModel& level, size_t j, uint64_t key, uint64_t below_size);

struct SearchResult {
    size_t index;
    uint32_t window;
};

/// Rightmost segment of `level` with first_key <= key, located through a
/// window of radius eps around pos. The examined interval never exceeds
/// 2*eps+1 entries; the answer may sit one slot left of it.
SearchResult route_in_window(const PlaModel& level, int64_t pos, uint64_t eps, uint64_t key);

/// Windowed lower bound over the data array. When every key in the window
/// is smaller than `key`, the window necessarily ends inside a run of
/// duplicates and the answer is the end of that run.
SearchResult leaf_lower_bound(std::span<const uint64_t> keys, int64_t pos, uint64_t eps, uint64_t key);

}  // namespace detail

}  // namespace pgm
