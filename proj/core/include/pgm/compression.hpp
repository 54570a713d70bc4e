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
#include <span>
#include <string>
#include <vector>

#include "pgm/detail/bits.hpp"
#include "pgm/pgm_index.hpp"

namespace pgm {

/// Dictionary of distinct slopes plus the per-segment assignment, the result
/// of solving minimum stabbing over the segments' slope intervals.
struct SlopeTable {
    std::vector<double> table;              // t representative slopes
    std::vector<SlopeRange> group_ranges;   // running intersection behind each entry
    detail::PackedIntVector assignment;     // segment j -> table index, ceil(log2 t) bits each

    size_t distinct() const { return table.size(); }

    /// 64t + m*ceil(log2 t) bits.
    size_t size_bits() const { return table.size() * 64 + assignment.bit_size(); }
};

/// Minimum number of distinct slopes stabbing every open interval.
/// O(m log m): lexicographic sort, then maximal prefixes of mutually
/// intersecting intervals, one representative inside each running
/// intersection.
SlopeTable minimize_slopes(std::span<const SlopeRange> intervals);

/// Monotone integer sequence in Elias-Fano layout with constant-time access.
class InterceptStore {
public:
    InterceptStore() = default;

    uint64_t access(size_t j) const { return ((high_.select1(j) - j) << low_bits_) | low_.get(j); }

    size_t size() const { return count_; }
    uint64_t universe() const { return universe_; }
    size_t size_bits() const { return low_.bit_size() + high_.bit_size() + high_.sample_bits(); }

    friend InterceptStore encode_intercepts(std::span<const uint64_t> intercepts, uint64_t n);
    friend struct InterceptStoreIo;

private:
    uint64_t universe_ = 0;
    size_t count_ = 0;
    uint8_t low_bits_ = 0;
    detail::PackedIntVector low_;
    detail::SelectableBits high_;
};

/// Encodes a nondecreasing sequence of integers < n.
InterceptStore encode_intercepts(std::span<const uint64_t> intercepts, uint64_t n);

inline uint64_t intercept_access(const InterceptStore& store, size_t j) { return store.access(j); }

/// One level of a compressed index. Levels with fewer than 8 segments keep
/// their plain floats: the dictionary overhead dominates tiny levels.
struct CompressedLevel {
    std::vector<uint64_t> first_keys;
    bool is_compressed = false;
    uint32_t epsilon = 0;
    uint32_t epsilon_effective = 0;  // epsilon + 1 when compressed

    SlopeTable slopes;
    InterceptStore intercepts;

    std::vector<double> plain_slopes;
    std::vector<double> plain_intercepts;

    size_t segment_count() const { return first_keys.size(); }

    double slope_at(size_t j) const {
        return is_compressed ? slopes.table[slopes.assignment.get(j)] : plain_slopes[j];
    }
    double intercept_at(size_t j) const {
        return is_compressed ? double(intercepts.access(j)) : plain_intercepts[j];
    }

    size_t size_bytes() const;
};

/// Query-equivalent compressed form of a PgmIndex: slopes dictionary-coded,
/// intercepts succinct, windows one wider per compressed level.
class CompressedPgm {
public:
    CompressedPgm() = default;

    uint64_t rank(uint64_t key) const { return rank_impl(key, nullptr); }
    uint32_t probe_window(uint64_t key) const;
    std::vector<uint32_t> window_trace(uint64_t key) const;

    size_t height() const { return levels_.size(); }
    const std::vector<CompressedLevel>& levels() const { return levels_; }
    uint64_t epsilon_leaf() const { return eps_leaf_; }
    uint64_t epsilon_internal() const { return eps_internal_; }
    uint64_t key_count() const { return data_ ? data_->keys.size() : 0; }
    size_t size_bytes() const;

    const SortedKeys& data() const { return *data_; }
    std::shared_ptr<const SortedKeys> data_ptr() const { return data_; }

    void save(const std::string& path) const;
    static CompressedPgm load(const std::string& path, std::shared_ptr<const SortedKeys> data);

    friend CompressedPgm build_compressed(const PgmIndex& index);

private:
    uint64_t rank_impl(uint64_t key, std::vector<uint32_t>* trace) const;

    std::shared_ptr<const SortedKeys> data_;
    std::vector<CompressedLevel> levels_;  // root first
    uint64_t eps_leaf_ = 0;
    uint64_t eps_internal_ = 0;
};

CompressedPgm build_compressed(const PgmIndex& index);

inline uint64_t compressed_rank(const CompressedPgm& index, uint64_t key) { return index.rank(key); }

}  // namespace pgm
