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

#include <bit>
#include <cstdint>
#include <vector>

namespace pgm::detail {

/// Fixed-width packed array of unsigned integers, width 0..64 bits.
/// Width 0 stores nothing and reads back 0 for every index.
class PackedIntVector {
public:
    PackedIntVector() = default;

    PackedIntVector(size_t count, uint8_t width)
        : count_(count), width_(width), words_((count * width + 63) / 64, 0) {}

    void set(size_t i, uint64_t value) {
        if (width_ == 0)
            return;
        size_t bit = i * width_;
        size_t word = bit >> 6;
        unsigned off = bit & 63;
        uint64_t mask = width_ == 64 ? ~uint64_t(0) : ((uint64_t(1) << width_) - 1);
        value &= mask;
        words_[word] = (words_[word] & ~(mask << off)) | (value << off);
        if (off + width_ > 64)
            words_[word + 1] = (words_[word + 1] & ~(mask >> (64 - off))) | (value >> (64 - off));
    }

    uint64_t get(size_t i) const {
        if (width_ == 0)
            return 0;
        size_t bit = i * width_;
        size_t word = bit >> 6;
        unsigned off = bit & 63;
        uint64_t mask = width_ == 64 ? ~uint64_t(0) : ((uint64_t(1) << width_) - 1);
        uint64_t v = words_[word] >> off;
        if (off + width_ > 64)
            v |= words_[word + 1] << (64 - off);
        return v & mask;
    }

    size_t size() const { return count_; }
    uint8_t width() const { return width_; }
    size_t bit_size() const { return count_ * width_; }
    const std::vector<uint64_t>& words() const { return words_; }
    std::vector<uint64_t>& words() { return words_; }

    void assign_raw(size_t count, uint8_t width, std::vector<uint64_t> words) {
        count_ = count;
        width_ = width;
        words_ = std::move(words);
    }

private:
    size_t count_ = 0;
    uint8_t width_ = 0;
    std::vector<uint64_t> words_;
};

/// Plain bit vector with sampled select1 support. Samples record the position
/// of every 512th set bit; a query pops words from the nearest sample.
class SelectableBits {
public:
    static constexpr size_t kSampleRate = 512;

    SelectableBits() = default;

    explicit SelectableBits(size_t bit_count) : bit_count_(bit_count), words_((bit_count + 63) / 64, 0) {}

    void set(size_t i) { words_[i >> 6] |= uint64_t(1) << (i & 63); }

    bool test(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

    size_t bit_size() const { return bit_count_; }

    size_t one_count() const { return ones_; }

    /// Must be called once after all set() calls.
    void build_select() {
        samples_.clear();
        ones_ = 0;
        for (size_t w = 0; w < words_.size(); ++w) {
            uint64_t word = words_[w];
            while (word) {
                if (ones_ % kSampleRate == 0)
                    samples_.push_back(w * 64 + std::countr_zero(word));
                ++ones_;
                word &= word - 1;
            }
        }
    }

    /// Position of the j-th set bit (0-based). Precondition: j < one_count().
    size_t select1(size_t j) const {
        size_t pos = samples_[j / kSampleRate];
        size_t remaining = j % kSampleRate;
        size_t w = pos >> 6;
        uint64_t word = words_[w] & (~uint64_t(0) << (pos & 63));
        while (true) {
            unsigned pc = std::popcount(word);
            if (remaining < pc)
                break;
            remaining -= pc;
            word = words_[++w];
        }
        while (remaining--)
            word &= word - 1;
        return w * 64 + std::countr_zero(word);
    }

    size_t sample_bits() const { return samples_.size() * 64; }
    const std::vector<uint64_t>& words() const { return words_; }

    void assign_raw(size_t bit_count, std::vector<uint64_t> words) {
        bit_count_ = bit_count;
        words_ = std::move(words);
        build_select();
    }

private:
    size_t bit_count_ = 0;
    size_t ones_ = 0;
    std::vector<uint64_t> words_;
    std::vector<uint64_t> samples_;
};

inline uint8_t bit_width_for(uint64_t max_value) {
    return max_value == 0 ? 0 : uint8_t(std::bit_width(max_value));
}

}  // namespace pgm::detail
