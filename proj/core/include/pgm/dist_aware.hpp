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
#include <span>
#include <string>
#include <vector>

#include "pgm/pla.hpp"

namespace pgm {

/// A key together with its query probability.
struct WeightedKey {
    uint64_t key;
    double probability;
};

/// Per-segment weight bookkeeping: cum_prob is the probability of landing in
/// the segment, max_child_prob the heaviest child below it (a key at the
/// leaf level, a segment above).
struct NodeWeight {
    double cum_prob;
    double max_child_prob;
};

struct CostReport {
    double avg_window_log;  // sum_i p_i * sum_levels log2(window)
    double entropy;         // sum_i p_i * log2(1/p_i)
};

/// Distribution-aware PGM-index. Keys queried with probability p get a leaf
/// tolerance of min{ceil(1/p), epsilon}, so hot keys end in tighter windows.
/// Searches expand their window outward from the prediction until the
/// boundary certifies the answer, then binary search inside, which keeps the
/// realized window at error+1 positions.
class DistAwarePgm {
public:
    DistAwarePgm() = default;

    /// Exact rank among the weighted keys.
    uint64_t rank(uint64_t key) const { return rank_impl(key, nullptr); }

    /// Realized window sizes per level, root to leaf.
    std::vector<uint32_t> window_trace(uint64_t key) const;

    /// Realized window of the final data-array search.
    uint32_t leaf_window(uint64_t key) const;

    size_t height() const { return levels_.size(); }
    const std::vector<PlaModel>& levels() const { return levels_; }
    const std::vector<std::vector<NodeWeight>>& weights() const { return weights_; }
    const std::vector<uint64_t>& keys() const { return keys_; }
    const std::vector<uint32_t>& leaf_tolerances() const { return leaf_tol_; }
    uint64_t epsilon() const { return epsilon_; }

    friend DistAwarePgm build_dist_aware(std::span<const WeightedKey> input, uint64_t epsilon);

private:
    uint64_t rank_impl(uint64_t key, std::vector<uint32_t>* trace) const;

    std::vector<uint64_t> keys_;
    std::vector<double> probs_;
    std::vector<uint32_t> leaf_tol_;
    std::vector<PlaModel> levels_;                 // root first
    std::vector<std::vector<NodeWeight>> weights_;  // aligned with levels_
    uint64_t epsilon_ = 0;
};

/// Builds the index from strictly increasing keys whose probabilities sum to
/// 1 within 1e-9.
DistAwarePgm build_dist_aware(std::span<const WeightedKey> input, uint64_t epsilon);

inline uint64_t dist_rank(const DistAwarePgm& index, uint64_t key) { return index.rank(key); }

/// Measures the realized window trend of a workload against its entropy.
CostReport expected_cost_report(const DistAwarePgm& index, std::span<const WeightedKey> workload);

/// Normalized Zipf probabilities over n ranks with exponent s.
std::vector<double> zipf_probabilities(size_t n, double s);

/// Workload files are CSV rows `key,probability`, optionally headed by
/// `key,probability`.
std::vector<WeightedKey> load_workload(const std::string& path);
void save_workload(std::span<const WeightedKey> workload, const std::string& path);

}  // namespace pgm
