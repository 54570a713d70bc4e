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
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pgm/compression.hpp"
#include "pgm/pgm_index.hpp"

namespace pgm {

/// Static multiway search tree with fixed node size, the cache-sensitive
/// baseline. Level 0 is a copy of the indexed keys; every upper level keeps
/// one separator per node of the level below.
class CssTree {
public:
    CssTree() = default;
    CssTree(std::span<const uint64_t> keys, size_t node_size);

    /// Rightmost index with keys[index] <= key; 0 when key precedes all.
    size_t rightmost_leq(uint64_t key) const;

    size_t size_bytes() const;
    size_t height() const { return levels_.size(); }

private:
    size_t node_size_ = 8;
    std::vector<std::vector<uint64_t>> levels_;  // levels_[0] = keys
};

enum class IndexKind { PgmRec, PgmBin, PgmCss, PgmCompressed, BinarySearch };

struct BenchConfig {
    IndexKind kind = IndexKind::PgmRec;
    uint64_t epsilon = 64;
    uint64_t epsilon_internal = 4;
};

struct BenchRecord {
    std::string index_name;
    uint64_t epsilon = 0;
    double build_ms = 0.0;
    uint64_t index_bytes = 0;
    double mean_query_ns = 0.0;
    double p99_query_ns = 0.0;
    double mean_abs_err = 0.0;
    std::vector<size_t> segments_per_level;
};

struct BenchResult {
    std::vector<BenchRecord> records;
    bool pass = false;  // true iff every index agreed with the oracle on every query
    uint64_t queries = 0;
};

/// Runs every configuration over the identical query stream, cross-checking
/// answers against whole-array binary search. Query keys are uniform over the
/// present keys unless universe_queries is set.
BenchResult run_bench(std::shared_ptr<const SortedKeys> data, std::span<const BenchConfig> configs,
                      uint64_t query_count, uint64_t seed, unsigned threads = 1,
                      bool universe_queries = false);

void write_bench_csv(std::ostream& os, std::span<const BenchRecord> records);

struct SavingsRow {
    uint64_t epsilon;
    uint64_t m_opt;
    uint64_t m_greedy;
    double saving_pct;   // (m_greedy - m_opt) / m_greedy * 100
    double m_opt_over_n;
};

/// Optimal-vs-greedy segment counts across a list of epsilons.
std::vector<SavingsRow> report_savings(const SortedKeys& data, std::span<const uint64_t> epsilons);

void write_savings_csv(std::ostream& os, std::span<const SavingsRow> rows);

/// Mean wall time per rank call over a seeded batch of present-key queries,
/// optionally fanned out across threads (each thread owns a slice, results
/// merged by mean).
double measure_mean_latency_ns(const std::function<uint64_t(uint64_t)>& rank_fn, const SortedKeys& data,
                               uint64_t batch, uint64_t seed, unsigned threads = 1);

BenchConfig parse_bench_config(const std::string& text);
std::string index_kind_name(IndexKind kind);

}  // namespace pgm
