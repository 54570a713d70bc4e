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

#include "pgm/dist_aware.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pgm/pgm_index.hpp"

namespace pgm {

namespace {

uint32_t tolerance_for(double inv_probability, uint64_t epsilon) {
    double y = std::ceil(inv_probability);
    if (y >= double(epsilon))
        return uint32_t(epsilon);
    return y < 1.0 ? 1u : uint32_t(y);
}

void validate_workload(std::span<const WeightedKey> input) {
    double sum = 0.0;
    for (const auto& wk : input) {
        if (!(wk.probability > 0.0) || wk.probability > 1.0)
            throw InvalidProbability("probabilities must lie in (0, 1]");
        sum += wk.probability;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw InvalidProbability("probabilities must sum to 1");
}

struct ExpandResult {
    size_t index;
    uint32_t window;
};

// Rightmost index with keys[index] <= key. The window grows one slot at a
// time until its edges certify the answer lies inside.
ExpandResult expand_rightmost_leq(std::span<const uint64_t> keys, int64_t pos, uint64_t key) {
    const size_t m = keys.size();
    size_t lo = size_t(pos), hi = size_t(pos);
    while (lo > 0 && keys[lo] > key)
        --lo;
    while (hi + 1 < m && keys[hi + 1] <= key)
        ++hi;
    auto it = std::upper_bound(keys.begin() + lo, keys.begin() + hi + 1, key);
    size_t j = it == keys.begin() + lo ? lo : size_t(it - keys.begin()) - 1;
    return {j, uint32_t(hi - lo + 1)};
}

// Exact lower bound of `key`, window certified on both edges.
ExpandResult expand_lower_bound(std::span<const uint64_t> keys, int64_t pos, uint64_t key) {
    const size_t n = keys.size();
    size_t lo = size_t(pos), hi = size_t(pos);
    while (lo > 0 && keys[lo - 1] >= key)
        --lo;
    while (hi + 1 < n && keys[hi] < key)
        ++hi;
    auto it = std::lower_bound(keys.begin() + lo, keys.begin() + hi + 1, key);
    return {size_t(it - keys.begin()), uint32_t(hi - lo + 1)};
}

}  // namespace

DistAwarePgm build_dist_aware(std::span<const WeightedKey> input, uint64_t epsilon) {
    if (input.empty())
        throw EmptyInput();
    if (epsilon == 0)
        throw InvalidEpsilon();
    validate_workload(input);
    for (size_t i = 1; i < input.size(); ++i)
        if (input[i].key <= input[i - 1].key)
            throw UnsortedData("weighted keys must be strictly increasing");

    DistAwarePgm out;
    out.epsilon_ = epsilon;
    out.keys_.reserve(input.size());
    out.probs_.reserve(input.size());
    out.leaf_tol_.reserve(input.size());
    for (const auto& wk : input) {
        out.keys_.push_back(wk.key);
        out.probs_.push_back(wk.probability);
        out.leaf_tol_.push_back(tolerance_for(1.0 / wk.probability, epsilon));
    }

    // Leaf level: one y-range per key.
    std::vector<RangedPoint> points;
    points.reserve(input.size());
    for (size_t i = 0; i < input.size(); ++i)
        points.push_back({{out.keys_[i], i}, out.leaf_tol_[i]});

    std::vector<PlaModel> bottom_up;
    std::vector<std::vector<NodeWeight>> weights_up;
    bottom_up.push_back(build_optimal_pla_ranged(points));
    {
        std::vector<NodeWeight> w;
        size_t start = 0;
        for (const auto& s : bottom_up.back().segments) {
            NodeWeight nw{0.0, 0.0};
            for (size_t i = start; i < start + s.covered_count; ++i) {
                nw.cum_prob += out.probs_[i];
                nw.max_child_prob = std::max(nw.max_child_prob, out.probs_[i]);
            }
            start += s.covered_count;
            w.push_back(nw);
        }
        weights_up.push_back(std::move(w));
    }

    // Upper levels: the first key of each segment, weighted by how likely the
    // query is to route through it versus land on its heaviest child.
    while (bottom_up.back().segments.size() > 1) {
        const auto& prev = bottom_up.back().segments;
        const auto& prev_w = weights_up.back();
        points.clear();
        for (size_t j = 0; j < prev.size(); ++j) {
            uint32_t tol = tolerance_for(prev_w[j].cum_prob / prev_w[j].max_child_prob, epsilon);
            points.push_back({{prev[j].first_key, j}, tol});
        }
        bottom_up.push_back(build_optimal_pla_ranged(points));
        std::vector<NodeWeight> w;
        size_t start = 0;
        for (const auto& s : bottom_up.back().segments) {
            NodeWeight nw{0.0, 0.0};
            for (size_t j = start; j < start + s.covered_count; ++j) {
                nw.cum_prob += prev_w[j].cum_prob;
                nw.max_child_prob = std::max(nw.max_child_prob, prev_w[j].cum_prob);
            }
            start += s.covered_count;
            w.push_back(nw);
        }
        weights_up.push_back(std::move(w));
    }

    out.levels_.assign(bottom_up.rbegin(), bottom_up.rend());
    out.weights_.assign(weights_up.rbegin(), weights_up.rend());
    return out;
}

uint64_t DistAwarePgm::rank_impl(uint64_t key, std::vector<uint32_t>* trace) const {
    const uint64_t n = keys_.size();
    const uint64_t key_eff = key > keys_.front() ? key : keys_.front();

    size_t j = 0;
    std::vector<uint64_t> scratch;
    for (size_t l = 0; l + 1 < levels_.size(); ++l) {
        const auto& below = levels_[l + 1].segments;
        scratch.clear();
        scratch.reserve(below.size());
        for (const auto& s : below)
            scratch.push_back(s.first_key);
        int64_t pos = detail::routed_prediction(levels_[l], j, key_eff, below.size());
        auto r = expand_rightmost_leq(scratch, pos, key_eff);
        if (trace)
            trace->push_back(r.window);
        j = r.index;
    }

    int64_t pos = detail::routed_prediction(levels_.back(), j, key_eff, n);
    auto r = expand_lower_bound(keys_, pos, key);
    if (trace)
        trace->push_back(r.window);
    return r.index;
}

std::vector<uint32_t> DistAwarePgm::window_trace(uint64_t key) const {
    std::vector<uint32_t> trace;
    rank_impl(key, &trace);
    return trace;
}

uint32_t DistAwarePgm::leaf_window(uint64_t key) const {
    std::vector<uint32_t> trace;
    rank_impl(key, &trace);
    return trace.back();
}

CostReport expected_cost_report(const DistAwarePgm& index, std::span<const WeightedKey> workload) {
    validate_workload(workload);
    CostReport report{0.0, 0.0};
    for (const auto& wk : workload) {
        double level_sum = 0.0;
        for (uint32_t w : index.window_trace(wk.key))
            level_sum += std::log2(double(w));  // windows are always >= 1
        report.avg_window_log += wk.probability * level_sum;
        report.entropy += wk.probability * std::log2(1.0 / wk.probability);
    }
    return report;
}

std::vector<double> zipf_probabilities(size_t n, double s) {
    if (n == 0 || !(s > 0.0))
        throw InvalidSpec("zipf needs n >= 1 and s > 0");
    std::vector<double> p(n);
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
        p[i] = std::pow(double(i + 1), -s);
        total += p[i];
    }
    for (auto& v : p)
        v /= total;
    return p;
}

std::vector<WeightedKey> load_workload(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open " + path);
    std::vector<WeightedKey> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        if (lineno == 1 && line.rfind("key,", 0) == 0)
            continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw CorruptFile("workload line " + std::to_string(lineno) + " has no comma");
        try {
            uint64_t key = std::stoull(line.substr(0, comma));
            double prob = std::stod(line.substr(comma + 1));
            out.push_back({key, prob});
        } catch (const std::exception&) {
            throw CorruptFile("workload line " + std::to_string(lineno) + " does not parse");
        }
    }
    if (out.empty())
        throw EmptyInput();
    validate_workload(out);
    return out;
}

void save_workload(std::span<const WeightedKey> workload, const std::string& path) {
    std::ofstream os(path);
    if (!os)
        throw IoError("cannot open " + path + " for writing");
    os << "key,probability\n";
    os.precision(17);
    for (const auto& wk : workload)
        os << wk.key << ',' << wk.probability << '\n';
    if (!os)
        throw IoError("write failed: " + path);
}

}  // namespace pgm
