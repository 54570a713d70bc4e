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
#include <string>

#include "pgm/pgm_index.hpp"

namespace pgm {

enum class Distribution { Uniform, Zipf, Lognormal, File };

/// What to generate: uniform over [0, universe), Zipf over value-ranks with
/// exponent `shape`, lognormal with sigma `shape` scaled by 1e9, or a file in
/// the dataset format.
struct DatasetSpec {
    Distribution dist = Distribution::Uniform;
    uint64_t n = 0;
    uint64_t seed = 0;
    uint64_t universe = uint64_t(1) << 32;  // uniform only
    double shape = 1.0;                     // zipf s or lognormal sigma
    std::string path;                       // file only

    void validate() const;
};

/// Deterministic splitmix64 generator. All sampling is implemented on top of
/// it so identical specs produce byte-identical datasets on any platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, bound) via 128-bit multiply.
    uint64_t bounded(uint64_t bound) {
        return uint64_t((unsigned __int128)(next()) * bound >> 64);
    }

    /// Uniform in (0, 1).
    double next_double() {
        return (double(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller.
    double next_normal() {
        double u1 = next_double();
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    uint64_t state_;
};

SortedKeys gen_dataset(const DatasetSpec& spec);
SortedKeys load_dataset(const std::string& path);
void save_dataset(const SortedKeys& keys, const std::string& path);

}  // namespace pgm
