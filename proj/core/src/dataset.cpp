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

#include "pgm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "pgm/detail/io.hpp"

namespace pgm {

void DatasetSpec::validate() const {
    if (dist == Distribution::File) {
        if (path.empty())
            throw InvalidSpec("file dataset needs a path");
        return;
    }
    if (n == 0)
        throw InvalidSpec("dataset size must be >= 1");
    switch (dist) {
        case Distribution::Uniform:
            if (universe == 0)
                throw InvalidSpec("uniform universe must be positive");
            break;
        case Distribution::Zipf:
        case Distribution::Lognormal:
            if (!(shape > 0.0))
                throw InvalidSpec("distribution parameter must be positive");
            break;
        default:
            break;
    }
}

SortedKeys gen_dataset(const DatasetSpec& spec) {
    spec.validate();
    if (spec.dist == Distribution::File)
        return load_dataset(spec.path);

    Rng rng(spec.seed);
    SortedKeys out;
    out.keys.reserve(spec.n);

    switch (spec.dist) {
        case Distribution::Uniform:
            for (uint64_t i = 0; i < spec.n; ++i)
                out.keys.push_back(rng.bounded(spec.universe));
            break;
        case Distribution::Zipf: {
            // Keys are value-ranks 1..n drawn with probability ~ rank^-s,
            // which yields a heavy-duplicate multiset.
            std::vector<double> cum(spec.n);
            double total = 0.0;
            for (uint64_t r = 0; r < spec.n; ++r) {
                total += std::pow(double(r + 1), -spec.shape);
                cum[r] = total;
            }
            for (uint64_t i = 0; i < spec.n; ++i) {
                double u = rng.next_double() * total;
                auto it = std::lower_bound(cum.begin(), cum.end(), u);
                out.keys.push_back(uint64_t(it - cum.begin()) + 1);
            }
            break;
        }
        case Distribution::Lognormal:
            for (uint64_t i = 0; i < spec.n; ++i) {
                double v = std::exp(spec.shape * rng.next_normal()) * 1e9;
                if (v >= 9.2e18)
                    v = 9.2e18;
                out.keys.push_back(uint64_t(v));
            }
            break;
        default:
            break;
    }
    std::sort(out.keys.begin(), out.keys.end());
    return out;
}

void save_dataset(const SortedKeys& keys, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot open " + path + " for writing");
    detail::write_magic(os, "PGMD");
    detail::write_u16(os, 1);
    detail::write_u64(os, keys.keys.size());
    for (uint64_t k : keys.keys)
        detail::write_u64(os, k);
    if (!os)
        throw IoError("write failed: " + path);
}

SortedKeys load_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open " + path);
    detail::expect_magic(is, "PGMD");
    if (detail::read_u16(is) != 1)
        throw CorruptFile("unsupported dataset format version");
    uint64_t n = detail::read_u64(is);
    SortedKeys out;
    out.keys.resize(n);
    for (uint64_t i = 0; i < n; ++i) {
        out.keys[i] = detail::read_u64(is);
        if (i > 0 && out.keys[i] < out.keys[i - 1])
            throw UnsortedData("dataset keys are not sorted");
    }
    char extra;
    if (is.read(&extra, 1) && is.gcount() == 1)
        throw CorruptFile("trailing bytes after dataset");
    return out;
}

}  // namespace pgm
