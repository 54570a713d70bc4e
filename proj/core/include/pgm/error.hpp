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

#include <stdexcept>
#include <string>

namespace pgm {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyInput : Error {
    EmptyInput() : Error("empty input sequence") {}
};

struct InvalidEpsilon : Error {
    InvalidEpsilon() : Error("epsilon must be a positive integer") {}
};

struct InvalidRange : Error {
    InvalidRange() : Error("range lower bound exceeds upper bound") {}
};

struct InvalidInterval : Error {
    explicit InvalidInterval(const std::string& what) : Error(what) {}
};

struct InvalidSequence : Error {
    explicit InvalidSequence(const std::string& what) : Error(what) {}
};

struct InvalidProbability : Error {
    explicit InvalidProbability(const std::string& what) : Error(what) {}
};

struct InsufficientSamples : Error {
    InsufficientSamples() : Error("power-law fit needs at least 3 samples with distinct epsilons") {}
};

struct DegenerateFit : Error {
    DegenerateFit() : Error("power-law fit returned a non-positive exponent") {}
};

struct InfeasibleBound : Error {
    explicit InfeasibleBound(const std::string& what) : Error(what) {}
};

struct NoisyMeasurement : Error {
    explicit NoisyMeasurement(const std::string& what) : Error(what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(what) {}
};

struct CorruptFile : Error {
    explicit CorruptFile(const std::string& what) : Error(what) {}
};

struct UnsortedData : Error {
    explicit UnsortedData(const std::string& what) : Error(what) {}
};

struct InvalidSpec : Error {
    explicit InvalidSpec(const std::string& what) : Error(what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace pgm
