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
#include <istream>
#include <ostream>

#include "pgm/error.hpp"

namespace pgm::detail {

// All on-disk integers are little-endian, written byte by byte so the
// formats do not depend on host endianness.

inline void write_bytes(std::ostream& os, uint64_t v, int n) {
    unsigned char buf[8];
    for (int i = 0; i < n; ++i)
        buf[i] = (unsigned char)(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(buf), n);
}

inline void write_u16(std::ostream& os, uint16_t v) { write_bytes(os, v, 2); }
inline void write_u32(std::ostream& os, uint32_t v) { write_bytes(os, v, 4); }
inline void write_u64(std::ostream& os, uint64_t v) { write_bytes(os, v, 8); }
inline void write_u8(std::ostream& os, uint8_t v) { write_bytes(os, v, 1); }
inline void write_f64(std::ostream& os, double v) { write_bytes(os, std::bit_cast<uint64_t>(v), 8); }

inline uint64_t read_bytes(std::istream& is, int n) {
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), n);
    if (is.gcount() != n)
        throw CorruptFile("unexpected end of file");
    uint64_t v = 0;
    for (int i = 0; i < n; ++i)
        v |= uint64_t(buf[i]) << (8 * i);
    return v;
}

inline uint16_t read_u16(std::istream& is) { return uint16_t(read_bytes(is, 2)); }
inline uint32_t read_u32(std::istream& is) { return uint32_t(read_bytes(is, 4)); }
inline uint64_t read_u64(std::istream& is) { return read_bytes(is, 8); }
inline uint8_t read_u8(std::istream& is) { return uint8_t(read_bytes(is, 1)); }
inline double read_f64(std::istream& is) { return std::bit_cast<double>(read_bytes(is, 8)); }

inline void write_magic(std::ostream& os, const char (&magic)[5]) { os.write(magic, 4); }

inline void expect_magic(std::istream& is, const char (&magic)[5]) {
    char buf[4];
    is.read(buf, 4);
    if (is.gcount() != 4 || buf[0] != magic[0] || buf[1] != magic[1] || buf[2] != magic[2] || buf[3] != magic[3])
        throw CorruptFile("bad magic");
}

}  // namespace pgm::detail
