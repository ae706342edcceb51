// Copyright 2026 The recflow Authors
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

#ifndef RECFLOW_COMMON_HPP
#define RECFLOW_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace recflow {

// Edge weights and relevance-derived costs are carried as integer
// micro-units so that flow costs stay exact.
using Fixed = std::int64_t;
inline constexpr Fixed kWeightScale = 1'000'000;

inline Fixed to_fixed(double value) {
  return static_cast<Fixed>(std::llround(value * static_cast<double>(kWeightScale)));
}

inline double from_fixed(Fixed value) {
  return static_cast<double>(value) / static_cast<double>(kWeightScale);
}

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  explicit DataError(const std::string& message) : Error(message) {}
};

// A well-formed instance that admits no feasible solution.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& message) : Error(message) {}
};

// An internal accounting identity failed; indicates a bug, not bad input.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& message) : std::logic_error(message) {}
};

// splitmix64; used to derive independent RNG streams from one seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// 53-bit uniform draw in [0,1); fully determined by the generator's
// output sequence, unlike std::uniform_real_distribution.
template <typename Rng>
double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// FNV-1a, used for config fingerprints.
inline std::uint64_t fnv1a(const void* data, std::size_t size,
                           std::uint64_t state = 0xcbf29ce484222325ULL) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    state ^= bytes[i];
    state *= 0x100000001b3ULL;
  }
  return state;
}

inline std::uint64_t fnv1a(const std::string& text,
                           std::uint64_t state = 0xcbf29ce484222325ULL) {
  return fnv1a(text.data(), text.size(), state);
}

// Deterministic decimal formatting (locale-free) for CSV/JSON emission.
inline std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

// Renders a micro-unit weight as a plain decimal with six fraction
// digits; the canonical on-disk form, parseable back without rounding.
inline std::string format_fixed(Fixed value) {
  const char* sign = value < 0 ? "-" : "";
  const Fixed magnitude = value < 0 ? -value : value;
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%s%lld.%06lld", sign,
                static_cast<long long>(magnitude / kWeightScale),
                static_cast<long long>(magnitude % kWeightScale));
  return buffer;
}

// Parses the canonical decimal form exactly into micro-units.
// Falls back to strtod for non-canonical spellings (exponents etc.).
inline Fixed parse_fixed(const std::string& text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
    negative = text[pos] == '-';
    ++pos;
  }
  Fixed integer_part = 0;
  std::size_t digits = 0;
  while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
    integer_part = integer_part * 10 + (text[pos] - '0');
    ++pos;
    ++digits;
  }
  Fixed fraction = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    Fixed scale = kWeightScale;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      scale /= 10;
      if (scale == 0) break;  // beyond micro precision: not canonical
      fraction += (text[pos] - '0') * scale;
      ++pos;
      ++digits;
    }
  }
  if (pos != text.size() || digits == 0) {
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0') {
      throw DataError("not a number: '" + text + "'");
    }
    return to_fixed(value);
  }
  const Fixed magnitude = integer_part * kWeightScale + fraction;
  return negative ? -magnitude : magnitude;
}

}  // namespace recflow

#endif  // RECFLOW_COMMON_HPP
