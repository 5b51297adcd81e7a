/*
 * Copyright (c) the mrdikit authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef MRDIKIT_UUID_HPP
#define MRDIKIT_UUID_HPP

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace mrdikit {

/// Regex source for the canonical 8-4-4-4-12 lowercase hex UUID form.
/// Shared between the parser, the schema layer and the session codec.
inline constexpr std::string_view kUuidPattern =
    "^[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}$";

/// True iff `s` is a canonical lowercase 8-4-4-4-12 UUID.
inline bool is_uuid(std::string_view s) {
  if (s.size() != 36) return false;
  for (std::size_t i = 0; i < 36; ++i) {
    const char c = s[i];
    if (i == 8 || i == 13 || i == 18 || i == 23) {
      if (c != '-') return false;
    } else if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
      return false;
    }
  }
  return true;
}

/// Name of the environment variable that switches UUID generation to a
/// deterministic stream. Meant for reproducible fixtures and golden tests.
inline constexpr const char* kUuidSeedEnvVar = "MRDIKIT_UUID_SEED";

/// Produces version-4 UUIDs. By default the stream is seeded from the
/// system entropy source; setting MRDIKIT_UUID_SEED=<integer> makes the
/// stream deterministic, and an explicit seed constructor does the same.
class UuidSource {
 public:
  UuidSource() : rng_(initial_seed()) {}
  explicit UuidSource(std::uint64_t seed) : rng_(seed) {}

  std::string next() {
    std::uint64_t hi = rng_();
    std::uint64_t lo = rng_();
    // version nibble = 4, variant bits = 10
    hi = (hi & 0xffffffffffff0fffULL) | 0x0000000000004000ULL;
    lo = (lo & 0x3fffffffffffffffULL) | 0x8000000000000000ULL;
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(36);
    auto put = [&](std::uint64_t word, int nibbles) {
      for (int i = nibbles - 1; i >= 0; --i)
        out.push_back(hex[(word >> (4 * i)) & 0xf]);
    };
    put(hi >> 32, 8);
    out.push_back('-');
    put(hi >> 16, 4);
    out.push_back('-');
    put(hi, 4);
    out.push_back('-');
    put(lo >> 48, 4);
    out.push_back('-');
    put(lo, 12);
    return out;
  }

  /// The seed the environment requests, if any.
  static std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv(kUuidSeedEnvVar);
    if (v == nullptr || *v == '\0') return std::nullopt;
    char* end = nullptr;
    unsigned long long parsed = std::strtoull(v, &end, 10);
    if (end == nullptr || *end != '\0') return std::nullopt;
    return static_cast<std::uint64_t>(parsed);
  }

 private:
  static std::uint64_t initial_seed() {
    if (auto s = env_seed()) return *s;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }

  std::mt19937_64 rng_;
};

}  // namespace mrdikit

#endif  // MRDIKIT_UUID_HPP
