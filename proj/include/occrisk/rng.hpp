// Copyright 2026 The occrisk Authors
//
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

#ifndef OCCRISK__RNG_HPP_
#define OCCRISK__RNG_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>

namespace occrisk
{

/// SplitMix64 finalizer. Bijective 64-bit mixing function.
constexpr std::uint64_t mix64(std::uint64_t z)
{
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: output n is mix64(key + (n + 1) * gamma), so a stream is fully
/// described by (key, counter) and every platform replays the same sequence. Substreams are
/// derived by hashing a stream id into a fresh key.
class CounterRng
{
public:
  static constexpr std::uint64_t gamma = 0x9e3779b97f4a7c15ULL;

  explicit constexpr CounterRng(std::uint64_t key, std::uint64_t counter = 0)
  : key_(key), counter_(counter)
  {
  }

  constexpr std::uint64_t key() const { return key_; }
  constexpr std::uint64_t counter() const { return counter_; }

  constexpr std::uint64_t next_u64()
  {
    ++counter_;
    return mix64(key_ + counter_ * gamma);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1).
  double uniform_open()
  {
    double u = 0.0;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi)
  {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1ULL;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  /// Standard normal via Box-Muller (one draw per pair of uniforms, no caching so the
  /// stream position is a pure function of the number of calls).
  double normal()
  {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  constexpr CounterRng substream(std::uint64_t stream_id) const
  {
    return CounterRng(mix64(key_ ^ mix64(stream_id + gamma)));
  }

private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace occrisk

#endif  // OCCRISK__RNG_HPP_
