#pragma once

#include <cstdint>
#include <random>

namespace mmnn {

/// Independent mt19937_64 stream per (seed, stream) key. Trials use their
/// index as the stream, so parallel runs draw the same numbers as serial ones.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits. Spelled out instead of
  /// std::uniform_real_distribution so values agree across standard libraries.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, m).
  std::uint64_t below(std::uint64_t m) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(m)) % m;
  }

  static constexpr const char* name() { return "mt19937_64/seed_seq(seed,stream)"; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mmnn
