#pragma once

#include <cstdint>
#include <random>

namespace dbl {

using Engine = std::mt19937_64;

/// Independent stream families inside one replication.
enum class StreamKind : std::uint32_t { passengers = 1, travel = 2, synthetic = 3 };

/// Deterministic stream for (base_seed, replication, kind, index). Changing any
/// component yields an unrelated stream; nothing is shared between runs.
inline Engine make_stream(std::uint64_t base_seed, std::uint64_t replication, StreamKind kind,
                          std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(replication), static_cast<std::uint32_t>(replication >> 32),
                    static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Engine(seq);
}

/// Standard-normal draws for one road segment's travel-time noise.
struct NoiseStream {
  Engine engine;
  std::normal_distribution<double> normal{0.0, 1.0};

  double draw() { return normal(engine); }
};

}  // namespace dbl
